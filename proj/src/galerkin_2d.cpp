#include "multisol/galerkin_2d.hpp"

#include "kron.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace multisol {

GalerkinMatrices assemble_matrices(int degree) {
  if (degree < 3) {
    throw std::invalid_argument("assemble_matrices: need N >= 3 for an interior basis, got " +
                                std::to_string(degree));
  }
  const int m = degree - 1;
  GalerkinMatrices g{Matrix::Zero(m, m), Matrix::Zero(m, m)};
  for (int k = 0; k < m; ++k) {
    const double kk = k;
    g.stiffness(k, k) = 4.0 * kk + 6.0;
    g.mass(k, k) = 2.0 / (2.0 * kk + 1.0) + 2.0 / (2.0 * kk + 5.0);
    if (k + 2 < m) {
      g.mass(k, k + 2) = -2.0 / (2.0 * kk + 5.0);
      g.mass(k + 2, k) = g.mass(k, k + 2);
    }
  }
  return g;
}

Vector interpolate_source(const Function2D& f, int degree) {
  const LglRule rule = lgl_rule(degree);
  const Matrix r = projection_matrix(dirichlet_basis(degree), rule);
  Matrix values(rule.size(), rule.size());
  for (Eigen::Index l = 0; l < rule.size(); ++l) {
    for (Eigen::Index i = 0; i < rule.size(); ++i) values(i, l) = f(rule.nodes[i], rule.nodes[l]);
  }
  const Matrix projected = r * values * r.transpose();
  return Eigen::Map<const Vector>(projected.data(), projected.size());
}

double smoothed_plateau(double y, double kappa, double height) {
  const double pi = std::numbers::pi;
  auto ramp = [&](double t) {
    return 0.5 + t / (2.0 * kappa) + std::sin(pi * t / kappa) / (2.0 * pi);
  };
  if (y <= -1.0 + kappa) return height * ramp(2.0 * y + 2.0 - kappa);
  if (y >= 1.0 - kappa) return height - height * ramp(2.0 * y - 2.0 + kappa);
  return height;
}

Lifting2D::Lifting2D(EdgeData edges, double kappa) : edges_(std::move(edges)), kappa_(kappa) {
  if (!edges_.east || !edges_.north || !edges_.west || !edges_.south) {
    throw std::invalid_argument("Lifting2D: all four edge functions are required");
  }
}

double Lifting2D::operator()(double x, double y) const {
  const auto& e = edges_;
  return 0.25 * (2.0 * (1.0 - y) * e.south(x) + 2.0 * (1.0 + y) * e.north(x) +
                 2.0 * (1.0 - x) * e.west(y) + 2.0 * (1.0 + x) * e.east(y) -
                 (1.0 - x) * (1.0 - y) * e.west(-1.0) - (1.0 - x) * (1.0 + y) * e.north(-1.0) -
                 (1.0 + x) * (1.0 - y) * e.south(1.0) - (1.0 + x) * (1.0 + y) * e.east(1.0));
}

Lifting2D make_lifting(double kappa) {
  if (!(kappa > 0.0 && kappa < 1.0)) {
    throw std::invalid_argument("make_lifting: kappa must lie in (0, 1), got " + std::to_string(kappa));
  }
  auto plateau = [kappa](double t) { return smoothed_plateau(t, kappa); };
  auto zero = [](double) { return 0.0; };
  return Lifting2D(EdgeData{plateau, zero, plateau, zero}, kappa);
}

System2D::System2D(Problem2D problem)
    : problem_(std::move(problem)),
      modes_(problem_.degree - 1),
      rule_(lgl_rule(problem_.degree)),
      basis_(dirichlet_basis(problem_.degree)),
      matrices_(assemble_matrices(problem_.degree)) {
  if (!(problem_.diffusion > 0.0)) throw std::invalid_argument("System2D: diffusion must be positive");
  info_.problem_id = problem_.id;
  info_.degree = problem_.degree;
  info_.parameters = problem_.parameters;

  node_values_ = basis_.values(rule_.nodes);
  projection_ = projection_matrix(basis_, rule_);

  const Eigen::Index p = rule_.size();
  lifting_nodal_ = Matrix::Zero(p, p);
  lifting_term_ = Vector::Zero(size());
  if (problem_.lifting) {
    for (Eigen::Index l = 0; l < p; ++l) {
      for (Eigen::Index i = 0; i < p; ++i) {
        lifting_nodal_(i, l) = (*problem_.lifting)(rule_.nodes[i], rule_.nodes[l]);
      }
    }
    // (grad I_N G, grad phi_m phi_n) from the Legendre coefficients of I_N G.
    const Matrix t = forward_transform(rule_);
    const Matrix g_hat = t * lifting_nodal_ * t.transpose();
    const Vector norms = legendre_norms(problem_.degree + 1);
    const Matrix d = derivative_matrix(problem_.degree + 1);
    const Matrix mass_mixed = basis_.coeffs * norms.asDiagonal();
    const Matrix stiff_mixed = basis_.derivative_coeffs(1) * norms.asDiagonal() * d;
    const Matrix lt = stiff_mixed * g_hat * mass_mixed.transpose() +
                      mass_mixed * g_hat * stiff_mixed.transpose();
    lifting_term_ = Eigen::Map<const Vector>(lt.data(), lt.size());
  }

  source_ = problem_.source ? interpolate_source(problem_.source, problem_.degree) : Vector::Zero(size());
}

Vector System2D::linear_term(const Vector& u) const {
  const Eigen::Map<const Matrix> uu(u.data(), modes_, modes_);
  const Matrix& a = matrices_.stiffness;
  const Matrix& b = matrices_.mass;
  const Matrix r = b * uu * a.transpose() + a * uu * b;
  return Eigen::Map<const Vector>(r.data(), r.size());
}

Matrix System2D::linear_operator() const {
  const Matrix& a = matrices_.stiffness;
  const Matrix& b = matrices_.mass;
  return detail::kron(a, b) + detail::kron(b, a.transpose());
}

Matrix System2D::nodal_values(const Vector& u) const {
  const Eigen::Map<const Matrix> uu(u.data(), modes_, modes_);
  return node_values_ * uu * node_values_.transpose() + lifting_nodal_;
}

namespace {

Matrix apply_pointwise(const Matrix& z, const std::function<double(double)>& f, const char* what) {
  Matrix out(z.rows(), z.cols());
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      const double v = f(z(i, j));
      if (!std::isfinite(v)) {
        throw EvaluationError(std::string(what) + ": non-finite nonlinearity at node (" +
                                  std::to_string(i) + ", " + std::to_string(j) + ")",
                              i + z.rows() * j);
      }
      out(i, j) = v;
    }
  }
  return out;
}

}  // namespace

Vector System2D::nonlinear_term(const Vector& u) const {
  const Matrix fz = apply_pointwise(nodal_values(u), problem_.nonlinearity.value, "nonlinear_term");
  const Matrix g = projection_ * fz * projection_.transpose();
  return Eigen::Map<const Vector>(g.data(), g.size());
}

Vector System2D::residual(const Vector& u) const {
  if (u.size() != size()) throw std::invalid_argument("System2D::residual: size mismatch");
  Vector r = problem_.diffusion * (linear_term(u) + lifting_term_) + nonlinear_term(u) - source_;
  require_finite(r, "System2D::residual");
  return r;
}

Matrix System2D::jacobian(const Vector& u) const {
  if (u.size() != size()) throw std::invalid_argument("System2D::jacobian: size mismatch");
  const Matrix dz = apply_pointwise(nodal_values(u), problem_.nonlinearity.first, "jacobian");
  Matrix j = detail::kron_weighted(projection_, dz, node_values_);
  j.noalias() += problem_.diffusion * linear_operator();
  return j;
}

std::optional<Matrix> System2D::weighted_hessian(const Vector& u, const Vector& w) const {
  const Matrix d2 = apply_pointwise(nodal_values(u), problem_.nonlinearity.second, "weighted_hessian");
  const Eigen::Map<const Matrix> ww(w.data(), modes_, modes_);
  const Matrix c = (projection_.transpose() * ww * projection_).cwiseProduct(d2);
  return detail::kron_weighted(node_values_.transpose(), c, node_values_);
}

GridSamples System2D::sample(const Vector& coeffs, int points) const {
  if (points < 2) throw std::invalid_argument("System2D::sample: need at least 2 points per axis");
  GridSamples s;
  s.dimension = 2;
  Vector ref(points);
  for (int i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / (points - 1);
    s.x.push_back(t);
    ref[i] = 2.0 * t - 1.0;
  }
  s.y = s.x;
  const Matrix phi = basis_.values(ref);
  const Eigen::Map<const Matrix> uu(coeffs.data(), modes_, modes_);
  const Matrix v = phi * uu * phi.transpose();
  s.values.resize(static_cast<std::size_t>(points) * points);
  for (int j = 0; j < points; ++j) {
    for (int i = 0; i < points; ++i) {
      double value = v(i, j) + problem_.output_offset;
      if (problem_.lifting) value += (*problem_.lifting)(ref[i], ref[j]);
      s.values[i + static_cast<std::size_t>(points) * j] = value;
    }
  }
  return s;
}

}  // namespace multisol
