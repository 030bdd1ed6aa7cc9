#include "multisol/galerkin_1d.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace multisol {

double channel_lifting(double x, int order) {
  const double s = 1.0 + x;
  switch (order) {
    case 0: return 0.75 * s - s * s * s / 16.0;
    case 1: return 0.75 - 3.0 * s * s / 16.0;
    case 2: return -6.0 * s / 16.0;
    case 3: return -6.0 / 16.0;
    default: return 0.0;
  }
}

double ChannelCoefficients::a(double x, int order) const {
  const double s = 1.0 + x;
  const double gm = gamma();
  switch (order) {
    case 0: return (0.75 * gm + delta()) * s - gm * s * s * s / 16.0;
    case 1: return (0.75 * gm + delta()) - 3.0 * gm * s * s / 16.0;
    case 2: return -6.0 * gm * s / 16.0;
    case 3: return -6.0 * gm / 16.0;
    default: return 0.0;
  }
}

double ChannelCoefficients::b(double x, int order) const {
  const double s = 1.0 + x;
  const double gm = gamma();
  switch (order) {
    case 0: return beta() - 0.75 * gm + 3.0 * gm * s * s / 16.0;
    case 1: return 6.0 * gm * s / 16.0;
    case 2: return 6.0 * gm / 16.0;
    default: return 0.0;
  }
}

double ChannelCoefficients::c(double x, int order) const {
  const double gm = gamma();
  switch (order) {
    case 0: return 3.0 * gm * (1.0 + x) / 8.0;
    case 1: return 3.0 * gm / 8.0;
    default: return 0.0;
  }
}

double ChannelCoefficients::g(double x) const {
  const double s = 1.0 + x;
  return 3.0 / 8.0 * (delta() + beta()) * s + 3.0 * gamma() * s * s * s / 64.0;
}

namespace {

Vector uniform_reference_points(int points, std::vector<double>& native) {
  if (points < 2) throw std::invalid_argument("sample: need at least 2 points");
  Vector ref(points);
  native.clear();
  for (int i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / (points - 1);
    native.push_back(t);
    ref[i] = 2.0 * t - 1.0;
  }
  return ref;
}

}  // namespace

ChannelSystem::ChannelSystem(double alpha, double reynolds, int degree)
    : coeffs_{alpha, reynolds}, trial_(channel_trial_basis(degree)), test_(channel_test_basis(degree)) {
  if (degree < 5) throw std::invalid_argument("ChannelSystem: need N >= 5, got " + std::to_string(degree));
  info_.problem_id = "channel";
  info_.degree = degree;
  info_.parameters = {{"alpha", alpha}, {"Re", reynolds}};

  // Bilinear form and load vector: polynomial integrands of degree <= 2N+3,
  // integrated exactly on LGL(N+4).
  const LglRule fine = lgl_rule(degree + 4);
  const Eigen::Index q = fine.size();
  Vector a0(q), a1(q), a2(q), b0(q), b1(q), c0(q), g0(q);
  for (Eigen::Index i = 0; i < q; ++i) {
    const double x = fine.nodes[i];
    a0[i] = coeffs_.a(x, 0);
    a1[i] = coeffs_.a(x, 1);
    a2[i] = coeffs_.a(x, 2);
    b0[i] = coeffs_.b(x, 0);
    b1[i] = coeffs_.b(x, 1);
    c0[i] = coeffs_.c(x, 0);
    g0[i] = coeffs_.g(x);
  }
  const Matrix phi0 = trial_.values(fine.nodes, 0);
  const Matrix phi1 = trial_.values(fine.nodes, 1);
  const Matrix phi2 = trial_.values(fine.nodes, 2);
  const Matrix psi0 = test_.values(fine.nodes, 0);
  const Matrix psi1 = test_.values(fine.nodes, 1);
  const Matrix psi2 = test_.values(fine.nodes, 2);
  const auto w = fine.weights.asDiagonal();

  const Matrix a_psi_2 = a2.asDiagonal() * psi0 + 2.0 * (a1.asDiagonal() * psi1) + a0.asDiagonal() * psi2;
  const Matrix b_psi_1 = b1.asDiagonal() * psi0 + b0.asDiagonal() * psi1;
  linear_ = psi2.transpose() * w * phi2 + a_psi_2.transpose() * w * phi1 -
            b_psi_1.transpose() * w * phi1 + psi0.transpose() * w * c0.asDiagonal() * phi1 -
            (3.0 * coeffs_.gamma() / 8.0) * (psi0.transpose() * w * phi0);
  rhs_ = psi0.transpose() * w * g0;

  const LglRule rule = lgl_rule(degree);
  values_ = trial_.values(rule.nodes, 0);
  derivatives_ = trial_.values(rule.nodes, 1);
  const Vector norms = legendre_norms(degree + 1);
  const Matrix t = forward_transform(rule);
  square_to_hess_ = test_.derivative_coeffs(2) * norms.asDiagonal() * derivative_matrix(degree + 1) * t;
  square_to_grad_ = test_.derivative_coeffs(1) * norms.asDiagonal() * t;
}

Vector ChannelSystem::nonlinear_term(const Vector& v) const {
  const Vector vn = values_ * v;
  const Vector dn = derivatives_ * v;
  const double gm = coeffs_.gamma();
  return 0.5 * gm * (square_to_hess_ * vn.cwiseProduct(vn)) +
         2.0 * gm * (square_to_grad_ * dn.cwiseProduct(dn));
}

Vector ChannelSystem::residual(const Vector& v) const {
  if (v.size() != size()) throw std::invalid_argument("ChannelSystem::residual: size mismatch");
  Vector r = linear_ * v + nonlinear_term(v) - rhs_;
  require_finite(r, "ChannelSystem::residual");
  return r;
}

Matrix ChannelSystem::jacobian(const Vector& v) const {
  if (v.size() != size()) throw std::invalid_argument("ChannelSystem::jacobian: size mismatch");
  const Vector vn = values_ * v;
  const Vector dn = derivatives_ * v;
  const double gm = coeffs_.gamma();
  Matrix j = linear_;
  j.noalias() += gm * (square_to_hess_ * vn.asDiagonal() * values_);
  j.noalias() += 4.0 * gm * (square_to_grad_ * dn.asDiagonal() * derivatives_);
  if (!j.allFinite()) throw EvaluationError("ChannelSystem::jacobian: non-finite entry");
  return j;
}

std::optional<Matrix> ChannelSystem::weighted_hessian(const Vector& /*v*/, const Vector& w) const {
  const double gm = coeffs_.gamma();
  const Vector c0 = square_to_hess_.transpose() * w;
  const Vector c1 = square_to_grad_.transpose() * w;
  return Matrix(gm * (values_.transpose() * c0.asDiagonal() * values_) +
                4.0 * gm * (derivatives_.transpose() * c1.asDiagonal() * derivatives_));
}

double ChannelSystem::reconstruct(const Vector& v, double x, int order) const {
  const Vector c = trial_.derivative_coeffs(order).transpose() * v;
  return channel_lifting(x, order) + c.dot(legendre_values(trial_.degree(), x));
}

GridSamples ChannelSystem::sample(const Vector& coeffs, int points) const {
  GridSamples s;
  s.dimension = 1;
  const Vector ref = uniform_reference_points(points, s.x);
  const Vector u = trial_.values(ref) * coeffs;
  for (int i = 0; i < points; ++i) s.values.push_back(u[i] + channel_lifting(ref[i]));
  return s;
}

SecondOrderSystem::SecondOrderSystem(SecondOrderProblem problem)
    : problem_(std::move(problem)),
      basis_(problem_.boundary == BoundaryKind::dirichlet ? dirichlet_basis(problem_.degree)
                                                          : mixed_bc_basis(problem_.degree)) {
  if (problem_.degree < 3) throw std::invalid_argument("SecondOrderSystem: need N >= 3");
  if (!(problem_.lambda > 0.0)) throw std::invalid_argument("SecondOrderSystem: lambda must be positive");
  info_.problem_id = problem_.id;
  info_.degree = problem_.degree;
  info_.parameters = problem_.parameters;

  stiffness_ = 4.0 * gram_matrix(basis_, 1, basis_, 1);
  const LglRule rule = lgl_rule(problem_.degree);
  values_ = basis_.values(rule.nodes);
  projection_ = projection_matrix(basis_, rule);
  signed_ = problem_.nonlinearity.scaled(-problem_.lambda);
}

std::string SecondOrderSystem::basis_name() const {
  return problem_.boundary == BoundaryKind::dirichlet ? "legendre_dirichlet_1d" : "legendre_mixed_1d";
}

namespace {

Vector apply(const Vector& z, const std::function<double(double)>& f, const char* what) {
  Vector out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    out[i] = f(z[i]);
    if (!std::isfinite(out[i])) {
      throw EvaluationError(std::string(what) + ": non-finite nonlinearity at node " + std::to_string(i), i);
    }
  }
  return out;
}

}  // namespace

Vector SecondOrderSystem::residual(const Vector& u) const {
  if (u.size() != size()) throw std::invalid_argument("SecondOrderSystem::residual: size mismatch");
  Vector r = stiffness_ * u + projection_ * apply(values_ * u, signed_.value, "residual");
  require_finite(r, "SecondOrderSystem::residual");
  return r;
}

Matrix SecondOrderSystem::jacobian(const Vector& u) const {
  if (u.size() != size()) throw std::invalid_argument("SecondOrderSystem::jacobian: size mismatch");
  const Vector d = apply(values_ * u, signed_.first, "jacobian");
  return stiffness_ + projection_ * d.asDiagonal() * values_;
}

std::optional<Matrix> SecondOrderSystem::weighted_hessian(const Vector& u, const Vector& w) const {
  const Vector d2 = apply(values_ * u, signed_.second, "weighted_hessian");
  const Vector c = (projection_.transpose() * w).cwiseProduct(d2);
  return Matrix(values_.transpose() * c.asDiagonal() * values_);
}

double SecondOrderSystem::reconstruct(const Vector& u, double x, int order) const {
  const Vector c = basis_.derivative_coeffs(order).transpose() * u;
  return c.dot(legendre_values(basis_.degree(), x));
}

GridSamples SecondOrderSystem::sample(const Vector& coeffs, int points) const {
  GridSamples s;
  s.dimension = 1;
  const Vector ref = uniform_reference_points(points, s.x);
  const Vector u = basis_.values(ref) * coeffs;
  s.values.assign(u.data(), u.data() + u.size());
  return s;
}

SecondOrderSystem make_bratu_system(double lambda, int degree) {
  SecondOrderProblem p;
  p.id = "bratu";
  p.degree = degree;
  p.boundary = BoundaryKind::dirichlet;
  p.lambda = lambda;
  auto e = [](double z) { return std::exp(z); };
  p.nonlinearity = {e, e, e};
  p.parameters = {{"lambda", lambda}};
  return SecondOrderSystem(std::move(p));
}

SecondOrderSystem make_power_system(int power, double lambda, int degree) {
  if (power < 1) throw std::invalid_argument("make_power_system: power must be >= 1");
  SecondOrderProblem p;
  p.id = "power";
  p.degree = degree;
  p.boundary = BoundaryKind::mixed;
  p.lambda = lambda;
  const double pw = power;
  auto ipow = [](double z, int k) { return k < 0 ? 0.0 : std::pow(z, k); };
  p.nonlinearity = {[=](double z) { return 1.0 + ipow(z, power); },
                    [=](double z) { return pw * ipow(z, power - 1); },
                    [=](double z) { return power < 2 ? 0.0 : pw * (pw - 1.0) * ipow(z, power - 2); }};
  p.parameters = {{"p", pw}, {"lambda", lambda}};
  return SecondOrderSystem(std::move(p));
}

}  // namespace multisol
