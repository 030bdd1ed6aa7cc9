#include "multisol/legendre.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace multisol {

double legendre_eval(int n, double x) {
  if (n == 0) return 1.0;
  double prev = 1.0;
  double curr = x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0) * x * curr - k * prev) / (k + 1.0);
    prev = curr;
    curr = next;
  }
  return curr;
}

Vector legendre_values(int n, double x) {
  Vector values(n + 1);
  values[0] = 1.0;
  if (n >= 1) values[1] = x;
  for (int k = 1; k < n; ++k) {
    values[k + 1] = ((2.0 * k + 1.0) * x * values[k] - k * values[k - 1]) / (k + 1.0);
  }
  return values;
}

Vector legendre_derivatives(int n, double x) {
  const Vector values = legendre_values(n, x);
  Vector derivs = Vector::Zero(n + 1);
  // L'_{k+1} = L'_{k-1} + (2k+1) L_k
  if (n >= 1) derivs[1] = 1.0;
  for (int k = 1; k < n; ++k) {
    derivs[k + 1] = derivs[k - 1] + (2.0 * k + 1.0) * values[k];
  }
  return derivs;
}

LglRule lgl_rule(int order) {
  if (order < 1) {
    throw std::invalid_argument("lgl_rule: order must be >= 1, got " + std::to_string(order));
  }
  const int n = order;
  LglRule rule;
  rule.order = n;
  rule.nodes.resize(n + 1);
  rule.weights.resize(n + 1);
  rule.nodes[0] = -1.0;
  rule.nodes[n] = 1.0;

  // Interior nodes solve x L_N(x) - L_{N-1}(x) = 0, whose derivative is
  // (N+1) L_N(x). Only half are computed; the rest follow by symmetry.
  constexpr int kMaxIterations = 100;
  constexpr double kTolerance = 1e-15;
  for (int j = 1; j <= n / 2; ++j) {
    double x = -std::cos(std::numbers::pi * j / n);
    bool converged = false;
    for (int it = 0; it < kMaxIterations; ++it) {
      const double ln = legendre_eval(n, x);
      const double lnm1 = legendre_eval(n - 1, x);
      const double dx = (x * ln - lnm1) / ((n + 1) * ln);
      x -= dx;
      if (std::abs(dx) <= kTolerance) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw std::runtime_error("lgl_rule: Newton iteration for node " + std::to_string(j) +
                               " of order " + std::to_string(n) + " did not converge");
    }
    rule.nodes[j] = x;
    rule.nodes[n - j] = -x;
  }
  if (n % 2 == 0) rule.nodes[n / 2] = 0.0;

  const double scale = 2.0 / (static_cast<double>(n) * (n + 1));
  for (int j = 0; j <= n; ++j) {
    const double ln = legendre_eval(n, rule.nodes[j]);
    rule.weights[j] = scale / (ln * ln);
  }
  return rule;
}

CoeffVec1D::CoeffVec1D(Vector c) : coeffs(std::move(c)) {
  if (coeffs.size() < 1) throw std::invalid_argument("CoeffVec1D: need at least one coefficient");
}

double CoeffVec1D::eval(double x) const {
  const Vector values = legendre_values(static_cast<int>(coeffs.size()) - 1, x);
  return coeffs.dot(values);
}

Vector legendre_norms(int size) {
  Vector norms(size);
  for (int k = 0; k < size; ++k) norms[k] = 2.0 / (2.0 * k + 1.0);
  return norms;
}

Matrix vandermonde(const Vector& points, int num_modes) {
  Matrix v(points.size(), num_modes);
  for (Eigen::Index i = 0; i < points.size(); ++i) {
    v.row(i) = legendre_values(num_modes - 1, points[i]).transpose();
  }
  return v;
}

Matrix vandermonde_derivative(const Vector& points, int num_modes) {
  Matrix v(points.size(), num_modes);
  for (Eigen::Index i = 0; i < points.size(); ++i) {
    v.row(i) = legendre_derivatives(num_modes - 1, points[i]).transpose();
  }
  return v;
}

Matrix forward_transform(const LglRule& rule) {
  const int n = rule.order;
  const Matrix v = vandermonde(rule.nodes, n + 1);
  Matrix t(n + 1, n + 1);
  for (int k = 0; k <= n; ++k) {
    const double gamma = (k < n) ? 2.0 / (2.0 * k + 1.0) : 2.0 / n;
    for (int j = 0; j <= n; ++j) t(k, j) = rule.weights[j] * v(j, k) / gamma;
  }
  return t;
}

CoeffVec1D nodal_to_coeff(const Vector& values, const LglRule& rule) {
  if (values.size() != rule.size()) {
    throw std::invalid_argument("nodal_to_coeff: got " + std::to_string(values.size()) +
                                " values for a rule with " + std::to_string(rule.size()) +
                                " nodes");
  }
  return CoeffVec1D(forward_transform(rule) * values);
}

CoeffVec1D nodal_to_coeff(std::span<const double> values, const LglRule& rule) {
  return nodal_to_coeff(Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size())),
                        rule);
}

Vector coeff_to_nodal(const CoeffVec1D& c, const LglRule& rule) {
  return vandermonde(rule.nodes, static_cast<int>(c.size())) * c.coeffs;
}

CoeffVec1D coeff_derivative(const CoeffVec1D& c) {
  const Eigen::Index m = c.size();
  if (m == 1) return CoeffVec1D(Vector::Zero(1));
  // d_{k-1} = (2k-1) (c_k + d_{k+1} / (2k+3)), run backwards from the top.
  Vector d = Vector::Zero(m + 1);
  for (Eigen::Index k = m - 1; k >= 1; --k) {
    d[k - 1] = (2.0 * k - 1.0) * (c[k] + d[k + 1] / (2.0 * k + 3.0));
  }
  return CoeffVec1D(d.head(m - 1));
}

Matrix derivative_matrix(int num_modes) {
  Matrix d = Matrix::Zero(num_modes, num_modes);
  for (int j = 0; j < num_modes; ++j) {
    Vector e = Vector::Zero(num_modes);
    e[j] = 1.0;
    const CoeffVec1D de = coeff_derivative(CoeffVec1D(e));
    d.col(j).head(de.size()) = de.coeffs;
  }
  return d;
}

}  // namespace multisol
