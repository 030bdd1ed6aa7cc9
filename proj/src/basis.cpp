#include "multisol/basis.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace multisol {

namespace {

void require_degree(int degree, int minimum, const char* who) {
  if (degree < minimum) {
    throw std::invalid_argument(std::string(who) + ": degree must be >= " +
                                std::to_string(minimum) + ", got " + std::to_string(degree));
  }
}

// Adds s * J_n = s * (L_{n+2} - L_n) to row `row`.
void add_compact(Matrix& c, Eigen::Index row, int n, double s) {
  c(row, n + 2) += s;
  c(row, n) -= s;
}

}  // namespace

Matrix ModalBasis::derivative_coeffs(int order) const {
  Matrix result = coeffs;
  const Matrix d_t = derivative_matrix(degree() + 1).transpose();
  for (int r = 0; r < order; ++r) result = result * d_t;
  return result;
}

Matrix ModalBasis::values(const Vector& points, int order) const {
  return vandermonde(points, degree() + 1) * derivative_coeffs(order).transpose();
}

double ModalBasis::eval(Eigen::Index k, double x, int order) const {
  const Matrix c = derivative_coeffs(order);
  return c.row(k).dot(legendre_values(degree(), x));
}

ModalBasis dirichlet_basis(int degree) {
  require_degree(degree, 2, "dirichlet_basis");
  Matrix c = Matrix::Zero(degree - 1, degree + 1);
  for (int k = 0; k <= degree - 2; ++k) add_compact(c, k, k, 1.0);
  return {c};
}

ModalBasis mixed_bc_basis(int degree) {
  require_degree(degree, 2, "mixed_bc_basis");
  Matrix c = Matrix::Zero(degree - 1, degree + 1);
  for (int k = 0; k <= degree - 2; ++k) {
    // from psi(1) = 0 and psi'(-1) = 0
    const double kk = k;
    const double denom = (kk + 2.0) * (kk + 2.0);
    c(k, k) = 1.0;
    c(k, k + 1) = -(2.0 * kk + 3.0) / denom;
    c(k, k + 2) = -(kk + 1.0) * (kk + 1.0) / denom;
  }
  return {c};
}

double channel_trial_a(int k) {
  const double kk = k;
  return -(2.0 * kk + 3.0) / ((kk + 3.0) * (kk + 3.0));
}

double channel_trial_b(int k) {
  const double kk = k;
  return -(kk + 2.0) * (kk + 2.0) * (2.0 * kk + 3.0) / ((kk + 3.0) * (kk + 3.0) * (2.0 * kk + 7.0));
}

double channel_test_c(int k) {
  const double kk = k;
  return -(2.0 * kk + 3.0) / (2.0 * kk + 7.0);
}

ModalBasis channel_trial_basis(int degree) {
  require_degree(degree, 4, "channel_trial_basis");
  Matrix c = Matrix::Zero(degree - 3, degree + 1);
  for (int k = 0; k <= degree - 4; ++k) {
    add_compact(c, k, k, 1.0);
    add_compact(c, k, k + 1, channel_trial_a(k));
    add_compact(c, k, k + 2, channel_trial_b(k));
  }
  return {c};
}

ModalBasis channel_test_basis(int degree) {
  require_degree(degree, 4, "channel_test_basis");
  Matrix c = Matrix::Zero(degree - 3, degree + 1);
  for (int k = 0; k <= degree - 4; ++k) {
    add_compact(c, k, k, 1.0);
    add_compact(c, k, k + 2, channel_test_c(k));
  }
  return {c};
}

Matrix projection_matrix(const ModalBasis& basis, const LglRule& rule) {
  if (rule.order != basis.degree()) {
    throw std::invalid_argument("projection_matrix: rule order does not match basis degree");
  }
  const Vector norms = legendre_norms(basis.degree() + 1);
  return basis.coeffs * norms.asDiagonal() * forward_transform(rule);
}

Matrix gram_matrix(const ModalBasis& test, int test_order, const ModalBasis& trial,
                   int trial_order) {
  const int modes = std::max(test.degree(), trial.degree()) + 1;
  Matrix a = Matrix::Zero(test.size(), modes);
  Matrix b = Matrix::Zero(trial.size(), modes);
  a.leftCols(test.degree() + 1) = test.derivative_coeffs(test_order);
  b.leftCols(trial.degree() + 1) = trial.derivative_coeffs(trial_order);
  return a * legendre_norms(modes).asDiagonal() * b.transpose();
}

}  // namespace multisol
