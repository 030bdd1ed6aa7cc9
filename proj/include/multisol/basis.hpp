#pragma once

#include "multisol/legendre.hpp"

namespace multisol {

/// A boundary-adapted basis stored as rows of Legendre coefficients:
/// basis function k is sum_a coeffs(k, a) L_a(x), a = 0..degree.
struct ModalBasis {
  Matrix coeffs;

  Eigen::Index size() const { return coeffs.rows(); }
  int degree() const { return static_cast<int>(coeffs.cols()) - 1; }

  /// Legendre coefficients of the order-th derivative of every basis function.
  Matrix derivative_coeffs(int order) const;
  /// (points x size) matrix of order-th derivative values at the points.
  Matrix values(const Vector& points, int order = 0) const;
  double eval(Eigen::Index k, double x, int order = 0) const;

  /// Legendre coefficients of sum_k u_k phi_k.
  Vector expand(const Vector& u) const { return coeffs.transpose() * u; }
};

/// phi_k = L_{k+2} - L_k, k = 0..N-2; phi_k(+-1) = 0.
ModalBasis dirichlet_basis(int degree);

/// Mixed basis psi_k with psi_k'(-1) = psi_k(1) = 0, k = 0..N-2.
ModalBasis mixed_bc_basis(int degree);

/// Trial basis J_k + a_k J_{k+1} + b_k J_{k+2} with J_n = L_{n+2} - L_n,
/// k = 0..N-4; vanishes at +-1 together with phi'(1) and phi''(-1).
ModalBasis channel_trial_basis(int degree);

/// Test basis J_k + c_k J_{k+2}, k = 0..N-4; psi(+-1) = psi'(+-1) = 0.
ModalBasis channel_test_basis(int degree);

double channel_trial_a(int k);
double channel_trial_b(int k);
double channel_test_c(int k);

/// (size x (N+1)) matrix P with (P z)_j = (I_N z, phi_j), where z holds
/// nodal values on `rule` (whose order must equal the basis degree) and the
/// integral of the interpolant is exact.
Matrix projection_matrix(const ModalBasis& basis, const LglRule& rule);

/// Exact Gram matrix (phi_i^(p), phi_j^(q)) of two bases' derivatives.
Matrix gram_matrix(const ModalBasis& test, int test_order, const ModalBasis& trial,
                   int trial_order);

}  // namespace multisol
