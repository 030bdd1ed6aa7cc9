#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace multisol {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Legendre polynomial L_n(x) by the three-term recurrence.
double legendre_eval(int n, double x);

/// Values L_0(x), ..., L_n(x).
Vector legendre_values(int n, double x);

/// Values L_0'(x), ..., L_n'(x).
Vector legendre_derivatives(int n, double x);

/// Legendre-Gauss-Lobatto rule of order N: N+1 nodes in ascending order
/// (nodes[0] == -1, nodes[N] == 1), exact for polynomials of degree <= 2N-1.
struct LglRule {
  int order = 0;
  Vector nodes;
  Vector weights;

  Eigen::Index size() const { return nodes.size(); }
  double integrate(const Vector& values) const { return weights.dot(values); }
};

/// Nodes are the roots of (1-x^2) L_N'(x), found by Newton's method from
/// Chebyshev-Gauss-Lobatto guesses. Throws std::invalid_argument for N < 1
/// and std::runtime_error if Newton fails to converge.
LglRule lgl_rule(int order);

/// Coefficients in the pure Legendre basis {L_0, ..., L_{M-1}}.
struct CoeffVec1D {
  Vector coeffs;

  CoeffVec1D() : coeffs(Vector::Zero(1)) {}
  explicit CoeffVec1D(Vector c);

  Eigen::Index size() const { return coeffs.size(); }
  double operator[](Eigen::Index k) const { return coeffs[k]; }

  /// Evaluates sum_k c_k L_k(x).
  double eval(double x) const;
};

/// Discrete Legendre transform of nodal values on the LGL grid. Uses the
/// discrete norm 2/N for the highest mode so that coeff_to_nodal inverts it.
CoeffVec1D nodal_to_coeff(std::span<const double> values, const LglRule& rule);
CoeffVec1D nodal_to_coeff(const Vector& values, const LglRule& rule);

/// Pointwise evaluation sum_k c_k L_k(x_j) at the rule's nodes.
Vector coeff_to_nodal(const CoeffVec1D& c, const LglRule& rule);

/// Legendre coefficients of the derivative; the length drops by one
/// (a constant maps to the single coefficient {0}).
CoeffVec1D coeff_derivative(const CoeffVec1D& c);

/// Continuous norms (L_k, L_k) = 2/(2k+1), k = 0..size-1.
Vector legendre_norms(int size);

/// Dense matrix forms of the operations above, used by the discretizations.
/// vandermonde(points, M)(i, k) = L_k(points_i), k < M.
Matrix vandermonde(const Vector& points, int num_modes);
/// Same for the first derivative.
Matrix vandermonde_derivative(const Vector& points, int num_modes);
/// (N+1)x(N+1) matrix mapping nodal values to Legendre coefficients.
Matrix forward_transform(const LglRule& rule);
/// M x M matrix D with D c = coefficients of the derivative (last row zero).
Matrix derivative_matrix(int num_modes);

}  // namespace multisol
