#pragma once

#include "multisol/basis.hpp"
#include "multisol/nonlinearity.hpp"
#include "multisol/system.hpp"

#include <functional>
#include <optional>

namespace multisol {

/// Stiffness A (a_kj = (phi_j', phi_k')) and mass B (b_kj = (phi_j, phi_k))
/// for phi_k = L_{k+2} - L_k, k = 0..N-2.
struct GalerkinMatrices {
  Matrix stiffness;
  Matrix mass;
};

/// Closed-form assembly; throws std::invalid_argument for N < 3.
GalerkinMatrices assemble_matrices(int degree);

using Function2D = std::function<double(double, double)>;

/// Vector (I_N f, phi_k(x) phi_j(y)) in the ordering index = k + (N-1) j,
/// with f given on the reference square (-1,1)^2.
Vector interpolate_source(const Function2D& f, int degree);

/// Sine-smoothed plateau: 0 at y = +-1, `height` on (-1+kappa, 1-kappa),
/// C^2 ramps of width kappa at both ends.
double smoothed_plateau(double y, double kappa, double height = 2.0);

/// Boundary data on the reference square, one function per edge:
/// east  g1(y) at x = 1, north g2(x) at y = 1,
/// west  g3(y) at x = -1, south g4(x) at y = -1.
struct EdgeData {
  std::function<double(double)> east;
  std::function<double(double)> north;
  std::function<double(double)> west;
  std::function<double(double)> south;
};

/// Transfinite interpolant G(x, y) of edge data with corner corrections.
/// Reproduces each edge exactly when the data agree at the corners.
class Lifting2D {
 public:
  Lifting2D(EdgeData edges, double kappa);

  double operator()(double x, double y) const;
  const EdgeData& edges() const { return edges_; }
  double kappa() const { return kappa_; }

 private:
  EdgeData edges_;
  double kappa_;
};

/// Lifting for the Allen-Cahn plateau data: g1 = g3 = H (height 2), g2 = g4 = 0.
/// Throws std::invalid_argument unless 0 < kappa < 1.
Lifting2D make_lifting(double kappa);

/// Description of  c * (grad u, grad v) + (F(u + G), v) = (f, v)  on (-1,1)^2
/// with homogeneous Dirichlet data for u after lifting by G.
struct Problem2D {
  std::string id;
  int degree = 8;
  double diffusion = 1.0;
  PointwiseNonlinearity nonlinearity = PointwiseNonlinearity::zero();
  Function2D source;  ///< on the reference square; empty means f = 0
  std::optional<Lifting2D> lifting;
  double output_offset = 0.0;  ///< native solution = u + G + offset
  std::map<std::string, double> parameters;
};

/// Kronecker-structured system
///   F(u) = c (A (x) B + B (x) A^T) u + c l + g(u) - f,
/// where l holds the lifting's stiffness contribution and g(u) the
/// pseudospectral nonlinear term. Unknowns are ordered
/// u = (u_00, u_10, ..., u_q0, u_01, ..., u_qq), q = N-2.
class System2D : public SpectralSystem {
 public:
  explicit System2D(Problem2D problem);

  Eigen::Index size() const override { return static_cast<Eigen::Index>(modes_ * modes_); }
  Vector residual(const Vector& u) const override;
  Matrix jacobian(const Vector& u) const override;
  std::optional<Matrix> weighted_hessian(const Vector& u, const Vector& w) const override;
  const SystemInfo& info() const override { return info_; }

  GridSamples sample(const Vector& coeffs, int points) const override;
  std::string basis_name() const override { return "legendre_dirichlet_2d"; }

  /// (A (x) B + B (x) A^T) u computed in matrix form B U A^T + A U B.
  Vector linear_term(const Vector& u) const;
  /// g(u)_kj = (I_N F(u_N + G), phi_k phi_j).
  Vector nonlinear_term(const Vector& u) const;
  /// Full linear operator A (x) B + B (x) A^T as a dense matrix.
  Matrix linear_operator() const;

  const GalerkinMatrices& matrices() const { return matrices_; }
  const Problem2D& problem() const { return problem_; }
  const LglRule& rule() const { return rule_; }
  const Vector& source_vector() const { return source_; }
  const Vector& lifting_vector() const { return lifting_term_; }

  /// Field values (lifting included) at the LGL grid, x-fastest.
  Matrix nodal_values(const Vector& u) const;

 private:
  Problem2D problem_;
  SystemInfo info_;
  int modes_;
  LglRule rule_;
  ModalBasis basis_;
  GalerkinMatrices matrices_;
  Matrix node_values_;  // Phi: (N+1) x (q+1)
  Matrix projection_;   // R: (q+1) x (N+1)
  Matrix lifting_nodal_;
  Vector source_;
  Vector lifting_term_;
};

}  // namespace multisol
