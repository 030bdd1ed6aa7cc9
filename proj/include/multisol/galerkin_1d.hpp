#pragma once

#include "multisol/basis.hpp"
#include "multisol/nonlinearity.hpp"
#include "multisol/system.hpp"

namespace multisol {

/// Lifting for the channel problem on (-1,1):
/// p(x) = 3/4 (1+x) - 1/16 (1+x)^3, p(-1) = p''(-1) = p'(1) = 0, p(1) = 1.
double channel_lifting(double x, int order = 0);

/// Parameters of the channel flow equation
///   u'''' + alpha (y u''' + 3 u'') + Re (u u''' - u' u'') = 0 on (0,1),
///   u(0) = u''(0) = 0, u(1) = 1, u'(1) = 0,
/// and the coefficients of its shifted form on (-1,1) with u = v + p:
///   v'''' + A v''' + B v'' + C v' - 3/8 gamma v + gamma (v v''' - v' v'') = g.
struct ChannelCoefficients {
  double alpha = 0.0;
  double reynolds = 0.0;

  double delta() const { return alpha / 4.0; }
  double beta() const { return 1.5 * alpha; }
  double gamma() const { return reynolds / 2.0; }

  double a(double x, int order = 0) const;
  double b(double x, int order = 0) const;
  double c(double x, int order = 0) const;
  double g(double x) const;
};

/// Legendre Petrov-Galerkin discretization of the channel problem: trial
/// space V_N (channel_trial_basis), test space W_N (channel_test_basis),
/// unknowns v_k, k = 0..N-4.
class ChannelSystem : public SpectralSystem {
 public:
  ChannelSystem(double alpha, double reynolds, int degree);

  Eigen::Index size() const override { return trial_.size(); }
  Vector residual(const Vector& v) const override;
  Matrix jacobian(const Vector& v) const override;
  std::optional<Matrix> weighted_hessian(const Vector& v, const Vector& w) const override;
  const SystemInfo& info() const override { return info_; }

  GridSamples sample(const Vector& coeffs, int points) const override;
  std::string basis_name() const override { return "channel_petrov_galerkin"; }

  /// M(j, k) = B(phi_k, psi_j) for the bilinear form
  ///   (v'', psi'') + (v', (A psi)'') - (v', (B psi)') + (C v', psi) - 3 gamma/8 (v, psi).
  const Matrix& linear_matrix() const { return linear_; }
  /// (g, psi_j)
  const Vector& rhs() const { return rhs_; }
  /// gamma/2 ([I_N v^2]', psi_j'') + 2 gamma (I_N [v']^2, psi_j')
  Vector nonlinear_term(const Vector& v) const;

  /// order-th derivative of u_N = p + sum v_k phi_k at a reference point.
  double reconstruct(const Vector& v, double x, int order = 0) const;

  const ChannelCoefficients& coefficients() const { return coeffs_; }
  const ModalBasis& trial_basis() const { return trial_; }
  const ModalBasis& test_basis() const { return test_; }

 private:
  ChannelCoefficients coeffs_;
  SystemInfo info_;
  ModalBasis trial_;
  ModalBasis test_;
  Matrix linear_;
  Vector rhs_;
  Matrix values_;       // phi_k at LGL(N) nodes
  Matrix derivatives_;  // phi_k' at LGL(N) nodes
  Matrix square_to_hess_;  // nodal z -> ([I_N z]', psi_j'')
  Matrix square_to_grad_;  // nodal z -> (I_N z, psi_j')
};

enum class BoundaryKind { dirichlet, mixed };

/// Second-order two-point problem  u'' + lambda F(u) = 0  on (0,1), mapped to
/// (-1,1) and written as  4 (u', v') - lambda (I_N F(u), v) = 0.
struct SecondOrderProblem {
  std::string id;
  int degree = 8;
  BoundaryKind boundary = BoundaryKind::dirichlet;
  double lambda = 1.0;
  PointwiseNonlinearity nonlinearity;  ///< F, before scaling by lambda
  std::map<std::string, double> parameters;
};

class SecondOrderSystem : public SpectralSystem {
 public:
  explicit SecondOrderSystem(SecondOrderProblem problem);

  Eigen::Index size() const override { return basis_.size(); }
  Vector residual(const Vector& u) const override;
  Matrix jacobian(const Vector& u) const override;
  std::optional<Matrix> weighted_hessian(const Vector& u, const Vector& w) const override;
  const SystemInfo& info() const override { return info_; }

  GridSamples sample(const Vector& coeffs, int points) const override;
  std::string basis_name() const override;

  double reconstruct(const Vector& u, double x, int order = 0) const;
  const Matrix& stiffness() const { return stiffness_; }
  const ModalBasis& basis() const { return basis_; }
  const Matrix& projection() const { return projection_; }

 private:
  SecondOrderProblem problem_;
  SystemInfo info_;
  ModalBasis basis_;
  Matrix stiffness_;
  Matrix values_;
  Matrix projection_;
  PointwiseNonlinearity signed_;
};

/// u'' + lambda e^u = 0, u(0) = u(1) = 0.
SecondOrderSystem make_bratu_system(double lambda, int degree);
/// u'' + lambda (1 + u^p) = 0, u'(0) = u(1) = 0.
SecondOrderSystem make_power_system(int power, double lambda, int degree);

}  // namespace multisol
