#pragma once

#include "multisol/system.hpp"

#include <string>
#include <vector>

namespace multisol {

enum class HessianMode { gauss_newton, full };

/// How the first trust radius is chosen.
enum class InitialRadius {
  gradient_norm,  ///< ||g(x0)||
  iterate_scale,  ///< max(1, ||x0||)
  fixed,          ///< TrustRegionConfig::radius
};

std::string to_string(InitialRadius policy);
InitialRadius parse_initial_radius(const std::string& name);

/// Parameters of the least-squares trust-region iteration for
/// Q(x) = 1/2 ||F(x)||^2.
struct TrustRegionConfig {
  double shrink_threshold = 0.25;  ///< steps with ratio below this are rejected
  double expand_threshold = 0.75;  ///< boundary steps with ratio above this grow the region
  double shrink_factor = 0.5;
  double expand_factor = 2.0;
  double tolerance = 1e-13;  ///< bound on both ||g|| and Q
  int max_iterations = 500;
  double min_radius = 1e-14;
  /// A full Newton step no longer than step_tolerance * (1 + ||x||) taken
  /// with Q <= tolerance ends the iteration as converged: the iterate is at
  /// the rounding floor of F.
  double step_tolerance = 1e-10;
  HessianMode hessian = HessianMode::gauss_newton;
  /// ||g(x0)|| is tiny for guesses near a root and huge for deflated systems
  /// far from one; the iterate scale is insensitive to both.
  InitialRadius initial_radius = InitialRadius::iterate_scale;
  double radius = 1.0;  ///< first radius under InitialRadius::fixed

  /// Throws std::invalid_argument unless 0 < shrink_threshold <
  /// expand_threshold < 1, 0 < shrink_factor < 1 < expand_factor, tolerance > 0.
  void validate() const;
};

enum class StepKind {
  cauchy_clipped,      ///< steepest-descent step cut at the boundary
  dogleg_interp,       ///< point on the Cauchy-Newton segment at the boundary
  full_newton,         ///< Newton point inside the region
  negative_curvature,  ///< g^T G g <= 0: boundary step along -g
  singular_fallback,   ///< no usable Newton point: Cauchy point clipped to the region
};

std::string to_string(StepKind kind);

struct DoglegStep {
  Vector step;
  StepKind kind = StepKind::full_newton;
};

/// Dogleg approximation of min g^T s + 1/2 s^T G s subject to ||s|| <= radius.
DoglegStep dogleg_step(const Vector& gradient, const Matrix& hessian, double radius);

/// Same, with the Newton point supplied (empty if unavailable) and the
/// curvature g^T G g precomputed. Exposed for the Gauss-Newton path, where
/// the Newton point comes from J s = -F.
DoglegStep dogleg_step(const Vector& gradient, double curvature, const Vector* newton_point, double radius);

/// G = J^T J (gauss_newton) or J^T J + sum_i F_i Hess(F_i) (full). The
/// second-order term comes from the system when available, else from
/// forward differences of J with step 1e-6 (1 + ||x||_inf).
Matrix hessian(const DiscretizedSystem& system, const Vector& x, HessianMode mode);

enum class SolveStatus { converged, stalled_radius, max_iterations, diverged_evaluation };

std::string to_string(SolveStatus status);

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;      ///< Q at the start of the iteration
  double gradient_norm = 0.0;
  double radius = 0.0;         ///< radius used for this step
  double ratio = 0.0;          ///< actual / predicted reduction
  double step_norm = 0.0;
  StepKind kind = StepKind::full_newton;
  bool accepted = false;
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::max_iterations;
  Vector x;
  int iterations = 0;
  double residual_inf = 0.0;  ///< ||F(x)||_inf of the system that was solved
  double gradient_norm = 0.0;
  double objective = 0.0;
  double seconds = 0.0;
  std::string message;
  std::vector<IterationRecord> trace;

  bool converged() const { return status == SolveStatus::converged; }
};

/// Trust-region iteration from x0.
SolveOutcome tr_iterate(const DiscretizedSystem& system, const Vector& x0,
                        const TrustRegionConfig& config = {});

/// Plain undamped Newton x <- x - J^{-1} F for comparison. Returns ||F||_2
/// at x0, x1, ..., stopping early (with +inf) if an evaluation or solve fails.
std::vector<double> newton_iterate(const DiscretizedSystem& system, const Vector& x0, int iterations);

}  // namespace multisol
