#pragma once

#include "multisol/legendre.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace multisol {

/// Raised when a residual or Jacobian evaluation produces a non-finite value
/// (e.g. exp overflow). Carries the offending quadrature node when known.
class EvaluationError : public std::runtime_error {
 public:
  explicit EvaluationError(const std::string& what, Eigen::Index node = -1)
      : std::runtime_error(what), node_(node) {}
  Eigen::Index node() const { return node_; }

 private:
  Eigen::Index node_;
};

struct SystemInfo {
  std::string problem_id;
  int degree = 0;  ///< polynomial degree N of the discretization
  std::map<std::string, double> parameters;
};

/// Residual/Jacobian oracle F: R^n -> R^n of a nonlinear algebraic system.
/// Implementations are pure: evaluation never mutates the object.
class DiscretizedSystem {
 public:
  virtual ~DiscretizedSystem() = default;

  virtual Eigen::Index size() const = 0;
  virtual Vector residual(const Vector& x) const = 0;
  virtual Matrix jacobian(const Vector& x) const = 0;

  /// sum_i w_i * Hess(F_i)(x), when the system can form it in closed form.
  /// With w = F(x) this is the S term of the full least-squares Hessian.
  virtual std::optional<Matrix> weighted_hessian(const Vector& /*x*/, const Vector& /*w*/) const {
    return std::nullopt;
  }

  virtual const SystemInfo& info() const = 0;
};

/// Samples of a solution on a uniform grid over the problem's native domain.
/// values are stored x-fastest: values[i + nx * j] = u(x[i], y[j]).
struct GridSamples {
  int dimension = 1;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j = 0) const { return values[i + x.size() * j]; }
};

double max_abs_difference(const GridSamples& a, const GridSamples& b);

/// A discretization whose unknowns are spectral coefficients of a field
/// that can be reconstructed and sampled on the native domain.
class SpectralSystem : public DiscretizedSystem {
 public:
  /// Evaluates the reconstructed solution (lifting included) on a uniform
  /// grid with `points` samples per axis of the native domain.
  virtual GridSamples sample(const Vector& coeffs, int points) const = 0;

  /// Short identifier of the basis the coefficients refer to.
  virtual std::string basis_name() const = 0;
};

/// Throws EvaluationError if any entry is not finite.
void require_finite(const Vector& v, const char* what);

}  // namespace multisol
