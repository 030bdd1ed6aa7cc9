#pragma once

#include <functional>

namespace multisol {

/// A scalar nonlinearity z -> F(z) with closed-form first and second
/// derivatives, applied pointwise at quadrature nodes.
struct PointwiseNonlinearity {
  std::function<double(double)> value;
  std::function<double(double)> first;
  std::function<double(double)> second;

  static PointwiseNonlinearity zero();
  static PointwiseNonlinearity identity();

  /// s * F(z)
  PointwiseNonlinearity scaled(double s) const;
};

}  // namespace multisol
