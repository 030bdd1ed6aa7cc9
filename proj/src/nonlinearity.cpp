#include "multisol/nonlinearity.hpp"
#include "multisol/system.hpp"

#include <cmath>

namespace multisol {

PointwiseNonlinearity PointwiseNonlinearity::zero() {
  auto z = [](double) { return 0.0; };
  return {z, z, z};
}

PointwiseNonlinearity PointwiseNonlinearity::identity() {
  return {[](double v) { return v; }, [](double) { return 1.0; }, [](double) { return 0.0; }};
}

PointwiseNonlinearity PointwiseNonlinearity::scaled(double s) const {
  return {[f = value, s](double z) { return s * f(z); },
          [f = first, s](double z) { return s * f(z); },
          [f = second, s](double z) { return s * f(z); }};
}

void require_finite(const Vector& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw EvaluationError(std::string(what) + ": non-finite value at index " + std::to_string(i), i);
    }
  }
}

double max_abs_difference(const GridSamples& a, const GridSamples& b) {
  if (a.values.size() != b.values.size()) {
    throw std::invalid_argument("max_abs_difference: grids differ in size");
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

}  // namespace multisol
