#pragma once

#include "multisol/legendre.hpp"

#include <vector>

namespace multisol::detail {

/// Kronecker product a (x) b.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return k;
}

/// (L (x) L) diag(vec D) (R (x) R) without forming the Kronecker factors:
///   M(a1 + na a2, b1 + nb b2) = sum_{i,l} L(a1,i) L(a2,l) D(i,l) R(i,b1) R(l,b2).
inline Matrix kron_weighted(const Matrix& left, const Matrix& weights, const Matrix& right) {
  const Eigen::Index na = left.rows();
  const Eigen::Index nb = right.cols();
  const Eigen::Index p = left.cols();
  std::vector<Matrix> slices(static_cast<std::size_t>(p));
  for (Eigen::Index l = 0; l < p; ++l) {
    slices[static_cast<std::size_t>(l)] = left * weights.col(l).asDiagonal() * right;
  }
  Matrix m = Matrix::Zero(na * na, nb * nb);
  for (Eigen::Index b2 = 0; b2 < nb; ++b2) {
    for (Eigen::Index a2 = 0; a2 < na; ++a2) {
      auto block = m.block(a2 * na, b2 * nb, na, nb);
      for (Eigen::Index l = 0; l < p; ++l) {
        const double s = left(a2, l) * right(l, b2);
        if (s != 0.0) block.noalias() += s * slices[static_cast<std::size_t>(l)];
      }
    }
  }
  return m;
}

}  // namespace multisol::detail
