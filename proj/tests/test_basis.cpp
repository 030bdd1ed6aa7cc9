#include "doctest.h"
#include "oracle.hpp"

#include "multisol/basis.hpp"

#include <cmath>
#include <stdexcept>

using namespace multisol;
using oracle::legendre_endpoint;

namespace {

// Order-m derivative of basis function k at x = side, with the scale of the
// terms that cancel in it.
struct EndpointValue {
  double value = 0.0;
  double scale = 0.0;
};

EndpointValue endpoint(const ModalBasis& b, Eigen::Index k, int m, double side) {
  EndpointValue e;
  for (Eigen::Index a = 0; a < b.coeffs.cols(); ++a) {
    const double t = b.coeffs(k, a) * legendre_endpoint(static_cast<int>(a), m, side);
    e.value += t;
    e.scale += std::abs(t);
  }
  return e;
}

bool vanishes(const ModalBasis& b, Eigen::Index k, int m, double side, double tol = 1e-10) {
  const auto e = endpoint(b, k, m, side);
  const double lib = b.eval(k, side, m);
  return std::abs(e.value) <= tol * std::max(1.0, e.scale) && std::abs(lib) <= tol * std::max(1.0, e.scale);
}

double compact(int n, int m, double side) { return legendre_endpoint(n + 2, m, side) - legendre_endpoint(n, m, side); }

double integrate_product(const ModalBasis& b1, Eigen::Index i, int p, const ModalBasis& b2, Eigen::Index j, int q) {
  const oracle::Gauss g(40);
  return g.integrate([&](double x) {
    return oracle::legendre_series(b1.coeffs.row(i).transpose(), x, p) *
           oracle::legendre_series(b2.coeffs.row(j).transpose(), x, q);
  });
}

}  // namespace

TEST_CASE("Dirichlet basis vanishes at both ends") {
  for (int N = 3; N <= 64; ++N) {
    const auto b = dirichlet_basis(N);
    REQUIRE(b.size() == N - 1);
    for (Eigen::Index k = 0; k < b.size(); ++k) {
      CHECK(vanishes(b, k, 0, 1.0));
      CHECK(vanishes(b, k, 0, -1.0));
    }
  }
}

TEST_CASE("channel trial basis boundary identities") {
  for (int N = 5; N <= 64; ++N) {
    const auto b = channel_trial_basis(N);
    REQUIRE(b.size() == N - 3);
    for (Eigen::Index k = 0; k < b.size(); ++k) {
      CHECK(vanishes(b, k, 0, 1.0));
      CHECK(vanishes(b, k, 0, -1.0));
      CHECK(vanishes(b, k, 1, 1.0));
      CHECK(vanishes(b, k, 2, -1.0));
    }
  }
}

TEST_CASE("channel test basis boundary identities") {
  for (int N = 5; N <= 64; ++N) {
    const auto b = channel_test_basis(N);
    REQUIRE(b.size() == N - 3);
    for (Eigen::Index k = 0; k < b.size(); ++k) {
      for (double side : {-1.0, 1.0}) {
        CHECK(vanishes(b, k, 0, side));
        CHECK(vanishes(b, k, 1, side));
      }
    }
  }
}

TEST_CASE("mixed basis boundary identities") {
  for (int N = 3; N <= 64; ++N) {
    const auto b = mixed_bc_basis(N);
    REQUIRE(b.size() == N - 1);
    for (Eigen::Index k = 0; k < b.size(); ++k) {
      CHECK(vanishes(b, k, 1, -1.0));
      CHECK(vanishes(b, k, 0, 1.0));
    }
  }
}

TEST_CASE("trial constants solve the boundary conditions") {
  for (int k = 0; k <= 60; ++k) {
    // phi'(1) = 0 and phi''(-1) = 0 for J_k + a J_{k+1} + b J_{k+2}
    Eigen::Matrix2d M;
    M << compact(k + 1, 1, 1.0), compact(k + 2, 1, 1.0), compact(k + 1, 2, -1.0), compact(k + 2, 2, -1.0);
    const Eigen::Vector2d rhs(-compact(k, 1, 1.0), -compact(k, 2, -1.0));
    const Eigen::Vector2d ab = M.fullPivLu().solve(rhs);
    CHECK(channel_trial_a(k) == doctest::Approx(ab[0]).epsilon(1e-12));
    CHECK(channel_trial_b(k) == doctest::Approx(ab[1]).epsilon(1e-12));
    // psi'(1) = 0 for J_k + c J_{k+2}
    CHECK(channel_test_c(k) == doctest::Approx(-compact(k, 1, 1.0) / compact(k + 2, 1, 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("mixed basis coefficients solve the boundary conditions") {
  const auto b = mixed_bc_basis(62);
  for (int k = 0; k <= 60; ++k) {
    // psi(1) = 0 and psi'(-1) = 0 for L_k + a L_{k+1} + b L_{k+2}
    Eigen::Matrix2d M;
    M << 1.0, 1.0, legendre_endpoint(k + 1, 1, -1.0), legendre_endpoint(k + 2, 1, -1.0);
    const Eigen::Vector2d rhs(-1.0, -legendre_endpoint(k, 1, -1.0));
    const Eigen::Vector2d ab = M.fullPivLu().solve(rhs);
    CHECK(b.coeffs(k, k) == doctest::Approx(1.0));
    CHECK(b.coeffs(k, k + 1) == doctest::Approx(ab[0]).epsilon(1e-12));
    CHECK(b.coeffs(k, k + 2) == doctest::Approx(ab[1]).epsilon(1e-12));
  }
}

TEST_CASE("Gram matrices match quadrature") {
  const auto d = dirichlet_basis(9);
  const Matrix stiff = gram_matrix(d, 1, d, 1);
  const Matrix mass = gram_matrix(d, 0, d, 0);
  const auto trial = channel_trial_basis(10);
  const auto test = channel_test_basis(10);
  const Matrix g22 = gram_matrix(test, 2, trial, 2);
  const Matrix g01 = gram_matrix(test, 0, trial, 1);
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    for (Eigen::Index j = 0; j < d.size(); ++j) {
      CHECK(std::abs(stiff(i, j) - integrate_product(d, i, 1, d, j, 1)) <= 1e-11);
      CHECK(std::abs(mass(i, j) - integrate_product(d, i, 0, d, j, 0)) <= 1e-12);
    }
  }
  for (Eigen::Index i = 0; i < test.size(); ++i) {
    for (Eigen::Index j = 0; j < trial.size(); ++j) {
      CHECK(std::abs(g22(i, j) - integrate_product(test, i, 2, trial, j, 2)) <= 1e-9);
      CHECK(std::abs(g01(i, j) - integrate_product(test, i, 0, trial, j, 1)) <= 1e-11);
    }
  }
}

TEST_CASE("projection matrix integrates interpolants exactly") {
  const int N = 10;
  const auto b = dirichlet_basis(N);
  const auto r = lgl_rule(N);
  const Matrix P = projection_matrix(b, r);
  const oracle::Poly z{{0.3, -1.2, 0.5, 2.0, 0.0, -0.7, 0.1, 0.0, 0.25, -0.4, 0.05}};
  Vector nodal(N + 1);
  for (int i = 0; i <= N; ++i) nodal[i] = z(r.nodes[i]);
  const Vector got = P * nodal;
  const oracle::Gauss g(30);
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    const double exact =
        g.integrate([&](double x) { return z(x) * oracle::legendre_series(b.coeffs.row(j).transpose(), x); });
    CHECK(std::abs(got[j] - exact) <= 1e-12);
  }
  CHECK_THROWS_AS(projection_matrix(b, lgl_rule(N + 1)), std::invalid_argument);
}
