#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "treedisp/errors.hpp"
#include "treedisp/specfun.hpp"

using namespace treedisp;
using namespace treedisp::specfun;

TEST_CASE("tree degree rejects q below 2") {
  CHECK_THROWS_AS(TreeDegree(1), DomainError);
  CHECK_THROWS_AS(TreeDegree(0), DomainError);
  CHECK(TreeDegree(3).spectral_edge() == doctest::Approx(2 * std::sqrt(3.0)));
}

TEST_CASE("chebyshev pair: fixed values") {
  auto p0 = chebyshev_pair(0, 0.3);
  CHECK(p0.first == 1.0);
  CHECK(p0.second == 1.0);
  for (int n = 0; n <= 12; ++n) {
    auto p = chebyshev_pair(n, 1.0);
    CHECK(p.first == doctest::Approx(1.0));
    CHECK(p.second == doctest::Approx(n + 1.0));
  }
  // cos(3π/3) = -1 and sin(4π/3)/sin(π/3) = -1.
  auto p3 = chebyshev_pair(3, 0.5);
  CHECK(p3.first == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(p3.second == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("chebyshev pair matches trigonometric and hyperbolic forms") {
  for (double x : {-0.97, -0.4, 0.05, 0.33, 0.81}) {
    const double th = std::acos(x);
    for (int n = 0; n <= 30; ++n) {
      auto p = chebyshev_pair(n, x);
      CHECK(p.first == doctest::Approx(std::cos(n * th)).epsilon(1e-12));
      CHECK(p.second == doctest::Approx(std::sin((n + 1) * th) / std::sin(th)).epsilon(1e-11));
    }
  }
  for (double x : {1.2, 2.5}) {
    const double u = std::acosh(x);
    for (int n = 0; n <= 20; ++n) {
      auto p = chebyshev_pair(n, x);
      CHECK(p.first == doctest::Approx(std::cosh(n * u)).epsilon(1e-12));
      CHECK(p.second == doctest::Approx(std::sinh((n + 1) * u) / std::sinh(u)).epsilon(1e-12));
    }
  }
}

TEST_CASE("chebyshev derivatives agree with differentiated trigonometric forms") {
  for (double x : {-0.8, -0.1, 0.45, 0.9}) {
    const double th = std::acos(x), s = std::sin(th);
    for (int n = 1; n <= 15; ++n) {
      auto d = chebyshev_derivs(n, x);
      // d/dx cos nθ = n sin nθ / sin θ
      CHECK(d.dP == doctest::Approx(n * std::sin(n * th) / s).epsilon(1e-11));
      auto Q = [n](double y) { return chebyshev_pair(n, y).second; };
      auto dQ = [n](double y) { return chebyshev_derivs(n, y).dQ; };
      CHECK(d.dQ == doctest::Approx(oracle::central_difference(Q, x, 1e-6)).epsilon(1e-7));
      CHECK(d.d2Q == doctest::Approx(oracle::central_difference(dQ, x, 1e-6)).epsilon(1e-7));
      auto dP = [n](double y) { return chebyshev_derivs(n, y).dP; };
      CHECK(d.d2P == doctest::Approx(oracle::central_difference(dP, x, 1e-6)).epsilon(1e-7));
    }
  }
  auto d0 = chebyshev_derivs(0, 0.3);
  CHECK(d0.dP == 0.0);
  CHECK(d0.d2Q == 0.0);
}

TEST_CASE("spherical function values") {
  for (int q : {2, 3, 7}) {
    const TreeDegree Q(q);
    for (double lam : {-1.0, 0.0, 0.7, 2.5}) CHECK(spherical(0, lam, Q) == doctest::Approx(1.0));
    for (int n = 0; n <= 10; ++n) {
      const double expected =
          std::pow(q, -0.5 * n) * (2.0 + (n + 1) * (q - 1.0)) / (q + 1.0);
      CHECK(spherical(n, Q.spectral_edge(), Q) == doctest::Approx(expected).epsilon(1e-13));
      CHECK(spherical_edge_value(n, Q) == doctest::Approx(expected).epsilon(1e-15));
    }
  }
  CHECK(spherical(1, 2 * std::sqrt(2.0), TreeDegree(2)) ==
        doctest::Approx(4.0 / 3.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(spherical(1, 2 * std::sqrt(2.0), TreeDegree(2)) == doctest::Approx(0.94281).epsilon(1e-5));
}

TEST_CASE("spherical function is bounded by its edge value on the spectrum") {
  for (int q : {2, 5}) {
    const TreeDegree Q(q);
    for (int n = 0; n <= 12; ++n) {
      for (int j = 0; j <= 200; ++j) {
        const double lam = -Q.spectral_edge() + 2 * Q.spectral_edge() * j / 200;
        CHECK(std::abs(spherical(n, lam, Q)) <= spherical_edge_value(n, Q) * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("spherical derivatives") {
  const TreeDegree Q2(2);
  CHECK(spherical_deriv(0, 0.4, Q2, 1) == 0.0);
  auto f = [&](double l) { return spherical(2, l, Q2); };
  const double fd = oracle::central_difference(f, 0.0, 1e-6);
  CHECK(spherical_deriv(2, 0.0, Q2, 1) == doctest::Approx(fd).epsilon(1e-8));
  CHECK_THROWS_AS(spherical_deriv(2, 0.0, Q2, 3), DomainError);

  for (int q : {2, 4}) {
    const TreeDegree Q(q);
    for (int n = 1; n <= 10; ++n) {
      const double bound = n * n * spherical_edge_value(n, Q) / (2 * std::sqrt(q * 1.0));
      for (int j = 0; j <= 100; ++j) {
        const double lam = -Q.spectral_edge() + 2 * Q.spectral_edge() * j / 100;
        CHECK(std::abs(spherical_deriv(n, lam, Q, 1)) <= bound * (1 + 1e-12));
        auto g = [&](double l) { return spherical_deriv(n, l, Q, 1); };
        if (j > 0 && j < 100) {
          CHECK(spherical_deriv(n, lam, Q, 2) ==
                doctest::Approx(oracle::central_difference(g, lam, 1e-5)).epsilon(1e-6).scale(1.0));
        }
      }
    }
  }
}

TEST_CASE("bessel J by trapezoid agrees with the series oracle") {
  CHECK(bessel_J(0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bessel_J(1, 2.0) == doctest::Approx(0.5767248077568734).epsilon(1e-13));
  for (int k : {0, 1, 2, 5, 11, 30}) {
    for (double x : {0.3, 2.0, 10.0, 40.0}) {
      CHECK(std::abs(bessel_J(k, x) - oracle::bessel_series(k, x)) <= 1e-12);
      CHECK(bessel_J(k, x) == doctest::Approx((k % 2 ? -1.0 : 1.0) * bessel_J(-k, x)).epsilon(1e-14));
    }
  }
}
