#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "treedisp/decay_fit.hpp"
#include "treedisp/discrete_kernel.hpp"
#include "treedisp/errors.hpp"
#include "treedisp/quadrature.hpp"
#include "treedisp/roots.hpp"

using namespace treedisp;

TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n : {2, 5, 16, 32}) {
    const auto& rule = quad::gauss_legendre(n);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double acc = 0.0;
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) acc += rule.weights[j] * std::pow(rule.nodes[j], d);
      const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
      CHECK(acc == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
    }
  }
}

TEST_CASE("composite rule on an oscillatory integrand") {
  const double t = 50.0;
  auto f = [t](double x) { return std::polar(1.0, t * x); };
  const auto v = quad::integrate_composite(f, 0.0, 1.0, 16);
  const std::complex<double> exact = (std::polar(1.0, t) - 1.0) / std::complex<double>(0, t);
  CHECK(std::abs(v - exact) < 1e-14);
}

TEST_CASE("brent and safeguarded newton find bracketed roots") {
  const double r = roots::brent([](double x) { return std::cos(x) - x; }, 0.0, 1.0, 1e-14);
  CHECK(std::cos(r) == doctest::Approx(r).epsilon(1e-13));
  const double s = roots::safeguarded_newton(
      [](double x) { return std::pair{x * x * x - 2.0, 3.0 * x * x}; }, 0.0, 3.0, 1e-15, 1e-15);
  CHECK(s == doctest::Approx(std::cbrt(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(roots::brent([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-12), ConvergenceError);
}

TEST_CASE("decay fit recovers synthetic power laws") {
  std::vector<std::pair<double, double>> a, b;
  for (double t : fit::log_spaced(10, 1000, 12)) {
    a.emplace_back(t, 3.0 * std::pow(t, -1.5));
    b.emplace_back(t, 0.7 * std::pow(t, -0.5));
  }
  const auto fa = fit::decay_fit(a);
  CHECK(fa.slope == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK(fa.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(fa.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit::decay_fit(b).slope == doctest::Approx(-0.5).epsilon(1e-12));
  for (double e : fa.residuals) CHECK(std::abs(e) < 1e-12);
}

TEST_CASE("decay fit rejects bad input") {
  std::vector<std::pair<double, double>> few(7, {1.0, 1.0});
  CHECK_THROWS_AS(fit::decay_fit(few), DomainError);
  std::vector<std::pair<double, double>> same(10, {5.0, 1.0});
  same[3].second = 2.0;
  CHECK_THROWS_AS(fit::decay_fit(same), DomainError);
  std::vector<std::pair<double, double>> zero;
  for (int i = 1; i <= 9; ++i) zero.emplace_back(i, i == 4 ? 0.0 : 1.0 / i);
  CHECK_THROWS_AS(fit::decay_fit(zero), DomainError);
}

TEST_CASE("lattice kernel envelope decays like t^-1/2") {
  std::vector<double> peaks;
  for (int k = 0;; ++k) {
    const double t = (k * std::numbers::pi + std::numbers::pi / 4) / 2;
    if (t > 1000) break;
    if (t >= 50) peaks.push_back(t);
  }
  std::vector<std::pair<double, double>> s;
  for (double t : fit::log_subsample(peaks, 30)) s.emplace_back(t, std::abs(discrete::line_kernel(t, 0)));
  CHECK(fit::decay_fit(s).slope == doctest::Approx(-0.5).epsilon(0.1));
  CHECK(std::abs(fit::decay_fit(s).slope + 0.5) <= 0.05);
}

TEST_CASE("grid helpers") {
  const auto g = fit::log_spaced(1, 100, 3);
  CHECK(g[1] == doctest::Approx(10.0));
  CHECK(g.back() == 100.0);
  std::vector<double> dense;
  for (int i = 1; i <= 1000; ++i) dense.push_back(i);
  const auto sub = fit::log_subsample(dense, 20);
  CHECK(sub.size() <= 20);
  CHECK(sub.size() >= 15);
  for (std::size_t i = 1; i < sub.size(); ++i) CHECK(sub[i] > sub[i - 1]);
  CHECK(fit::window_max([](double t) { return std::sin(t); }, 0.0, std::numbers::pi, 3) ==
        doctest::Approx(1.0));
}
