#pragma once

// Reference computations that share no code with the library.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using big = boost::multiprecision::cpp_bin_float_50;
using huge = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<120>>;

/// J_k(x) = Σ (−1)^m (x/2)^{2m+k} / (m!(m+k)!) in 50-digit arithmetic.
inline double bessel_series(int k, double x) {
  int sign = 1;
  if (k < 0) {
    k = -k;
    sign = (k % 2) ? -1 : 1;
  }
  const big half = big(x) / 2;
  big term = 1;
  for (int j = 1; j <= k; ++j) term *= half / j;
  big sum = term;
  const big h2 = half * half;
  for (int m = 1; m < 2000; ++m) {
    term *= -h2 / (big(m) * big(m + k));
    sum += term;
    if (abs(term) < big("1e-45") * (1 + abs(sum)) && m > x) break;
  }
  return sign * static_cast<double>(sum);
}

/// ∫_0^A e^{iβx²} dx by its power series, for moderate βA².
inline std::complex<double> fresnel_series(double beta, double A) {
  const huge b = beta, a = A;
  huge re = 0, im = 0;
  huge mag = a;  // β^k A^{2k+1} / k!
  for (int k = 0; k < 4000; ++k) {
    const huge term = mag / (2 * k + 1);
    switch (k % 4) {
      case 0: re += term; break;
      case 1: im += term; break;
      case 2: re -= term; break;
      default: im -= term; break;
    }
    if (k > beta * A * A && term < huge("1e-40")) break;
    mag *= b * a * a / (k + 1);
  }
  return {static_cast<double>(re), static_cast<double>(im)};
}

/// Same integral for large βA²: the full-line value minus the asymptotic tail
/// ∫_A^∞ e^{iβx²} dx = −e^{iβA²}/(2iβA) Σ_m (2m−1)!! / (2iβA²)^m.
inline std::complex<double> fresnel_asymptotic(double beta, double A, int terms = 12) {
  using C = std::complex<double>;
  const C I(0, 1);
  const C full = 0.5 * std::sqrt(std::numbers::pi / beta) * std::exp(I * std::numbers::pi / 4.0);
  C series = 1.0, term = 1.0;
  for (int m = 1; m < terms; ++m) {
    term *= (2.0 * m - 1) / (2.0 * I * beta * A * A);
    series += term;
  }
  const C tail = -std::exp(I * beta * A * A) / (2.0 * I * beta * A) * series;
  return full - tail;
}

/// Gauss–Kronrod of a complex integrand, real and imaginary parts separately, on
/// `pieces` equal subintervals (about two per oscillation of the integrand).
inline std::complex<double> integrate(const std::function<std::complex<double>(double)>& f,
                                      double a, double b, int pieces = 1) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  double re = 0.0, im = 0.0;
  const double h = (b - a) / pieces;
  for (int p = 0; p < pieces; ++p) {
    const double lo = a + p * h, hi = (p + 1 == pieces) ? b : lo + h;
    re += GK::integrate([&](double x) { return f(x).real(); }, lo, hi, 6, 1e-14);
    im += GK::integrate([&](double x) { return f(x).imag(); }, lo, hi, 6, 1e-14);
  }
  return {re, im};
}

/// Tanh–sinh on `pieces` subintervals; tolerates integrable endpoint singularities.
inline std::complex<double> integrate_singular(const std::function<std::complex<double>(double)>& f,
                                               double a, double b, int pieces = 1) {
  boost::math::quadrature::tanh_sinh<double> ts;
  double re = 0.0, im = 0.0;
  const double h = (b - a) / pieces;
  for (int p = 0; p < pieces; ++p) {
    const double lo = a + p * h, hi = (p + 1 == pieces) ? b : lo + h;
    re += ts.integrate([&](double x) { return f(x).real(); }, lo, hi, 1e-13);
    im += ts.integrate([&](double x) { return f(x).imag(); }, lo, hi, 1e-13);
  }
  return {re, im};
}

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2 * h);
}

inline double second_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
}

/// Richardson extrapolation of g(h) → g(0) from h, h/r, h/r², assuming g = g0 + c1 h + c2 h² + ...
inline double richardson(const std::function<double(double)>& g, double h, double r = 2.0) {
  const double g1 = g(h), g2 = g(h / r), g3 = g(h / (r * r));
  const double e1 = (r * g2 - g1) / (r - 1), e2 = (r * g3 - g2) / (r - 1);
  return (r * r * e2 - e1) / (r * r - 1);
}

}  // namespace oracle
