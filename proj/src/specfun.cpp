#include "treedisp/specfun.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "treedisp/errors.hpp"

namespace treedisp {

TreeDegree::TreeDegree(int q) : q_(q) {
  if (q < 2) {
    throw DomainError("tree degree q must be >= 2 (got " + std::to_string(q) + ")");
  }
}

double TreeDegree::spectral_edge() const noexcept { return 2.0 * std::sqrt(as_double()); }

namespace specfun {

ChebyshevPair chebyshev_pair(int n, double x) {
  if (n < 0) throw DomainError("chebyshev_pair: negative degree");
  double p_prev = 1.0, p = x;
  double q_prev = 1.0, q = 2.0 * x;
  if (n == 0) return {1.0, 1.0};
  for (int k = 1; k < n; ++k) {
    const double p_next = 2.0 * x * p - p_prev;
    const double q_next = 2.0 * x * q - q_prev;
    p_prev = p;
    p = p_next;
    q_prev = q;
    q = q_next;
  }
  return {p, q};
}

ChebyshevDerivs chebyshev_derivs(int n, double x) {
  if (n < 0) throw DomainError("chebyshev_derivs: negative degree");
  if (n == 0) return {0.0, 0.0, 0.0, 0.0};

  // Q_j for j <= n, then Q'_j from the parity sums Q_m' = 2 Σ_{j≡m} j Q_{j-1}.
  std::vector<double> Q(n + 1), dQ(n + 1, 0.0), d2Q(n + 1, 0.0);
  Q[0] = 1.0;
  Q[1] = 2.0 * x;
  for (int k = 1; k < n; ++k) Q[k + 1] = 2.0 * x * Q[k] - Q[k - 1];

  double sum1[2] = {0.0, 0.0};  // running Σ j Q_{j-1}, split by parity of j
  for (int m = 1; m <= n; ++m) {
    sum1[m % 2] += m * Q[m - 1];
    dQ[m] = 2.0 * sum1[m % 2];
  }
  double sum2[2] = {0.0, 0.0};  // running Σ j Q'_{j-1}
  for (int m = 1; m <= n; ++m) {
    sum2[m % 2] += m * dQ[m - 1];
    d2Q[m] = 2.0 * sum2[m % 2];
  }
  return {n * Q[n - 1], dQ[n], n * dQ[n - 1], d2Q[n]};
}

double spherical_edge_value(int n, TreeDegree q) {
  const double qd = q.as_double();
  return std::pow(qd, -0.5 * n) * (2.0 + (n + 1) * (qd - 1.0)) / (qd + 1.0);
}

double spherical(int n, double lambda, TreeDegree q) {
  const double qd = q.as_double();
  const auto [P, Q] = chebyshev_pair(n, lambda / q.spectral_edge());
  return std::pow(qd, -0.5 * n) * (2.0 * P + (qd - 1.0) * Q) / (qd + 1.0);
}

double spherical_deriv(int n, double lambda, TreeDegree q, int order) {
  if (order != 1 && order != 2) throw DomainError("spherical_deriv: order must be 1 or 2");
  const double qd = q.as_double();
  const double edge = q.spectral_edge();
  const auto d = chebyshev_derivs(n, lambda / edge);
  const double scale = std::pow(qd, -0.5 * n) / (qd + 1.0);
  if (order == 1) return scale * (2.0 * d.dP + (qd - 1.0) * d.dQ) / edge;
  return scale * (2.0 * d.d2P + (qd - 1.0) * d.d2Q) / (edge * edge);
}

namespace {

std::complex<double> periodic_trapezoid(int k, double tau, int nodes) {
  std::complex<double> acc = 0.0;
  const double h = 2.0 * std::numbers::pi / nodes;
  for (int j = 0; j < nodes; ++j) {
    const double x = j * h;
    acc += std::polar(1.0, k * x + tau * std::cos(x));
  }
  return acc / static_cast<double>(nodes);
}

}  // namespace

double bessel_J(int k, double tau) {
  // The trapezoid rule is exact for Fourier modes below the node count and the
  // integrand's spectrum is negligible beyond |k| + |τ| + O(|τ|^{1/3}).
  int nodes = 32;
  while (nodes < 2 * (std::abs(k) + static_cast<int>(std::ceil(std::abs(tau))) + 24)) nodes *= 2;

  constexpr double kTol = 1e-12;
  constexpr int kMaxNodes = 1 << 24;
  std::complex<double> coarse = periodic_trapezoid(k, tau, nodes);
  for (;;) {
    const std::complex<double> fine = periodic_trapezoid(k, tau, 2 * nodes);
    const double err = std::abs(fine - coarse);
    if (err <= kTol) {
      // Undo the i^k factor.
      std::complex<double> phase = 1.0;
      switch (((k % 4) + 4) % 4) {
        case 1: phase = {0.0, -1.0}; break;
        case 2: phase = -1.0; break;
        case 3: phase = {0.0, 1.0}; break;
        default: break;
      }
      const std::complex<double> value = phase * fine;
      if (std::abs(value.imag()) > kTol) {
        throw ConvergenceError("bessel_J: imaginary residue " + std::to_string(value.imag()));
      }
      return value.real();
    }
    nodes *= 2;
    if (nodes > kMaxNodes) {
      throw ConvergenceError("bessel_J: trapezoid rule did not converge for k=" + std::to_string(k));
    }
    coarse = fine;
  }
}

}  // namespace specfun
}  // namespace treedisp
