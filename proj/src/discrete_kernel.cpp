#include "treedisp/discrete_kernel.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "treedisp/errors.hpp"
#include "treedisp/quadrature.hpp"

namespace treedisp::discrete {

using cplx = std::complex<double>;

double psi(double lambda, TreeDegree q) {
  const double edge = q.spectral_edge();
  if (std::abs(lambda) > edge * (1.0 + 1e-14)) {
    throw DomainError("spectral density: |lambda| > 2 sqrt(q)");
  }
  const double qd = q.as_double();
  const double root = std::sqrt(std::max(0.0, (edge - std::abs(lambda)) * (edge + std::abs(lambda))));
  return (qd + 1.0) * root / (2.0 * ((qd + 1.0) * (qd + 1.0) - lambda * lambda));
}

double spectral_density(double lambda, int n, TreeDegree q) {
  return psi(lambda, q) * specfun::spherical(n, lambda, q);
}

namespace {

// (1/π)∫_0^π e^{itλ} Ψ(λ)Φ_n(λ) 2√q sinθ dθ with λ = 2√q cosθ.
cplx theta_quadrature(double t, int n, TreeDegree q, int nodes) {
  constexpr int kOrder = 32;
  const int panels = (nodes + kOrder - 1) / kOrder;
  const double edge = q.spectral_edge();
  auto f = [&](double theta) {
    const double lambda = edge * std::cos(theta);
    return std::polar(spectral_density(lambda, n, q) * edge * std::sin(theta), t * lambda);
  };
  return quad::integrate_composite(f, 0.0, std::numbers::pi, panels, kOrder) / std::numbers::pi;
}

}  // namespace

cplx kernel_numeric(double t, int n, TreeDegree q) {
  if (n < 0) throw DomainError("kernel_numeric: negative distance");
  int nodes = std::max(64, static_cast<int>(std::ceil(40.0 * std::sqrt(q.as_double()) * std::abs(t))));
  cplx prev = theta_quadrature(t, n, q, nodes);
  for (int doubling = 0; doubling < 4; ++doubling) {
    nodes *= 2;
    const cplx cur = theta_quadrature(t, n, q, nodes);
    if (std::abs(cur - prev) < 1e-11) return cur;
    prev = cur;
  }
  throw ConvergenceError("discrete kernel_numeric: no convergence after 4 doublings at t=" +
                         std::to_string(t));
}

double main_term_coefficient(int n, TreeDegree q) {
  const double qd = q.as_double();
  return std::pow(qd, 0.25 - 0.5 * n) * (2.0 + (n + 1) * (qd - 1.0)) / ((qd - 1.0) * (qd - 1.0));
}

cplx kernel_main_term(double t, int n, TreeDegree q) {
  if (!(t > 0.0)) throw DomainError("kernel_main_term: t must be positive");
  const double amp = main_term_coefficient(n, q) / (std::sqrt(std::numbers::pi) * std::pow(t, 1.5));
  const double phase = q.spectral_edge() * t;
  if (n % 2 == 0) return {amp * std::sin(phase - std::numbers::pi / 4.0), 0.0};
  return {0.0, -amp * std::sin(phase + std::numbers::pi / 4.0)};
}

std::vector<double> phase_peaks(int n, TreeDegree q, double t_lo, double t_hi) {
  const double shift = (n % 2 == 0) ? 0.75 * std::numbers::pi : 0.25 * std::numbers::pi;
  const double edge = q.spectral_edge();
  std::vector<double> out;
  const long k0 = static_cast<long>(std::ceil((t_lo * edge - shift) / std::numbers::pi));
  for (long k = std::max(0L, k0);; ++k) {
    const double t = (k * std::numbers::pi + shift) / edge;
    if (t > t_hi) break;
    if (t >= t_lo) out.push_back(t);
  }
  return out;
}

double shell_size(int n, TreeDegree q) {
  if (n == 0) return 1.0;
  return (q.as_double() + 1.0) * std::pow(q.as_double(), n - 1);
}

int radial_oracle_min_size(double t, int n_max, TreeDegree q) {
  return n_max + static_cast<int>(std::ceil(q.spectral_edge() * std::abs(t))) + 50;
}

std::vector<cplx> radial_oracle(double t, int n_max, TreeDegree q, int N) {
  if (n_max < 0) throw DomainError("radial_oracle: negative n_max");
  const int need = radial_oracle_min_size(t, n_max, q);
  if (N < need) {
    throw DomainError("radial_oracle: N=" + std::to_string(N) + " below propagation margin " +
                      std::to_string(need));
  }
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(N);
  Eigen::VectorXd off(N - 1);
  off(0) = std::sqrt(q.as_double() + 1.0);
  for (int j = 1; j < N - 1; ++j) off(j) = std::sqrt(q.as_double());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw ConvergenceError("radial_oracle: eigensolver failed");
  const Eigen::MatrixXd& V = solver.eigenvectors();
  const Eigen::VectorXd& E = solver.eigenvalues();

  Eigen::VectorXcd coeff(N);
  for (int k = 0; k < N; ++k) coeff(k) = std::polar(1.0, t * E(k)) * V(0, k);
  std::vector<cplx> out(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    cplx u = 0.0;
    for (int k = 0; k < N; ++k) u += V(n, k) * coeff(k);
    out[n] = u / std::sqrt(shell_size(n, q));
  }
  return out;
}

cplx line_kernel(double t, int n) {
  // i^n J_n(2t) is exactly the Fourier integral; bessel_J evaluates that integral.
  const double j = specfun::bessel_J(n, 2.0 * t);
  switch (((n % 4) + 4) % 4) {
    case 0: return {j, 0.0};
    case 1: return {0.0, j};
    case 2: return {-j, 0.0};
    default: return {0.0, -j};
  }
}

}  // namespace treedisp::discrete
