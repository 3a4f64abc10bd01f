#include "treedisp/quantum_kernel.hpp"

#include <algorithm>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>

#include "treedisp/discrete_kernel.hpp"
#include "treedisp/errors.hpp"
#include "treedisp/quadrature.hpp"

namespace treedisp {

using cplx = std::complex<double>;

void KernelQuery::validate(double L) const {
  if (kind == QueryKind::diagonal_vertex) return;
  if (x < 0.0 || x > L || y < 0.0 || y > L) throw DomainError("kernel query: x, y must lie in [0, L]");
  if (kind == QueryKind::distinct_edges && k < 2) {
    throw DomainError("kernel query: distinct edges need path length k >= 2");
  }
}

std::string KernelQuery::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case QueryKind::diagonal_vertex: os << "diag"; break;
    case QueryKind::same_edge: os << "same-edge:" << x << "," << y; break;
    case QueryKind::distinct_edges: os << "edges:" << k << "," << x << "," << y; break;
  }
  return os.str();
}

QuantumKernel::QuantumKernel(std::shared_ptr<const BandTable> table) : table_(std::move(table)) {
  if (!table_ || table_->size() == 0) throw DomainError("QuantumKernel: empty band table");
}

namespace {

double clamp_level(double w, double level) { return std::clamp(w, -level, level); }

}  // namespace

double QuantumKernel::psi1(double lambda) const {
  const Band* band = table_->find(lambda);
  if (!band) throw DomainError("psi1: lambda outside the computed bands");
  const auto& solver = table_->solver();
  const double level = model().q.spectral_edge();
  const EdgePoint e = solver.endpoint(lambda);
  const double w = (model().q.as_double() + 1.0) * e.C.v + model().alpha * e.S.v;
  const double sign = (band->index % 2 == 1) ? 1.0 : -1.0;
  return sign * e.S.v * discrete::psi(clamp_level(w, level), model().q);
}

cplx QuantumKernel::mu_minus(double lambda) const {
  const Band* band = table_->find(lambda);
  if (!band) throw DomainError("mu_minus: lambda outside the computed bands");
  const double qd = model().q.as_double();
  const double w = clamp_level(table_->solver().w(lambda).v, model().q.spectral_edge());
  const double eps = band->w_sign;
  return cplx(w, -eps * std::sqrt(std::max(0.0, 4.0 * qd - w * w))) / (2.0 * qd);
}

double QuantumKernel::correlation(double lambda, const KernelQuery& query) const {
  const double L = model().L;
  query.validate(L);
  if (query.kind == QueryKind::diagonal_vertex) return 1.0;
  const auto& solver = table_->solver();
  const double x = query.x, y = query.y;
  const auto S = solver.S_values(lambda, {x, L - x, y, L - y, L});
  const double Sx = S[0], SLx = S[1], Sy = S[2], SLy = S[3], s = S[4];
  if (s == 0.0) throw InvariantViolation("correlation: s(lambda) = 0 on the spectrum");
  const double s2 = s * s;
  const double w = (model().q.as_double() + 1.0) * solver.endpoint(lambda).C.v + model().alpha * s;
  if (query.kind == QueryKind::same_edge) {
    return (SLx * SLy + Sx * Sy + w / (model().q.as_double() + 1.0) * (SLx * Sy + Sx * SLy)) / s2;
  }
  const int k = query.k;
  const TreeDegree q = model().q;
  return SLx * Sy / s2 * specfun::spherical(k, w, q) +
         (SLx * SLy + Sx * Sy) / s2 * specfun::spherical(k - 1, w, q) +
         Sx * SLy / s2 * specfun::spherical(k - 2, w, q);
}

double QuantumKernel::density(double lambda, const KernelQuery& query) const {
  return psi1(lambda) * correlation(lambda, query);
}

double QuantumKernel::edge_weight(double lambda, const KernelQuery& query) const {
  const Jet w = table_->solver().w(lambda);
  const double s = table_->solver().s(lambda).v;
  return std::sqrt(std::abs(w.d1)) * std::abs(s) * correlation(lambda, query);
}

std::vector<double> QuantumKernel::build_coefficients(int n, const KernelQuery& query) const {
  const Band& band = table_->bands().at(n - 1);
  const double a = band.a, b = band.b;
  const double half = 0.5 * (b - a);
  auto sample = [&](int j, int M) {
    if (j == 0 || j == M) return 0.0;  // sin φ = 0 and Ψ1 = 0 at the edges
    const double phi = std::numbers::pi * j / M;
    const double lam = a + half * (1.0 - std::cos(phi));
    return density(lam, query) / std::numbers::pi * half * std::sin(phi);
  };
  auto coefficients = [](const std::vector<double>& h) {
    const int M = static_cast<int>(h.size()) - 1;
    std::vector<double> c(M + 1, 0.0);
    for (int k = 0; k <= M; ++k) {
      double acc = 0.5 * (h[0] + ((k % 2 == 0) ? h[M] : -h[M]));
      for (int j = 1; j < M; ++j) acc += h[j] * std::cos(std::numbers::pi * ((static_cast<long>(j) * k) % (2 * M)) / M);
      c[k] = 2.0 * acc / M;
    }
    c[0] *= 0.5;
    c[M] *= 0.5;
    return c;
  };

  int M = 32;
  std::vector<double> h(M + 1);
  for (int j = 0; j <= M; ++j) h[j] = sample(j, M);
  std::vector<double> prev = coefficients(h);
  constexpr int kMaxM = 2048;
  while (M < kMaxM) {
    std::vector<double> finer(2 * M + 1);
    for (int j = 0; j <= M; ++j) finer[2 * j] = h[j];
    for (int j = 0; j < M; ++j) finer[2 * j + 1] = sample(2 * j + 1, 2 * M);
    M *= 2;
    h = std::move(finer);
    std::vector<double> cur = coefficients(h);
    double scale = 0.0;
    for (double v : cur) scale = std::max(scale, std::abs(v));
    double change = 0.0;
    for (std::size_t k = 0; k < cur.size(); ++k) {
      change = std::max(change, std::abs(cur[k] - (k < prev.size() ? prev[k] : 0.0)));
    }
    if (change <= 1e-13 * scale) {
      std::size_t len = cur.size();
      while (len > 1 && std::abs(cur[len - 1]) <= 1e-17 * scale) --len;
      cur.resize(len);
      return cur;
    }
    prev = std::move(cur);
  }
  throw ConvergenceError("quantum kernel: Chebyshev expansion of band " + std::to_string(n) +
                         " did not converge");
}

const std::vector<double>& QuantumKernel::chebyshev_coefficients(int n, const KernelQuery& query) const {
  if (n < 1 || n > table_->size()) throw DomainError("band index out of range");
  query.validate(model().L);
  const CacheKey key{n, static_cast<int>(query.kind), query.x, query.y, query.k};
  {
    std::shared_lock lock(mutex_);
    const auto it = coeff_cache_.find(key);
    if (it != coeff_cache_.end()) return it->second;
  }
  auto coeffs = build_coefficients(n, query);
  std::unique_lock lock(mutex_);
  return coeff_cache_.emplace(key, std::move(coeffs)).first->second;
}

std::vector<double> bessel_sequence(int count, double tau) {
  std::vector<double> J(std::max(count, 0), 0.0);
  if (count <= 0) return J;
  if (tau == 0.0) {
    J[0] = 1.0;
    return J;
  }
  const double sign = tau < 0 ? -1.0 : 1.0;
  const double x = std::abs(tau);
  J[0] = boost::math::cyl_bessel_j(0, x);
  int k = 1;
  if (count > 1) J[1] = boost::math::cyl_bessel_j(1, x);
  // Forward recurrence is stable while the order stays below the argument.
  for (k = 1; k + 1 < count && k + 1 < x; ++k) J[k + 1] = (2.0 * k / x) * J[k] - J[k - 1];
  for (int m = k + 1; m < count; ++m) J[m] = boost::math::cyl_bessel_j(m, x);
  if (sign < 0) {
    for (int m = 1; m < count; m += 2) J[m] = -J[m];
  }
  return J;
}

cplx QuantumKernel::band_integral(int n, double t, const KernelQuery& query, BandQuadrature route) const {
  const Band& band = table_->bands().at(n - 1);
  const double a = band.a, b = band.b;
  if (route == BandQuadrature::chebyshev_bessel) {
    const auto& c = chebyshev_coefficients(n, query);
    const double tau = 0.5 * t * (b - a);
    const auto J = bessel_sequence(static_cast<int>(c.size()), tau);
    // Σ c_k (-i)^k J_k(τ), grouped by k mod 4.
    double re = 0.0, im = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      const double v = c[k] * J[k];
      switch (k % 4) {
        case 0: re += v; break;
        case 1: im -= v; break;
        case 2: re -= v; break;
        default: im += v; break;
      }
    }
    return std::polar(std::numbers::pi, 0.5 * t * (a + b)) * cplx(re, im);
  }

  const auto& solver = table_->solver();
  const double level = model().q.spectral_edge();
  const int nodes = std::max(64, static_cast<int>(std::ceil(40.0 * std::abs(t) * (b - a) / (2.0 * std::numbers::pi))));
  constexpr int kOrder = 32;
  const int panels = (nodes + kOrder - 1) / kOrder;
  const double sign = (n % 2 == 1) ? 1.0 : -1.0;
  auto f = [&](double theta) {
    const double target = level * std::cos(theta);
    const double lam = invert_w_on_band(solver, band, target);
    const Jet w = solver.w(lam);
    const double s = solver.s(lam).v;
    const double psi1 = sign * s * discrete::psi(target, model().q);
    const double jac = std::abs(level * std::sin(theta) / w.d1);
    return std::polar(psi1 * correlation(lam, query) * jac / std::numbers::pi, t * lam);
  };
  return quad::integrate_composite(f, 0.0, std::numbers::pi, panels, kOrder);
}

BandContribution QuantumKernel::band_contribution(int n, double t, const KernelQuery& query,
                                                  bool with_numeric) const {
  if (!(t > 0.0)) throw DomainError("band_contribution: t must be positive");
  const Band& band = table_->bands().at(n - 1);
  const double qd = model().q.as_double();
  const double K = std::pow(qd, 0.25) * (qd + 1.0) /
                   ((qd - 1.0) * (qd - 1.0) * std::sqrt(std::numbers::pi) * std::pow(t, 1.5));
  const double A = edge_weight(band.a, query);
  const double B = edge_weight(band.b, query);
  const cplx I(0.0, 1.0);
  BandContribution out;
  out.n = n;
  out.main = K * I *
             (std::polar(0.5 * A, t * band.a + std::numbers::pi / 4.0) -
              std::polar(0.5 * B, t * band.b - std::numbers::pi / 4.0));
  out.magnitude_bound = 0.5 * K * (std::abs(A) + std::abs(B));
  if (with_numeric) out.numeric = band_integral(n, t, query);
  return out;
}

double QuantumKernel::tail_estimate(double t, const KernelQuery& query, int n_bands) const {
  if (t == 0.0) return std::numeric_limits<double>::infinity();
  double C = 0.0;
  for (int n = std::max(1, n_bands - 2); n <= n_bands; ++n) {
    C = std::max(C, band_contribution(n, std::abs(t), query, false).magnitude_bound * std::pow(n, 1.5));
  }
  return 2.0 * C / std::sqrt(static_cast<double>(n_bands));
}

KernelValue QuantumKernel::kernel_numeric(double t, const KernelQuery& query, int n_bands,
                                          BandQuadrature route) const {
  if (n_bands < 1 || n_bands > table_->size()) throw DomainError("kernel_numeric: n_bands out of range");
  query.validate(model().L);
  KernelValue out;
  for (int n = 1; n <= n_bands; ++n) out.value += band_integral(n, t, query, route);
  out.tail_bound = tail_estimate(t, query, n_bands);
  out.tail_warning = out.tail_bound > 1e-3 * std::abs(out.value);
  return out;
}

KernelValue QuantumKernel::kernel_main_term(double t, const KernelQuery& query, int n_bands) const {
  if (!(t > 0.0)) throw DomainError("kernel_main_term: t must be positive");
  if (n_bands < 1 || n_bands > table_->size()) throw DomainError("kernel_main_term: n_bands out of range");
  query.validate(model().L);
  KernelValue out;
  for (int n = 1; n <= n_bands; ++n) out.value += band_contribution(n, t, query, false).main;
  out.tail_bound = tail_estimate(t, query, n_bands);
  out.tail_warning = out.tail_bound > 1e-3 * std::abs(out.value);
  return out;
}

FreeLineKernel free_line_kernel(double t, double v) {
  if (!(t > 0.0)) throw DomainError("free_line_kernel: t must be positive");
  if (v < 0.0) throw DomainError("free_line_kernel: v must be >= 0");
  const cplx I(0.0, 1.0);
  FreeLineKernel out;
  out.closed_form = 0.5 * std::sqrt(I / (std::numbers::pi * t)) * std::polar(1.0, -t * v * v / 4.0);

  // (1/π)∫_0^∞ e^{itk²} cos(kvt) dk: quadrature on [0, K] plus asymptotic tails of
  // ½∫_K^∞ e^{iφ±}, φ± = t(k² ± kv).
  const double K = 6.0 + 2.0 * v;
  auto tail = [&](double sgn) {
    const double phi = t * (K * K + sgn * K * v);
    const double d1 = t * (2.0 * K + sgn * v);
    const double d2 = 2.0 * t;
    const cplx bracket = 1.0 / (I * d1) - d2 / (d1 * d1 * d1) - 3.0 * d2 * d2 / (I * std::pow(d1, 5));
    return -std::polar(1.0, phi) * bracket;
  };
  auto integrand = [&](double k) { return std::polar(std::cos(k * v * t), t * k * k); };
  const double periods = t * (K * K + K * v) / (2.0 * std::numbers::pi);
  int panels = std::max(64, static_cast<int>(std::ceil(periods)));
  cplx prev = quad::integrate_composite(integrand, 0.0, K, panels, 32);
  for (int attempt = 0; attempt < 4; ++attempt) {
    panels *= 2;
    const cplx cur = quad::integrate_composite(integrand, 0.0, K, panels, 32);
    if (std::abs(cur - prev) < 1e-12) {
      out.numeric = (cur + 0.5 * (tail(1.0) + tail(-1.0))) / std::numbers::pi;
      return out;
    }
    prev = cur;
  }
  throw ConvergenceError("free_line_kernel: quadrature did not converge");
}

}  // namespace treedisp
