#include "treedisp/band_structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "treedisp/errors.hpp"
#include "treedisp/roots.hpp"

namespace treedisp {

namespace {

constexpr double kRootTol = 1e-11;

double root_tol(double x) {
  return std::max(kRootTol, 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x));
}

std::vector<double> scan_dirichlet(const EdgeSolver& solver, int n_max, double margin, int per_mode) {
  const auto& m = solver.model();
  const double L = m.L;
  const double floor = m.W.minimum() - margin;
  const double top = std::pow(n_max * std::numbers::pi / L, 2) + m.W.maximum() + margin;
  // Uniform grid in k = √(λ - floor); s oscillates with period ≈ 2π/L in k.
  const double k_top = std::sqrt(top - floor);
  const int steps = std::max(64, static_cast<int>(std::ceil(k_top * L / std::numbers::pi * per_mode)));
  auto s = [&solver](double lam) { return solver.s(lam).v; };
  std::vector<double> roots;
  double lam_prev = floor;
  double s_prev = s(lam_prev);
  for (int j = 1; j <= steps && static_cast<int>(roots.size()) < n_max; ++j) {
    const double k = k_top * j / steps;
    const double lam = floor + k * k;
    const double sv = s(lam);
    if (sv == 0.0) {
      roots.push_back(lam);
    } else if ((sv > 0) != (s_prev > 0) && s_prev != 0.0) {
      roots.push_back(roots::brent(s, lam_prev, s_prev, lam, sv, root_tol(lam)));
    }
    lam_prev = lam;
    s_prev = sv;
  }
  return roots;
}

}  // namespace

std::vector<double> dirichlet_values(const EdgeSolver& solver, int n_max) {
  if (n_max < 1) throw DomainError("dirichlet_values: n_max must be >= 1");
  double margin = solver.model().W.sup_norm() + 1.0;
  int per_mode = 16;
  for (int attempt = 0; attempt < 2; ++attempt) {
    auto roots = scan_dirichlet(solver, n_max, margin, per_mode);
    if (static_cast<int>(roots.size()) == n_max) return roots;
    margin *= 2.0;
    per_mode *= 2;
  }
  throw InvariantViolation("dirichlet_values: root count mismatch after retry (expected " +
                           std::to_string(n_max) + ")");
}

namespace {

// The unique crossing of w = level inside (lo, hi), required to be a single sign change
// on a scan of `samples` points.
double single_crossing(const EdgeSolver& solver, double level, double lo, double hi, int n,
                       int samples = 64) {
  auto f = [&solver, level](double lam) { return solver.w(lam).v - level; };
  double x_prev = lo, f_prev = f(lo);
  int changes = 0;
  double br_lo = 0, br_hi = 0, f_lo = 0, f_hi = 0;
  for (int j = 1; j <= samples; ++j) {
    const double x = lo + (hi - lo) * j / samples;
    const double fx = f(x);
    if ((fx > 0) != (f_prev > 0)) {
      ++changes;
      br_lo = x_prev;
      br_hi = x;
      f_lo = f_prev;
      f_hi = fx;
    }
    x_prev = x;
    f_prev = fx;
  }
  if (changes != 1) {
    throw InvariantViolation("compute_bands: w - (" + std::to_string(level) + ") changes sign " +
                             std::to_string(changes) + " times on (" + std::to_string(lo) + ", " +
                             std::to_string(hi) + ") for band " + std::to_string(n));
  }
  return roots::brent(f, br_lo, f_lo, br_hi, f_hi, root_tol(br_hi));
}

}  // namespace

std::vector<Band> compute_bands(const EdgeSolver& solver, int n_max) {
  const auto& m = solver.model();
  const double qd = m.q.as_double();
  const double level = 2.0 * std::sqrt(qd);
  const auto delta = dirichlet_values(solver, n_max);

  for (int n = 1; n <= n_max; ++n) {
    const double expect = (n % 2 == 0 ? 1.0 : -1.0) * (qd + 1.0);
    const double got = solver.w(delta[n - 1]).v;
    if (std::abs(got - expect) > 1e-7 * (qd + 1.0)) {
      throw InvariantViolation("compute_bands: w(delta_" + std::to_string(n) + ") = " +
                               std::to_string(got) + ", expected " + std::to_string(expect));
    }
  }

  // Left wall for band 1: walk down until w exceeds 2√q.
  double lower = std::min(m.W.minimum(), delta[0]) - 1.0;
  for (int i = 0; solver.w(lower).v <= level; ++i) {
    if (i > 60) throw ConvergenceError("compute_bands: cannot find a lower wall for band 1");
    lower -= std::max(1.0, std::abs(lower));
  }

  std::vector<Band> bands;
  for (int n = 1; n <= n_max; ++n) {
    const double lo = n == 1 ? lower : delta[n - 2];
    const double hi = delta[n - 1];
    // Keep the scan strictly inside the gap walls.
    const double pad = 1e-9 * (hi - lo);
    const double x_plus = single_crossing(solver, level, lo + pad, hi - pad, n);
    const double x_minus = single_crossing(solver, -level, lo + pad, hi - pad, n);
    Band band;
    band.index = n;
    band.a = std::min(x_plus, x_minus);
    band.b = std::max(x_plus, x_minus);
    band.w_sign = (n % 2 == 0) ? 1 : -1;
    band.dirichlet_above = hi;
    band.dirichlet_below = n == 1 ? -std::numeric_limits<double>::infinity() : lo;
    band.dw_a = solver.w(band.a).d1;
    band.dw_b = solver.w(band.b).d1;
    const double wa = solver.w(band.a).v;
    const double expected_wa = -band.w_sign * level;
    if (std::abs(wa - expected_wa) > 1e-6) {
      throw InvariantViolation("compute_bands: orientation of w on band " + std::to_string(n) +
                               " disagrees with (-1)^n");
    }
    bands.push_back(band);
  }
  return bands;
}

double invert_w_on_band(const EdgeSolver& solver, const Band& band, double target) {
  const double level = solver.model().q.spectral_edge();
  if (std::abs(target) > level * (1.0 + 1e-9)) {
    throw DomainError("invert_w_on_band: |target| > 2 sqrt(q)");
  }
  // Values of w at computed edges can overshoot the level by rounding.
  target = std::clamp(target, -level, level);
  auto fdf = [&solver, target](double lam) {
    const Jet j = solver.w(lam);
    return std::pair{j.v - target, j.d1};
  };
  // Orientation is known, so exact endpoint hits are returned directly.
  const double w_a = -band.w_sign * level;
  if (target == w_a) return band.a;
  if (target == -w_a) return band.b;
  try {
    return roots::safeguarded_newton(fdf, band.a, band.b, 1e-11, 1e-15 * std::max(1.0, std::abs(band.b)));
  } catch (const ConvergenceError&) {
    throw InvariantViolation("invert_w_on_band: no bracket on band " + std::to_string(band.index));
  }
}

BandTable::BandTable(std::shared_ptr<const EdgeSolver> solver, int n_bands)
    : solver_(std::move(solver)), bands_(compute_bands(*solver_, n_bands)) {}

const Band* BandTable::find(double lambda) const {
  const auto it = std::lower_bound(bands_.begin(), bands_.end(), lambda,
                                   [](const Band& band, double x) { return band.b < x; });
  for (auto cand = it; cand != bands_.end() && cand <= it + 1; ++cand) {
    const double slack = 1e-12 * std::max(1.0, std::abs(cand->b));
    if (lambda >= cand->a - slack && lambda <= cand->b + slack) return &*cand;
  }
  if (it != bands_.begin()) {
    const Band& prev = *(it - 1);
    const double slack = 1e-12 * std::max(1.0, std::abs(prev.b));
    if (lambda >= prev.a - slack && lambda <= prev.b + slack) return &prev;
  }
  return nullptr;
}

}  // namespace treedisp
