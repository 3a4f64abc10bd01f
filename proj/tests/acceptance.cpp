// Acceptance suite: one PASS/FAIL line per criterion, with its runtime budget.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "treedisp/band_structure.hpp"
#include "treedisp/decay_fit.hpp"
#include "treedisp/discrete_kernel.hpp"
#include "treedisp/edge_ode.hpp"
#include "treedisp/quantum_kernel.hpp"
#include "treedisp/stationary_phase.hpp"

using namespace treedisp;
using cd = std::complex<double>;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += "[failed: " + what + "] ";
    }
  }
  void note(const std::string& s) { detail += s + " "; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

cd ipow(int n) {
  static const cd table[4] = {1.0, cd(0, 1), -1.0, cd(0, -1)};
  return table[((n % 4) + 4) % 4];
}

std::shared_ptr<const BandTable> band_table(const std::string& potential, double alpha, int n_bands) {
  QuantumTreeModel m;
  m.q = TreeDegree(2);
  m.L = 1.0;
  m.alpha = alpha;
  m.W = Potential::parse(potential, 1.0);
  return std::make_shared<const BandTable>(std::make_shared<const EdgeSolver>(m), n_bands);
}

Outcome lattice_identity() {
  Outcome o;
  double worst = 0.0;
  for (int n : {0, 1, 5}) {
    for (double t : {1.0, 5.0, 20.0}) {
      worst = std::max(worst, std::abs(discrete::line_kernel(t, n) - ipow(n) * oracle::bessel_series(n, 2 * t)));
    }
  }
  o.require(worst <= 1e-10, "max error <= 1e-10");
  o.note("max |quadrature - i^n J_n(2t)| = " + fmt("%.2e", worst));
  return o;
}

Outcome radial_equivalence() {
  Outcome o;
  const TreeDegree q(2);
  const int N = std::max(200, discrete::radial_oracle_min_size(20.0, 5, q));
  const auto ref = discrete::radial_oracle(20.0, 5, q, N);
  double worst = 0.0;
  for (int n = 0; n <= 5; ++n) worst = std::max(worst, std::abs(discrete::kernel_numeric(20.0, n, q) - ref[n]));
  o.require(worst <= 1e-8, "max difference <= 1e-8");
  o.note("N = " + std::to_string(N) + ", max difference " + fmt("%.2e", worst));
  return o;
}

Outcome unitarity() {
  Outcome o;
  const TreeDegree q(2);
  double mass = 0.0;
  for (int n = 0; n <= 60; ++n) mass += discrete::shell_size(n, q) * std::norm(discrete::kernel_numeric(10.0, n, q));
  o.require(std::abs(mass - 1.0) <= 1e-6, "|mass - 1| <= 1e-6");
  o.note("sum N_n |K(10,n)|^2 - 1 = " + fmt("%.2e", mass - 1.0));
  return o;
}

Outcome discrete_decay() {
  Outcome o;
  for (int qq : {2, 6}) {
    for (int n : {0, 3}) {
      const TreeDegree q(qq);
      auto residual = [&](double t) {
        return std::abs(discrete::kernel_numeric(t, n, q) - discrete::kernel_main_term(t, n, q));
      };
      std::vector<std::pair<double, double>> point, window, env;
      const double beat = std::numbers::pi / std::sqrt(qq);
      for (double t : fit::log_spaced(100, 1600, 8)) {
        point.emplace_back(t, residual(t));
        window.emplace_back(t, fit::window_max(residual, t, beat, 17));
      }
      for (double t : fit::log_subsample(discrete::phase_peaks(n, q, 50, 1000), 40)) {
        env.emplace_back(t, std::abs(discrete::kernel_numeric(t, n, q)));
      }
      const double sp = fit::decay_fit(point).slope, sw = fit::decay_fit(window).slope;
      const double se = fit::decay_fit(env).slope;
      const std::string tag = "q=" + std::to_string(qq) + ",n=" + std::to_string(n);
      o.require(sp <= -1.9, tag + " pointwise residual slope");
      o.require(sw <= -1.9, tag + " windowed residual slope");
      o.require(std::abs(se + 1.5) <= 0.05, tag + " envelope slope");
      o.note(tag + ": residual " + fmt("%.3f", sp) + " (windowed " + fmt("%.3f", sw) + "), envelope " +
             fmt("%.3f", se) + ";");
    }
  }
  return o;
}

Outcome stationary_phase_certification() {
  Outcome o;
  double worst_exact = 0.0, worst_ratio = 0.0;
  for (double alpha : {1.0, 2.0}) {
    for (double A : {1.0, 3.0}) {
      const sp::PhaseProblem pr = sp::fresnel_problem(alpha, A);
      for (double t : {10.0, 100.0, 1000.0}) {
        const sp::PhaseEstimate e = sp::endpoint_estimate(pr, t);
        const double beta = alpha * t;
        const cd ref = beta * A * A <= 200 ? oracle::fresnel_series(beta, A) : oracle::fresnel_asymptotic(beta, A);
        const double exact = 1.0 / (A * alpha * t);
        worst_exact = std::max(worst_exact, std::abs(e.bound - exact) / exact);
        worst_ratio = std::max(worst_ratio, std::abs(ref - e.main) / e.bound);
      }
    }
  }
  o.require(worst_exact <= 1e-12, "fresnel bound equals 1/(A|alpha|t)");
  o.require(worst_ratio <= 1.0, "fresnel bound dominates the error");
  o.note("fresnel: bound rel. deviation " + fmt("%.1e", worst_exact) + ", max error/bound " +
         fmt("%.3f", worst_ratio) + ";");

  const sp::PhaseProblem tree = sp::tree_problem(2);
  for (double t : {10.0, 100.0, 1000.0}) {
    const sp::PhaseEstimate e = sp::endpoint_estimate(tree, t);
    const cd ref = oracle::integrate([&](double th) { return std::polar(1.0, t * tree.p(th)) * tree.q(th); },
                                     tree.a, tree.b, 4 + static_cast<int>(t * 2 * std::sqrt(2.0) / std::numbers::pi));
    const double err = std::abs(ref - e.main);
    o.require(err <= e.bound, "tree amplitude bound at t=" + fmt("%g", t));
    o.note("tree t=" + fmt("%g", t) + ": error " + fmt("%.2e", err) + " <= bound " + fmt("%.2e", e.bound) + ";");
  }
  return o;
}

Outcome band_closed_form() {
  Outcome o;
  QuantumTreeModel m;
  const EdgeSolver solver(m);
  const auto bands = compute_bands(solver, 10);
  const double theta = std::acos(2.0 * std::sqrt(2.0) / 3.0);
  const double pi = std::numbers::pi;
  double worst = 0.0;
  for (int n = 1; n <= 10; ++n) {
    const Band& b = bands[n - 1];
    worst = std::max({worst, std::abs(b.a - std::pow((n - 1) * pi + theta, 2)),
                      std::abs(b.b - std::pow(n * pi - theta, 2)), std::abs(b.dirichlet_above - std::pow(n * pi, 2))});
  }
  o.require(worst <= 1e-10, "edges and dirichlet values within 1e-10");
  o.note("max deviation " + fmt("%.2e", worst));
  return o;
}

Outcome ode_volterra() {
  Outcome o;
  QuantumTreeModel m;
  m.W = Potential::parse("cosine:1", 1.0);
  const EdgeSolver solver(m);
  double worst_ratio = 0.0, worst_rel = 0.0;
  for (double lam : {10.0, 25.0, 100.0}) {
    const VolterraResult v = volterra_s(m, lam, 8);
    const double diff = std::abs(v.value - solver.s(lam).v);
    worst_ratio = std::max(worst_ratio, diff / v.tail_bound);
    o.require(diff <= v.tail_bound, "volterra at lambda=" + fmt("%g", lam));

    const EdgePoint p = solver.endpoint(lam);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
    auto s = [&](double l) { return solve_edge(m, l, solver.grid_size()).S.back(); };
    auto c = [&](double l) { return solve_edge(m, l, solver.grid_size()).C.back(); };
    auto ds = [&](double l) { return solver.endpoint(l).S.d1; };
    auto dc = [&](double l) { return solver.endpoint(l).C.d1; };
    const double h = 1e-5;
    worst_rel = std::max({worst_rel, rel(p.S.d1, oracle::central_difference(s, lam, h)),
                          rel(p.C.d1, oracle::central_difference(c, lam, h)),
                          rel(p.S.d2, oracle::central_difference(ds, lam, 1e-4)),
                          rel(p.C.d2, oracle::central_difference(dc, lam, 1e-4))});
  }
  o.require(worst_rel <= 1e-6, "derivatives within 1e-6 relative");
  o.note("max |diff|/tail " + fmt("%.3f", worst_ratio) + ", max derivative rel. error " + fmt("%.2e", worst_rel));
  return o;
}

Outcome quantum_decay() {
  Outcome o;
  for (const char* pot : {"zero", "cosine:0.5"}) {
    for (double alpha : {0.0, 1.0}) {
      const auto table = band_table(pot, alpha, 40);
      const QuantumKernel kernel(table);
      const Band& b1 = table->bands()[0];
      std::vector<double> peaks;
      for (int k = 0;; ++k) {
        const double t = (2 * std::numbers::pi * k + 1.5 * std::numbers::pi) / (b1.b - b1.a);
        if (t > 800) break;
        if (t >= 50) peaks.push_back(t);
      }
      for (const auto& query : {KernelQuery::diagonal(), KernelQuery::same_edge(1.0 / 3, 1.0 / 3)}) {
        std::vector<std::pair<double, double>> env;
        for (double t : fit::log_subsample(peaks, 40)) env.emplace_back(t, std::abs(kernel.kernel_numeric(t, query, 40).value));
        const double se = fit::decay_fit(env).slope;
        double worst_band = -1e9;
        for (int n = 1; n <= 6; ++n) {
          const Band& b = table->bands()[n - 1];
          auto residual = [&](double t) {
            const BandContribution c = kernel.band_contribution(n, t, query);
            return std::abs(c.numeric - c.main);
          };
          std::vector<std::pair<double, double>> res;
          for (double t : fit::log_spaced(100, 1600, 8)) {
            res.emplace_back(t, fit::window_max(residual, t, 2 * std::numbers::pi / (b.b - b.a), 17));
          }
          worst_band = std::max(worst_band, fit::decay_fit(res).slope);
        }
        const std::string tag = std::string(pot) + ",alpha=" + fmt("%g", alpha) + "," +
                                (query.kind == QueryKind::diagonal_vertex ? "diag" : "edge");
        o.require(std::abs(se + 1.5) <= 0.1, tag + " envelope slope");
        o.require(worst_band <= -1.9, tag + " band residual slope");
        o.note(tag + ": envelope " + fmt("%.3f", se) + ", worst band residual " + fmt("%.3f", worst_band) + ";");
      }
    }
  }
  return o;
}

Outcome correlation_identities() {
  Outcome o;
  const auto cs = band_table("cosine:1", 1.0, 10);
  const QuantumKernel kc(cs);
  const auto zero = band_table("zero", 0.0, 10);
  const QuantumKernel kz(zero);
  double psi2 = 0.0, cosine = 0.0, cont = 0.0;
  for (int n = 1; n <= 10; ++n) {
    const Band& b = cs->bands()[n - 1];
    const Band& bz = zero->bands()[n - 1];
    for (int j = 1; j < 20; ++j) {
      const double lam = b.a + (b.b - b.a) * j / 20;
      psi2 = std::max(psi2, std::abs(kc.correlation(lam, KernelQuery::same_edge(0, 0)) - 1.0));
      cont = std::max({cont, std::abs(kc.correlation(lam, KernelQuery::distinct_edges(2, 1.0, 0.0)) - 1.0),
                       std::abs(kc.correlation(lam, KernelQuery::distinct_edges(2, 1.0, 0.4)) -
                                kc.correlation(lam, KernelQuery::same_edge(0.0, 0.4))),
                       std::abs(kc.correlation(lam, KernelQuery::distinct_edges(2, 0.3, 0.0)) -
                                kc.correlation(lam, KernelQuery::same_edge(0.3, 1.0)))});
      const double lz = bz.a + (bz.b - bz.a) * j / 20;
      for (auto [x, y] : {std::pair{0.1, 0.7}, std::pair{0.5, 0.5}, std::pair{0.9, 0.2}}) {
        cosine = std::max(cosine, std::abs(kz.correlation(lz, KernelQuery::same_edge(x, y)) -
                                           std::cos(std::sqrt(lz) * (x - y))));
      }
    }
  }
  o.require(psi2 <= 1e-10, "Psi2(0,0) = 1");
  o.require(cosine <= 1e-9, "zero-potential same-edge cosine");
  o.require(cont <= 1e-8, "Psi3/Psi2 continuity at the shared vertex");

  // max over bands 1..3 of |Ψ3| for k = 2..12, against q^{-k/2}(k+1).
  std::vector<std::pair<double, double>> decay;
  double lo = 1e300, hi = 0.0;
  for (int k = 2; k <= 12; ++k) {
    double m = 0.0;
    for (int n = 1; n <= 3; ++n) {
      const Band& b = cs->bands()[n - 1];
      for (int j = 1; j < 60; ++j) {
        const double lam = b.a + (b.b - b.a) * j / 60;
        m = std::max(m, std::abs(kc.correlation(lam, KernelQuery::distinct_edges(k, 0.3, 0.6))));
      }
    }
    const double scaled = m * std::pow(2.0, k / 2.0) / (k + 1);
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
    decay.emplace_back(k, m);
  }
  o.require(hi / lo <= 4.0, "|Psi3| q^{k/2}/(k+1) stays within a factor 4");
  o.note("max |Psi2(0,0)-1| " + fmt("%.1e", psi2) + ", cosine " + fmt("%.1e", cosine) + ", continuity " +
         fmt("%.1e", cont) + ", Psi3 envelope spread " + fmt("%.2f", hi / lo));
  return o;
}

Outcome free_line() {
  Outcome o;
  double worst = 0.0;
  for (auto [t, v] : {std::pair{50.0, 0.0}, std::pair{50.0, 0.3}, std::pair{200.0, 0.1}}) {
    const FreeLineKernel k = free_line_kernel(t, v);
    worst = std::max(worst, std::abs(k.numeric - k.closed_form));
  }
  o.require(worst <= 1e-6, "numeric vs closed form <= 1e-6");
  o.note("max difference " + fmt("%.2e", worst));
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "lattice identity on Z", 1, lattice_identity},
      {2, "discrete oracle equivalence", 10, radial_equivalence},
      {3, "discrete unitarity", 5, unitarity},
      {4, "discrete t^-3/2 law", 120, discrete_decay},
      {5, "stationary-phase certification", 30, stationary_phase_certification},
      {6, "band structure closed form", 5, band_closed_form},
      {7, "ODE / Volterra cross-validation", 30, ode_volterra},
      {8, "quantum tree t^-3/2 law", 600, quantum_decay},
      {9, "correlation identities", 60, correlation_identities},
      {10, "free-line validation", 10, free_line},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("[exception: ") + e.what() + "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("%s criterion %2d: %s | %.2f s (budget %.0f s)%s | %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs,
                c.budget_s, in_time ? "" : " OVER BUDGET", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
