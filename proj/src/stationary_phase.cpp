#include "treedisp/stationary_phase.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "treedisp/errors.hpp"
#include "treedisp/quadrature.hpp"

namespace treedisp::sp {

namespace {

constexpr double kTaylorZone = 1e-4;

double sign(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

// Q_{1,1} straight from its definition, critical end a.
double q11_raw(const PhaseProblem& pr, double x) {
  const double a = pr.a;
  const double eps = sign(pr.d2p(a));
  const double rise = eps * (pr.p(x) - pr.p(a));
  if (!(rise > 0.0)) {
    throw DomainError("q11_profile: eps*(p(x)-p(a)) <= 0 at x=" + std::to_string(x) +
                      " (phase not monotone away from the critical point)");
  }
  return pr.q(x) / (eps * pr.dp(x)) -
         pr.q(a) / (std::sqrt(2.0 * eps * pr.d2p(a)) * std::sqrt(rise));
}

double critical_value_left(const PhaseProblem& pr) {
  const double a = pr.a;
  const double p2 = pr.d2p(a);
  const double eps = sign(p2);
  return eps * (pr.dq(a) / p2 - pr.q(a) * pr.d3p(a) / (3.0 * p2 * p2));
}

double q11_left(const PhaseProblem& pr, double x) {
  const double zone = kTaylorZone * (pr.b - pr.a);
  if (x - pr.a >= zone) return q11_raw(pr, x);
  const double q0 = critical_value_left(pr);
  const double x1 = pr.a + zone;
  const double slope = (q11_raw(pr, x1) - q0) / zone;
  return q0 + (x - pr.a) * slope;
}

}  // namespace

PhaseProblem reflect(const PhaseProblem& pr) {
  PhaseProblem r;
  r.p = [f = pr.p](double y) { return f(-y); };
  r.dp = [f = pr.dp](double y) { return -f(-y); };
  r.d2p = [f = pr.d2p](double y) { return f(-y); };
  r.d3p = [f = pr.d3p](double y) { return -f(-y); };
  r.q = [f = pr.q](double y) { return f(-y); };
  r.dq = [f = pr.dq](double y) { return -f(-y); };
  r.a = -pr.b;
  r.b = -pr.a;
  r.critical_end = pr.critical_end == CriticalEnd::a ? CriticalEnd::b : CriticalEnd::a;
  return r;
}

void validate(const PhaseProblem& pr, int samples) {
  if (!(pr.b > pr.a)) throw InvariantViolation("phase problem: need a < b");
  const double c = pr.critical_point();
  const double p2 = pr.d2p(c);
  if (p2 == 0.0 || !std::isfinite(p2)) throw InvariantViolation("phase problem: p''(c) must be nonzero");
  double max_dp = 0.0;
  double first_sign = 0.0;
  for (int j = 1; j < samples; ++j) {
    const double x = pr.a + (pr.b - pr.a) * j / samples;
    const double d = pr.dp(x);
    max_dp = std::max(max_dp, std::abs(d));
    if (d == 0.0) throw InvariantViolation("phase problem: p' vanishes inside (a,b)");
    if (first_sign == 0.0) first_sign = sign(d);
    if (sign(d) != first_sign) throw InvariantViolation("phase problem: p' changes sign inside (a,b)");
  }
  const double other = pr.other_point();
  if (pr.dp(other) == 0.0) throw InvariantViolation("phase problem: p' vanishes at the non-critical end");
  if (std::abs(pr.dp(c)) > 1e-8 * (1.0 + max_dp)) {
    throw InvariantViolation("phase problem: p'(c) is not zero at the critical end");
  }
}

double q11_profile(const PhaseProblem& pr, double x) {
  if (pr.critical_end == CriticalEnd::b) return q11_left(reflect(pr), -x);
  return q11_left(pr, x);
}

double q11_critical_value(const PhaseProblem& pr) {
  if (pr.critical_end == CriticalEnd::b) return critical_value_left(reflect(pr));
  return critical_value_left(pr);
}

double total_variation_raw(const std::function<double(double)>& f, double a, double b, double tol,
                           int max_depth) {
  int n = 64;
  std::vector<double> values(n + 1);
  for (int j = 0; j <= n; ++j) values[j] = f(a + (b - a) * j / n);
  auto mesh_sum = [](const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t j = 1; j < v.size(); ++j) s += std::abs(v[j] - v[j - 1]);
    return s;
  };
  double prev = mesh_sum(values);
  for (int depth = 0; depth < max_depth; ++depth) {
    std::vector<double> refined(2 * n + 1);
    for (int j = 0; j <= n; ++j) refined[2 * j] = values[j];
    for (int j = 0; j < n; ++j) refined[2 * j + 1] = f(a + (b - a) * (2 * j + 1) / (2.0 * n));
    n *= 2;
    values = std::move(refined);
    const double cur = mesh_sum(values);
    if (std::abs(cur - prev) < tol) return cur;
    prev = cur;
  }
  throw ConvergenceError("total_variation: no convergence at maximum refinement depth");
}

double total_variation(const std::function<double(double)>& f, double a, double b, double tol,
                       int max_depth) {
  return 1.1 * total_variation_raw(f, a, b, tol, max_depth);
}

PhaseEstimate endpoint_estimate(const PhaseProblem& prob, double t, double tv_tol) {
  if (!(t > 0.0)) throw DomainError("endpoint_estimate: t must be positive");
  validate(prob);
  const PhaseProblem pr = prob.critical_end == CriticalEnd::b ? reflect(prob) : prob;

  const double a = pr.a;
  const double b = pr.b;
  const double p2 = pr.d2p(a);
  const double eps = sign(p2);
  const double qa = pr.q(a);

  PhaseEstimate est;
  est.main = std::polar(1.0, t * pr.p(a) + eps * std::numbers::pi / 4.0) *
             std::sqrt(std::numbers::pi / (2.0 * std::abs(p2) * t)) * qa;

  const double qc = critical_value_left(pr);
  const double qother = q11_raw(pr, b);
  est.tv_estimate = total_variation([&pr](double x) { return q11_left(pr, x); }, a, b, tv_tol);
  const double edge =
      std::abs(qa) / (std::sqrt(2.0 * std::abs(p2)) * std::sqrt(std::abs(pr.p(b) - pr.p(a))));
  est.terms = {std::abs(qc), std::abs(qother), est.tv_estimate, 2.0 * edge};
  est.bound = (est.terms[0] + est.terms[1] + est.terms[2] + est.terms[3]) / t;
  est.bound_relaxed =
      (std::abs(qc) + std::abs(pr.q(b) / pr.dp(b)) + est.tv_estimate + 3.0 * edge) / t;
  return est;
}

std::complex<double> integrate_numeric(const PhaseProblem& pr, double t, int nodes_per_period) {
  constexpr int kOrder = 32;
  const double periods = std::abs(t * (pr.p(pr.b) - pr.p(pr.a))) / (2.0 * std::numbers::pi);
  const int nodes = std::max(256, static_cast<int>(std::ceil(nodes_per_period * periods)));
  const int panels = (nodes + kOrder - 1) / kOrder;
  auto f = [&](double x) { return std::polar(1.0, t * pr.p(x)) * pr.q(x); };
  const auto coarse = quad::integrate_composite(f, pr.a, pr.b, panels, kOrder);
  const auto fine = quad::integrate_composite(f, pr.a, pr.b, 2 * panels, kOrder);
  if (std::abs(fine - coarse) > 1e-11 * (1.0 + std::abs(fine))) {
    throw ConvergenceError("integrate_numeric: refinement check failed");
  }
  return fine;
}

PhaseProblem fresnel_problem(double alpha, double cutoff) {
  if (alpha == 0.0 || !(cutoff > 0.0)) throw DomainError("fresnel_problem: need alpha != 0, A > 0");
  PhaseProblem pr;
  pr.p = [alpha](double x) { return alpha * x * x; };
  pr.dp = [alpha](double x) { return 2.0 * alpha * x; };
  pr.d2p = [alpha](double) { return 2.0 * alpha; };
  pr.d3p = [](double) { return 0.0; };
  pr.q = [](double) { return 1.0; };
  pr.dq = [](double) { return 0.0; };
  pr.a = 0.0;
  pr.b = cutoff;
  pr.critical_end = CriticalEnd::a;
  return pr;
}

PhaseProblem tree_problem(int q) {
  if (q < 2) throw DomainError("tree_problem: q must be >= 2");
  const double qd = q;
  const double sq = std::sqrt(qd);
  const double k = 6.0 * qd - qd * qd - 1.0;
  // g as a function of u = cos θ, and dg/du.
  auto g_u = [=](double u) {
    const double D = (qd + 1.0) * (qd + 1.0) - 4.0 * qd * u * u;
    return sq * (qd + 1.0) * u * (k - 4.0 * qd * u * u) / (D * D);
  };
  auto dg_u = [=](double u) {
    const double D = (qd + 1.0) * (qd + 1.0) - 4.0 * qd * u * u;
    return sq * (qd + 1.0) *
           ((k - 12.0 * qd * u * u) / (D * D) + 16.0 * qd * u * u * (k - 4.0 * qd * u * u) / (D * D * D));
  };
  PhaseProblem pr;
  pr.p = [=](double x) { return 2.0 * sq * std::cos(x); };
  pr.dp = [=](double x) { return -2.0 * sq * std::sin(x); };
  pr.d2p = [=](double x) { return -2.0 * sq * std::cos(x); };
  pr.d3p = [=](double x) { return 2.0 * sq * std::sin(x); };
  pr.q = [=](double x) { return g_u(std::cos(x)); };
  pr.dq = [=](double x) { return -std::sin(x) * dg_u(std::cos(x)); };
  pr.a = 0.0;
  pr.b = std::numbers::pi / 2.0;
  pr.critical_end = CriticalEnd::a;
  return pr;
}

}  // namespace treedisp::sp
