#pragma once

#include <array>
#include <complex>
#include <functional>

namespace treedisp::sp {

enum class CriticalEnd { a, b };

/// Oscillatory integral ∫_a^b e^{itp(x)} q(x) dx whose only critical point of p
/// is one of the endpoints.
struct PhaseProblem {
  std::function<double(double)> p, dp, d2p, d3p;
  std::function<double(double)> q, dq;
  double a = 0.0;
  double b = 1.0;
  CriticalEnd critical_end = CriticalEnd::a;

  double critical_point() const { return critical_end == CriticalEnd::a ? a : b; }
  double other_point() const { return critical_end == CriticalEnd::a ? b : a; }
};

/// Leading term and certified error for one PhaseProblem at one t.
struct PhaseEstimate {
  std::complex<double> main;
  /// (1/t)(|Q(c)| + |Q(other)| + V(Q) + 2|q(c)|/(√(2|p''(c)|)√|p(b)-p(a)|)).
  double bound = 0.0;
  /// Weaker companion bound with |q(other)/p'(other)| and a factor 3 in the last term.
  double bound_relaxed = 0.0;
  /// The four summands of `bound` before division by t.
  std::array<double, 4> terms{};
  double tv_estimate = 0.0;
};

/// Reflects a problem with critical end b through x -> -x, giving critical end a.
PhaseProblem reflect(const PhaseProblem& prob);

/// Checks p''(c) != 0, p'(c) == 0 (to a relative tolerance) and sign-constancy of p'
/// on the open interval. Throws InvariantViolation.
void validate(const PhaseProblem& prob, int samples = 2001);

/// Q_{1,1}(x) for the problem (for critical end b: the profile of the reflected
/// problem, evaluated at the mirrored point, so the argument is still x in [a, b]).
double q11_profile(const PhaseProblem& prob, double x);

/// Limit of Q_{1,1} at the critical endpoint.
double q11_critical_value(const PhaseProblem& prob);

/// ∫|f'| on [a, b] by mesh refinement; the converged sum is inflated by 10%.
double total_variation(const std::function<double(double)>& f, double a, double b, double tol,
                       int max_depth = 22);

/// Total variation without the safety inflation (for testing the estimator itself).
double total_variation_raw(const std::function<double(double)>& f, double a, double b, double tol,
                           int max_depth = 22);

/// Main term and certified bound. `tv_tol` controls the total-variation estimate.
PhaseEstimate endpoint_estimate(const PhaseProblem& prob, double t, double tv_tol = 1e-9);

/// Reference value of the integral by composite Gauss–Legendre with at least
/// `nodes_per_period` nodes per period of t(p(b)-p(a)).
std::complex<double> integrate_numeric(const PhaseProblem& prob, double t,
                                       int nodes_per_period = 40);

/// Fresnel test problem: p = αx², q ≡ 1 on [0, A].
PhaseProblem fresnel_problem(double alpha, double cutoff);

/// Tree diagonal problem: p = 2√q cosθ, amplitude g(θ) on [0, π/2], critical at 0.
PhaseProblem tree_problem(int q);

}  // namespace treedisp::sp
