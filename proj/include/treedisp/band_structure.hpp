#pragma once

#include <memory>
#include <vector>

#include "treedisp/edge_ode.hpp"

namespace treedisp {

/// One band I_n = [a, b] of absolutely continuous spectrum.
struct Band {
  int index = 0;
  double a = 0.0;
  double b = 0.0;
  int w_sign = 0;  // sign of w' on the band, (-1)^n
  double dirichlet_above = 0.0;
  double dirichlet_below = 0.0;  // δ_{n-1}; -inf for n = 1
  double dw_a = 0.0;             // w'(a)
  double dw_b = 0.0;             // w'(b)
};

/// First n_max roots of s(λ), bracketed by a scan in √λ and refined by Brent to 1e-11.
std::vector<double> dirichlet_values(const EdgeSolver& solver, int n_max);

/// Bands 1..n_max. Throws InvariantViolation if w crosses ±2√q more than once in a gap
/// or if w(δ_n) != (-1)^n (q+1).
std::vector<Band> compute_bands(const EdgeSolver& solver, int n_max);

/// The λ in [a, b] with w(λ) = target, by safeguarded Newton.
double invert_w_on_band(const EdgeSolver& solver, const Band& band, double target);

/// Model plus its edge solver and band table, built once and then read-only.
class BandTable {
 public:
  BandTable(std::shared_ptr<const EdgeSolver> solver, int n_bands);
  const EdgeSolver& solver() const { return *solver_; }
  const QuantumTreeModel& model() const { return solver_->model(); }
  const std::vector<Band>& bands() const { return bands_; }
  int size() const { return static_cast<int>(bands_.size()); }
  /// Band containing λ (with a relative slack of 1e-12), or nullptr.
  const Band* find(double lambda) const;

 private:
  std::shared_ptr<const EdgeSolver> solver_;
  std::vector<Band> bands_;
};

}  // namespace treedisp
