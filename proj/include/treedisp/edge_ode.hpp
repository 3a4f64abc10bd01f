#pragma once

#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "treedisp/jet.hpp"
#include "treedisp/potential.hpp"
#include "treedisp/specfun.hpp"

namespace treedisp {

/// (q, L, α, W): one equilateral quantum tree with identical edges.
struct QuantumTreeModel {
  TreeDegree q{2};
  double L = 1.0;
  double alpha = 0.0;
  Potential W;
};

/// Fundamental solutions at one point x; every entry is a jet in λ.
/// C, S solve -ψ'' + Wψ = λψ with C(0)=1, C'(0)=0, S(0)=0, S'(0)=1.
struct EdgePoint {
  Jet C, Cx;  // C and dC/dx
  Jet S, Sx;  // S and dS/dx
};

struct EdgeSolutionTable {
  double lambda = 0.0;
  std::vector<double> x_grid;
  std::vector<double> C, S, Cp, Sp;   // values and x-derivatives
  std::vector<double> dC, dS;         // ∂_λ
  std::vector<double> d2C, d2S;       // ∂²_λ
};

/// Sixth-order Magnus integrator for the edge ODE, carried out in jet arithmetic so
/// that first and second λ-derivatives of C and S come out of the same sweep.
class EdgeSolver {
 public:
  explicit EdgeSolver(QuantumTreeModel model, int grid_size = 512);

  const QuantumTreeModel& model() const { return model_; }
  int grid_size() const { return grid_size_; }

  /// Solution data at x ∈ [0, L]; steps proportional to x.
  EdgePoint at(double lambda, double x) const;
  /// Solution data at x = L (cached per λ).
  EdgePoint endpoint(double lambda) const;

  /// w = (q+1)c + αs as a jet (w, w', w'').
  Jet w(double lambda) const;
  double w_eval(double lambda, int order) const;
  /// s(λ) = S_λ(L) as a jet.
  Jet s(double lambda) const { return endpoint(lambda).S; }

  /// S_λ at each of the given points of [0, L], from one sweep in plain doubles.
  std::vector<double> S_values(double lambda, const std::vector<double>& points) const;

  /// Table of values on grid_points + 1 equispaced points.
  EdgeSolutionTable solve_edge(double lambda, int grid_points) const;

  /// C(L) - S'(L); zero for edge-symmetric W.
  double symmetry_residual(double lambda) const;

 private:
  EdgePoint integrate(double lambda, double x, int steps, bool use_node_cache) const;

  QuantumTreeModel model_;
  int grid_size_;
  std::vector<double> node_w_;  // W at the three Gauss nodes of each default step
  mutable std::shared_mutex cache_mutex_;
  mutable std::unordered_map<double, EdgePoint> cache_;
};

/// Free function forms.
EdgeSolutionTable solve_edge(const QuantumTreeModel& model, double lambda, int grid_size);
double w_eval(const QuantumTreeModel& model, double lambda, int order);

struct VolterraResult {
  double value = 0.0;
  double tail_bound = 0.0;
  std::vector<double> terms;  // S_k(λ) (or C_k(λ)) for k = 1..K
};

/// Partial sum of the Volterra series for s(λ) up to order K, with the tail bound
/// Σ_{k>K} ‖W‖^k L^k / (λ^{(k+1)/2} k!). Independent of EdgeSolver.
VolterraResult volterra_s(const QuantumTreeModel& model, double lambda, int K);
/// Same for c(λ); tail Σ_{k>K} ‖W‖^k L^k / (λ^{k/2} k!).
VolterraResult volterra_c(const QuantumTreeModel& model, double lambda, int K);

}  // namespace treedisp
