#pragma once

#include <complex>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <vector>

#include "treedisp/band_structure.hpp"

namespace treedisp {

enum class QueryKind { diagonal_vertex, same_edge, distinct_edges };

/// Relative position of two points. For distinct edges the path is (v_0, ..., v_k),
/// x is measured from v_0 along e_1 = (v_0, v_1) and y from v_{k-1} along
/// e_2 = (v_{k-1}, v_k).
struct KernelQuery {
  QueryKind kind = QueryKind::diagonal_vertex;
  double x = 0.0;
  double y = 0.0;
  int k = 2;

  static KernelQuery diagonal() { return {}; }
  static KernelQuery same_edge(double x, double y) { return {QueryKind::same_edge, x, y, 0}; }
  static KernelQuery distinct_edges(int k, double x, double y) {
    return {QueryKind::distinct_edges, x, y, k};
  }
  /// Throws DomainError if positions leave [0, L] or k < 2 for distinct edges.
  void validate(double L) const;
  std::string describe() const;
};

struct BandContribution {
  int n = 0;
  std::complex<double> main;
  std::complex<double> numeric;
  double magnitude_bound = 0.0;
};

struct KernelValue {
  std::complex<double> value;
  double tail_bound = 0.0;  // estimate of the neglected bands n > n_bands
  bool tail_warning = false;  // tail_bound > 1e-3 |value|
};

/// Band-integration route for the numeric kernel.
enum class BandQuadrature {
  /// Chebyshev expansion in λ = a + (b-a)(1-cos φ)/2 integrated term by term
  /// against e^{itλ}, which yields Bessel functions. The expansion is t-independent.
  chebyshev_bessel,
  /// Gauss–Legendre in θ with λ = w_n^{-1}(2√q cos θ) found node by node.
  theta_inversion,
};

/// AC-part evolution kernel on the quantum tree.
class QuantumKernel {
 public:
  explicit QuantumKernel(std::shared_ptr<const BandTable> table);

  const BandTable& table() const { return *table_; }
  const QuantumTreeModel& model() const { return table_->model(); }

  /// Ψ1(λ) = (-1)^{n+1} s(λ) Ψ(w(λ)) on band n; DomainError off the bands.
  double psi1(double lambda) const;
  /// μ⁻(λ) = (w - iε√(4q - w²))/(2q), ε the orientation of the band.
  std::complex<double> mu_minus(double lambda) const;
  /// Φ(λ, x, y): 1, Ψ2 or Ψ3 depending on the query.
  double correlation(double lambda, const KernelQuery& query) const;
  /// Ψ1·Φ, the spectral density of the kernel.
  double density(double lambda, const KernelQuery& query) const;

  /// (1/π)∫_{I_n} e^{itλ} Ψ1 Φ dλ.
  std::complex<double> band_integral(int n, double t, const KernelQuery& query,
                                     BandQuadrature route = BandQuadrature::chebyshev_bessel) const;
  /// Two-endpoint stationary-phase term of band n.
  BandContribution band_contribution(int n, double t, const KernelQuery& query,
                                     bool with_numeric = true) const;

  KernelValue kernel_numeric(double t, const KernelQuery& query, int n_bands,
                             BandQuadrature route = BandQuadrature::chebyshev_bessel) const;
  KernelValue kernel_main_term(double t, const KernelQuery& query, int n_bands) const;

  /// |w'(λ)|^{1/2}|s(λ)|Φ(λ,x,y) at an edge; the per-edge weight of the main term.
  double edge_weight(double lambda, const KernelQuery& query) const;
  /// Chebyshev coefficients of band n for this query (cached).
  const std::vector<double>& chebyshev_coefficients(int n, const KernelQuery& query) const;

 private:
  using CacheKey = std::tuple<int, int, double, double, int>;
  std::vector<double> build_coefficients(int n, const KernelQuery& query) const;
  double tail_estimate(double t, const KernelQuery& query, int n_bands) const;

  std::shared_ptr<const BandTable> table_;
  mutable std::shared_mutex mutex_;
  mutable std::map<CacheKey, std::vector<double>> coeff_cache_;
};

/// Free Schrödinger kernel on the line with v = |x - y|/t.
struct FreeLineKernel {
  std::complex<double> closed_form;  // ½√(i/(πt)) e^{-itv²/4}
  std::complex<double> numeric;      // half-line spectral integral by quadrature
};
FreeLineKernel free_line_kernel(double t, double v);

/// J_k(τ) for k = 0..count-1 (Boost for the seeds, forward recurrence while k < τ).
std::vector<double> bessel_sequence(int count, double tau);

}  // namespace treedisp
