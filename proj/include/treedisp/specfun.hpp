#pragma once

#include <utility>

namespace treedisp {

/// Branching parameter of the (q+1)-regular tree. Construction rejects q < 2.
class TreeDegree {
 public:
  explicit TreeDegree(int q);

  int value() const noexcept { return q_; }
  double as_double() const noexcept { return static_cast<double>(q_); }
  /// 2√q, the edge of the adjacency spectrum.
  double spectral_edge() const noexcept;

  friend bool operator==(TreeDegree, TreeDegree) = default;

 private:
  int q_;
};

namespace specfun {

struct ChebyshevPair {
  double first;   // P_n(x), first kind
  double second;  // Q_n(x), second kind
};

/// P_n and Q_n by the three-term recurrence; valid for any real x.
ChebyshevPair chebyshev_pair(int n, double x);

/// First and second derivatives of P_n, Q_n with respect to x, from
/// P_n' = n Q_{n-1} and Q_n = 2 Σ P_j (j ≡ n mod 2, minus 1 when n is even).
struct ChebyshevDerivs {
  double dP, dQ;
  double d2P, d2Q;
};
ChebyshevDerivs chebyshev_derivs(int n, double x);

/// Spherical function Φ_n(λ) of the tree.
double spherical(int n, double lambda, TreeDegree q);

/// dΦ_n/dλ (order 1) or d²Φ_n/dλ² (order 2). Polynomial identities, so the
/// spectral edges ±2√q are regular points.
double spherical_deriv(int n, double lambda, TreeDegree q, int order);

/// q^{-n/2}(2+(n+1)(q-1))/(q+1), the value Φ_n(2√q) and the sup of |Φ_n| on the spectrum.
double spherical_edge_value(int n, TreeDegree q);

/// J_k(τ) from (1/2π)∫₀^{2π} e^{ikx} e^{iτ cos x} dx = i^k J_k(τ), evaluated by the
/// periodic trapezoid rule with node doubling. Throws ConvergenceError if the
/// self-estimated error stays above 1e-12.
double bessel_J(int k, double tau);

}  // namespace specfun
}  // namespace treedisp
