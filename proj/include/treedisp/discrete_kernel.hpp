#pragma once

#include <complex>
#include <vector>

#include "treedisp/specfun.hpp"

namespace treedisp::discrete {

enum class Method { quadrature, asymptotic, oracle };

struct DiscreteKernelSample {
  double t = 0.0;
  int n = 0;
  std::complex<double> value;
  Method method = Method::quadrature;
};

/// Ψ(λ) = Im G^{λ+i0}(v,v) of the adjacency operator. Requires |λ| <= 2√q.
double psi(double lambda, TreeDegree q);

/// Ψ(λ)Φ_n(λ) = Im G^{λ+i0}(v,w) with d(v,w) = n.
double spectral_density(double lambda, int n, TreeDegree q);

/// e^{itA}(v,w) for d(v,w) = n by Gauss–Legendre quadrature in θ, λ = 2√q cos θ.
/// Node count starts at max(64, ceil(40√q|t|)) and is doubled until two successive
/// values agree to 1e-11 (at most 4 doublings).
std::complex<double> kernel_numeric(double t, int n, TreeDegree q);

/// Leading t^{-3/2} term of the large-time expansion.
std::complex<double> kernel_main_term(double t, int n, TreeDegree q);

/// q^{1/4-n/2}(2+(n+1)(q-1))/(q-1)², the amplitude of the main term before 1/(√π t^{3/2}).
double main_term_coefficient(int n, TreeDegree q);

/// Times where |sin| in the main term equals 1, restricted to [t_lo, t_hi].
std::vector<double> phase_peaks(int n, TreeDegree q, double t_lo, double t_hi);

/// Smallest N accepted by radial_oracle.
int radial_oracle_min_size(double t, int n_max, TreeDegree q);

/// Kernel at distances 0..n_max from e^{itJ}e_0, J the radial Jacobi matrix of size N.
std::vector<std::complex<double>> radial_oracle(double t, int n_max, TreeDegree q, int N);

/// Number of vertices at distance n from a fixed vertex.
double shell_size(int n, TreeDegree q);

/// i^n J_n(2t) on ℤ, from (1/2π)∫ e^{inx} e^{2it cos x} dx.
std::complex<double> line_kernel(double t, int n);

}  // namespace treedisp::discrete
