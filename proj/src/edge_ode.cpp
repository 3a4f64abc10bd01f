#include "treedisp/edge_ode.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "treedisp/errors.hpp"

namespace treedisp {

namespace {

template <class T>
struct M2 {
  T a, b, c, d;  // [[a, b], [c, d]]
};

template <class T>
M2<T> operator+(const M2<T>& x, const M2<T>& y) {
  return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
}
template <class T>
M2<T> operator-(const M2<T>& x, const M2<T>& y) {
  return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
}
template <class T>
M2<T> operator*(double s, const M2<T>& x) {
  return {s * x.a, s * x.b, s * x.c, s * x.d};
}
template <class T>
M2<T> operator*(const M2<T>& x, const M2<T>& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
          x.c * y.b + x.d * y.d};
}
template <class T>
M2<T> commutator(const M2<T>& x, const M2<T>& y) {
  return x * y - y * x;
}

// C(μ) = cosh√μ, S(μ) = sinh√μ/√μ and the derivatives needed for jets.
struct CSDerivs {
  double C, C1, C2, S, S1, S2;
};

CSDerivs cs_functions(double mu) {
  CSDerivs r{};
  if (std::abs(mu) < 4.0) {
    // Power series: C = Σ μ^k/(2k)!, S = Σ μ^k/(2k+1)!.
    double c = 0, c1 = 0, c2 = 0, s = 0, s1 = 0, s2 = 0;
    double pk = 1.0;  // μ^k
    double fc = 1.0;  // (2k)!
    double fs = 1.0;  // (2k+1)!
    double pkm1 = 0.0, pkm2 = 0.0;
    for (int k = 0; k < 30; ++k) {
      c += pk / fc;
      s += pk / fs;
      if (k >= 1) {
        c1 += k * pkm1 / fc;
        s1 += k * pkm1 / fs;
      }
      if (k >= 2) {
        c2 += k * (k - 1.0) * pkm2 / fc;
        s2 += k * (k - 1.0) * pkm2 / fs;
      }
      pkm2 = pkm1;
      pkm1 = pk;
      pk *= mu;
      fc *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
      fs *= (2.0 * k + 2.0) * (2.0 * k + 3.0);
    }
    return {c, c1, c2, s, s1, s2};
  }
  if (mu > 0) {
    const double r0 = std::sqrt(mu);
    r.C = std::cosh(r0);
    r.S = std::sinh(r0) / r0;
  } else {
    const double r0 = std::sqrt(-mu);
    r.C = std::cos(r0);
    r.S = std::sin(r0) / r0;
  }
  r.C1 = 0.5 * r.S;
  r.S1 = (r.C - r.S) / (2.0 * mu);
  r.C2 = 0.5 * r.S1;
  r.S2 = (0.5 * r.S - 3.0 * r.S1) / (2.0 * mu);
  return r;
}

// exp of a traceless 2×2 jet matrix: Ω² = μI, exp Ω = C(μ)I + S(μ)Ω.
M2<Jet> expm_traceless(const M2<Jet>& om) {
  const Jet mu = om.a * om.a + om.b * om.c;
  const CSDerivs f = cs_functions(mu.v);
  const Jet C = compose(mu, f.C, f.C1, f.C2);
  const Jet S = compose(mu, f.S, f.S1, f.S2);
  return {C + S * om.a, S * om.b, S * om.c, C + S * om.d};
}

M2<double> expm_traceless(const M2<double>& om) {
  const CSDerivs f = cs_functions(om.a * om.a + om.b * om.c);
  return {f.C + f.S * om.a, f.S * om.b, f.S * om.c, f.C + f.S * om.d};
}

const double kSqrt15 = std::sqrt(15.0);
const double kNodeOffset[3] = {0.5 - kSqrt15 / 10.0, 0.5, 0.5 + kSqrt15 / 10.0};

// One Magnus-6 step of length h; w1..w3 are W at the Gauss nodes.
template <class T>
M2<T> magnus_step(const T& lam, double h, double w1, double w2, double w3) {
  auto A = [&lam](double w) { return M2<T>{T(0.0), T(1.0), T(w) - lam, T(0.0)}; };
  const M2<T> A1 = A(w1), A2 = A(w2), A3 = A(w3);
  const M2<T> a1 = h * A2;
  const M2<T> a2 = (kSqrt15 * h / 3.0) * (A3 - A1);
  const M2<T> a3 = (10.0 * h / 3.0) * (A3 - 2.0 * A2 + A1);
  const M2<T> c1 = commutator(a1, a2);
  const M2<T> c2 = (-1.0 / 60.0) * commutator(a1, 2.0 * a3 + c1);
  const M2<T> om = a1 + (1.0 / 12.0) * a3 +
                (1.0 / 240.0) * commutator(-20.0 * a1 - a3 + c1, a2 + c2);
  return expm_traceless(om);
}

}  // namespace

EdgeSolver::EdgeSolver(QuantumTreeModel model, int grid_size)
    : model_(std::move(model)), grid_size_(grid_size) {
  if (!(model_.L > 0.0)) throw DomainError("edge length must be positive");
  if (grid_size_ < 16) throw DomainError("grid size must be at least 16");
  if (!model_.W.is_constant()) {
    const double h = model_.L / grid_size_;
    node_w_.resize(3 * static_cast<std::size_t>(grid_size_));
    for (int j = 0; j < grid_size_; ++j) {
      for (int k = 0; k < 3; ++k) node_w_[3 * j + k] = model_.W((j + kNodeOffset[k]) * h);
    }
  }
}

EdgePoint EdgeSolver::integrate(double lambda, double x, int steps, bool use_node_cache) const {
  const Jet lam(lambda, 1.0, 0.0);
  M2<Jet> F{Jet(1.0), Jet(0.0), Jet(0.0), Jet(1.0)};  // [[C, S], [C', S']]
  if (x > 0.0) {
    const double h = x / steps;
    for (int j = 0; j < steps; ++j) {
      double w[3];
      for (int k = 0; k < 3; ++k) {
        w[k] = use_node_cache ? node_w_[3 * j + k] : model_.W((j + kNodeOffset[k]) * h);
      }
      F = magnus_step(lam, h, w[0], w[1], w[2]) * F;
    }
  }
  return {F.a, F.c, F.b, F.d};
}

EdgePoint EdgeSolver::at(double lambda, double x) const {
  if (x < 0.0 || x > model_.L * (1.0 + 1e-14)) throw DomainError("edge point outside [0, L]");
  if (model_.W.is_constant()) return integrate(lambda, x, 1, false);
  if (x == model_.L) return endpoint(lambda);
  const int steps = std::max(1, static_cast<int>(std::ceil(grid_size_ * x / model_.L)));
  return integrate(lambda, x, steps, false);
}

EdgePoint EdgeSolver::endpoint(double lambda) const {
  {
    std::shared_lock lock(cache_mutex_);
    const auto it = cache_.find(lambda);
    if (it != cache_.end()) return it->second;
  }
  const EdgePoint value = model_.W.is_constant() ? integrate(lambda, model_.L, 1, false)
                                                 : integrate(lambda, model_.L, grid_size_, true);
  std::unique_lock lock(cache_mutex_);
  if (cache_.size() > 500000) cache_.clear();
  cache_.emplace(lambda, value);
  return value;
}

Jet EdgeSolver::w(double lambda) const {
  const EdgePoint e = endpoint(lambda);
  return (model_.q.as_double() + 1.0) * e.C + model_.alpha * e.S;
}

double EdgeSolver::w_eval(double lambda, int order) const {
  const Jet j = w(lambda);
  switch (order) {
    case 0: return j.v;
    case 1: return j.d1;
    case 2: return j.d2;
    default: throw DomainError("w_eval: order must be 0, 1 or 2");
  }
}

std::vector<double> EdgeSolver::S_values(double lambda, const std::vector<double>& points) const {
  const double L = model_.L;
  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (points[i] < 0.0 || points[i] > L * (1.0 + 1e-14)) throw DomainError("S_values: point outside [0, L]");
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&points](auto i, auto j) { return points[i] < points[j]; });

  const bool constant = model_.W.is_constant();
  const double grid_h = L / grid_size_;
  auto step = [this, lambda](M2<double>& F, double x0, double h) {
    F = magnus_step(lambda, h, model_.W(x0 + kNodeOffset[0] * h), model_.W(x0 + kNodeOffset[1] * h),
                    model_.W(x0 + kNodeOffset[2] * h)) *
        F;
  };
  std::vector<double> out(points.size());
  M2<double> F{1.0, 0.0, 0.0, 1.0};
  double pos = 0.0;
  for (std::size_t i : order) {
    const double target = std::min(points[i], L);
    if (constant) {
      if (target > pos) step(F, pos, target - pos);
      pos = std::max(pos, target);
    } else {
      while (pos < target) {
        const double next_grid = (std::floor(pos / grid_h + 1e-9) + 1.0) * grid_h;
        const double next = std::min(next_grid, target);
        step(F, pos, next - pos);
        pos = next;
      }
    }
    out[i] = F.b;
  }
  return out;
}

double EdgeSolver::symmetry_residual(double lambda) const {
  const EdgePoint e = endpoint(lambda);
  return e.C.v - e.Sx.v;
}

EdgeSolutionTable EdgeSolver::solve_edge(double lambda, int grid_points) const {
  if (grid_points < 16) throw DomainError("solve_edge: grid_size must be >= 16");
  EdgeSolutionTable t;
  t.lambda = lambda;
  const int n = grid_points + 1;
  t.x_grid.resize(n);
  for (auto* v : {&t.C, &t.S, &t.Cp, &t.Sp, &t.dC, &t.dS, &t.d2C, &t.d2S}) v->resize(n);

  const Jet lam(lambda, 1.0, 0.0);
  const double h = model_.L / grid_points;
  // Substeps per grid cell so the step never exceeds the solver's own resolution.
  const int sub = model_.W.is_constant() ? 1 : std::max(1, (grid_size_ + grid_points - 1) / grid_points);
  const double hs = h / sub;
  M2<Jet> F{Jet(1.0), Jet(0.0), Jet(0.0), Jet(1.0)};
  for (int i = 0; i < n; ++i) {
    if (i > 0) {
      for (int k = 0; k < sub; ++k) {
        const double x0 = (i - 1) * h + k * hs;
        F = magnus_step(lam, hs, model_.W(x0 + kNodeOffset[0] * hs), model_.W(x0 + kNodeOffset[1] * hs),
                        model_.W(x0 + kNodeOffset[2] * hs)) *
            F;
      }
    }
    t.x_grid[i] = i * h;
    t.C[i] = F.a.v;
    t.S[i] = F.b.v;
    t.Cp[i] = F.c.v;
    t.Sp[i] = F.d.v;
    t.dC[i] = F.a.d1;
    t.dS[i] = F.b.d1;
    t.d2C[i] = F.a.d2;
    t.d2S[i] = F.b.d2;
  }
  return t;
}

EdgeSolutionTable solve_edge(const QuantumTreeModel& model, double lambda, int grid_size) {
  return EdgeSolver(model, std::max(16, grid_size)).solve_edge(lambda, grid_size);
}

double w_eval(const QuantumTreeModel& model, double lambda, int order) {
  return EdgeSolver(model).w_eval(lambda, order);
}

// ---------------------------------------------------------------------------
// Volterra series oracle.

namespace {

constexpr int kPanelNodes = 24;
constexpr int kPanels = 32;

// Chebyshev–Lobatto nodes on [-1, 1] (ascending) and the matrix mapping samples
// of g to ∫_{-1}^{x_i} g.
struct SpectralIntegrator {
  std::vector<double> nodes;
  std::vector<std::vector<double>> matrix;

  SpectralIntegrator() {
    const int m = kPanelNodes;
    const int N = m - 1;
    nodes.resize(m);
    for (int j = 0; j < m; ++j) nodes[j] = -std::cos(std::numbers::pi * j / N);
    matrix.assign(m, std::vector<double>(m, 0.0));
    for (int col = 0; col < m; ++col) {
      // Chebyshev coefficients of the unit vector e_col.
      std::vector<double> c(m, 0.0);
      for (int k = 0; k <= N; ++k) {
        const double wt = (col == 0 || col == N) ? 0.5 : 1.0;
        // x_j = -cos(πj/N) = cos(π(N-j)/N)
        c[k] = (2.0 / N) * wt * std::cos(std::numbers::pi * k * (N - col) / N);
      }
      c[0] *= 0.5;
      c[N] *= 0.5;
      // Antiderivative coefficients.
      std::vector<double> ic(m + 1, 0.0);
      for (int k = 0; k <= N; ++k) {
        if (k == 0) {
          ic[1] += c[0];
        } else if (k == 1) {
          ic[2] += c[1] / 4.0;
          ic[0] += c[1] / 4.0;  // constant shift, fixed below
        } else {
          ic[k + 1] += c[k] / (2.0 * (k + 1));
          ic[k - 1] -= c[k] / (2.0 * (k - 1));
        }
      }
      auto eval = [&ic](double x) {
        double b1 = 0, b2 = 0;
        for (int k = static_cast<int>(ic.size()) - 1; k >= 1; --k) {
          const double b0 = 2.0 * x * b1 - b2 + ic[k];
          b2 = b1;
          b1 = b0;
        }
        return x * b1 - b2 + ic[0];
      };
      const double base = eval(-1.0);
      for (int i = 0; i < m; ++i) matrix[i][col] = eval(nodes[i]) - base;
    }
  }
};

const SpectralIntegrator& integrator() {
  static const SpectralIntegrator s;
  return s;
}

// u_k(x) = ∫_0^x sin(√λ(x-t))/√λ W(t) u_{k-1}(t) dt, iterated from u_0 on a panel grid.
// Returns u_k(L) for k = 1..K.
std::vector<double> volterra_terms(const QuantumTreeModel& model, double lambda, int K,
                                   bool sine_seed) {
  const auto& I = integrator();
  const int m = kPanelNodes;
  const double L = model.L;
  const double h = L / kPanels;
  const double k0 = std::sqrt(lambda);
  const int total = kPanels * m;
  std::vector<double> x(total), wv(total), cs(total), sn(total), u(total);
  for (int p = 0; p < kPanels; ++p) {
    for (int j = 0; j < m; ++j) {
      const int idx = p * m + j;
      x[idx] = p * h + 0.5 * h * (I.nodes[j] + 1.0);
      wv[idx] = model.W(x[idx]);
      cs[idx] = std::cos(k0 * x[idx]);
      sn[idx] = std::sin(k0 * x[idx]);
      u[idx] = sine_seed ? sn[idx] / k0 : cs[idx];
    }
  }
  std::vector<double> out;
  std::vector<double> gA(m), gB(m), A(total), B(total);
  for (int k = 1; k <= K; ++k) {
    double offA = 0.0, offB = 0.0;
    for (int p = 0; p < kPanels; ++p) {
      for (int j = 0; j < m; ++j) {
        const int idx = p * m + j;
        gA[j] = cs[idx] * wv[idx] * u[idx];
        gB[j] = sn[idx] * wv[idx] * u[idx];
      }
      for (int i = 0; i < m; ++i) {
        double sa = 0.0, sb = 0.0;
        for (int j = 0; j < m; ++j) {
          sa += I.matrix[i][j] * gA[j];
          sb += I.matrix[i][j] * gB[j];
        }
        A[p * m + i] = offA + 0.5 * h * sa;
        B[p * m + i] = offB + 0.5 * h * sb;
      }
      offA = A[p * m + m - 1];
      offB = B[p * m + m - 1];
    }
    for (int idx = 0; idx < total; ++idx) u[idx] = (sn[idx] * A[idx] - cs[idx] * B[idx]) / k0;
    out.push_back(u[total - 1]);  // last Lobatto node is x = L
  }
  return out;
}

double tail_sum(double norm, double L, double lambda, int K, double extra_power) {
  // Σ_{k>K} (‖W‖L)^k / (λ^{(k+extra)/2} k!)
  double total = 0.0;
  double term = std::pow(lambda, -extra_power / 2.0);
  for (int k = 1; k <= K + 200; ++k) {
    term *= norm * L / (std::sqrt(lambda) * k);
    if (k > K) {
      total += term;
      if (term < 1e-30 * total) break;
    }
  }
  return total;
}

}  // namespace

VolterraResult volterra_s(const QuantumTreeModel& model, double lambda, int K) {
  if (!(lambda > 0.0)) throw DomainError("volterra_s: lambda must be positive");
  if (K < 0) throw DomainError("volterra_s: K must be >= 0");
  VolterraResult r;
  const double k0 = std::sqrt(lambda);
  r.value = std::sin(k0 * model.L) / k0;
  if (model.W.sup_norm() > 0.0) r.terms = volterra_terms(model, lambda, K, true);
  for (double v : r.terms) r.value += v;
  r.tail_bound = tail_sum(model.W.sup_norm(), model.L, lambda, K, 1.0);
  return r;
}

VolterraResult volterra_c(const QuantumTreeModel& model, double lambda, int K) {
  if (!(lambda > 0.0)) throw DomainError("volterra_c: lambda must be positive");
  if (K < 0) throw DomainError("volterra_c: K must be >= 0");
  VolterraResult r;
  r.value = std::cos(std::sqrt(lambda) * model.L);
  if (model.W.sup_norm() > 0.0) r.terms = volterra_terms(model, lambda, K, false);
  for (double v : r.terms) r.value += v;
  r.tail_bound = tail_sum(model.W.sup_norm(), model.L, lambda, K, 0.0);
  return r;
}

}  // namespace treedisp
