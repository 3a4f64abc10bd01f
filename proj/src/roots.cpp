#include "treedisp/roots.hpp"

#include <algorithm>

namespace treedisp::roots {

double brent(const std::function<double(double)>& f, double a, double b, double tol, int max_iter) {
  return brent(f, a, f(a), b, f(b), tol, max_iter);
}

double brent(const std::function<double(double)>& f, double a, double fa, double b, double fb,
             double tol, int max_iter) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) {
    throw ConvergenceError("brent: interval [" + std::to_string(a) + ", " + std::to_string(b) +
                           "] does not bracket a root");
  }
  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < max_iter; ++iter) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double eps_x = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * tol;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= eps_x || fb == 0.0) return b;
    if (std::abs(e) >= eps_x && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * m * q - std::abs(eps_x * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > eps_x) ? d : (m > 0 ? eps_x : -eps_x);
    fb = f(b);
  }
  throw ConvergenceError("brent: no convergence after " + std::to_string(max_iter) + " iterations");
}

double safeguarded_newton(const std::function<std::pair<double, double>(double)>& fdf, double a,
                          double b, double ftol, double xtol, int max_iter) {
  auto [fa, dfa] = fdf(a);
  auto [fb, dfb] = fdf(b);
  if (std::abs(fa) <= ftol) return a;
  if (std::abs(fb) <= ftol) return b;
  if ((fa > 0) == (fb > 0)) throw ConvergenceError("safeguarded_newton: no sign change on bracket");
  const bool increasing = fb > 0;
  double x = 0.5 * (a + b);
  for (int iter = 0; iter < max_iter; ++iter) {
    const auto [fx, dfx] = fdf(x);
    if (std::abs(fx) <= ftol) return x;
    if ((fx > 0) == increasing) {
      b = x;
    } else {
      a = x;
    }
    if (b - a <= xtol) return 0.5 * (a + b);
    double next = (dfx != 0.0) ? x - fx / dfx : a - 1.0;
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    x = next;
  }
  throw ConvergenceError("safeguarded_newton: no convergence");
}

}  // namespace treedisp::roots
