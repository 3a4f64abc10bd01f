#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>

#include "treedisp/errors.hpp"

namespace treedisp::roots {

/// Brent's method on a sign-changing bracket [a, b]. Absolute tolerance on x.
double brent(const std::function<double(double)>& f, double a, double b, double tol,
             int max_iter = 200);

/// Same as brent but with known endpoint values.
double brent(const std::function<double(double)>& f, double a, double fa, double b, double fb,
             double tol, int max_iter = 200);

/// Newton iteration kept inside a bracket; falls back to bisection whenever the
/// Newton step leaves the bracket or stalls. `fdf` returns (f, f').
/// Stops when |f| <= ftol or the bracket is narrower than xtol.
double safeguarded_newton(const std::function<std::pair<double, double>(double)>& fdf, double a,
                          double b, double ftol, double xtol, int max_iter = 200);

}  // namespace treedisp::roots
