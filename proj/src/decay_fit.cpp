#include "treedisp/decay_fit.hpp"

#include <algorithm>
#include <cmath>

#include "treedisp/errors.hpp"

namespace treedisp::fit {

FitResult decay_fit(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 8) throw DomainError("decay_fit: need at least 8 samples");
  const double n = static_cast<double>(samples.size());
  double sx = 0, sy = 0;
  for (const auto& [t, m] : samples) {
    if (!(t > 0.0) || !(m > 0.0)) throw DomainError("decay_fit: t and magnitudes must be positive");
    sx += std::log(t);
    sy += std::log(m);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [t, m] : samples) {
    const double dx = std::log(t) - mx, dy = std::log(m) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 1e-14 * n) throw DomainError("decay_fit: degenerate input (all t equal)");
  FitResult r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double ss_res = 0.0;
  for (const auto& [t, m] : samples) {
    const double e = std::log(m) - (r.intercept + r.slope * std::log(t));
    r.residuals.push_back(e);
    ss_res += e * e;
  }
  r.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return r;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) throw DomainError("log_spaced: need 0 < lo < hi, count >= 2");
  std::vector<double> out(count);
  const double r = std::log(hi / lo);
  for (int i = 0; i < count; ++i) out[i] = lo * std::exp(r * i / (count - 1));
  out.back() = hi;
  return out;
}

std::vector<double> log_subsample(const std::vector<double>& sorted, int count) {
  if (static_cast<int>(sorted.size()) <= count) return sorted;
  std::vector<double> out;
  std::size_t last = sorted.size();
  for (double target : log_spaced(sorted.front(), sorted.back(), count)) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), target);
    std::size_t idx = static_cast<std::size_t>(it - sorted.begin());
    if (idx > 0 && (idx == sorted.size() || target - sorted[idx - 1] < sorted[idx] - target)) --idx;
    if (idx != last) out.push_back(sorted[idx]);
    last = idx;
  }
  return out;
}

double window_max(const std::function<double(double)>& f, double center, double width, int samples) {
  double best = 0.0;
  for (int j = 0; j < samples; ++j) {
    const double t = center - 0.5 * width + width * j / (samples - 1);
    best = std::max(best, std::abs(f(t)));
  }
  return best;
}

}  // namespace treedisp::fit
