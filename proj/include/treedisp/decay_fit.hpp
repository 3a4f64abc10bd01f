#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace treedisp::fit {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> residuals;  // log|m| - (intercept + slope log t), per sample
};

/// Least-squares line through (log t, log m). Needs >= 8 samples with m > 0 and
/// at least two distinct t.
FitResult decay_fit(const std::vector<std::pair<double, double>>& samples);

/// count points from lo to hi, equally spaced in log t.
std::vector<double> log_spaced(double lo, double hi, int count);

/// Picks about `count` entries of a sorted grid, nearest to log-spaced targets, without repeats.
std::vector<double> log_subsample(const std::vector<double>& sorted, int count);

/// max |f| over `samples` equispaced points of [center - width/2, center + width/2].
double window_max(const std::function<double(double)>& f, double center, double width,
                  int samples = 33);

}  // namespace treedisp::fit
