#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace treedisp {

/// Natural cubic spline through (x_i, y_i), x strictly increasing.
class CubicSpline {
 public:
  CubicSpline(std::vector<double> x, std::vector<double> y);
  double operator()(double x) const;

 private:
  std::vector<double> x_, y_, m_;  // m_: second derivatives at the knots
};

/// Edge potential W on [0, L].
///
/// Text forms:
///   zero
///   cosine:A          A cos(2πx/L)
///   well:depth,width  -depth·sech²((x - L/2)/width), a smooth symmetric well
///   table:PATH        CSV with header and columns x,value, natural cubic spline
class Potential {
 public:
  Potential();  // W ≡ 0
  static Potential parse(const std::string& spec, double edge_length);
  static Potential from_function(std::function<double(double)> f, double edge_length,
                                 std::string description);
  static Potential constant(double value);

  double operator()(double x) const { return f_(x); }
  bool is_constant() const { return constant_; }
  double sup_norm() const { return sup_; }
  double minimum() const { return min_; }
  double maximum() const { return max_; }
  const std::string& description() const { return description_; }
  /// max |W(L-x) - W(x)| over a symmetric grid.
  double symmetry_defect(double edge_length) const;

 private:
  void scan_range(double edge_length);

  std::function<double(double)> f_;
  bool constant_ = true;
  double sup_ = 0.0, min_ = 0.0, max_ = 0.0;
  std::string description_ = "zero";
};

}  // namespace treedisp
