#include "treedisp/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "treedisp/errors.hpp"

namespace treedisp {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw ConfigError("spline: need at least two (x, y) pairs");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(x_[i] > x_[i - 1])) throw ConfigError("spline: x values must be strictly increasing");
  }
  m_.assign(n, 0.0);
  if (n == 2) return;
  // Thomas algorithm for the interior second derivatives.
  std::vector<double> sub(n, 0.0), diag(n, 1.0), sup(n, 0.0), rhs(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x_[i] - x_[i - 1];
    const double h1 = x_[i + 1] - x_[i];
    sub[i] = h0;
    diag[i] = 2.0 * (h0 + h1);
    sup[i] = h1;
    rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
  }
  for (std::size_t i = 1; i < n; ++i) {
    const double f = sub[i] / diag[i - 1];
    diag[i] -= f * sup[i - 1];
    rhs[i] -= f * rhs[i - 1];
  }
  m_[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) m_[i] = (rhs[i] - sup[i] * m_[i + 1]) / diag[i];
}

double CubicSpline::operator()(double x) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = static_cast<std::size_t>(std::clamp<long>(it - x_.begin() - 1, 0, x_.size() - 2));
  const double h = x_[i + 1] - x_[i];
  const double A = (x_[i + 1] - x) / h;
  const double B = (x - x_[i]) / h;
  return A * y_[i] + B * y_[i + 1] +
         ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
}

Potential::Potential() : f_([](double) { return 0.0; }) {}

Potential Potential::constant(double value) {
  Potential p;
  p.f_ = [value](double) { return value; };
  p.sup_ = std::abs(value);
  p.min_ = p.max_ = value;
  p.constant_ = true;
  p.description_ = value == 0.0 ? "zero" : "constant:" + std::to_string(value);
  return p;
}

Potential Potential::from_function(std::function<double(double)> f, double edge_length,
                                   std::string description) {
  Potential p;
  p.f_ = std::move(f);
  p.description_ = std::move(description);
  p.constant_ = false;
  p.scan_range(edge_length);
  return p;
}

void Potential::scan_range(double edge_length) {
  constexpr int kSamples = 4096;
  min_ = max_ = f_(0.0);
  for (int j = 1; j <= kSamples; ++j) {
    const double v = f_(edge_length * j / kSamples);
    min_ = std::min(min_, v);
    max_ = std::max(max_, v);
  }
  sup_ = std::max(std::abs(min_), std::abs(max_));
  if (min_ == max_) constant_ = true;
}

double Potential::symmetry_defect(double edge_length) const {
  double worst = 0.0;
  for (int j = 0; j <= 1024; ++j) {
    const double x = edge_length * j / 1024.0;
    worst = std::max(worst, std::abs(f_(edge_length - x) - f_(x)));
  }
  return worst;
}

namespace {

std::vector<double> parse_numbers(const std::string& text, const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("potential '" + spec + "': cannot parse number '" + item + "'");
    }
  }
  return out;
}

CubicSpline read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("potential table: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("potential table: empty file '" + path + "'");
  std::vector<double> xs, ys;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ConfigError("potential table: line " + std::to_string(lineno) + " needs two columns");
    }
    try {
      xs.push_back(std::stod(line.substr(0, comma)));
      ys.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ConfigError("potential table: bad number on line " + std::to_string(lineno));
    }
  }
  return CubicSpline(std::move(xs), std::move(ys));
}

}  // namespace

Potential Potential::parse(const std::string& spec, double L) {
  if (!(L > 0.0)) throw ConfigError("potential: edge length must be positive");
  if (spec.empty() || spec == "zero") return Potential();
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "cosine") {
    const auto v = parse_numbers(args, spec);
    if (v.size() != 1) throw ConfigError("potential 'cosine:A' takes one amplitude");
    const double A = v[0];
    if (A == 0.0) return Potential();
    return from_function([A, L](double x) { return A * std::cos(2.0 * std::numbers::pi * x / L); },
                         L, spec);
  }
  if (kind == "well") {
    const auto v = parse_numbers(args, spec);
    if (v.size() != 2 || !(v[1] > 0.0)) throw ConfigError("potential 'well:depth,width' needs width > 0");
    const double depth = v[0], width = v[1];
    return from_function(
        [depth, width, L](double x) {
          const double c = std::cosh((x - 0.5 * L) / width);
          return -depth / (c * c);
        },
        L, spec);
  }
  if (kind == "table") {
    if (args.empty()) throw ConfigError("potential 'table:PATH' needs a path");
    auto spline = std::make_shared<CubicSpline>(read_table(args));
    return from_function([spline](double x) { return (*spline)(x); }, L, spec);
  }
  throw ConfigError("unknown potential '" + spec + "' (expected zero, cosine:A, well:d,w, table:PATH)");
}

}  // namespace treedisp
