#pragma once

namespace treedisp {

/// Truncated Taylor jet in one parameter: value, first and second derivative.
/// Arithmetic propagates exact derivatives, so any scheme written over Jet
/// yields the derivatives of that scheme's output.
struct Jet {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;

  constexpr Jet() = default;
  constexpr Jet(double value) : v(value) {}  // NOLINT(google-explicit-constructor)
  constexpr Jet(double value, double first, double second) : v(value), d1(first), d2(second) {}

  constexpr Jet& operator+=(const Jet& o) {
    v += o.v;
    d1 += o.d1;
    d2 += o.d2;
    return *this;
  }
  constexpr Jet& operator-=(const Jet& o) {
    v -= o.v;
    d1 -= o.d1;
    d2 -= o.d2;
    return *this;
  }
};

constexpr Jet operator+(Jet a, const Jet& b) { return a += b; }
constexpr Jet operator-(Jet a, const Jet& b) { return a -= b; }
constexpr Jet operator-(const Jet& a) { return {-a.v, -a.d1, -a.d2}; }
constexpr Jet operator*(const Jet& a, const Jet& b) {
  return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}
constexpr Jet operator*(double s, const Jet& a) { return {s * a.v, s * a.d1, s * a.d2}; }
constexpr Jet operator*(const Jet& a, double s) { return s * a; }

/// f(x) for a jet x given f, f', f'' at x.v.
constexpr Jet compose(const Jet& x, double f0, double f1, double f2) {
  return {f0, f1 * x.d1, f2 * x.d1 * x.d1 + f1 * x.d2};
}

}  // namespace treedisp
