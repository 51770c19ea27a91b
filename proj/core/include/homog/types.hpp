#pragma once

#include <array>
#include <cmath>

namespace homog {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::sqrt(x * x + y * y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// Symmetric-capable dense 2x2 matrix; stored row-major.
struct Mat2 {
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 diag(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }

  Vec2 operator*(const Vec2& v) const {
    return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y};
  }
  Mat2 operator+(const Mat2& o) const {
    return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
  }
  Mat2& operator+=(const Mat2& o) {
    a11 += o.a11;
    a12 += o.a12;
    a21 += o.a21;
    a22 += o.a22;
    return *this;
  }
  Mat2 operator*(double s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }

  double quadratic_form(const Vec2& v) const { return (*this * v).dot(v); }
  double det() const { return a11 * a22 - a12 * a21; }
  Mat2 inverse() const {
    const double d = det();
    return {a22 / d, -a12 / d, -a21 / d, a11 / d};
  }
  // Eigenvalues of the symmetrized part, ascending.
  std::array<double, 2> sym_eigenvalues() const {
    const double s12 = 0.5 * (a12 + a21);
    const double tr = a11 + a22;
    const double disc = std::sqrt(0.25 * (a11 - a22) * (a11 - a22) + s12 * s12);
    return {0.5 * tr - disc, 0.5 * tr + disc};
  }
  double max_asymmetry() const { return std::abs(a12 - a21); }
};

inline Mat2 operator*(double s, const Mat2& m) { return m * s; }

}  // namespace homog
