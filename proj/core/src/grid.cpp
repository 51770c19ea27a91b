#include "homog/grid.hpp"

#include <algorithm>
#include <cmath>

namespace homog::grid {

const GaussRule& gauss2x2() {
  static const GaussRule rule = [] {
    GaussRule r;
    const double a = 0.5 * (1.0 - 1.0 / std::sqrt(3.0));
    const double b = 0.5 * (1.0 + 1.0 / std::sqrt(3.0));
    r.pts = {Vec2{a, a}, Vec2{b, a}, Vec2{b, b}, Vec2{a, b}};
    r.wts = {0.25, 0.25, 0.25, 0.25};
    return r;
  }();
  return rule;
}

std::array<double, 4> Q1::shape(Vec2 p) {
  const double x = p.x, y = p.y;
  return {(1.0 - x) * (1.0 - y), x * (1.0 - y), x * y, (1.0 - x) * y};
}

std::array<Vec2, 4> Q1::shape_grad(Vec2 p) {
  const double x = p.x, y = p.y;
  return {Vec2{-(1.0 - y), -(1.0 - x)}, Vec2{1.0 - y, -x}, Vec2{y, x},
          Vec2{-y, 1.0 - x}};
}

namespace {

struct CellCoord {
  int ci, cj;
  Vec2 local;
};

CellCoord locate(const DiscreteField& u, Vec2 x) {
  const double cx = std::clamp(x.x, 0.0, 1.0) * u.m;
  const double cy = std::clamp(x.y, 0.0, 1.0) * u.m;
  int ci = std::min(static_cast<int>(cx), u.m - 1);
  int cj = std::min(static_cast<int>(cy), u.m - 1);
  return {ci, cj, {cx - ci, cy - cj}};
}

}  // namespace

double DiscreteField::eval(Vec2 x) const {
  const CellCoord c = locate(*this, x);
  const auto N = Q1::shape(c.local);
  double s = 0.0;
  for (int a = 0; a < 4; ++a)
    s += N[a] * at(c.ci + kQ1Offsets[a][0], c.cj + kQ1Offsets[a][1]);
  return s;
}

Vec2 DiscreteField::eval_grad(Vec2 x) const {
  const CellCoord c = locate(*this, x);
  const auto G = Q1::shape_grad(c.local);
  Vec2 g{0.0, 0.0};
  for (int a = 0; a < 4; ++a) {
    const double v = at(c.ci + kQ1Offsets[a][0], c.cj + kQ1Offsets[a][1]);
    g += G[a] * v;
  }
  return g * static_cast<double>(m);
}

DiscreteField sample(int m, BoundaryTag tag,
                     const std::function<double(Vec2)>& f) {
  DiscreteField u(m, tag);
  for (int j = 0; j <= m; ++j)
    for (int i = 0; i <= m; ++i)
      u.at(i, j) = f({static_cast<double>(i) / m, static_cast<double>(j) / m});
  return u;
}

double integrate_sq(const DiscreteField& u) {
  const GaussRule& gr = gauss2x2();
  const double h2 = u.h() * u.h();
  double total = 0.0;
  for (int cj = 0; cj < u.m; ++cj)
    for (int ci = 0; ci < u.m; ++ci) {
      double v[4];
      for (int a = 0; a < 4; ++a)
        v[a] = u.at(ci + kQ1Offsets[a][0], cj + kQ1Offsets[a][1]);
      for (int q = 0; q < 4; ++q) {
        const auto N = Q1::shape(gr.pts[q]);
        const double val = N[0] * v[0] + N[1] * v[1] + N[2] * v[2] + N[3] * v[3];
        total += gr.wts[q] * h2 * val * val;
      }
    }
  return total;
}

double integrate_grad_sq(const DiscreteField& u) {
  const GaussRule& gr = gauss2x2();
  double total = 0.0;
  for (int cj = 0; cj < u.m; ++cj)
    for (int ci = 0; ci < u.m; ++ci) {
      double v[4];
      for (int a = 0; a < 4; ++a)
        v[a] = u.at(ci + kQ1Offsets[a][0], cj + kQ1Offsets[a][1]);
      for (int q = 0; q < 4; ++q) {
        const auto G = Q1::shape_grad(gr.pts[q]);
        Vec2 g{0.0, 0.0};
        for (int a = 0; a < 4; ++a) g += G[a] * v[a];
        // physical gradient carries 1/h; h^2 cell measure cancels one h^2
        total += gr.wts[q] * (g.x * g.x + g.y * g.y);
      }
    }
  return total;
}

double h2_surrogate(const DiscreteField& u) {
  const double h = u.h();
  double total = 0.0;
  for (int j = 1; j < u.m; ++j)
    for (int i = 1; i < u.m; ++i) {
      const double dxx = (u.at(i + 1, j) - 2.0 * u.at(i, j) + u.at(i - 1, j)) / (h * h);
      const double dyy = (u.at(i, j + 1) - 2.0 * u.at(i, j) + u.at(i, j - 1)) / (h * h);
      const double dxy = (u.at(i + 1, j + 1) - u.at(i + 1, j - 1) - u.at(i - 1, j + 1) +
                          u.at(i - 1, j - 1)) /
                         (4.0 * h * h);
      total += (dxx * dxx + 2.0 * dxy * dxy + dyy * dyy) * h * h;
    }
  return std::sqrt(total);
}

}  // namespace homog::grid
