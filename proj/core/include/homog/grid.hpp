#pragma once

#include <array>
#include <functional>
#include <vector>

#include "homog/errors.hpp"
#include "homog/types.hpp"

namespace homog::grid {

// 2x2 tensor Gauss rule on the reference cell [0,1]^2; weights sum to 1.
struct GaussRule {
  std::array<Vec2, 4> pts;
  std::array<double, 4> wts;
};
const GaussRule& gauss2x2();

// Bilinear Q1 element on [0,1]^2. Local nodes counterclockwise:
// 0=(0,0), 1=(1,0), 2=(1,1), 3=(0,1).
struct Q1 {
  static std::array<double, 4> shape(Vec2 p);
  // Reference gradients; divide by the cell size for physical gradients.
  static std::array<Vec2, 4> shape_grad(Vec2 p);
};
inline constexpr std::array<std::array<int, 2>, 4> kQ1Offsets = {
    {{0, 0}, {1, 0}, {1, 1}, {0, 1}}};

enum class BoundaryTag { dirichlet, periodic, free };

// Nodal scalar field on a uniform m x m grid over the unit square. Node (i,j)
// sits at (i/m, j/m); storage row-major with (m+1)^2 entries.
struct DiscreteField {
  int m = 0;
  BoundaryTag boundary = BoundaryTag::dirichlet;
  std::vector<double> values;

  DiscreteField() = default;
  DiscreteField(int m_, BoundaryTag tag)
      : m(m_), boundary(tag),
        values(static_cast<size_t>(m_ + 1) * (m_ + 1), 0.0) {}

  double h() const { return 1.0 / m; }
  int nodes_per_edge() const { return m + 1; }
  double at(int i, int j) const { return values[static_cast<size_t>(j) * (m + 1) + i]; }
  double& at(int i, int j) { return values[static_cast<size_t>(j) * (m + 1) + i]; }

  // Bilinear evaluation; x clamped to [0,1]^2.
  double eval(Vec2 x) const;
  Vec2 eval_grad(Vec2 x) const;
};

DiscreteField sample(int m, BoundaryTag tag,
                     const std::function<double(Vec2)>& f);

// Composite 2x2 Gauss integrals of the Q1 interpolant.
double integrate_sq(const DiscreteField& u);       // int |u|^2
double integrate_grad_sq(const DiscreteField& u);  // int |grad u|^2
inline double norm_l2(const DiscreteField& u) { return std::sqrt(integrate_sq(u)); }
inline double norm_h1(const DiscreteField& u) {
  return std::sqrt(integrate_sq(u) + integrate_grad_sq(u));
}

// Sum of squared centered second differences scaled to approximate the H^2
// seminorm; a diagnostic surrogate, not a norm claim.
double h2_surrogate(const DiscreteField& u);

}  // namespace homog::grid
