#pragma once

#include <vector>

#include "homog/cell.hpp"
#include "homog/grid.hpp"

namespace homog::approx {

// Discrete mollifier: the standard bump c*exp(-1/(1-|4y|^2)) scaled to support
// radius eps/4, sampled on grid offsets with tensor midpoint weights and
// normalized to exact unit discrete mass.
struct Mollifier {
  int radius = 0;               // stencil half-width in nodes
  double eps = 0.0;
  double h = 0.0;
  std::vector<double> weights;  // (2*radius+1)^2, row-major

  static Mollifier build(double eps, double h);
  double weight(int kx, int ky) const {
    return weights[static_cast<size_t>(ky + radius) * (2 * radius + 1) +
                   (kx + radius)];
  }
  double discrete_mass() const;  // row-major sum, the convolution's order
};

// Nodal field on the padded grid [-pad*h, 1+pad*h]^2 extending a unit-square
// field; indices run in [-pad, m+pad].
struct ExtendedField {
  int m = 0;
  int pad = 0;
  std::vector<double> values;

  ExtendedField() = default;
  ExtendedField(int m_, int pad_)
      : m(m_), pad(pad_),
        values(static_cast<size_t>(m_ + 1 + 2 * pad_) * (m_ + 1 + 2 * pad_), 0.0) {}

  double h() const { return 1.0 / m; }
  int per_edge() const { return m + 1 + 2 * pad; }
  double at(int i, int j) const {
    return values[static_cast<size_t>(j + pad) * per_edge() + (i + pad)];
  }
  double& at(int i, int j) {
    return values[static_cast<size_t>(j + pad) * per_edge() + (i + pad)];
  }

  grid::DiscreteField restrict_to_unit() const;
  // H1 norms over the unit square and over the whole padded box (recorded
  // extension constants).
  double h1_norm_unit() const;
  double h1_norm_pad() const;
};

// Even reflection across each edge (corners by double reflection) multiplied
// by a smooth cutoff: 1 on [-p/2, 1+p/2]^2, 0 at the pad boundary.
ExtendedField extend(const grid::DiscreteField& u0, double padding);

// Centered differences on the padded grid (one-sided at the outermost ring).
ExtendedField gradient_x(const ExtendedField& f);
ExtendedField gradient_y(const ExtendedField& f);

// Discrete convolution with the eps-scaled mollifier, evaluated at the unit
// square nodes. Requires pad >= stencil radius.
grid::DiscreteField smooth(const ExtendedField& f, double eps);

// v_eps = u0 + eps*chi^eps*S_eps(grad u~0) + eps*chi0^eps*S_eps(u~0) with
// chi(x/eps) by periodic bilinear interpolation of the cell solution.
grid::DiscreteField first_order_approx(const grid::DiscreteField& u0,
                                       const cell::CellSolution& sol, double eps);

// Smooth profile: 1 on the eps-strip along the boundary, 0 beyond the
// 2*eps-strip, |grad| <= C/eps.
grid::DiscreteField boundary_cutoff(double eps, int m);

// ||phi_eps||_H1 with phi_eps = eps*theta_eps*(chi^eps . grad u0 + chi0^eps u0).
double boundary_layer_indicator(const grid::DiscreteField& u0,
                                const cell::CellSolution& sol, double eps);

// Default padding width for the extension, 1/4 + 2*eps.
double default_padding(double eps);

}  // namespace homog::approx
