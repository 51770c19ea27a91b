#include "homog/approx.hpp"

#include <algorithm>
#include <cmath>

namespace homog::approx {

using grid::BoundaryTag;
using grid::DiscreteField;

namespace {

// Standard bump profile on the ball of radius 1/4, unnormalized.
double bump(double r_over_quarter_sq) {
  // argument: |4y|^2 = (r / (1/4))^2
  if (r_over_quarter_sq >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - r_over_quarter_sq));
}

}  // namespace

Mollifier Mollifier::build(double eps, double h) {
  if (eps <= 0.0) throw ConfigError("mollifier requires eps > 0");
  const int radius = static_cast<int>(std::floor(eps / (4.0 * h) + 1e-12));
  if (radius < 1)
    throw ConfigError("grid too coarse to resolve the mollifier support (eps/4 < h)");

  Mollifier mol;
  mol.radius = radius;
  mol.eps = eps;
  mol.h = h;
  const int w = 2 * radius + 1;
  mol.weights.assign(static_cast<size_t>(w) * w, 0.0);
  double sum = 0.0;
  for (int ky = -radius; ky <= radius; ++ky)
    for (int kx = -radius; kx <= radius; ++kx) {
      const double zx = kx * h / eps;
      const double zy = ky * h / eps;
      const double v = bump(16.0 * (zx * zx + zy * zy));
      mol.weights[static_cast<size_t>(ky + radius) * w + (kx + radius)] = v;
      sum += v;
    }
  for (double& v : mol.weights) v /= sum;
  // Nudge the center weight until the row-major sum is exactly 1; the
  // convolution then reproduces constants bit-exactly.
  for (int pass = 0; pass < 4; ++pass) {
    const double s = mol.discrete_mass();
    if (s == 1.0) break;
    mol.weights[static_cast<size_t>(radius) * w + radius] += 1.0 - s;
  }
  return mol;
}

double Mollifier::discrete_mass() const {
  double s = 0.0;
  for (double v : weights) s += v;
  return s;
}

DiscreteField ExtendedField::restrict_to_unit() const {
  DiscreteField u(m, BoundaryTag::free);
  for (int j = 0; j <= m; ++j)
    for (int i = 0; i <= m; ++i) u.at(i, j) = at(i, j);
  return u;
}

namespace {

double h1_norm_over(const ExtendedField& f, int lo, int hi) {
  const auto& gr = grid::gauss2x2();
  const double h = f.h();
  const double h2 = h * h;
  double total = 0.0;
  for (int cj = lo; cj < hi; ++cj)
    for (int ci = lo; ci < hi; ++ci) {
      double v[4];
      for (int a = 0; a < 4; ++a)
        v[a] = f.at(ci + grid::kQ1Offsets[a][0], cj + grid::kQ1Offsets[a][1]);
      for (int q = 0; q < 4; ++q) {
        const auto N = grid::Q1::shape(gr.pts[q]);
        const auto G = grid::Q1::shape_grad(gr.pts[q]);
        double val = 0.0;
        Vec2 g{0.0, 0.0};
        for (int a = 0; a < 4; ++a) {
          val += N[a] * v[a];
          g += G[a] * v[a];
        }
        total += gr.wts[q] * (h2 * val * val + g.dot(g));
      }
    }
  return std::sqrt(total);
}

}  // namespace

double ExtendedField::h1_norm_unit() const { return h1_norm_over(*this, 0, m); }

double ExtendedField::h1_norm_pad() const {
  return h1_norm_over(*this, -pad, m + pad);
}

ExtendedField extend(const grid::DiscreteField& u0, double padding) {
  if (padding > 1.0) throw ConfigError("extension padding must not exceed 1");
  if (padding <= 0.0) throw ConfigError("extension padding must be positive");
  const int m = u0.m;
  const int pad = static_cast<int>(std::ceil(padding * m - 1e-12));
  ExtendedField ext(m, pad);

  // even reflection with period 2m in each index
  auto reflect = [m](int i) {
    int t = ((i % (2 * m)) + 2 * m) % (2 * m);
    return t <= m ? t : 2 * m - t;
  };
  // cutoff ramp: 1 on [-p/2, 1+p/2], smoothstep to 0 at the pad boundary
  const double p = pad * ext.h();
  auto ramp = [p](double x) {
    const double d = std::max(x - 1.0, -x);  // distance beyond [0, 1]
    if (d <= 0.5 * p) return 1.0;
    if (d >= p) return 0.0;
    const double s = (p - d) / (0.5 * p);  // 1 -> 0 over [p/2, p]
    return s * s * (3.0 - 2.0 * s);
  };

  const double h = ext.h();
  for (int j = -pad; j <= m + pad; ++j)
    for (int i = -pad; i <= m + pad; ++i) {
      const double cut = ramp(i * h) * ramp(j * h);
      ext.at(i, j) = cut == 0.0 ? 0.0 : cut * u0.at(reflect(i), reflect(j));
    }
  return ext;
}

ExtendedField gradient_x(const ExtendedField& f) {
  ExtendedField g(f.m, f.pad);
  const int lo = -f.pad, hi = f.m + f.pad;
  const double inv2h = 0.5 / f.h();
  for (int j = lo; j <= hi; ++j)
    for (int i = lo; i <= hi; ++i) {
      if (i == lo)
        g.at(i, j) = (f.at(i + 1, j) - f.at(i, j)) * 2.0 * inv2h;
      else if (i == hi)
        g.at(i, j) = (f.at(i, j) - f.at(i - 1, j)) * 2.0 * inv2h;
      else
        g.at(i, j) = (f.at(i + 1, j) - f.at(i - 1, j)) * inv2h;
    }
  return g;
}

ExtendedField gradient_y(const ExtendedField& f) {
  ExtendedField g(f.m, f.pad);
  const int lo = -f.pad, hi = f.m + f.pad;
  const double inv2h = 0.5 / f.h();
  for (int j = lo; j <= hi; ++j)
    for (int i = lo; i <= hi; ++i) {
      if (j == lo)
        g.at(i, j) = (f.at(i, j + 1) - f.at(i, j)) * 2.0 * inv2h;
      else if (j == hi)
        g.at(i, j) = (f.at(i, j) - f.at(i, j - 1)) * 2.0 * inv2h;
      else
        g.at(i, j) = (f.at(i, j + 1) - f.at(i, j - 1)) * inv2h;
    }
  return g;
}

DiscreteField smooth(const ExtendedField& f, double eps) {
  const Mollifier mol = Mollifier::build(eps, f.h());
  if (mol.radius > f.pad)
    throw ConfigError("insufficient padding for the mollifier support: need " +
                      std::to_string(mol.radius) + " rings, have " +
                      std::to_string(f.pad));
  const int m = f.m;
  const int R = mol.radius;
  DiscreteField out(m, BoundaryTag::free);
  const int stride = f.per_edge();
  const double* base = f.values.data();
  for (int j = 0; j <= m; ++j)
    for (int i = 0; i <= m; ++i) {
      double s = 0.0;
      size_t wk = 0;
      for (int ky = -R; ky <= R; ++ky) {
        const double* row =
            base + static_cast<size_t>(j - ky + f.pad) * stride + (i + f.pad);
        for (int kx = -R; kx <= R; ++kx, ++wk) s += mol.weights[wk] * row[-kx];
      }
      out.at(i, j) = s;
    }
  return out;
}

double default_padding(double eps) { return std::min(0.25 + 2.0 * eps, 1.0); }

DiscreteField first_order_approx(const grid::DiscreteField& u0,
                                 const cell::CellSolution& sol, double eps) {
  if (sol.chi1.values.empty() || sol.chi0.values.empty())
    throw ConfigError("first_order_approx: missing correctors");
  const ExtendedField ext = extend(u0, default_padding(eps));
  const ExtendedField gx = gradient_x(ext);
  const ExtendedField gy = gradient_y(ext);
  const DiscreteField sgx = smooth(gx, eps);
  const DiscreteField sgy = smooth(gy, eps);
  const DiscreteField su = smooth(ext, eps);

  const int m = u0.m;
  DiscreteField v(m, u0.boundary);
  const double h = 1.0 / m;
  for (int j = 0; j <= m; ++j)
    for (int i = 0; i <= m; ++i) {
      const Vec2 y{i * h / eps, j * h / eps};
      const double c1 = sol.chi1.eval(y);
      const double c2 = sol.chi2.eval(y);
      const double c0 = sol.chi0.eval(y);
      v.at(i, j) = u0.at(i, j) +
                   eps * (c1 * sgx.at(i, j) + c2 * sgy.at(i, j) + c0 * su.at(i, j));
    }
  return v;
}

DiscreteField boundary_cutoff(double eps, int m) {
  if (!(2.0 * eps < 0.5))
    throw ConfigError("boundary cutoff requires 2*eps < 1/2");
  DiscreteField theta(m, BoundaryTag::free);
  const double h = 1.0 / m;
  for (int j = 0; j <= m; ++j)
    for (int i = 0; i <= m; ++i) {
      const double x = i * h, y = j * h;
      const double dist = std::min({x, 1.0 - x, y, 1.0 - y});
      double v;
      if (dist <= eps)
        v = 1.0;
      else if (dist >= 2.0 * eps)
        v = 0.0;
      else {
        const double s = 2.0 - dist / eps;  // 1 -> 0 over [eps, 2eps]
        v = s * s * (3.0 - 2.0 * s);
      }
      theta.at(i, j) = v;
    }
  return theta;
}

double boundary_layer_indicator(const grid::DiscreteField& u0,
                                const cell::CellSolution& sol, double eps) {
  const int m = u0.m;
  const DiscreteField theta = boundary_cutoff(eps, m);
  DiscreteField phi(m, BoundaryTag::free);
  const double h = 1.0 / m;
  auto dx = [&](int i, int j) {
    if (i == 0) return (u0.at(1, j) - u0.at(0, j)) / h;
    if (i == m) return (u0.at(m, j) - u0.at(m - 1, j)) / h;
    return (u0.at(i + 1, j) - u0.at(i - 1, j)) / (2.0 * h);
  };
  auto dy = [&](int i, int j) {
    if (j == 0) return (u0.at(i, 1) - u0.at(i, 0)) / h;
    if (j == m) return (u0.at(i, m) - u0.at(i, m - 1)) / h;
    return (u0.at(i, j + 1) - u0.at(i, j - 1)) / (2.0 * h);
  };
  for (int j = 0; j <= m; ++j)
    for (int i = 0; i <= m; ++i) {
      const double t = theta.at(i, j);
      if (t == 0.0) continue;
      const Vec2 y{i * h / eps, j * h / eps};
      const double val = sol.chi1.eval(y) * dx(i, j) + sol.chi2.eval(y) * dy(i, j) +
                         sol.chi0.eval(y) * u0.at(i, j);
      phi.at(i, j) = eps * t * val;
    }
  return grid::norm_h1(phi);
}

}  // namespace homog::approx
