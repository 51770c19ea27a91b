#include "homog/defect.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace homog::defect {

using fields::CoefficientField;
using grid::gauss2x2;
using grid::kQ1Offsets;
using grid::Q1;

double DefectCorrector::chi00_max_abs() const {
  double s = 0.0;
  for (double v : chi00) s = std::max(s, std::abs(v));
  return s;
}

double DefectCorrector::total_energy() const {
  double s = 0.0;
  for (const AnnulusEnergy& a : annulus_energies) s += a.energy;
  return s;
}

cell::CellSolution solve_periodic_part(const CoefficientField& A_per,
                                       const CoefficientField& V_per, int n,
                                       const cell::SolveOptions& opts) {
  return cell::solve_correctors(A_per.periodic_part(), V_per.periodic_part(),
                                cell::PeriodicGrid(n), opts);
}

namespace {

// Gradient of the tiled periodic corrector at a box Gauss point.
Vec2 chi_per_grad(const cell::PeriodicField& chi_per, Vec2 x) {
  return chi_per.eval_grad(x);
}

struct BoxSystem {
  linalg::SparseMatrix stiffness;  // interior unknowns
  std::vector<double> rhs;
};

int interior_index(const BoxGrid& box, int i, int j) {
  const int nc = box.cells();
  return (j - 1) * (nc - 1) + (i - 1);
}

// Dirichlet stiffness of -div(A grad .) on the box plus the load
// rhs_a = -int H(x) . grad(phi_a) for a callable H.
BoxSystem assemble_box(const CoefficientField& A,
                       const std::function<Vec2(Vec2)>& H, const BoxGrid& box) {
  const auto& gr = gauss2x2();
  const int nc = box.cells();
  const double h = box.h();
  const int nu = (nc - 1) * (nc - 1);
  BoxSystem sys;
  sys.rhs.assign(nu, 0.0);
  std::vector<linalg::Triplet> trips;
  trips.reserve(static_cast<size_t>(nc) * nc * 16);

  for (int cj = 0; cj < nc; ++cj)
    for (int ci = 0; ci < nc; ++ci) {
      int gi[4], gj[4];
      bool interior[4];
      for (int a = 0; a < 4; ++a) {
        gi[a] = ci + kQ1Offsets[a][0];
        gj[a] = cj + kQ1Offsets[a][1];
        interior[a] = gi[a] > 0 && gi[a] < nc && gj[a] > 0 && gj[a] < nc;
      }
      double loc[4][4] = {};
      double fl[4] = {};
      for (int q = 0; q < 4; ++q) {
        const Vec2 x{-box.L + (ci + gr.pts[q].x) * h,
                     -box.L + (cj + gr.pts[q].y) * h};
        const Mat2 a = A.eval_matrix(x);
        const auto G = Q1::shape_grad(gr.pts[q]);
        for (int bq = 0; bq < 4; ++bq) {
          const Vec2 ag = a * G[bq];
          for (int aq = 0; aq < 4; ++aq) loc[aq][bq] += gr.wts[q] * ag.dot(G[aq]);
        }
        const Vec2 hv = H(x);
        if (hv.x != 0.0 || hv.y != 0.0) {
          for (int aq = 0; aq < 4; ++aq)
            fl[aq] -= gr.wts[q] * h * hv.dot(G[aq]);
        }
      }
      for (int aq = 0; aq < 4; ++aq) {
        if (!interior[aq]) continue;
        const int row = interior_index(box, gi[aq], gj[aq]);
        sys.rhs[row] += fl[aq];
        for (int bq = 0; bq < 4; ++bq) {
          if (!interior[bq]) continue;
          trips.emplace_back(row, interior_index(box, gi[bq], gj[bq]),
                             loc[aq][bq]);
        }
      }
    }
  sys.stiffness = linalg::assemble_from_triplets(nu, nu, std::move(trips));
  return sys;
}

std::vector<AnnulusEnergy> annulus_profile(const DefectCorrector& dc) {
  const BoxGrid& box = dc.box;
  const auto& gr = gauss2x2();
  const int nc = box.cells();
  const double h = box.h();
  const double h2 = h * h;
  std::vector<AnnulusEnergy> rings(box.L);
  for (int r = 0; r < box.L; ++r) rings[r].radius = r + 1.0;

  for (int cj = 0; cj < nc; ++cj)
    for (int ci = 0; ci < nc; ++ci) {
      const double cx = -box.L + (ci + 0.5) * h;
      const double cy = -box.L + (cj + 0.5) * h;
      const double rad = std::max(std::abs(cx), std::abs(cy));
      const int ring = std::min(box.L - 1, static_cast<int>(std::floor(rad)));
      double v[4];
      for (int a = 0; a < 4; ++a)
        v[a] = dc.chi00_at(ci + kQ1Offsets[a][0], cj + kQ1Offsets[a][1]);
      double e = 0.0;
      for (int q = 0; q < 4; ++q) {
        const auto N = Q1::shape(gr.pts[q]);
        const auto G = Q1::shape_grad(gr.pts[q]);
        double val = 0.0;
        Vec2 g{0.0, 0.0};
        for (int a = 0; a < 4; ++a) {
          val += N[a] * v[a];
          g += G[a] * v[a];
        }
        e += gr.wts[q] * (h2 * val * val + g.dot(g));
      }
      rings[ring].energy += e;
    }
  return rings;
}

}  // namespace

DefectCorrector solve_defect_part(const CoefficientField& A,
                                  const CoefficientField& V,
                                  const cell::PeriodicField& chi_per, int L,
                                  int n_per_period, const DefectOptions& opts) {
  if (L < 4) throw ConfigError("defect box requires L >= 4 periods");
  if (chi_per.n != n_per_period)
    throw ConfigError("chi_per resolution must match n_per_period");

  // Truncation guard: gaussian supports must stay out of the outer 2 periods.
  auto check_support = [&](const CoefficientField& f, const char* name) {
    for (const auto& [c, r] : f.decaying_supports()) {
      const double reach = std::max(std::abs(c.x), std::abs(c.y)) + r;
      if (reach > L - 2.0)
        throw ConfigError(std::string("defect support of ") + name +
                          " reaches into the boundary strip (|c|+4*sigma = " +
                          std::to_string(reach) + " > L-2)");
    }
  };
  check_support(A, "A");
  check_support(V, "V");

  BoxGrid box{L, n_per_period};
  // Load carries the defect parts only: H0 = A0 grad chi_per + V0. With zero
  // defect amplitude the rhs vanishes identically.
  auto H0 = [&](Vec2 x) -> Vec2 {
    const Vec2 g = chi_per_grad(chi_per, x);
    const Vec2 av = A.eval_matrix_decaying(x) * g;
    const Vec2 v0 = V.has_decaying_part() ? V.eval_vector_decaying(x) : Vec2{0, 0};
    return {av.x + v0.x, av.y + v0.y};
  };
  BoxSystem sys = assemble_box(A, H0, box);

  DefectCorrector dc;
  dc.box = box;
  dc.chi_per = chi_per;
  dc.rhs_norm = linalg::norm2(sys.rhs);
  const int nc = box.cells();
  dc.chi00.assign(static_cast<size_t>(nc + 1) * (nc + 1), 0.0);

  linalg::CgOptions cg;
  cg.tol = opts.tol;
  cg.max_iter = opts.max_iter;
  auto [x, rep] = linalg::solve_spd(sys.stiffness, sys.rhs, cg);
  dc.report = rep;
  for (int j = 1; j < nc; ++j)
    for (int i = 1; i < nc; ++i)
      dc.chi00_at(i, j) = x[interior_index(box, i, j)];

  dc.annulus_energies = annulus_profile(dc);
  return dc;
}

std::vector<DecayRow> decay_report(const DefectCorrector& dc) {
  const BoxGrid& box = dc.box;
  const int nc = box.cells();
  const double h = box.h();
  std::vector<DecayRow> rows(box.L);

  double total = dc.total_energy();
  double outside = total;
  // midpoint quadrature of chi00^2 over growing squares
  std::vector<double> sq_integral(box.L, 0.0);
  for (int cj = 0; cj < nc; ++cj)
    for (int ci = 0; ci < nc; ++ci) {
      const double cx = -box.L + (ci + 0.5) * h;
      const double cy = -box.L + (cj + 0.5) * h;
      const double rad = std::max(std::abs(cx), std::abs(cy));
      const int ring = std::min(box.L - 1, static_cast<int>(std::floor(rad)));
      // cell-average of the Q1 interpolant via the 4 nodal values
      double avg = 0.0;
      for (int a = 0; a < 4; ++a) {
        const double v = dc.chi00_at(ci + kQ1Offsets[a][0], cj + kQ1Offsets[a][1]);
        avg += 0.25 * v * v;
      }
      sq_integral[ring] += avg * h * h;
    }
  double cum_sq = 0.0;
  for (int r = 0; r < box.L; ++r) {
    const double R = r + 1.0;
    outside -= dc.annulus_energies[r].energy;
    cum_sq += sq_integral[r];
    rows[r].R = R;
    rows[r].annulus_energy = dc.annulus_energies[r].energy;
    rows[r].tail_energy = std::max(0.0, outside);
    rows[r].seminorm_estimate = std::sqrt(cum_sq / (4.0 * R * R));
  }
  return rows;
}

double interior_residual(const CoefficientField& A, const CoefficientField& V,
                         const DefectCorrector& dc, int margin) {
  const BoxGrid& box = dc.box;
  const auto& gr = gauss2x2();
  const int nc = box.cells();
  const double h = box.h();
  const int nu = (nc - 1) * (nc - 1);
  std::vector<double> residual(nu, 0.0);
  std::vector<double> full_load(nu, 0.0);

  for (int cj = 0; cj < nc; ++cj)
    for (int ci = 0; ci < nc; ++ci) {
      int gi[4], gj[4];
      bool interior[4];
      double v[4];
      for (int a = 0; a < 4; ++a) {
        gi[a] = ci + kQ1Offsets[a][0];
        gj[a] = cj + kQ1Offsets[a][1];
        interior[a] = gi[a] > 0 && gi[a] < nc && gj[a] > 0 && gj[a] < nc;
        v[a] = dc.chi00_at(gi[a], gj[a]);
      }
      for (int q = 0; q < 4; ++q) {
        const Vec2 x{-box.L + (ci + gr.pts[q].x) * h,
                     -box.L + (cj + gr.pts[q].y) * h};
        const Mat2 a = A.eval_matrix(x);
        const auto G = Q1::shape_grad(gr.pts[q]);
        // grad of (chi_per + chi00) at the Gauss point
        Vec2 g = chi_per_grad(dc.chi_per, x);
        Vec2 g00{0.0, 0.0};
        for (int b = 0; b < 4; ++b) g00 += G[b] * v[b];
        g += g00 * (1.0 / h);
        const Vec2 flux = a * g;
        const Vec2 vv = V.eval_vector(x);
        for (int aq = 0; aq < 4; ++aq) {
          if (!interior[aq]) continue;
          const int row = interior_index(box, gi[aq], gj[aq]);
          residual[row] += gr.wts[q] * h * (flux.dot(G[aq]) + vv.dot(G[aq]));
          full_load[row] -= gr.wts[q] * h * vv.dot(G[aq]);
        }
      }
    }

  double rsum = 0.0, lsum = 0.0;
  for (int j = 1; j < nc; ++j)
    for (int i = 1; i < nc; ++i) {
      const int row = interior_index(box, i, j);
      lsum += full_load[row] * full_load[row];
      if (i <= margin || i >= nc - margin || j <= margin || j >= nc - margin)
        continue;
      rsum += residual[row] * residual[row];
    }
  const double scale = std::sqrt(lsum);
  return scale > 0.0 ? std::sqrt(rsum) / scale : std::sqrt(rsum);
}

namespace {

double central_h1_sq(const DefectCorrector& dc, int half_width,
                     const DefectCorrector* other) {
  const BoxGrid& box = dc.box;
  const auto& gr = gauss2x2();
  const double h = box.h();
  const double h2 = h * h;
  double total = 0.0;
  const int lo = (box.L - half_width) * box.n_per_period;
  const int hi = (box.L + half_width) * box.n_per_period;
  const int off = other ? (other->box.L - box.L) * box.n_per_period : 0;
  for (int cj = lo; cj < hi; ++cj)
    for (int ci = lo; ci < hi; ++ci) {
      double v[4];
      for (int a = 0; a < 4; ++a) {
        const int ii = ci + kQ1Offsets[a][0];
        const int jj = cj + kQ1Offsets[a][1];
        v[a] = dc.chi00_at(ii, jj);
        if (other) v[a] -= other->chi00_at(ii + off, jj + off);
      }
      for (int q = 0; q < 4; ++q) {
        const auto N = Q1::shape(gr.pts[q]);
        const auto G = Q1::shape_grad(gr.pts[q]);
        double val = 0.0;
        Vec2 g{0.0, 0.0};
        for (int a = 0; a < 4; ++a) {
          val += N[a] * v[a];
          g += G[a] * v[a];
        }
        total += gr.wts[q] * (h2 * val * val + g.dot(g));
      }
    }
  return total;
}

}  // namespace

double central_h1_norm(const DefectCorrector& dc, int half_width) {
  if (half_width > dc.box.L)
    throw ConfigError("central region exceeds the box");
  return std::sqrt(central_h1_sq(dc, half_width, nullptr));
}

double central_h1_diff(const DefectCorrector& a, const DefectCorrector& b,
                       int half_width) {
  if (a.box.n_per_period != b.box.n_per_period)
    throw ConfigError("central_h1_diff requires matching grid pitch");
  if (half_width > a.box.L || half_width > b.box.L)
    throw ConfigError("central region exceeds one of the boxes");
  return std::sqrt(central_h1_sq(a, half_width, &b));
}

}  // namespace homog::defect
