#pragma once

#include <vector>

#include "homog/cell.hpp"
#include "homog/fields.hpp"

namespace homog::defect {

// Truncated computational box [-L, L]^2 with n cells per unit period and
// homogeneous Dirichlet boundary for the defect part.
struct BoxGrid {
  int L = 0;             // half-width in periods
  int n_per_period = 0;  // cells per period
  int cells() const { return 2 * L * n_per_period; }
  double h() const { return 1.0 / n_per_period; }
  Vec2 node_pos(int i, int j) const {
    return {-L + i * h(), -L + j * h()};
  }
};

struct AnnulusEnergy {
  double radius = 0.0;  // outer half-width of the period ring
  double energy = 0.0;  // H1 energy of chi00 over the ring
};

// chi0 = chi_per + chi00 with chi_per periodic and chi00 decaying; the defect
// part is represented on the truncated box only.
struct DefectCorrector {
  BoxGrid box;
  cell::PeriodicField chi_per;       // tiled periodically over the box
  std::vector<double> chi00;         // (cells+1)^2 nodal values, 0 on boundary
  std::vector<AnnulusEnergy> annulus_energies;
  linalg::LinearSolveReport report;
  double rhs_norm = 0.0;             // |defect load|_2, the residual scale

  double chi00_at(int i, int j) const {
    return chi00[static_cast<size_t>(j) * (box.cells() + 1) + i];
  }
  double& chi00_at(int i, int j) {
    return chi00[static_cast<size_t>(j) * (box.cells() + 1) + i];
  }
  double chi00_max_abs() const;
  double total_energy() const;
};

struct DefectOptions {
  double tol = 1e-10;
  int max_iter = 200000;
  double cell_tol = 1e-12;
};

// Periodic corrector problems restricted to the periodic parts of the
// coefficients; delegates to the cell module.
cell::CellSolution solve_periodic_part(const fields::CoefficientField& A_per,
                                       const fields::CoefficientField& V_per,
                                       int n,
                                       const cell::SolveOptions& opts = {});

// Solves -div(A grad w) = div(A0 grad chi_per + V0) on the box with
// homogeneous Dirichlet data; the right-hand side is the defect-part residual
// of chi_per in the full corrector equation, so zero defect gives w = 0
// exactly. V plays the role of the corrector load H (pass A e_j for the
// direction correctors).
DefectCorrector solve_defect_part(const fields::CoefficientField& A,
                                  const fields::CoefficientField& V,
                                  const cell::PeriodicField& chi_per, int L,
                                  int n_per_period,
                                  const DefectOptions& opts = {});

struct DecayRow {
  double R = 0.0;                 // square half-width in periods
  double annulus_energy = 0.0;    // H1 energy of the ring ending at R
  double tail_energy = 0.0;       // H1 energy outside [-R, R]^2
  double seminorm_estimate = 0.0; // sqrt(avg of chi00^2 over [-R, R]^2)
};

std::vector<DecayRow> decay_report(const DefectCorrector& dc);

// Relative interior residual of chi_per + chi00 against the full operator
// assembled on the box (rows at least `margin` nodes away from the boundary),
// normalized by the norm of the full load -int V . grad(phi).
double interior_residual(const fields::CoefficientField& A,
                         const fields::CoefficientField& V,
                         const DefectCorrector& dc, int margin = 1);

// H1 norm of chi00 over the centered square of the given half-width
// (periods), and the norm of the difference of two runs sharing a grid pitch.
double central_h1_norm(const DefectCorrector& dc, int half_width);
double central_h1_diff(const DefectCorrector& a, const DefectCorrector& b,
                       int half_width);

}  // namespace homog::defect
