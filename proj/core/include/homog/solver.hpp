#pragma once

#include <functional>
#include <optional>

#include "homog/cell.hpp"
#include "homog/fields.hpp"
#include "homog/grid.hpp"
#include "homog/linalg.hpp"

namespace homog::solver {

// Data of the oscillating Dirichlet problem on the unit square: coefficients,
// zero-order shift mu, and the closed-form source f.
struct ProblemSpec {
  fields::CoefficientField A = fields::CoefficientField::identity();
  fields::CoefficientField V = fields::CoefficientField::zero_vector();
  fields::CoefficientField B = fields::CoefficientField::zero_vector();
  fields::CoefficientField a0 = fields::CoefficientField::zero_scalar();
  double mu = 0.0;
  fields::ScalarExpr f;

  double alpha0_declared() const;
  // max(mu, mu0(alpha, alpha0)) per the well-posedness gate.
  double effective_mu() const;
};

// Garding shift mu0 = alpha0 + 2*alpha0^2/alpha: Cauchy-Schwarz/Young
// absorption of the V, B, a0 terms into alpha/2 of the gradient term.
double compute_mu0(double alpha, double beta, double alpha0);

struct DirichletSystem {
  int m = 0;
  linalg::SparseMatrix matrix;  // (m-1)^2 interior unknowns
  std::vector<double> rhs;
  bool drift_free = false;  // no V/B terms: matrix is SPD
};

// Q1 assembly of the bilinear form with coefficients evaluated at x/eps at
// the 2x2 Gauss points; Dirichlet rows eliminated. Requires m*eps >= 16
// (resolved oscillations); eps = 1 samples coefficients at y = x.
DirichletSystem assemble_dirichlet(const ProblemSpec& spec, double eps, int m);

struct SolveInfo {
  linalg::LinearSolveReport report;
  double h1_norm = 0.0;       // ||u||_H1
  double f_l2_norm = 0.0;     // ||f||_L2
  double stability = 0.0;     // ||u||_H1 / ||f||_L2
  double h2_surrogate = 0.0;  // second-difference diagnostic
  double mu_used = 0.0;
};

grid::DiscreteField solve_oscillating(const ProblemSpec& spec, double eps, int m,
                                      SolveInfo* info = nullptr);

// Constant-coefficient solve of the homogenized problem; mu is carried inside
// coeffs. A_hat must be SPD.
grid::DiscreteField solve_homogenized(const cell::HomogenizedCoefficients& coeffs,
                                      const fields::ScalarExpr& f, int m,
                                      SolveInfo* info = nullptr);

// L2 norm of a closed-form source over the unit square by composite Gauss
// quadrature at resolution m.
double source_l2_norm(const fields::ScalarExpr& f, int m);

// Adjoint assembly (V and B interchanged); diagnostic for the adjoint
// structure tests.
DirichletSystem assemble_dirichlet_adjoint(const ProblemSpec& spec, double eps,
                                           int m);

}  // namespace homog::solver
