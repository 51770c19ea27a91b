#pragma once

#include <functional>
#include <vector>

#include "homog/fields.hpp"
#include "homog/grid.hpp"
#include "homog/linalg.hpp"
#include "homog/types.hpp"

namespace homog::cell {

// Uniform n x n grid on the unit cell Y = (0,1)^2 with periodic node
// identification: n^2 unknowns, indices wrap modulo n.
struct PeriodicGrid {
  int n = 0;

  explicit PeriodicGrid(int n_);
  double h() const { return 1.0 / n; }
  int node_count() const { return n * n; }
  int node(int i, int j) const {
    const int ii = ((i % n) + n) % n;
    const int jj = ((j % n) + n) % n;
    return jj * n + ii;
  }
};

// Nodal scalar field with periodic wraparound; evaluates anywhere in R^2 by
// reducing modulo the unit cell.
struct PeriodicField {
  int n = 0;
  std::vector<double> values;

  PeriodicField() = default;
  explicit PeriodicField(int n_) : n(n_), values(static_cast<size_t>(n_) * n_, 0.0) {}

  double at(int i, int j) const {
    const int ii = ((i % n) + n) % n;
    const int jj = ((j % n) + n) % n;
    return values[static_cast<size_t>(jj) * n + ii];
  }
  double eval(Vec2 y) const;
  Vec2 eval_grad(Vec2 y) const;
  double sup_norm() const;
  double mean() const;
};

struct SolveOptions {
  double tol = 1e-12;
  int max_iter = 200000;
  std::vector<double> initial_guess;
  int threads = 1;  // parallelism across independent corrector solves
};

// Correctors of the periodic cell problems, zero-mean normalized, together
// with their gradients at the 2x2 Gauss points of every cell (quadrature
// order: cell-major, Gauss-point-minor).
struct CellSolution {
  PeriodicGrid grid{4};
  PeriodicField chi1, chi2, chi0;
  std::vector<Vec2> grad_chi1, grad_chi2, grad_chi0;
  double sup_chi1 = 0.0, sup_chi2 = 0.0, sup_chi0 = 0.0;
  linalg::LinearSolveReport report_chi1, report_chi2, report_chi0;

  double sup_chi() const;
  const PeriodicField& chi(int j) const;        // j = 1, 2
  const std::vector<Vec2>& grad_chi(int j) const;
};

struct HomogenizedCoefficients {
  Mat2 A_hat;
  Vec2 B_hat{0.0, 0.0};
  Vec2 V_hat{0.0, 0.0};
  double a0_hat = 0.0;
  double mu = 0.0;
};

// Bilinear-Q1 periodic stiffness for -div(A grad .); symmetric positive
// semidefinite with the constants as nullspace.
linalg::SparseMatrix assemble_cell_stiffness(const fields::CoefficientField& A,
                                             const PeriodicGrid& grid);
// Consistent Q1 mass matrix on the periodic grid.
linalg::SparseMatrix assemble_cell_mass(const PeriodicGrid& grid);
// Load vector of the weak form of -div(A grad u) = div H:
// rhs_a = -int_Y H . grad(phi_a).
std::vector<double> assemble_cell_load(const std::function<Vec2(Vec2)>& H,
                                       const PeriodicGrid& grid);

// Discrete solution of -div(A grad u) = div H on Y with periodic boundary
// conditions and zero mean.
PeriodicField solve_cell_general(const fields::CoefficientField& A,
                                 const std::function<Vec2(Vec2)>& H,
                                 const PeriodicGrid& grid,
                                 const SolveOptions& opts = {},
                                 linalg::LinearSolveReport* report = nullptr);
PeriodicField solve_cell_general(const fields::CoefficientField& A,
                                 const fields::CoefficientField& H,
                                 const PeriodicGrid& grid,
                                 const SolveOptions& opts = {},
                                 linalg::LinearSolveReport* report = nullptr);

// T-regularized problem -div(A grad u) + T^-2 u = div H; SPD, no nullspace.
PeriodicField solve_cell_regularized(const fields::CoefficientField& A,
                                     const std::function<Vec2(Vec2)>& H,
                                     const PeriodicGrid& grid, double T,
                                     const SolveOptions& opts = {},
                                     linalg::LinearSolveReport* report = nullptr);

// chi_j from H = A e_j, chi_0 from H = V; V may be the zero field.
CellSolution solve_correctors(const fields::CoefficientField& A,
                              const fields::CoefficientField& V,
                              const PeriodicGrid& grid,
                              const SolveOptions& opts = {});

// Cell averages A_hat = <A(I + grad chi)>, B_hat = <B(I + grad chi)>,
// V_hat = <A grad chi0 + V>, a0_hat = <B . grad chi0 + a0>; mu passes through.
HomogenizedCoefficients homogenized_coefficients(
    const fields::CoefficientField& A, const fields::CoefficientField& V,
    const fields::CoefficientField& B, const fields::CoefficientField& a0,
    double mu, const CellSolution& sol);

// Quadrature average of a matrix-valued callable over the cell (Voigt/Reuss
// style bounds and diagnostics).
Mat2 average_matrix(const std::function<Mat2(Vec2)>& f, const PeriodicGrid& grid);

// <A(xi + grad chi_xi) . (xi + grad chi_xi)> with chi_xi = xi1 chi1 + xi2 chi2;
// equals A_hat xi . xi for exact Galerkin solutions.
double corrector_energy(const fields::CoefficientField& A, const CellSolution& sol,
                        Vec2 xi);

// L2(Y) norm of the gradient difference of two periodic fields on one grid.
double grad_l2_distance(const PeriodicField& a, const PeriodicField& b);
double grad_l2_norm(const PeriodicField& a);

// Discrete mean of each gradient component (quadrature): diagnostics for the
// membership constraint M(grad u) = 0.
Vec2 gradient_mean(const PeriodicField& u);

}  // namespace homog::cell
