#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "homog/cell.hpp"
#include "homog/grid.hpp"
#include "homog/solver.hpp"

namespace homog::rates {

// L2 / H1 norms of u - v by composite 2x2 Gauss quadrature on u's grid; v is
// interpolated bilinearly when coarser (interpolation always coarse -> fine).
double error_L2(const grid::DiscreteField& u, const grid::DiscreteField& v);
double error_H1(const grid::DiscreteField& u, const grid::DiscreteField& v);
// Comparison against a closed-form reference evaluated at the quadrature
// points (no interpolant bias; used by manufactured-solution checks).
double error_L2(const grid::DiscreteField& u,
                const std::function<double(Vec2)>& ref);
// Same quadrature restricted to cells inside [lo, hi]^2.
double error_H1_window(const grid::DiscreteField& u, const grid::DiscreteField& v,
                       double lo, double hi);

struct SlopeFit {
  double slope = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
};

// Ordinary least squares on (log eps, log err). Errors must be positive.
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points);

struct RateRow {
  double eps = 0.0;
  int m_fine = 0;
  bool ok = false;
  double errL2_zero_order = 0.0;
  double errH1_first_order = 0.0;
  double errH1_plain = 0.0;
  double errH1_interior = 0.0;  // central quarter window
  double normH1_ueps = 0.0;
  double stability = 0.0;   // ||u_eps||_H1 / ||f||_L2
  double fem_budget = 0.0;  // Richardson estimate / errL2
  bool budget_ok = false;
  std::string note;
};

struct RatePolicy {
  int cell_n = 256;
  int m_min = 1024;
  int cells_per_eps = 32;  // fine-grid resolution floor m >= this / eps
  double cell_tol = 1e-12;
  double budget_limit = 0.25;
  double error_floor = 1e-12;  // below this the row is discretization noise
  int threads = 1;
};

struct RateReport {
  std::vector<RateRow> rows;  // sorted by decreasing eps
  bool has_slopes = false;
  SlopeFit slopeL2, slopeH1, slopeH1_plain, slopeH1_interior;
  double mu_effective = 0.0;
  cell::HomogenizedCoefficients coeffs;
  double sup_chi = 0.0;
  std::string config_digest;
  std::string fit_note;
};

int fine_grid_for(double eps, const RatePolicy& policy);

// Ladder: cell problems once, u0 per fine grid, u_eps + v_eps per row, slope
// fits excluding the largest eps (kept when only three rows are available).
RateReport rate_sweep(const solver::ProblemSpec& spec,
                      const std::vector<double>& eps_list,
                      const RatePolicy& policy = {},
                      const std::string& config_digest = "");

void write_csv(const RateReport& report, std::ostream& os);
void write_svg(const RateReport& report, std::ostream& os);

}  // namespace homog::rates
