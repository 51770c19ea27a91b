#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "homog/cell.hpp"
#include "oracles.hpp"

using namespace homog;
using cell::CellSolution;
using cell::PeriodicGrid;
using fields::CoefficientField;
using fields::ScalarExpr;
using fields::Structure;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

CoefficientField laminate_field() {
  ScalarExpr a = ScalarExpr::constant(2.0);
  a.add_trig(1.0, 1.0, 0.0);
  return CoefficientField::isotropic(a, Structure::periodic, 1.0, 3.0);
}

CoefficientField checker_field() {
  // a(y) = 2 + cos(2 pi y1) cos(2 pi y2), written as a trig polynomial
  ScalarExpr a = ScalarExpr::constant(2.0);
  a.add_trig(0.5, 1.0, 1.0);
  a.add_trig(0.5, 1.0, -1.0);
  return CoefficientField::isotropic(a, Structure::periodic, 1.0, 3.0);
}

CoefficientField laminate_column1() {
  // A e1 for the laminate: (2 + cos 2 pi y1, 0)
  ScalarExpr v1 = ScalarExpr::constant(2.0);
  v1.add_trig(1.0, 1.0, 0.0);
  return CoefficientField::vector(v1, ScalarExpr::zero(), Structure::periodic, 3.0);
}

}  // namespace

TEST_CASE("periodic grid preconditions") {
  CHECK_THROWS_AS(PeriodicGrid(3), ConfigError);
  CHECK_THROWS_AS(PeriodicGrid(5), ConfigError);
  CHECK_NOTHROW(PeriodicGrid(4));
}

TEST_CASE("identity stiffness equals the periodic Q1 Laplacian stencil") {
  const PeriodicGrid grid(4);
  const auto k = cell::assemble_cell_stiffness(CoefficientField::identity(), grid);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) {
      const int row = grid.node(i, j);
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
          const int col = grid.node(i + di, j + dj);
          CHECK(k.entry(row, col) ==
                doctest::Approx(oracles::q1_laplace_stencil(di, dj)).epsilon(1e-13));
        }
    }
}

TEST_CASE("cell stiffness has constants in its nullspace and is symmetric") {
  const PeriodicGrid grid(8);
  const auto k = cell::assemble_cell_stiffness(laminate_field(), grid);
  const std::vector<double> ones(grid.node_count(), 1.0);
  const auto y = k.multiply(ones);
  for (double v : y) CHECK(std::abs(v) <= 1e-12);
  CHECK(k.is_symmetric());
}

TEST_CASE("single trig mode matches the spectral oracle") {
  // -div(grad u) = div H with H = (-2 pi cos 2 pi y1, 0): u = sin 2 pi y1
  const PeriodicGrid grid(64);
  const auto u = cell::solve_cell_general(
      CoefficientField::identity(),
      [](Vec2 y) { return Vec2{-kTwoPi * std::cos(kTwoPi * y.x), 0.0}; }, grid);
  double err2 = 0.0;
  for (int j = 0; j < grid.n; ++j)
    for (int i = 0; i < grid.n; ++i) {
      const double exact = std::sin(kTwoPi * i * grid.h());
      const double d = u.at(i, j) - exact;
      err2 += d * d * grid.h() * grid.h();
    }
  CHECK(std::sqrt(err2) <= 2e-3);
  CHECK(std::abs(u.mean()) <= 1e-13);
}

TEST_CASE("zero load gives the zero corrector") {
  const PeriodicGrid grid(8);
  const auto u = cell::solve_cell_general(
      laminate_field(), [](Vec2) { return Vec2{0.0, 0.0}; }, grid);
  for (double v : u.values) CHECK(v == 0.0);
}

TEST_CASE("laminate corrector gradient matches the 1-D ODE closed form") {
  const PeriodicGrid grid(64);
  const auto A = laminate_field();
  const auto sol = cell::solve_correctors(A, CoefficientField::zero_vector(), grid);
  const double hmean = oracles::harmonic_mean(
      [](double t) { return 2.0 + std::cos(kTwoPi * t); });
  CHECK(hmean == doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));

  // d(chi1)/dy1 = hmean / a(y1) - 1 at the Gauss points; y2-derivative vanishes
  const auto& gr = grid::gauss2x2();
  double max_err = 0.0, max_dy = 0.0;
  for (int cj = 0; cj < grid.n; ++cj)
    for (int ci = 0; ci < grid.n; ++ci)
      for (int q = 0; q < 4; ++q) {
        const size_t idx = (static_cast<size_t>(cj) * grid.n + ci) * 4 + q;
        const double y1 = (ci + gr.pts[q].x) * grid.h();
        const double expected = hmean / (2.0 + std::cos(kTwoPi * y1)) - 1.0;
        max_err = std::max(max_err, std::abs(sol.grad_chi1[idx].x - expected));
        max_dy = std::max(max_dy, std::abs(sol.grad_chi1[idx].y));
      }
  CHECK(max_err <= 5e-2);
  CHECK(max_dy <= 1e-10);

  SUBCASE("chi2 vanishes for a y1-laminate") {
    CHECK(sol.sup_chi2 <= 1e-12);
  }
  SUBCASE("correctors are zero-mean with zero-mean gradients") {
    CHECK(std::abs(sol.chi1.mean()) <= 1e-13);
    const Vec2 gm = cell::gradient_mean(sol.chi1);
    CHECK(std::abs(gm.x) <= 1e-10);
    CHECK(std::abs(gm.y) <= 1e-10);
  }
  SUBCASE("sup norm is recorded and finite") {
    CHECK(sol.sup_chi1 > 0.0);
    CHECK(sol.sup_chi1 < 1.0);
    CHECK(sol.sup_chi() >= sol.sup_chi1);
  }
}

TEST_CASE("constant coefficients need no corrector") {
  // loads of a constant field cancel only up to quadrature roundoff, so the
  // correctors sit at the noise floor rather than exactly zero
  const PeriodicGrid grid(8);
  const auto sol = cell::solve_correctors(CoefficientField::identity(),
                                          CoefficientField::zero_vector(), grid);
  CHECK(sol.sup_chi1 <= 1e-12);
  CHECK(sol.sup_chi2 <= 1e-12);
  for (double v : sol.chi0.values) CHECK(v == 0.0);  // H identically zero
}

TEST_CASE("V = A e1 reproduces chi1 as chi0") {
  const PeriodicGrid grid(32);
  const auto sol =
      cell::solve_correctors(laminate_field(), laminate_column1(), grid);
  double max_diff = 0.0;
  for (size_t i = 0; i < sol.chi0.values.size(); ++i)
    max_diff = std::max(max_diff,
                        std::abs(sol.chi0.values[i] - sol.chi1.values[i]));
  CHECK(max_diff <= 1e-12);
}

TEST_CASE("homogenized coefficients of trivial data") {
  const PeriodicGrid grid(8);
  const auto A = CoefficientField::identity();
  const auto V = CoefficientField::zero_vector();
  const auto B = CoefficientField::zero_vector();
  const auto a0 = CoefficientField::scalar(ScalarExpr::constant(0.7),
                                           Structure::constant, 0.7);
  const auto sol = cell::solve_correctors(A, V, grid);
  const auto c = cell::homogenized_coefficients(A, V, B, a0, 0.3, sol);
  CHECK(c.A_hat.a11 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.A_hat.a22 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(c.A_hat.a12) <= 1e-14);
  CHECK(std::abs(c.V_hat.x) <= 1e-14);
  CHECK(std::abs(c.B_hat.x) <= 1e-14);
  CHECK(c.a0_hat == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(c.mu == 0.3);
}

TEST_CASE("laminate effective tensor approaches diag(sqrt(3), 2)") {
  const PeriodicGrid grid(64);
  const auto A = laminate_field();
  const auto sol = cell::solve_correctors(A, CoefficientField::zero_vector(), grid);
  const auto c = cell::homogenized_coefficients(
      A, CoefficientField::zero_vector(), CoefficientField::zero_vector(),
      CoefficientField::zero_scalar(), 0.0, sol);
  CHECK(c.A_hat.a11 == doctest::Approx(std::sqrt(3.0)).epsilon(2e-2));
  CHECK(c.A_hat.a22 == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(std::abs(c.A_hat.a12) <= 1e-10);
  CHECK(std::abs(c.A_hat.a21) <= 1e-10);
}

TEST_CASE("constant drift vector is homogenization-invariant") {
  const PeriodicGrid grid(32);
  const auto A = laminate_field();
  ScalarExpr b1 = ScalarExpr::constant(0.4);
  ScalarExpr b2 = ScalarExpr::constant(-0.9);
  const auto B = CoefficientField::vector(b1, b2, Structure::constant, 1.0);
  const auto sol = cell::solve_correctors(A, CoefficientField::zero_vector(), grid);
  const auto c = cell::homogenized_coefficients(
      A, CoefficientField::zero_vector(), B, CoefficientField::zero_scalar(), 0.0,
      sol);
  CHECK(c.B_hat.x == doctest::Approx(0.4).epsilon(1e-8));
  CHECK(c.B_hat.y == doctest::Approx(-0.9).epsilon(1e-8));
}

TEST_CASE("a0_hat reduces to the plain mean when B = 0") {
  const PeriodicGrid grid(32);
  const auto A = laminate_field();
  ScalarExpr z = ScalarExpr::constant(0.5);
  z.add_trig(0.25, 1.0, 0.0, /*is_sin=*/true);
  const auto a0 = CoefficientField::scalar(z, Structure::periodic, 0.75);
  const auto sol = cell::solve_correctors(A, CoefficientField::zero_vector(), grid);
  const auto c = cell::homogenized_coefficients(
      A, CoefficientField::zero_vector(), CoefficientField::zero_vector(), a0,
      0.0, sol);
  const auto mv = fields::mean_value(a0, 64.0, 4);
  CHECK(c.a0_hat == doctest::Approx(mv.value).epsilon(1e-6));
  CHECK(c.a0_hat == doctest::Approx(0.5).epsilon(1e-6));
}

namespace {

void check_voigt_reuss(const CoefficientField& A, const CellSolution& sol) {
  const auto c = cell::homogenized_coefficients(
      A, CoefficientField::zero_vector(), CoefficientField::zero_vector(),
      CoefficientField::zero_scalar(), 0.0, sol);
  const Mat2 voigt = cell::average_matrix(
      [&](Vec2 y) { return A.eval_matrix(y); }, sol.grid);
  const Mat2 reuss_inv = cell::average_matrix(
      [&](Vec2 y) { return A.eval_matrix(y).inverse(); }, sol.grid);
  const Mat2 reuss = reuss_inv.inverse();
  const Vec2 probes[] = {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
  for (const Vec2& xi : probes) {
    const double qa = c.A_hat.quadratic_form(xi);
    CHECK(qa <= voigt.quadratic_form(xi) + 1e-6);
    CHECK(qa >= reuss.quadratic_form(xi) - 1e-6);
  }
}

}  // namespace

TEST_CASE("Voigt-Reuss sandwich on probe directions") {
  SUBCASE("laminate") {
    const PeriodicGrid grid(64);
    const auto A = laminate_field();
    const auto sol =
        cell::solve_correctors(A, CoefficientField::zero_vector(), grid);
    check_voigt_reuss(A, sol);
  }
  SUBCASE("genuinely 2-D checkerboard-like coefficient") {
    const PeriodicGrid grid(64);
    const auto A = checker_field();
    const auto sol =
        cell::solve_correctors(A, CoefficientField::zero_vector(), grid);
    check_voigt_reuss(A, sol);
  }
}

TEST_CASE("corrector energy identity") {
  const PeriodicGrid grid(32);
  const auto A = checker_field();
  const auto sol = cell::solve_correctors(A, CoefficientField::zero_vector(), grid);
  const auto c = cell::homogenized_coefficients(
      A, CoefficientField::zero_vector(), CoefficientField::zero_vector(),
      CoefficientField::zero_scalar(), 0.0, sol);
  const Vec2 probes[] = {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
  for (const Vec2& xi : probes) {
    const double energy = cell::corrector_energy(A, sol, xi);
    CHECK(c.A_hat.quadratic_form(xi) == doctest::Approx(energy).epsilon(1e-8));
  }
}

TEST_CASE("effective tensor converges at order >= 1.8 in h") {
  const auto A = checker_field();
  Mat2 a32, a64, a128;
  for (int n : {32, 64, 128}) {
    const PeriodicGrid grid(n);
    const auto sol =
        cell::solve_correctors(A, CoefficientField::zero_vector(), grid);
    const auto c = cell::homogenized_coefficients(
        A, CoefficientField::zero_vector(), CoefficientField::zero_vector(),
        CoefficientField::zero_scalar(), 0.0, sol);
    if (n == 32) a32 = c.A_hat;
    else if (n == 64) a64 = c.A_hat;
    else a128 = c.A_hat;
  }
  auto frob = [](const Mat2& a, const Mat2& b) {
    const double d11 = a.a11 - b.a11, d12 = a.a12 - b.a12;
    const double d21 = a.a21 - b.a21, d22 = a.a22 - b.a22;
    return std::sqrt(d11 * d11 + d12 * d12 + d21 * d21 + d22 * d22);
  };
  const double d1 = frob(a32, a64);
  const double d2 = frob(a64, a128);
  const double order = std::log2(d1 / d2);
  CHECK(order >= 1.8);
}

TEST_CASE("gradients are unique across initial guesses") {
  const PeriodicGrid grid(16);
  const auto A = laminate_field();
  const auto H = [&](Vec2 y) { return A.eval_matrix(y) * Vec2{1.0, 0.0}; };
  cell::SolveOptions from_zero;
  const auto u1 = cell::solve_cell_general(A, H, grid, from_zero);

  cell::SolveOptions from_random;
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> val(-0.5, 0.5);
  from_random.initial_guess.resize(grid.node_count());
  for (double& v : from_random.initial_guess) v = val(rng);
  const auto u2 = cell::solve_cell_general(A, H, grid, from_random);

  CHECK(cell::grad_l2_distance(u1, u2) <= 1e-8);
}

TEST_CASE("T-regularized solves approach the unregularized corrector") {
  const PeriodicGrid grid(32);
  const auto A = laminate_field();
  const auto H = [&](Vec2 y) { return A.eval_matrix(y) * Vec2{1.0, 0.0}; };
  const auto chi1 = cell::solve_cell_general(A, H, grid);

  SUBCASE("zero load gives zero for any T") {
    const auto z = cell::solve_cell_regularized(
        A, [](Vec2) { return Vec2{0.0, 0.0}; }, grid, 10.0);
    for (double v : z.values) CHECK(v == 0.0);
  }
  SUBCASE("T = 1000 is within 1e-3 of the corrector in energy") {
    const auto ut = cell::solve_cell_regularized(A, H, grid, 1000.0);
    const double rel = cell::grad_l2_distance(ut, chi1) / cell::grad_l2_norm(chi1);
    CHECK(rel <= 1e-3);
  }
  SUBCASE("doubling T does not increase the gradient discrepancy") {
    double prev = -1.0;
    for (double T : {10.0, 20.0, 40.0}) {
      const auto ut = cell::solve_cell_regularized(A, H, grid, T);
      const double d = cell::grad_l2_distance(ut, chi1);
      if (prev >= 0.0) CHECK(d <= prev * (1.0 + 1e-12));
      prev = d;
    }
  }
}

TEST_CASE("grid mismatch between solution and coefficients is caught") {
  const PeriodicGrid g8(8);
  const auto A = laminate_field();
  auto sol = cell::solve_correctors(A, CoefficientField::zero_vector(), g8);
  sol.grad_chi1.pop_back();
  CHECK_THROWS_AS(cell::homogenized_coefficients(
                      A, CoefficientField::zero_vector(),
                      CoefficientField::zero_vector(),
                      CoefficientField::zero_scalar(), 0.0, sol),
                  ConfigError);
}
