#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "homog/rates.hpp"
#include "homog/solver.hpp"
#include "oracles.hpp"

using namespace homog;
using fields::CoefficientField;
using fields::ScalarExpr;
using fields::Structure;
using solver::ProblemSpec;

namespace {

constexpr double kPi = std::numbers::pi;

CoefficientField laminate_field() {
  ScalarExpr a = ScalarExpr::constant(2.0);
  a.add_trig(1.0, 1.0, 0.0);
  return CoefficientField::isotropic(a, Structure::periodic, 1.0, 3.0);
}

ScalarExpr manufactured_source() {
  // 2 pi^2 sin(pi x1) sin(pi x2) as a trig polynomial:
  // sin a sin b = (cos(a-b) - cos(a+b)) / 2
  ScalarExpr f;
  f.add_trig(kPi * kPi, 0.5, -0.5);
  f.add_trig(-kPi * kPi, 0.5, 0.5);
  return f;
}

double manufactured_exact(Vec2 x) {
  return std::sin(kPi * x.x) * std::sin(kPi * x.y);
}

ProblemSpec criterion_spec() {
  ProblemSpec spec;
  spec.A = laminate_field();
  ScalarExpr v1;
  v1.add_trig(0.5, 0.0, 1.0, /*is_sin=*/true);
  spec.V = CoefficientField::vector(v1, ScalarExpr::zero(), Structure::periodic, 0.75);
  ScalarExpr b2;
  b2.add_trig(0.5, 1.0, 0.0);
  spec.B = CoefficientField::vector(ScalarExpr::zero(), b2, Structure::periodic, 0.75);
  ScalarExpr a0 = ScalarExpr::constant(0.5);
  a0.add_trig(0.25, 1.0, 0.0, /*is_sin=*/true);
  spec.a0 = CoefficientField::scalar(a0, Structure::periodic, 0.75);
  spec.f = ScalarExpr::constant(1.0);
  return spec;
}

}  // namespace

TEST_CASE("garding shift formula") {
  CHECK(solver::compute_mu0(1.0, 3.0, 0.0) == 0.0);
  CHECK(solver::compute_mu0(1.0, 3.0, 1.0) == doctest::Approx(3.0));
  // doubling alpha0 more than doubles mu0
  const double m1 = solver::compute_mu0(1.0, 3.0, 0.75);
  const double m2 = solver::compute_mu0(1.0, 3.0, 1.5);
  CHECK(m2 > 2.0 * m1);
  CHECK_THROWS_AS(solver::compute_mu0(0.0, 1.0, 1.0), HypothesisError);
  CHECK_THROWS_AS(solver::compute_mu0(-1.0, 1.0, 1.0), HypothesisError);
}

TEST_CASE("shifted bilinear form is nonnegative at mu = mu0") {
  ProblemSpec spec = criterion_spec();
  spec.mu = spec.effective_mu();
  CHECK(spec.mu == doctest::Approx(1.875));
  const auto sys = solver::assemble_dirichlet(spec, 0.25, 64);
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> x(sys.rhs.size());
    for (double& v : x) v = val(rng);
    const auto kx = sys.matrix.multiply(x);
    CHECK(linalg::dot(x, kx) >= -1e-10);
  }
}

TEST_CASE("pure Laplacian assembly matches the Dirichlet Q1 stencil") {
  ProblemSpec spec;
  spec.f = ScalarExpr::constant(1.0);
  const int m = 16;
  const auto sys = solver::assemble_dirichlet(spec, 1.0, m);
  CHECK(sys.drift_free);
  // rows of nodes away from the boundary carry the periodic stencil values
  auto un = [m](int i, int j) { return (j - 1) * (m - 1) + (i - 1); };
  for (int j = 2; j < m - 1; ++j)
    for (int i = 2; i < m - 1; ++i)
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di)
          CHECK(sys.matrix.entry(un(i, j), un(i + di, j + dj)) ==
                doctest::Approx(oracles::q1_laplace_stencil(di, dj)).epsilon(1e-13));
  // load of f = 1: h^2 per interior node
  for (double v : sys.rhs)
    CHECK(v == doctest::Approx(1.0 / (m * m)).epsilon(1e-12));
}

TEST_CASE("drift makes the matrix asymmetric") {
  ProblemSpec spec = criterion_spec();
  const auto sys = solver::assemble_dirichlet(spec, 0.25, 64);
  CHECK_FALSE(sys.drift_free);
  CHECK_FALSE(sys.matrix.is_symmetric());
}

TEST_CASE("constant coefficients sample identically for any eps") {
  ProblemSpec spec;
  spec.A = CoefficientField::isotropic(ScalarExpr::constant(2.0),
                                       Structure::constant, 2.0, 2.0);
  spec.f = ScalarExpr::constant(1.0);
  const auto s1 = solver::assemble_dirichlet(spec, 1.0, 64);
  const auto s2 = solver::assemble_dirichlet(spec, 0.25, 64);
  REQUIRE(s1.matrix.values().size() == s2.matrix.values().size());
  for (size_t i = 0; i < s1.matrix.values().size(); ++i)
    CHECK(s1.matrix.values()[i] == s2.matrix.values()[i]);
}

TEST_CASE("under-resolved oscillations are rejected with the required m") {
  ProblemSpec spec;
  spec.A = laminate_field();
  spec.f = ScalarExpr::constant(1.0);
  CHECK_THROWS_WITH_AS(solver::assemble_dirichlet(spec, 1.0 / 32.0, 256),
                       doctest::Contains("512"), ConfigError);
}

TEST_CASE("zero source gives the zero solution") {
  ProblemSpec spec;
  spec.A = laminate_field();
  spec.f = ScalarExpr::zero();
  const auto u = solver::solve_oscillating(spec, 0.25, 64);
  for (double v : u.values) CHECK(v == 0.0);
}

TEST_CASE("manufactured solution converges at second order in L2") {
  ProblemSpec spec;
  spec.f = manufactured_source();
  double err32, err64;
  {
    const auto u = solver::solve_oscillating(spec, 1.0, 32);
    err32 = rates::error_L2(u, manufactured_exact);
  }
  {
    const auto u = solver::solve_oscillating(spec, 1.0, 64);
    err64 = rates::error_L2(u, manufactured_exact);
  }
  CHECK(err64 <= 1e-3);
  CHECK(err32 / err64 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("self-convergence of the oscillating solution toward u0") {
  // laminate with f = 1: successive eps halvings shrink the L2 distance
  ProblemSpec spec;
  spec.A = laminate_field();
  spec.f = ScalarExpr::constant(1.0);
  const int m = 256;
  const auto u8 = solver::solve_oscillating(spec, 1.0 / 8.0, m);
  const auto u16 = solver::solve_oscillating(spec, 1.0 / 16.0, m);

  cell::SolveOptions copts;
  const auto sol = cell::solve_correctors(spec.A, spec.V, cell::PeriodicGrid(64),
                                          copts);
  const auto coeffs = cell::homogenized_coefficients(
      spec.A, spec.V, spec.B, spec.a0, spec.effective_mu(), sol);
  const auto u0 = solver::solve_homogenized(coeffs, spec.f, m);

  const double d8 = rates::error_L2(u8, u0);
  const double d16 = rates::error_L2(u16, u0);
  CHECK(d16 < d8);
  CHECK(rates::error_L2(u8, u16) <= d8 + d16);
}

TEST_CASE("adjoint structure: B = V symmetrizes the operator") {
  ProblemSpec spec;
  spec.A = laminate_field();
  ScalarExpr w1;
  w1.add_trig(0.3, 0.0, 1.0, /*is_sin=*/true);
  ScalarExpr w2 = ScalarExpr::constant(0.1);
  spec.V = CoefficientField::vector(w1, w2, Structure::periodic, 0.4);
  spec.B = spec.V;
  spec.f = ScalarExpr::constant(1.0);
  const auto sys = solver::assemble_dirichlet(spec, 0.25, 64);
  const auto adj = solver::assemble_dirichlet_adjoint(spec, 0.25, 64);
  REQUIRE(sys.matrix.values().size() == adj.matrix.values().size());
  for (size_t i = 0; i < sys.matrix.values().size(); ++i)
    CHECK(sys.matrix.values()[i] == adj.matrix.values()[i]);
  CHECK(sys.matrix.is_symmetric(1e-10));
}

TEST_CASE("homogenized solve reproduces the manufactured solution") {
  cell::HomogenizedCoefficients coeffs;
  coeffs.A_hat = Mat2::identity();
  const auto u = solver::solve_homogenized(coeffs, manufactured_source(), 64);
  CHECK(rates::error_L2(u, manufactured_exact) <= 1e-3);
}

TEST_CASE("zero source in the homogenized problem gives zero") {
  cell::HomogenizedCoefficients coeffs;
  coeffs.A_hat = Mat2::diag(2.0, 1.0);
  coeffs.mu = 1.0;
  const auto u = solver::solve_homogenized(coeffs, ScalarExpr::zero(), 32);
  for (double v : u.values) CHECK(v == 0.0);
}

TEST_CASE("solution norm decreases monotonically in mu for f >= 0") {
  double prev = -1.0;
  for (double mu : {1.0, 10.0, 100.0}) {
    cell::HomogenizedCoefficients coeffs;
    coeffs.A_hat = Mat2::identity();
    coeffs.mu = mu;
    const auto u =
        solver::solve_homogenized(coeffs, ScalarExpr::constant(1.0), 64);
    const double norm = grid::norm_l2(u);
    if (prev >= 0.0) CHECK(norm < prev);
    prev = norm;
  }
}

TEST_CASE("indefinite homogenized matrix is rejected") {
  cell::HomogenizedCoefficients coeffs;
  coeffs.A_hat = Mat2::diag(-1.0, 1.0);
  CHECK_THROWS_AS(solver::solve_homogenized(coeffs, ScalarExpr::constant(1.0), 32),
                  SolverError);
}

TEST_CASE("solutions satisfy Galerkin orthogonality and boundary conditions") {
  ProblemSpec spec = criterion_spec();
  const int m = 64;
  const auto sys = solver::assemble_dirichlet(spec, 0.25, m);
  const auto u = solver::solve_oscillating(spec, 0.25, m);
  // interior residual K x - b at solver tolerance
  std::vector<double> x((m - 1) * (m - 1));
  for (int j = 1; j < m; ++j)
    for (int i = 1; i < m; ++i) x[(j - 1) * (m - 1) + (i - 1)] = u.at(i, j);
  auto r = sys.matrix.multiply(x);
  double rn = 0.0;
  for (size_t k = 0; k < r.size(); ++k) rn += (r[k] - sys.rhs[k]) * (r[k] - sys.rhs[k]);
  CHECK(std::sqrt(rn) <= 1e-9 * linalg::norm2(sys.rhs));
  // Dirichlet nodes vanish
  for (int i = 0; i <= m; ++i) {
    CHECK(u.at(i, 0) == 0.0);
    CHECK(u.at(i, m) == 0.0);
    CHECK(u.at(0, i) == 0.0);
    CHECK(u.at(m, i) == 0.0);
  }
}

TEST_CASE("solve info records norms and the stability ratio") {
  ProblemSpec spec;
  spec.A = laminate_field();
  spec.f = ScalarExpr::constant(1.0);
  solver::SolveInfo info;
  const auto u = solver::solve_oscillating(spec, 0.25, 64, &info);
  CHECK(info.h1_norm > 0.0);
  CHECK(info.f_l2_norm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(info.stability == doctest::Approx(info.h1_norm).epsilon(1e-12));
  CHECK(info.h2_surrogate > 0.0);
  CHECK(grid::norm_h1(u) == doctest::Approx(info.h1_norm));
}

TEST_CASE("declared-bound violations surface as hypothesis errors") {
  ProblemSpec spec;
  ScalarExpr a = ScalarExpr::constant(2.0);
  a.add_trig(1.0, 1.0, 0.0);
  spec.A = CoefficientField::isotropic(a, Structure::periodic, 1.5, 3.0);
  spec.f = ScalarExpr::constant(1.0);
  CHECK_THROWS_AS(solver::solve_oscillating(spec, 0.25, 64), HypothesisError);
}
