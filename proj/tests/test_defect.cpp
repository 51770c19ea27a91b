#include <doctest.h>

#include <cmath>

#include "homog/defect.hpp"

using namespace homog;
using fields::CoefficientField;
using fields::ScalarExpr;
using fields::Structure;

namespace {

// laminate + gaussian defect in A: (2 + cos 2 pi y1 + amp * G_sigma) * I
CoefficientField defect_matrix(double amp, double sigma) {
  ScalarExpr a = ScalarExpr::constant(2.0);
  a.add_trig(1.0, 1.0, 0.0);
  a.add_gaussian(amp, {0.0, 0.0}, sigma);
  return CoefficientField::isotropic(a, Structure::periodic_plus_decaying, 1.0,
                                     3.5);
}

// load A e1 of that medium: (2 + cos 2 pi y1 + amp G, 0)
CoefficientField defect_column1(double amp, double sigma) {
  ScalarExpr v1 = ScalarExpr::constant(2.0);
  v1.add_trig(1.0, 1.0, 0.0);
  v1.add_gaussian(amp, {0.0, 0.0}, sigma);
  return CoefficientField::vector(v1, ScalarExpr::zero(),
                                  Structure::periodic_plus_decaying, 3.5);
}

}  // namespace

TEST_CASE("zero defect amplitude gives chi00 = 0 exactly") {
  ScalarExpr a = ScalarExpr::constant(2.0);
  a.add_trig(1.0, 1.0, 0.0);
  const auto A = CoefficientField::isotropic(a, Structure::periodic, 1.0, 3.0);
  ScalarExpr v1 = ScalarExpr::constant(2.0);
  v1.add_trig(1.0, 1.0, 0.0);
  const auto V =
      CoefficientField::vector(v1, ScalarExpr::zero(), Structure::periodic, 3.0);

  const auto per = defect::solve_periodic_part(A, V, 8);
  const auto dc = defect::solve_defect_part(A, V, per.chi0, 4, 8);
  CHECK(dc.chi00_max_abs() == 0.0);
  CHECK(dc.report.iterations == 0);
  CHECK(dc.total_energy() == 0.0);
  for (const auto& row : defect::decay_report(dc)) {
    CHECK(row.annulus_energy == 0.0);
    CHECK(row.seminorm_estimate == 0.0);
  }
}

TEST_CASE("periodic part ignores the defect terms") {
  const auto A = defect_matrix(0.5, 0.5);
  const auto V = defect_column1(0.5, 0.5);
  const auto from_full = defect::solve_periodic_part(A, V, 8);
  const auto from_periodic =
      defect::solve_periodic_part(A.periodic_part(), V.periodic_part(), 8);
  for (size_t i = 0; i < from_full.chi0.values.size(); ++i)
    CHECK(from_full.chi0.values[i] == from_periodic.chi0.values[i]);
}

TEST_CASE("gaussian defect produces a decaying corrector correction") {
  const auto A = defect_matrix(0.5, 0.5);
  const auto V = defect_column1(0.5, 0.5);
  const int n = 16;
  const auto per = defect::solve_periodic_part(A, V, n);

  defect::DefectOptions opts;
  const auto dc = defect::solve_defect_part(A, V, per.chi0, 8, n, opts);
  CHECK(dc.chi00_max_abs() > 1e-4);

  SUBCASE("interior residual of the decomposition is at solver tolerance") {
    const double r = defect::interior_residual(A, V, dc);
    CHECK(r <= 10.0 * opts.tol);
  }

  SUBCASE("decay profile: outer-half tail is small and the seminorm halves") {
    const auto rows = defect::decay_report(dc);
    REQUIRE(rows.size() == 8);
    double tail = 0.0, total = dc.total_energy();
    for (size_t r = 4; r < rows.size(); ++r) tail += rows[r].annulus_energy;
    CHECK(tail <= 0.10 * total);
    CHECK(rows.back().seminorm_estimate <= 0.5 * rows.front().seminorm_estimate);
    for (size_t r = 5; r < rows.size(); ++r)
      CHECK(rows[r].annulus_energy <= rows[r - 1].annulus_energy * (1.0 + 1e-9));
    CHECK(rows.back().tail_energy == doctest::Approx(0.0));
  }

  SUBCASE("doubling the box leaves the interior nearly unchanged") {
    const auto dc2 = defect::solve_defect_part(A, V, per.chi0, 12, n, opts);
    const double base = defect::central_h1_norm(dc, 2);
    const double change = defect::central_h1_diff(dc, dc2, 2);
    CHECK(base > 0.0);
    CHECK(change / base <= 0.10);
  }
}

TEST_CASE("defect support near the boundary strip is rejected") {
  ScalarExpr a = ScalarExpr::constant(2.0);
  a.add_trig(1.0, 1.0, 0.0);
  a.add_gaussian(0.5, {3.0, 0.0}, 1.0);  // reach 3 + 4 = 7 > L - 2 = 6
  const auto A =
      CoefficientField::isotropic(a, Structure::periodic_plus_decaying, 1.0, 3.5);
  const auto V = CoefficientField::zero_vector();
  const auto per = defect::solve_periodic_part(A, V, 8);
  CHECK_THROWS_AS(defect::solve_defect_part(A, V, per.chi0, 8, 8), ConfigError);
}

TEST_CASE("box and resolution preconditions") {
  const auto A = defect_matrix(0.5, 0.5);
  const auto V = CoefficientField::zero_vector();
  const auto per = defect::solve_periodic_part(A, V, 8);
  CHECK_THROWS_AS(defect::solve_defect_part(A, V, per.chi0, 2, 8), ConfigError);
  CHECK_THROWS_AS(defect::solve_defect_part(A, V, per.chi0, 4, 16), ConfigError);
}
