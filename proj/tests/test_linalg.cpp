#include <doctest.h>

#include <random>
#include <sstream>

#include "homog/linalg.hpp"
#include "oracles.hpp"

using namespace homog;
using linalg::assemble_from_triplets;
using linalg::SparseMatrix;

TEST_CASE("triplet assembly sums duplicates") {
  const SparseMatrix m = assemble_from_triplets(1, 1, {{0, 0, 1.0}, {0, 0, 1.0}});
  CHECK(m.entry(0, 0) == 2.0);
  CHECK(m.nonzeros() == 1);
}

TEST_CASE("triplet assembly of empty list gives the zero matrix") {
  const SparseMatrix m = assemble_from_triplets(2, 2, {});
  CHECK(m.nonzeros() == 0);
  const auto y = m.multiply({1.0, 2.0});
  CHECK(y[0] == 0.0);
  CHECK(y[1] == 0.0);
}

TEST_CASE("symmetry is detectable on assembled matrices") {
  const SparseMatrix m = assemble_from_triplets(2, 2, {{0, 1, 3.0}, {1, 0, 3.0}});
  CHECK(m.is_symmetric());
  const SparseMatrix a = assemble_from_triplets(2, 2, {{0, 1, 3.0}, {1, 0, -3.0}});
  CHECK_FALSE(a.is_symmetric());
}

TEST_CASE("column indices strictly increasing within rows") {
  const SparseMatrix m = assemble_from_triplets(
      2, 3, {{0, 2, 1.0}, {0, 0, 2.0}, {0, 1, 3.0}, {1, 2, 4.0}, {1, 0, 5.0}});
  const auto& off = m.row_offsets();
  const auto& col = m.col_indices();
  for (int i = 0; i < m.rows(); ++i)
    for (auto k = off[i] + 1; k < off[i + 1]; ++k) CHECK(col[k - 1] < col[k]);
}

TEST_CASE("index out of range is an assembly error") {
  CHECK_THROWS_AS(assemble_from_triplets(2, 2, {{0, 2, 1.0}}), ConfigError);
  CHECK_THROWS_AS(assemble_from_triplets(2, 2, {{-1, 0, 1.0}}), ConfigError);
}

TEST_CASE("cg solves the identity and diagonal systems") {
  const SparseMatrix id = assemble_from_triplets(2, 2, {{0, 0, 1.0}, {1, 1, 1.0}});
  auto [x, rep] = linalg::solve_spd(id, {3.0, -4.0});
  CHECK(x[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(-4.0).epsilon(1e-14));

  const SparseMatrix d = assemble_from_triplets(2, 2, {{0, 0, 1.0}, {1, 1, 2.0}});
  auto [y, rep2] = linalg::solve_spd(d, {1.0, 2.0});
  CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(y[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cg matches the dense oracle on the 1-D Dirichlet Laplacian") {
  // tridiagonal [-1, 2, -1], n = 4
  std::vector<linalg::Triplet> trips;
  const int n = 4;
  for (int i = 0; i < n; ++i) {
    trips.push_back({i, i, 2.0});
    if (i > 0) trips.push_back({i, i - 1, -1.0});
    if (i < n - 1) trips.push_back({i, i + 1, -1.0});
  }
  const SparseMatrix m = assemble_from_triplets(n, n, trips);
  auto [x, rep] = linalg::solve_spd(m, {1.0, 1.0, 1.0, 1.0});

  std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    dense[i][i] = 2.0;
    if (i > 0) dense[i][i - 1] = -1.0;
    if (i < n - 1) dense[i][i + 1] = -1.0;
  }
  const auto ref = oracles::dense_solve(dense, {1.0, 1.0, 1.0, 1.0});
  for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(ref[i]).epsilon(1e-10));
}

TEST_CASE("lu handles permutation and triangular systems") {
  const SparseMatrix p = assemble_from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}});
  auto [x, rep] = linalg::solve_general(p, {1.0, 2.0});
  CHECK(x[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.method == linalg::LinearSolveReport::Method::lu);

  const SparseMatrix u = assemble_from_triplets(
      3, 3,
      {{0, 0, 2.0}, {0, 1, 1.0}, {0, 2, -1.0}, {1, 1, 3.0}, {1, 2, 0.5}, {2, 2, 4.0}});
  auto [y, rep2] = linalg::solve_general(u, {1.0, 2.0, 3.0});
  const auto ref = oracles::dense_solve(
      {{2.0, 1.0, -1.0}, {0.0, 3.0, 0.5}, {0.0, 0.0, 4.0}}, {1.0, 2.0, 3.0});
  for (int i = 0; i < 3; ++i) CHECK(y[i] == doctest::Approx(ref[i]).epsilon(1e-12));
}

TEST_CASE("lu reports singular systems") {
  const SparseMatrix s = assemble_from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 2.0}});
  CHECK_THROWS_AS(linalg::solve_general(s, {1.0, 2.0}), SolverError);
}

namespace {

SparseMatrix random_spd(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::vector<linalg::Triplet> trips;
  std::vector<double> diag(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < std::min(n, i + 4); ++j) {
      const double v = val(rng);
      trips.push_back({i, j, v});
      trips.push_back({j, i, v});
      diag[i] += std::abs(v);
      diag[j] += std::abs(v);
    }
  for (int i = 0; i < n; ++i) trips.push_back({i, i, diag[i] + 1.0});
  return assemble_from_triplets(n, n, trips);
}

}  // namespace

TEST_CASE("cg and lu agree on symmetric systems") {
  std::mt19937 rng(20240811);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    const int n = 60 + 40 * trial;
    const SparseMatrix m = random_spd(n, rng);
    std::vector<double> rhs(n);
    for (double& v : rhs) v = val(rng);
    auto [x_cg, rep_cg] = linalg::solve_spd(m, rhs);
    auto [x_lu, rep_lu] = linalg::solve_general(m, rhs);
    double diff = 0.0;
    for (int i = 0; i < n; ++i) diff = std::max(diff, std::abs(x_cg[i] - x_lu[i]));
    CHECK(diff <= 1e-8);

    // round-trip residual within tolerance for both solves
    for (const auto& x : {x_cg, x_lu}) {
      auto r = m.multiply(x);
      double rn = 0.0;
      for (int i = 0; i < n; ++i) rn += (r[i] - rhs[i]) * (r[i] - rhs[i]);
      CHECK(std::sqrt(rn) <= 1e-8 * linalg::norm2(rhs));
    }
  }
}

TEST_CASE("cg reports non-convergence with the last residual") {
  std::mt19937 rng(13);
  const SparseMatrix m = random_spd(120, rng);
  std::vector<double> rhs(120, 1.0);
  linalg::CgOptions opts;
  opts.max_iter = 1;
  opts.tol = 1e-14;
  try {
    linalg::solve_spd(m, rhs, opts);
    FAIL("expected a SolverError");
  } catch (const SolverError& e) {
    CHECK(std::string(e.what()).find("residual") != std::string::npos);
  }
}

TEST_CASE("repeated cg solves are bit-identical") {
  std::mt19937 rng(7);
  const SparseMatrix m = random_spd(80, rng);
  std::vector<double> rhs(80);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (double& v : rhs) v = val(rng);
  auto [x1, r1] = linalg::solve_spd(m, rhs);
  auto [x2, r2] = linalg::solve_spd(m, rhs);
  CHECK(r1.iterations == r2.iterations);
  for (size_t i = 0; i < x1.size(); ++i) CHECK(x1[i] == x2[i]);
}

TEST_CASE("zero-mean projection") {
  SUBCASE("constant collapses to zero") {
    const auto out = linalg::project_zero_mean({3.0, 3.0, 3.0}, {0.2, 0.3, 0.5});
    for (double v : out) CHECK(v == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("zero-mean input unchanged") {
    const std::vector<double> v{1.0, -1.0};
    const auto out = linalg::project_zero_mean(v, {0.5, 0.5});
    CHECK(out[0] == doctest::Approx(1.0));
    CHECK(out[1] == doctest::Approx(-1.0));
  }
  SUBCASE("uniform weights subtract the arithmetic mean") {
    const auto out = linalg::project_zero_mean({1.0, 3.0}, {0.5, 0.5});
    CHECK(out[0] == doctest::Approx(-1.0));
    CHECK(out[1] == doctest::Approx(1.0));
  }
}

TEST_CASE("matrix market dump is 1-based coordinate text") {
  const SparseMatrix m = assemble_from_triplets(2, 2, {{0, 1, 2.5}, {1, 0, -1.0}});
  std::ostringstream os;
  m.write_matrix_market(os);
  const std::string text = os.str();
  CHECK(text.find("%%MatrixMarket matrix coordinate real general") == 0);
  CHECK(text.find("2 2 2") != std::string::npos);
  CHECK(text.find("1 2 2.5") != std::string::npos);
  CHECK(text.find("2 1 -1") != std::string::npos);
}
