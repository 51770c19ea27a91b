#include "homog/cell.hpp"

#include <cmath>
#include <future>

namespace homog::cell {

using fields::CoefficientField;
using grid::gauss2x2;
using grid::kQ1Offsets;
using grid::Q1;
using linalg::SparseMatrix;

PeriodicGrid::PeriodicGrid(int n_) : n(n_) {
  if (n < 4 || n % 2 != 0)
    throw ConfigError("periodic grid requires n >= 4 and even, got n=" +
                      std::to_string(n));
}

namespace {

Vec2 wrap_unit(Vec2 y) {
  double fx = y.x - std::floor(y.x);
  double fy = y.y - std::floor(y.y);
  if (fx >= 1.0) fx = 0.0;
  if (fy >= 1.0) fy = 0.0;
  return {fx, fy};
}

}  // namespace

double PeriodicField::eval(Vec2 y) const {
  const Vec2 w = wrap_unit(y);
  const double cx = w.x * n;
  const double cy = w.y * n;
  const int ci = std::min(static_cast<int>(cx), n - 1);
  const int cj = std::min(static_cast<int>(cy), n - 1);
  const auto N = Q1::shape({cx - ci, cy - cj});
  double s = 0.0;
  for (int a = 0; a < 4; ++a)
    s += N[a] * at(ci + kQ1Offsets[a][0], cj + kQ1Offsets[a][1]);
  return s;
}

Vec2 PeriodicField::eval_grad(Vec2 y) const {
  const Vec2 w = wrap_unit(y);
  const double cx = w.x * n;
  const double cy = w.y * n;
  const int ci = std::min(static_cast<int>(cx), n - 1);
  const int cj = std::min(static_cast<int>(cy), n - 1);
  const auto G = Q1::shape_grad({cx - ci, cy - cj});
  Vec2 g{0.0, 0.0};
  for (int a = 0; a < 4; ++a)
    g += G[a] * at(ci + kQ1Offsets[a][0], cj + kQ1Offsets[a][1]);
  return g * static_cast<double>(n);
}

double PeriodicField::sup_norm() const {
  double s = 0.0;
  for (double v : values) s = std::max(s, std::abs(v));
  return s;
}

double PeriodicField::mean() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double CellSolution::sup_chi() const {
  return std::max({sup_chi1, sup_chi2, sup_chi0});
}

const PeriodicField& CellSolution::chi(int j) const {
  if (j == 1) return chi1;
  if (j == 2) return chi2;
  throw ConfigError("corrector index must be 1 or 2");
}

const std::vector<Vec2>& CellSolution::grad_chi(int j) const {
  if (j == 1) return grad_chi1;
  if (j == 2) return grad_chi2;
  throw ConfigError("corrector index must be 1 or 2");
}

SparseMatrix assemble_cell_stiffness(const CoefficientField& A,
                                     const PeriodicGrid& grid) {
  const auto& gr = gauss2x2();
  const int n = grid.n;
  const double h = grid.h();
  std::vector<linalg::Triplet> trips;
  trips.reserve(static_cast<size_t>(n) * n * 16);
  for (int cj = 0; cj < n; ++cj)
    for (int ci = 0; ci < n; ++ci) {
      int ids[4];
      for (int a = 0; a < 4; ++a)
        ids[a] = grid.node(ci + kQ1Offsets[a][0], cj + kQ1Offsets[a][1]);
      double loc[4][4] = {};
      for (int q = 0; q < 4; ++q) {
        const Vec2 y{(ci + gr.pts[q].x) * h, (cj + gr.pts[q].y) * h};
        const Mat2 a = A.eval_matrix(y);
        const auto G = Q1::shape_grad(gr.pts[q]);
        // physical gradients carry 1/h; the h^2 cell measure cancels it
        for (int bq = 0; bq < 4; ++bq) {
          const Vec2 ag = a * G[bq];
          for (int aq = 0; aq < 4; ++aq)
            loc[aq][bq] += gr.wts[q] * ag.dot(G[aq]);
        }
      }
      for (int aq = 0; aq < 4; ++aq)
        for (int bq = 0; bq < 4; ++bq)
          trips.emplace_back(ids[aq], ids[bq], loc[aq][bq]);
    }
  return linalg::assemble_from_triplets(n * n, n * n, std::move(trips));
}

SparseMatrix assemble_cell_mass(const PeriodicGrid& grid) {
  const auto& gr = gauss2x2();
  const int n = grid.n;
  const double h2 = grid.h() * grid.h();
  std::vector<linalg::Triplet> trips;
  trips.reserve(static_cast<size_t>(n) * n * 16);
  for (int cj = 0; cj < n; ++cj)
    for (int ci = 0; ci < n; ++ci) {
      int ids[4];
      for (int a = 0; a < 4; ++a)
        ids[a] = grid.node(ci + kQ1Offsets[a][0], cj + kQ1Offsets[a][1]);
      double loc[4][4] = {};
      for (int q = 0; q < 4; ++q) {
        const auto N = Q1::shape(gr.pts[q]);
        for (int aq = 0; aq < 4; ++aq)
          for (int bq = 0; bq < 4; ++bq)
            loc[aq][bq] += gr.wts[q] * h2 * N[aq] * N[bq];
      }
      for (int aq = 0; aq < 4; ++aq)
        for (int bq = 0; bq < 4; ++bq)
          trips.emplace_back(ids[aq], ids[bq], loc[aq][bq]);
    }
  return linalg::assemble_from_triplets(n * n, n * n, std::move(trips));
}

std::vector<double> assemble_cell_load(const std::function<Vec2(Vec2)>& H,
                                       const PeriodicGrid& grid) {
  const auto& gr = gauss2x2();
  const int n = grid.n;
  const double h = grid.h();
  std::vector<double> rhs(static_cast<size_t>(n) * n, 0.0);
  for (int cj = 0; cj < n; ++cj)
    for (int ci = 0; ci < n; ++ci) {
      for (int q = 0; q < 4; ++q) {
        const Vec2 y{(ci + gr.pts[q].x) * h, (cj + gr.pts[q].y) * h};
        const Vec2 hv = H(y);
        const auto G = Q1::shape_grad(gr.pts[q]);
        for (int a = 0; a < 4; ++a) {
          const int id = grid.node(ci + kQ1Offsets[a][0], cj + kQ1Offsets[a][1]);
          // -int H . grad(phi): physical gradient 1/h, measure h^2
          rhs[id] -= gr.wts[q] * h * hv.dot(G[a]);
        }
      }
    }
  return rhs;
}

namespace {

PeriodicField to_field(const PeriodicGrid& grid, std::vector<double> x) {
  PeriodicField f(grid.n);
  f.values = std::move(x);
  // pin the additive constant exactly
  const double mean = f.mean();
  for (double& v : f.values) v -= mean;
  return f;
}

std::vector<Vec2> gauss_gradients(const PeriodicField& u) {
  const auto& gr = gauss2x2();
  const int n = u.n;
  std::vector<Vec2> out(static_cast<size_t>(n) * n * 4);
  for (int cj = 0; cj < n; ++cj)
    for (int ci = 0; ci < n; ++ci) {
      double v[4];
      for (int a = 0; a < 4; ++a)
        v[a] = u.at(ci + kQ1Offsets[a][0], cj + kQ1Offsets[a][1]);
      for (int q = 0; q < 4; ++q) {
        const auto G = Q1::shape_grad(gr.pts[q]);
        Vec2 g{0.0, 0.0};
        for (int a = 0; a < 4; ++a) g += G[a] * v[a];
        out[(static_cast<size_t>(cj) * n + ci) * 4 + q] = g * static_cast<double>(n);
      }
    }
  return out;
}

PeriodicField solve_with_matrix(const SparseMatrix& k,
                                const std::function<Vec2(Vec2)>& H,
                                const PeriodicGrid& grid, const SolveOptions& opts,
                                linalg::LinearSolveReport* report) {
  std::vector<double> rhs = assemble_cell_load(H, grid);
  linalg::CgOptions cg;
  cg.tol = opts.tol;
  cg.max_iter = opts.max_iter;
  cg.project_zero_mean = true;
  cg.initial_guess = opts.initial_guess;
  auto [x, rep] = linalg::solve_spd(k, rhs, cg);
  if (report) *report = rep;
  return to_field(grid, std::move(x));
}

}  // namespace

PeriodicField solve_cell_general(const CoefficientField& A,
                                 const std::function<Vec2(Vec2)>& H,
                                 const PeriodicGrid& grid, const SolveOptions& opts,
                                 linalg::LinearSolveReport* report) {
  const SparseMatrix k = assemble_cell_stiffness(A, grid);
  return solve_with_matrix(k, H, grid, opts, report);
}

PeriodicField solve_cell_general(const CoefficientField& A,
                                 const CoefficientField& H,
                                 const PeriodicGrid& grid, const SolveOptions& opts,
                                 linalg::LinearSolveReport* report) {
  return solve_cell_general(
      A, [&](Vec2 y) { return H.eval_vector(y); }, grid, opts, report);
}

PeriodicField solve_cell_regularized(const CoefficientField& A,
                                     const std::function<Vec2(Vec2)>& H,
                                     const PeriodicGrid& grid, double T,
                                     const SolveOptions& opts,
                                     linalg::LinearSolveReport* report) {
  if (T <= 0.0) throw ConfigError("regularization parameter T must be positive");
  SparseMatrix k = assemble_cell_stiffness(A, grid);
  const SparseMatrix m = assemble_cell_mass(grid);
  // same sparsity pattern by construction
  const double t2 = 1.0 / (T * T);
  for (size_t i = 0; i < k.values().size(); ++i) k.values()[i] += t2 * m.values()[i];
  std::vector<double> rhs = assemble_cell_load(H, grid);
  linalg::CgOptions cg;
  cg.tol = opts.tol;
  cg.max_iter = opts.max_iter;
  cg.project_zero_mean = false;
  cg.initial_guess = opts.initial_guess;
  auto [x, rep] = linalg::solve_spd(k, rhs, cg);
  if (report) *report = rep;
  PeriodicField f(grid.n);
  f.values = std::move(x);
  return f;
}

CellSolution solve_correctors(const CoefficientField& A,
                              const CoefficientField& V, const PeriodicGrid& grid,
                              const SolveOptions& opts) {
  if (A.kind() != fields::Kind::matrix2)
    throw ConfigError("solve_correctors: A must be matrix-kind");
  if (V.kind() != fields::Kind::vector2)
    throw ConfigError("solve_correctors: V must be vector-kind");

  const SparseMatrix k = assemble_cell_stiffness(A, grid);
  auto solve_one = [&](const std::function<Vec2(Vec2)>& H,
                       linalg::LinearSolveReport* rep) {
    return solve_with_matrix(k, H, grid, opts, rep);
  };

  CellSolution sol;
  sol.grid = grid;
  const auto h1 = [&](Vec2 y) { return A.eval_matrix(y) * Vec2{1.0, 0.0}; };
  const auto h2 = [&](Vec2 y) { return A.eval_matrix(y) * Vec2{0.0, 1.0}; };
  const auto h0 = [&](Vec2 y) { return V.eval_vector(y); };

  if (opts.threads > 1) {
    auto f1 = std::async(std::launch::async, [&] {
      return solve_one(h1, &sol.report_chi1);
    });
    auto f2 = std::async(std::launch::async, [&] {
      return solve_one(h2, &sol.report_chi2);
    });
    sol.chi0 = solve_one(h0, &sol.report_chi0);
    sol.chi1 = f1.get();
    sol.chi2 = f2.get();
  } else {
    sol.chi1 = solve_one(h1, &sol.report_chi1);
    sol.chi2 = solve_one(h2, &sol.report_chi2);
    sol.chi0 = solve_one(h0, &sol.report_chi0);
  }

  sol.grad_chi1 = gauss_gradients(sol.chi1);
  sol.grad_chi2 = gauss_gradients(sol.chi2);
  sol.grad_chi0 = gauss_gradients(sol.chi0);
  sol.sup_chi1 = sol.chi1.sup_norm();
  sol.sup_chi2 = sol.chi2.sup_norm();
  sol.sup_chi0 = sol.chi0.sup_norm();
  return sol;
}

HomogenizedCoefficients homogenized_coefficients(
    const CoefficientField& A, const CoefficientField& V,
    const CoefficientField& B, const CoefficientField& a0, double mu,
    const CellSolution& sol) {
  const int n = sol.grid.n;
  if (sol.grad_chi1.size() != static_cast<size_t>(n) * n * 4)
    throw ConfigError("homogenized_coefficients: cell solution grid mismatch");
  const auto& gr = gauss2x2();
  const double h = sol.grid.h();
  const double h2 = h * h;

  HomogenizedCoefficients out;
  out.mu = mu;
  Mat2 a_hat{};
  Vec2 b_hat{0.0, 0.0}, v_hat{0.0, 0.0};
  double a0_hat = 0.0;
  const bool has_v = !V.is_identically_zero();
  const bool has_b = !B.is_identically_zero();
  const bool has_a0 = !a0.is_identically_zero();

  for (int cj = 0; cj < n; ++cj)
    for (int ci = 0; ci < n; ++ci) {
      const size_t cell = static_cast<size_t>(cj) * n + ci;
      for (int q = 0; q < 4; ++q) {
        const Vec2 y{(ci + gr.pts[q].x) * h, (cj + gr.pts[q].y) * h};
        const double w = gr.wts[q] * h2;
        const Mat2 a = A.eval_matrix(y);
        const Vec2 g1 = sol.grad_chi1[cell * 4 + q];
        const Vec2 g2 = sol.grad_chi2[cell * 4 + q];
        const Vec2 g0 = sol.grad_chi0[cell * 4 + q];
        const Vec2 c1{1.0 + g1.x, g1.y};  // e1 + grad chi1
        const Vec2 c2{g2.x, 1.0 + g2.y};  // e2 + grad chi2
        const Vec2 ac1 = a * c1;
        const Vec2 ac2 = a * c2;
        a_hat.a11 += w * ac1.x;
        a_hat.a21 += w * ac1.y;
        a_hat.a12 += w * ac2.x;
        a_hat.a22 += w * ac2.y;
        if (has_b) {
          const Vec2 b = B.eval_vector(y);
          b_hat.x += w * b.dot(c1);
          b_hat.y += w * b.dot(c2);
          a0_hat += w * b.dot(g0);
        }
        const Vec2 av0 = a * g0;
        v_hat.x += w * av0.x;
        v_hat.y += w * av0.y;
        if (has_v) {
          const Vec2 v = V.eval_vector(y);
          v_hat.x += w * v.x;
          v_hat.y += w * v.y;
        }
        if (has_a0) a0_hat += w * a0.eval_scalar(y);
      }
    }
  out.A_hat = a_hat;
  out.B_hat = b_hat;
  out.V_hat = v_hat;
  out.a0_hat = a0_hat;
  return out;
}

Mat2 average_matrix(const std::function<Mat2(Vec2)>& f, const PeriodicGrid& grid) {
  const auto& gr = gauss2x2();
  const int n = grid.n;
  const double h = grid.h();
  const double h2 = h * h;
  Mat2 sum{};
  for (int cj = 0; cj < n; ++cj)
    for (int ci = 0; ci < n; ++ci)
      for (int q = 0; q < 4; ++q) {
        const Vec2 y{(ci + gr.pts[q].x) * h, (cj + gr.pts[q].y) * h};
        sum += f(y) * (gr.wts[q] * h2);
      }
  return sum;
}

double corrector_energy(const CoefficientField& A, const CellSolution& sol,
                        Vec2 xi) {
  const auto& gr = gauss2x2();
  const int n = sol.grid.n;
  const double h = sol.grid.h();
  const double h2 = h * h;
  double e = 0.0;
  for (int cj = 0; cj < n; ++cj)
    for (int ci = 0; ci < n; ++ci) {
      const size_t cell = static_cast<size_t>(cj) * n + ci;
      for (int q = 0; q < 4; ++q) {
        const Vec2 y{(ci + gr.pts[q].x) * h, (cj + gr.pts[q].y) * h};
        const Vec2 g = xi.x * sol.grad_chi1[cell * 4 + q] +
                       xi.y * sol.grad_chi2[cell * 4 + q];
        const Vec2 s{xi.x + g.x, xi.y + g.y};
        e += gr.wts[q] * h2 * (A.eval_matrix(y) * s).dot(s);
      }
    }
  return e;
}

double grad_l2_distance(const PeriodicField& a, const PeriodicField& b) {
  if (a.n != b.n) throw ConfigError("grad_l2_distance: grid mismatch");
  const auto ga = gauss_gradients(a);
  const auto gb = gauss_gradients(b);
  const double w = 0.25 / (static_cast<double>(a.n) * a.n);
  double s = 0.0;
  for (size_t i = 0; i < ga.size(); ++i) {
    const Vec2 d = ga[i] - gb[i];
    s += w * d.dot(d);
  }
  return std::sqrt(s);
}

double grad_l2_norm(const PeriodicField& a) {
  const auto ga = gauss_gradients(a);
  const double w = 0.25 / (static_cast<double>(a.n) * a.n);
  double s = 0.0;
  for (const Vec2& g : ga) s += w * g.dot(g);
  return std::sqrt(s);
}

Vec2 gradient_mean(const PeriodicField& u) {
  const auto g = gauss_gradients(u);
  const double w = 0.25 / (static_cast<double>(u.n) * u.n);
  Vec2 m{0.0, 0.0};
  for (const Vec2& v : g) m += w * v;
  return m;
}

}  // namespace homog::cell
