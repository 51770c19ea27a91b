#include "homog/linalg.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <ostream>

namespace homog::linalg {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

SparseMatrix assemble_from_triplets(int rows, int cols,
                                    std::vector<Triplet> triplets) {
  for (const auto& [i, j, v] : triplets) {
    if (i < 0 || i >= rows || j < 0 || j >= cols)
      throw ConfigError("triplet index (" + std::to_string(i) + ", " +
                        std::to_string(j) + ") out of range for " +
                        std::to_string(rows) + "x" + std::to_string(cols));
    (void)v;
  }
  std::sort(triplets.begin(), triplets.end(),
            [](const Triplet& a, const Triplet& b) {
              if (std::get<0>(a) != std::get<0>(b))
                return std::get<0>(a) < std::get<0>(b);
              return std::get<1>(a) < std::get<1>(b);
            });

  SparseMatrix m(rows, cols);
  m.col_indices_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  std::vector<std::int64_t> counts(rows, 0);
  size_t k = 0;
  while (k < triplets.size()) {
    const int i = std::get<0>(triplets[k]);
    const int j = std::get<1>(triplets[k]);
    double v = 0.0;
    while (k < triplets.size() && std::get<0>(triplets[k]) == i &&
           std::get<1>(triplets[k]) == j) {
      v += std::get<2>(triplets[k]);
      ++k;
    }
    m.col_indices_.push_back(j);
    m.values_.push_back(v);
    ++counts[i];
  }
  for (int i = 0; i < rows; ++i) m.row_offsets_[i + 1] = m.row_offsets_[i] + counts[i];
  return m;
}

double SparseMatrix::entry(int i, int j) const {
  for (std::int64_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
    if (col_indices_[k] == j) return values_[k];
  return 0.0;
}

bool SparseMatrix::is_symmetric(double rel_tol) const {
  if (rows_ != cols_) return false;
  double max_abs = 0.0;
  for (double v : values_) max_abs = std::max(max_abs, std::abs(v));
  const double tol = rel_tol * std::max(max_abs, 1e-300);
  for (int i = 0; i < rows_; ++i)
    for (std::int64_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      const int j = col_indices_[k];
      if (std::abs(values_[k] - entry(j, i)) > tol) return false;
    }
  return true;
}

void SparseMatrix::multiply(const std::vector<double>& x,
                            std::vector<double>& y) const {
  y.assign(rows_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::int64_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
      s += values_[k] * x[col_indices_[k]];
    y[i] = s;
  }
}

std::vector<double> SparseMatrix::multiply(const std::vector<double>& x) const {
  std::vector<double> y;
  multiply(x, y);
  return y;
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(rows_, 0.0);
  for (int i = 0; i < rows_; ++i) d[i] = entry(i, i);
  return d;
}

void SparseMatrix::write_matrix_market(std::ostream& os) const {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << rows_ << " " << cols_ << " " << nonzeros() << "\n";
  for (int i = 0; i < rows_; ++i)
    for (std::int64_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
      os << (i + 1) << " " << (col_indices_[k] + 1) << " " << values_[k] << "\n";
}

namespace {

void subtract_mean(std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

}  // namespace

std::pair<std::vector<double>, LinearSolveReport> solve_spd(
    const SparseMatrix& m, const std::vector<double>& rhs, const CgOptions& opts) {
  const int n = m.rows();
  if (static_cast<int>(rhs.size()) != n)
    throw ConfigError("solve_spd: rhs size mismatch");

  LinearSolveReport rep;
  rep.method = LinearSolveReport::Method::cg;

  std::vector<double> x = opts.initial_guess.empty()
                              ? std::vector<double>(n, 0.0)
                              : opts.initial_guess;
  if (opts.project_zero_mean) subtract_mean(x);

  std::vector<double> d = m.diagonal();
  for (double& v : d) v = (v != 0.0) ? 1.0 / v : 1.0;

  const double rhs_norm = norm2(rhs);
  if (rhs_norm == 0.0) {
    rep.iterations = 0;
    rep.residual_norm = 0.0;
    return {std::vector<double>(n, 0.0), rep};
  }

  std::vector<double> r = m.multiply(x);
  for (int i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
  if (opts.project_zero_mean) subtract_mean(r);

  std::vector<double> z(n), p(n), q(n);
  for (int i = 0; i < n; ++i) z[i] = d[i] * r[i];
  if (opts.project_zero_mean) subtract_mean(z);
  p = z;
  double rz = dot(r, z);
  double res = norm2(r) / rhs_norm;

  int it = 0;
  while (res > opts.tol && it < opts.max_iter) {
    m.multiply(p, q);
    const double pq = dot(p, q);
    if (pq <= 0.0)
      throw SolverError("solve_spd: matrix not positive definite (p'Ap = " +
                        std::to_string(pq) + ")");
    const double alpha = rz / pq;
    for (int i = 0; i < n; ++i) x[i] += alpha * p[i];
    for (int i = 0; i < n; ++i) r[i] -= alpha * q[i];
    if (opts.project_zero_mean) {
      subtract_mean(x);
      subtract_mean(r);
    }
    for (int i = 0; i < n; ++i) z[i] = d[i] * r[i];
    if (opts.project_zero_mean) subtract_mean(z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    ++it;
    res = norm2(r) / rhs_norm;
  }
  rep.iterations = it;
  rep.residual_norm = res;
  if (res > opts.tol)
    throw SolverError("solve_spd: CG failed to converge in " +
                      std::to_string(opts.max_iter) +
                      " iterations (last relative residual " +
                      std::to_string(res) + ")");
  return {std::move(x), rep};
}

std::pair<std::vector<double>, LinearSolveReport> solve_general(
    const SparseMatrix& m, const std::vector<double>& rhs) {
  const int n = m.rows();
  if (m.cols() != n) throw ConfigError("solve_general: matrix must be square");
  if (static_cast<int>(rhs.size()) != n)
    throw ConfigError("solve_general: rhs size mismatch");

  Eigen::SparseMatrix<double> a(n, n);
  {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(m.nonzeros());
    const auto& off = m.row_offsets();
    const auto& col = m.col_indices();
    const auto& val = m.values();
    for (int i = 0; i < n; ++i)
      for (std::int64_t k = off[i]; k < off[i + 1]; ++k)
        trips.emplace_back(i, col[k], val[k]);
    a.setFromTriplets(trips.begin(), trips.end());
  }
  a.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success)
    throw SolverError("solve_general: singular pivot during LU factorization");

  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b[i] = rhs[i];
  Eigen::VectorXd xe = lu.solve(b);
  if (lu.info() != Eigen::Success)
    throw SolverError("solve_general: LU back-substitution failed");

  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = xe[i];

  LinearSolveReport rep;
  rep.method = LinearSolveReport::Method::lu;
  rep.iterations = 1;
  std::vector<double> r = m.multiply(x);
  for (int i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
  const double rhs_norm = norm2(rhs);
  rep.residual_norm = rhs_norm > 0.0 ? norm2(r) / rhs_norm : norm2(r);
  if (rep.residual_norm > 1e-10)
    throw SolverError("solve_general: residual " +
                      std::to_string(rep.residual_norm) +
                      " exceeds 1e-10 (ill-conditioned or singular system)");
  return {std::move(x), rep};
}

std::vector<double> project_zero_mean(const std::vector<double>& v,
                                      const std::vector<double>& weights) {
  if (v.size() != weights.size())
    throw ConfigError("project_zero_mean: weight size mismatch");
  double wsum = 0.0, mean = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    wsum += weights[i];
    mean += weights[i] * v[i];
  }
  mean /= wsum;
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] - mean;
  return out;
}

}  // namespace homog::linalg
