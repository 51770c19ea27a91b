#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <tuple>
#include <vector>

#include "homog/errors.hpp"

namespace homog::linalg {

using Triplet = std::tuple<int, int, double>;

// Compressed-row sparse matrix. Column indices are strictly increasing within
// each row; duplicate triplets are summed during assembly.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols),
                                     row_offsets_(rows + 1, 0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::int64_t nonzeros() const { return static_cast<std::int64_t>(values_.size()); }

  const std::vector<std::int64_t>& row_offsets() const { return row_offsets_; }
  const std::vector<int>& col_indices() const { return col_indices_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  double entry(int i, int j) const;  // 0 when not stored
  bool is_symmetric(double rel_tol = 1e-12) const;

  void multiply(const std::vector<double>& x, std::vector<double>& y) const;
  std::vector<double> multiply(const std::vector<double>& x) const;
  std::vector<double> diagonal() const;

  // Matrix Market coordinate text format (debugging aid).
  void write_matrix_market(std::ostream& os) const;

  friend SparseMatrix assemble_from_triplets(int rows, int cols,
                                             std::vector<Triplet> triplets);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::int64_t> row_offsets_;
  std::vector<int> col_indices_;
  std::vector<double> values_;
};

// Canonical CSR from (i, j, value) triplets; duplicates summed, indices
// validated against the given shape.
SparseMatrix assemble_from_triplets(int rows, int cols,
                                    std::vector<Triplet> triplets);

struct LinearSolveReport {
  enum class Method { cg, lu };
  Method method = Method::cg;
  int iterations = 0;
  double residual_norm = 0.0;  // relative to |rhs|
};

struct CgOptions {
  double tol = 1e-12;      // relative residual target
  int max_iter = 50000;
  // When true the iterate (and preconditioned residual) is projected onto the
  // zero-mean subspace after every update; used for singular periodic
  // stiffness matrices whose nullspace is the constants.
  bool project_zero_mean = false;
  std::vector<double> initial_guess;  // empty = zero
};

// Jacobi-preconditioned conjugate gradients for SPD (or SPSD with constant
// nullspace) systems. Deterministic: fixed iteration order, no reordering.
std::pair<std::vector<double>, LinearSolveReport> solve_spd(
    const SparseMatrix& m, const std::vector<double>& rhs,
    const CgOptions& opts = {});

// Direct sparse LU with partial pivoting for general nonsingular systems
// (the drift term makes oscillating-problem matrices non-symmetric).
std::pair<std::vector<double>, LinearSolveReport> solve_general(
    const SparseMatrix& m, const std::vector<double>& rhs);

// Subtracts the weighted mean: result has zero weighted mean and differs from
// v by a constant. Weights must be positive and sum to the cell measure.
std::vector<double> project_zero_mean(const std::vector<double>& v,
                                      const std::vector<double>& weights);

double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm2(const std::vector<double>& a);

}  // namespace homog::linalg
