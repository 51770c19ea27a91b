#pragma once

#include <functional>
#include <string>
#include <vector>

#include "homog/errors.hpp"
#include "homog/types.hpp"

namespace homog::fields {

enum class Kind { matrix2, vector2, scalar };
enum class Structure { constant, periodic, periodic_plus_decaying, almost_periodic };

std::string to_string(Kind k);
std::string to_string(Structure s);
Kind kind_from_string(const std::string& s);
Structure structure_from_string(const std::string& s);

// One closed-form term of a coefficient component. Trig terms evaluate
// coef * fn(2*pi*(kx*y1 + ky*y2)); gaussian terms amp * exp(-|y-c|^2/sigma^2).
struct Term {
  enum class Type { constant, trig, gaussian };
  Type type = Type::constant;
  double value = 0.0;                      // constant
  double coef = 0.0, kx = 0.0, ky = 0.0;   // trig
  bool is_sin = false;                     // trig: sin instead of cos
  double amp = 0.0, cx = 0.0, cy = 0.0, sigma = 1.0;  // gaussian

  double eval(Vec2 y) const;
  bool decaying() const { return type == Type::gaussian; }
};

// Sum of closed-form terms; the building block for every coefficient
// component and for source functions.
struct ScalarExpr {
  std::vector<Term> terms;

  double eval(Vec2 y) const;
  double eval_periodic_part(Vec2 y) const;  // constant + trig terms only
  double eval_decaying_part(Vec2 y) const;  // gaussian terms only
  bool has_decaying() const;
  bool is_identically_zero() const { return terms.empty(); }

  static ScalarExpr zero() { return {}; }
  static ScalarExpr constant(double c);
  ScalarExpr& add_constant(double c);
  ScalarExpr& add_trig(double coef, double kx, double ky, bool is_sin = false);
  ScalarExpr& add_gaussian(double amp, Vec2 center, double sigma);
};

// A matrix/vector/scalar coefficient over R^2 with a structure tag and the
// declared bounds of hypotheses (H1)-(H2). Matrix fields are stored by their
// three independent components (a11, a12, a22) and are symmetric by
// construction. Immutable after construction.
class CoefficientField {
 public:
  // Matrix from components; alpha/beta are the declared ellipticity bounds.
  static CoefficientField matrix(ScalarExpr a11, ScalarExpr a12, ScalarExpr a22,
                                 Structure structure, double alpha, double beta);
  // a(y) * I with scalar expression a.
  static CoefficientField isotropic(ScalarExpr a, Structure structure,
                                    double alpha, double beta);
  static CoefficientField identity();
  static CoefficientField vector(ScalarExpr v1, ScalarExpr v2, Structure structure,
                                 double alpha0);
  static CoefficientField scalar(ScalarExpr u, Structure structure, double alpha0);
  static CoefficientField zero_vector();
  static CoefficientField zero_scalar();

  Kind kind() const { return kind_; }
  Structure structure() const { return structure_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double alpha0() const { return alpha0_; }

  // Exact closed-form evaluation; throws ConfigError on a kind mismatch.
  Mat2 eval_matrix(Vec2 y) const;
  Vec2 eval_vector(Vec2 y) const;
  double eval_scalar(Vec2 y) const;

  // Periodic / decaying splits (decaying parts vanish unless the structure
  // is periodic_plus_decaying).
  Mat2 eval_matrix_periodic(Vec2 y) const;
  Vec2 eval_vector_periodic(Vec2 y) const;
  double eval_scalar_periodic(Vec2 y) const;
  Mat2 eval_matrix_decaying(Vec2 y) const;
  Vec2 eval_vector_decaying(Vec2 y) const;
  double eval_scalar_decaying(Vec2 y) const;

  bool has_decaying_part() const;
  bool is_identically_zero() const;
  // Periodic-part field with the same declared bounds.
  CoefficientField periodic_part() const;
  // Gaussian centers with their 4*sigma support radii (for truncation checks).
  std::vector<std::pair<Vec2, double>> decaying_supports() const;

  const std::vector<ScalarExpr>& components() const { return comps_; }

 private:
  CoefficientField(Kind kind, Structure structure, std::vector<ScalarExpr> comps,
                   double alpha, double beta, double alpha0);
  void check_structure() const;

  Kind kind_;
  Structure structure_;
  std::vector<ScalarExpr> comps_;  // matrix: {a11, a12, a22}; vector: {v1, v2}; scalar: {u}
  double alpha_ = 0.0, beta_ = 0.0, alpha0_ = 0.0;
};

struct ValidationReport {
  bool pass = true;
  int lattice_n = 0;
  int probes = 0;
  // matrix kind: Rayleigh-quotient range over lattice x probe directions
  double min_rayleigh = 0.0;
  double max_rayleigh = 0.0;
  // matrix kind with a decaying part: range of the periodic part alone
  double min_rayleigh_periodic = 0.0;
  double max_rayleigh_periodic = 0.0;
  // vector/scalar kinds
  double sup_norm = 0.0;
  std::string failure;  // empty when pass
  Vec2 failure_point{0.0, 0.0};
};

// Samples the field on a validation lattice (unit cell plus the support of
// any gaussian defect) and checks the declared bounds. Deterministic.
ValidationReport validate_hypotheses(const CoefficientField& field, int lattice_n,
                                     int probes);
// Same scan; throws HypothesisError naming the sample point on violation.
ValidationReport require_hypotheses(const CoefficientField& field,
                                    int lattice_n = 16, int probes = 4);

struct MeanValueEstimate {
  double value = 0.0;
  std::vector<double> radii;     // increasing averaging half-widths R
  std::vector<double> partials;  // average over [-R,R]^2 at each R
  bool converged = false;
};

struct MeanValueOptions {
  int points_per_unit = 32;  // midpoint lattice density for nested squares
  int cell_n = 256;          // midpoint resolution for the one-cell shortcut
  double tol = 1e-3;         // successive-difference convergence test
};

// Mean value over nested squares [-R,R]^2 with R doubling up to r_max.
// Periodic and constant structures take the single-cell shortcut.
MeanValueEstimate mean_value(const CoefficientField& scalar_field, double r_max,
                             int levels, const MeanValueOptions& opts = {});
// (M(|u|^2))^{1/2} via mean_value applied to the squared field.
double besicovitch_seminorm(const CoefficientField& scalar_field, double r_max,
                            int levels, const MeanValueOptions& opts = {});

// Kernel on a raw callable; used by the typed entry points above and by
// property tests (shifted fields, differences of fields).
MeanValueEstimate mean_value_of(const std::function<double(Vec2)>& u, double r_max,
                                int levels, const MeanValueOptions& opts = {});
double cell_average(const std::function<double(Vec2)>& u, int n);

}  // namespace homog::fields
