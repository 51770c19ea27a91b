#include "homog/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace homog::fields {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string format_point(Vec2 y) {
  std::ostringstream os;
  os << "(" << y.x << ", " << y.y << ")";
  return os.str();
}
}  // namespace

std::string to_string(Kind k) {
  switch (k) {
    case Kind::matrix2: return "matrix2";
    case Kind::vector2: return "vector2";
    case Kind::scalar: return "scalar";
  }
  return "?";
}

std::string to_string(Structure s) {
  switch (s) {
    case Structure::constant: return "constant";
    case Structure::periodic: return "periodic";
    case Structure::periodic_plus_decaying: return "periodic_plus_decaying";
    case Structure::almost_periodic: return "almost_periodic";
  }
  return "?";
}

Kind kind_from_string(const std::string& s) {
  if (s == "matrix2") return Kind::matrix2;
  if (s == "vector2") return Kind::vector2;
  if (s == "scalar") return Kind::scalar;
  throw ConfigError("unknown field kind '" + s + "'");
}

Structure structure_from_string(const std::string& s) {
  if (s == "constant") return Structure::constant;
  if (s == "periodic") return Structure::periodic;
  if (s == "periodic_plus_decaying") return Structure::periodic_plus_decaying;
  if (s == "almost_periodic") return Structure::almost_periodic;
  throw ConfigError("unknown field structure '" + s + "'");
}

double Term::eval(Vec2 y) const {
  switch (type) {
    case Type::constant:
      return value;
    case Type::trig: {
      const double arg = kTwoPi * (kx * y.x + ky * y.y);
      return coef * (is_sin ? std::sin(arg) : std::cos(arg));
    }
    case Type::gaussian: {
      const double dx = y.x - cx;
      const double dy = y.y - cy;
      return amp * std::exp(-(dx * dx + dy * dy) / (sigma * sigma));
    }
  }
  return 0.0;
}

double ScalarExpr::eval(Vec2 y) const {
  double s = 0.0;
  for (const Term& t : terms) s += t.eval(y);
  return s;
}

double ScalarExpr::eval_periodic_part(Vec2 y) const {
  double s = 0.0;
  for (const Term& t : terms)
    if (!t.decaying()) s += t.eval(y);
  return s;
}

double ScalarExpr::eval_decaying_part(Vec2 y) const {
  double s = 0.0;
  for (const Term& t : terms)
    if (t.decaying()) s += t.eval(y);
  return s;
}

bool ScalarExpr::has_decaying() const {
  return std::any_of(terms.begin(), terms.end(),
                     [](const Term& t) { return t.decaying(); });
}

ScalarExpr ScalarExpr::constant(double c) {
  ScalarExpr e;
  e.add_constant(c);
  return e;
}

ScalarExpr& ScalarExpr::add_constant(double c) {
  Term t;
  t.type = Term::Type::constant;
  t.value = c;
  terms.push_back(t);
  return *this;
}

ScalarExpr& ScalarExpr::add_trig(double coef, double kx, double ky, bool is_sin) {
  Term t;
  t.type = Term::Type::trig;
  t.coef = coef;
  t.kx = kx;
  t.ky = ky;
  t.is_sin = is_sin;
  terms.push_back(t);
  return *this;
}

ScalarExpr& ScalarExpr::add_gaussian(double amp, Vec2 center, double sigma) {
  Term t;
  t.type = Term::Type::gaussian;
  t.amp = amp;
  t.cx = center.x;
  t.cy = center.y;
  t.sigma = sigma;
  terms.push_back(t);
  return *this;
}

CoefficientField::CoefficientField(Kind kind, Structure structure,
                                   std::vector<ScalarExpr> comps, double alpha,
                                   double beta, double alpha0)
    : kind_(kind),
      structure_(structure),
      comps_(std::move(comps)),
      alpha_(alpha),
      beta_(beta),
      alpha0_(alpha0) {
  check_structure();
}

void CoefficientField::check_structure() const {
  const bool allow_gaussian = structure_ == Structure::periodic_plus_decaying;
  const bool require_integer_k = structure_ == Structure::constant ||
                                 structure_ == Structure::periodic ||
                                 structure_ == Structure::periodic_plus_decaying;
  bool any_gaussian = false;
  for (const ScalarExpr& e : comps_) {
    for (const Term& t : e.terms) {
      if (t.type == Term::Type::gaussian) {
        any_gaussian = true;
        if (!allow_gaussian)
          throw ConfigError("decaying term present but structure is " +
                            to_string(structure_));
        if (t.sigma <= 0.0) throw ConfigError("gaussian term requires sigma > 0");
      }
      if (t.type == Term::Type::trig) {
        if (structure_ == Structure::constant)
          throw ConfigError("constant structure admits constant terms only");
        if (require_integer_k &&
            (t.kx != std::round(t.kx) || t.ky != std::round(t.ky)))
          throw ConfigError(
              "periodic structure requires integer trig frequencies");
      }
    }
  }
  if (structure_ == Structure::periodic_plus_decaying && !any_gaussian)
    throw ConfigError(
        "structure periodic_plus_decaying declared without a decaying term");
  if (kind_ == Kind::matrix2 && alpha_ <= 0.0)
    throw ConfigError("matrix field requires alpha > 0");
}

CoefficientField CoefficientField::matrix(ScalarExpr a11, ScalarExpr a12,
                                          ScalarExpr a22, Structure structure,
                                          double alpha, double beta) {
  return CoefficientField(Kind::matrix2, structure,
                          {std::move(a11), std::move(a12), std::move(a22)}, alpha,
                          beta, 0.0);
}

CoefficientField CoefficientField::isotropic(ScalarExpr a, Structure structure,
                                             double alpha, double beta) {
  ScalarExpr diag = a;
  return matrix(std::move(a), ScalarExpr::zero(), std::move(diag), structure,
                alpha, beta);
}

CoefficientField CoefficientField::identity() {
  return isotropic(ScalarExpr::constant(1.0), Structure::constant, 1.0, 1.0);
}

CoefficientField CoefficientField::vector(ScalarExpr v1, ScalarExpr v2,
                                          Structure structure, double alpha0) {
  return CoefficientField(Kind::vector2, structure,
                          {std::move(v1), std::move(v2)}, 0.0, 0.0, alpha0);
}

CoefficientField CoefficientField::scalar(ScalarExpr u, Structure structure,
                                          double alpha0) {
  return CoefficientField(Kind::scalar, structure, {std::move(u)}, 0.0, 0.0,
                          alpha0);
}

CoefficientField CoefficientField::zero_vector() {
  return vector(ScalarExpr::zero(), ScalarExpr::zero(), Structure::constant, 0.0);
}

CoefficientField CoefficientField::zero_scalar() {
  return scalar(ScalarExpr::zero(), Structure::constant, 0.0);
}

Mat2 CoefficientField::eval_matrix(Vec2 y) const {
  if (kind_ != Kind::matrix2)
    throw ConfigError("field of kind " + to_string(kind_) +
                      " used in a matrix role");
  const double a11 = comps_[0].eval(y);
  const double a12 = comps_[1].eval(y);
  const double a22 = comps_[2].eval(y);
  return {a11, a12, a12, a22};
}

Vec2 CoefficientField::eval_vector(Vec2 y) const {
  if (kind_ != Kind::vector2)
    throw ConfigError("field of kind " + to_string(kind_) +
                      " used in a vector role");
  return {comps_[0].eval(y), comps_[1].eval(y)};
}

double CoefficientField::eval_scalar(Vec2 y) const {
  if (kind_ != Kind::scalar)
    throw ConfigError("field of kind " + to_string(kind_) +
                      " used in a scalar role");
  return comps_[0].eval(y);
}

Mat2 CoefficientField::eval_matrix_periodic(Vec2 y) const {
  if (kind_ != Kind::matrix2)
    throw ConfigError("field of kind " + to_string(kind_) +
                      " used in a matrix role");
  const double a11 = comps_[0].eval_periodic_part(y);
  const double a12 = comps_[1].eval_periodic_part(y);
  const double a22 = comps_[2].eval_periodic_part(y);
  return {a11, a12, a12, a22};
}

Vec2 CoefficientField::eval_vector_periodic(Vec2 y) const {
  if (kind_ != Kind::vector2)
    throw ConfigError("field of kind " + to_string(kind_) +
                      " used in a vector role");
  return {comps_[0].eval_periodic_part(y), comps_[1].eval_periodic_part(y)};
}

double CoefficientField::eval_scalar_periodic(Vec2 y) const {
  if (kind_ != Kind::scalar)
    throw ConfigError("field of kind " + to_string(kind_) +
                      " used in a scalar role");
  return comps_[0].eval_periodic_part(y);
}

Mat2 CoefficientField::eval_matrix_decaying(Vec2 y) const {
  if (kind_ != Kind::matrix2)
    throw ConfigError("field of kind " + to_string(kind_) +
                      " used in a matrix role");
  const double a11 = comps_[0].eval_decaying_part(y);
  const double a12 = comps_[1].eval_decaying_part(y);
  const double a22 = comps_[2].eval_decaying_part(y);
  return {a11, a12, a12, a22};
}

Vec2 CoefficientField::eval_vector_decaying(Vec2 y) const {
  if (kind_ != Kind::vector2)
    throw ConfigError("field of kind " + to_string(kind_) +
                      " used in a vector role");
  return {comps_[0].eval_decaying_part(y), comps_[1].eval_decaying_part(y)};
}

double CoefficientField::eval_scalar_decaying(Vec2 y) const {
  if (kind_ != Kind::scalar)
    throw ConfigError("field of kind " + to_string(kind_) +
                      " used in a scalar role");
  return comps_[0].eval_decaying_part(y);
}

bool CoefficientField::has_decaying_part() const {
  return std::any_of(comps_.begin(), comps_.end(),
                     [](const ScalarExpr& e) { return e.has_decaying(); });
}

bool CoefficientField::is_identically_zero() const {
  return std::all_of(comps_.begin(), comps_.end(), [](const ScalarExpr& e) {
    return e.is_identically_zero();
  });
}

CoefficientField CoefficientField::periodic_part() const {
  std::vector<ScalarExpr> comps;
  comps.reserve(comps_.size());
  for (const ScalarExpr& e : comps_) {
    ScalarExpr p;
    for (const Term& t : e.terms)
      if (!t.decaying()) p.terms.push_back(t);
    comps.push_back(std::move(p));
  }
  Structure s = structure_ == Structure::periodic_plus_decaying
                    ? Structure::periodic
                    : structure_;
  return CoefficientField(kind_, s, std::move(comps), alpha_, beta_, alpha0_);
}

std::vector<std::pair<Vec2, double>> CoefficientField::decaying_supports() const {
  std::vector<std::pair<Vec2, double>> out;
  for (const ScalarExpr& e : comps_)
    for (const Term& t : e.terms)
      if (t.decaying()) out.push_back({{t.cx, t.cy}, 4.0 * t.sigma});
  return out;
}

namespace {

std::vector<Vec2> probe_directions(int probes) {
  std::vector<Vec2> dirs;
  dirs.reserve(probes);
  for (int k = 0; k < probes; ++k) {
    const double theta = std::numbers::pi * k / probes;
    dirs.push_back({std::cos(theta), std::sin(theta)});
  }
  return dirs;
}

// Unit cell midpoints plus a lattice over each gaussian support.
std::vector<Vec2> validation_lattice(const CoefficientField& field, int n) {
  std::vector<Vec2> pts;
  pts.reserve(static_cast<size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      pts.push_back({(i + 0.5) / n, (j + 0.5) / n});
  for (const auto& [c, r] : field.decaying_supports()) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        pts.push_back({c.x - r + 2.0 * r * (i + 0.5) / n,
                       c.y - r + 2.0 * r * (j + 0.5) / n});
  }
  return pts;
}

}  // namespace

ValidationReport validate_hypotheses(const CoefficientField& field, int lattice_n,
                                     int probes) {
  if (lattice_n < 8) throw ConfigError("validation lattice requires n >= 8");
  if (probes < 4) throw ConfigError("validation requires >= 4 probe directions");

  ValidationReport rep;
  rep.lattice_n = lattice_n;
  rep.probes = probes;
  const auto pts = validation_lattice(field, lattice_n);

  auto fail = [&](const std::string& what, Vec2 y) {
    if (rep.pass) {
      rep.pass = false;
      rep.failure = what + " at y=" + format_point(y);
      rep.failure_point = y;
    }
  };

  if (field.kind() == Kind::matrix2) {
    const auto dirs = probe_directions(probes);
    rep.min_rayleigh = std::numeric_limits<double>::infinity();
    rep.max_rayleigh = -rep.min_rayleigh;
    const bool split = field.has_decaying_part();
    if (split) {
      rep.min_rayleigh_periodic = rep.min_rayleigh;
      rep.max_rayleigh_periodic = rep.max_rayleigh;
    }
    for (const Vec2& y : pts) {
      const Mat2 a = field.eval_matrix(y);
      for (const Vec2& xi : dirs) {
        const double q = a.quadratic_form(xi);
        rep.min_rayleigh = std::min(rep.min_rayleigh, q);
        rep.max_rayleigh = std::max(rep.max_rayleigh, q);
        if (q < field.alpha() - 1e-12)
          fail("ellipticity lower bound alpha violated", y);
        if (q > field.beta() + 1e-12)
          fail("ellipticity upper bound beta violated", y);
      }
      if (split) {
        const Mat2 ap = field.eval_matrix_periodic(y);
        for (const Vec2& xi : dirs) {
          const double q = ap.quadratic_form(xi);
          rep.min_rayleigh_periodic = std::min(rep.min_rayleigh_periodic, q);
          rep.max_rayleigh_periodic = std::max(rep.max_rayleigh_periodic, q);
          if (q < field.alpha() - 1e-12)
            fail("periodic part violates alpha", y);
          if (q > field.beta() + 1e-12)
            fail("periodic part violates beta", y);
        }
      }
    }
  } else {
    for (const Vec2& y : pts) {
      const double m = field.kind() == Kind::vector2
                           ? field.eval_vector(y).norm()
                           : std::abs(field.eval_scalar(y));
      rep.sup_norm = std::max(rep.sup_norm, m);
      if (m > field.alpha0() + 1e-12) fail("sup-norm bound alpha0 violated", y);
    }
  }
  return rep;
}

ValidationReport require_hypotheses(const CoefficientField& field, int lattice_n,
                                    int probes) {
  ValidationReport rep = validate_hypotheses(field, lattice_n, probes);
  if (!rep.pass)
    throw HypothesisError(rep.failure, rep.failure_point.x, rep.failure_point.y);
  return rep;
}

double cell_average(const std::function<double(Vec2)>& u, int n) {
  double sum = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      sum += u({(i + 0.5) / n, (j + 0.5) / n});
  return sum / (static_cast<double>(n) * n);
}

namespace {

// Midpoint average over [-R,R]^2 at fixed lattice pitch 1/points_per_unit.
double square_average(const std::function<double(Vec2)>& u, double R,
                      int points_per_unit) {
  const long m = std::max<long>(8, std::lround(2.0 * R * points_per_unit));
  const double hl = 2.0 * R / m;
  double sum = 0.0;
  for (long j = 0; j < m; ++j) {
    const double y = -R + (j + 0.5) * hl;
    double row = 0.0;
    for (long i = 0; i < m; ++i) {
      const double x = -R + (i + 0.5) * hl;
      row += u({x, y});
    }
    sum += row;
  }
  return sum / (static_cast<double>(m) * m);
}

}  // namespace

MeanValueEstimate mean_value_of(const std::function<double(Vec2)>& u, double r_max,
                                int levels, const MeanValueOptions& opts) {
  if (r_max < 4.0) throw ConfigError("mean value estimation requires r_max >= 4");
  if (levels < 3) throw ConfigError("mean value estimation requires levels >= 3");

  MeanValueEstimate est;
  est.radii.resize(levels);
  est.partials.resize(levels);
  for (int k = 0; k < levels; ++k)
    est.radii[k] = r_max / static_cast<double>(1L << (levels - 1 - k));
  for (int k = 0; k < levels; ++k)
    est.partials[k] = square_average(u, est.radii[k], opts.points_per_unit);
  est.value = est.partials.back();
  est.converged = std::abs(est.partials[levels - 1] - est.partials[levels - 2]) <=
                  opts.tol;
  return est;
}

MeanValueEstimate mean_value(const CoefficientField& field, double r_max,
                             int levels, const MeanValueOptions& opts) {
  if (field.kind() != Kind::scalar)
    throw ConfigError("mean_value requires a scalar field");
  if (r_max < 4.0) throw ConfigError("mean value estimation requires r_max >= 4");
  if (levels < 3) throw ConfigError("mean value estimation requires levels >= 3");
  if (field.structure() == Structure::periodic ||
      field.structure() == Structure::constant) {
    MeanValueEstimate est;
    est.value = cell_average([&](Vec2 y) { return field.eval_scalar(y); },
                             opts.cell_n);
    est.radii = {0.5};
    est.partials = {est.value};
    est.converged = true;
    return est;
  }
  return mean_value_of([&](Vec2 y) { return field.eval_scalar(y); }, r_max,
                       levels, opts);
}

double besicovitch_seminorm(const CoefficientField& field, double r_max,
                            int levels, const MeanValueOptions& opts) {
  if (field.kind() != Kind::scalar)
    throw ConfigError("besicovitch_seminorm requires a scalar field");
  if (r_max < 4.0) throw ConfigError("mean value estimation requires r_max >= 4");
  if (levels < 3) throw ConfigError("mean value estimation requires levels >= 3");
  auto squared = [&](Vec2 y) {
    const double v = field.eval_scalar(y);
    return v * v;
  };
  if (field.structure() == Structure::periodic ||
      field.structure() == Structure::constant)
    return std::sqrt(std::max(0.0, cell_average(squared, opts.cell_n)));
  const MeanValueEstimate est = mean_value_of(squared, r_max, levels, opts);
  return std::sqrt(std::max(0.0, est.value));
}

}  // namespace homog::fields
