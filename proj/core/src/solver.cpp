#include "homog/solver.hpp"

#include <cmath>

namespace homog::solver {

using fields::CoefficientField;
using grid::DiscreteField;
using grid::gauss2x2;
using grid::kQ1Offsets;
using grid::Q1;

double ProblemSpec::alpha0_declared() const {
  return std::max({V.alpha0(), B.alpha0(), a0.alpha0()});
}

double ProblemSpec::effective_mu() const {
  return std::max(mu, compute_mu0(A.alpha(), A.beta(), alpha0_declared()));
}

double compute_mu0(double alpha, double beta, double alpha0) {
  (void)beta;  // the shift needs only the lower bound and alpha0
  if (alpha <= 0.0) throw HypothesisError("compute_mu0 requires alpha > 0", 0, 0);
  if (alpha0 < 0.0) throw HypothesisError("compute_mu0 requires alpha0 >= 0", 0, 0);
  return alpha0 + 2.0 * alpha0 * alpha0 / alpha;
}

namespace {

struct AssemblyTerms {
  const CoefficientField* A;
  const CoefficientField* V;
  const CoefficientField* B;
  const CoefficientField* a0;
  double mu;
};

DirichletSystem assemble_impl(const AssemblyTerms& t, const fields::ScalarExpr& f,
                              double eps, int m, bool enforce_resolution) {
  if (m < 2) throw ConfigError("dirichlet grid requires m >= 2");
  if (eps <= 0.0) throw ConfigError("eps must be positive");
  if (enforce_resolution && static_cast<double>(m) * eps < 16.0 - 1e-12) {
    const int required = static_cast<int>(std::ceil(16.0 / eps));
    throw ConfigError("under-resolved oscillation: m*eps >= 16 required, need m >= " +
                      std::to_string(required) + " for eps = " + std::to_string(eps));
  }

  const auto& gr = gauss2x2();
  const double h = 1.0 / m;
  const double h2 = h * h;
  const int nu = (m - 1) * (m - 1);
  const bool has_v = !t.V->is_identically_zero();
  const bool has_b = !t.B->is_identically_zero();
  const bool has_a0 = !t.a0->is_identically_zero();
  const bool mass_term = has_a0 || t.mu != 0.0;

  auto un = [m](int i, int j) { return (j - 1) * (m - 1) + (i - 1); };

  DirichletSystem sys;
  sys.m = m;
  sys.drift_free = !has_v && !has_b;
  sys.rhs.assign(nu, 0.0);
  std::vector<linalg::Triplet> trips;
  trips.reserve(static_cast<size_t>(m) * m * 16);

  for (int cj = 0; cj < m; ++cj)
    for (int ci = 0; ci < m; ++ci) {
      int gi[4], gj[4];
      bool interior[4];
      for (int a = 0; a < 4; ++a) {
        gi[a] = ci + kQ1Offsets[a][0];
        gj[a] = cj + kQ1Offsets[a][1];
        interior[a] = gi[a] > 0 && gi[a] < m && gj[a] > 0 && gj[a] < m;
      }
      double loc[4][4] = {};
      double fl[4] = {};
      for (int q = 0; q < 4; ++q) {
        const Vec2 x{(ci + gr.pts[q].x) * h, (cj + gr.pts[q].y) * h};
        const Vec2 y{x.x / eps, x.y / eps};
        const Mat2 a = t.A->eval_matrix(y);
        const auto G = Q1::shape_grad(gr.pts[q]);
        const auto N = Q1::shape(gr.pts[q]);
        const double w = gr.wts[q];
        for (int bq = 0; bq < 4; ++bq) {
          const Vec2 ag = a * G[bq];
          for (int aq = 0; aq < 4; ++aq) loc[aq][bq] += w * ag.dot(G[aq]);
        }
        if (has_v) {
          const Vec2 v = t.V->eval_vector(y);
          for (int bq = 0; bq < 4; ++bq)
            for (int aq = 0; aq < 4; ++aq)
              loc[aq][bq] += w * h * N[bq] * v.dot(G[aq]);
        }
        if (has_b) {
          const Vec2 b = t.B->eval_vector(y);
          for (int bq = 0; bq < 4; ++bq)
            for (int aq = 0; aq < 4; ++aq)
              loc[aq][bq] += w * h * N[aq] * b.dot(G[bq]);
        }
        if (mass_term) {
          const double z = (has_a0 ? t.a0->eval_scalar(y) : 0.0) + t.mu;
          for (int bq = 0; bq < 4; ++bq)
            for (int aq = 0; aq < 4; ++aq)
              loc[aq][bq] += w * h2 * z * N[aq] * N[bq];
        }
        const double fv = f.eval(x);
        for (int aq = 0; aq < 4; ++aq) fl[aq] += w * h2 * fv * N[aq];
      }
      for (int aq = 0; aq < 4; ++aq) {
        if (!interior[aq]) continue;
        const int row = un(gi[aq], gj[aq]);
        sys.rhs[row] += fl[aq];
        for (int bq = 0; bq < 4; ++bq) {
          if (!interior[bq]) continue;  // homogeneous Dirichlet data
          trips.emplace_back(row, un(gi[bq], gj[bq]), loc[aq][bq]);
        }
      }
    }
  sys.matrix = linalg::assemble_from_triplets(nu, nu, std::move(trips));
  return sys;
}

DiscreteField to_dirichlet_field(int m, const std::vector<double>& x) {
  DiscreteField u(m, grid::BoundaryTag::dirichlet);
  for (int j = 1; j < m; ++j)
    for (int i = 1; i < m; ++i) u.at(i, j) = x[(j - 1) * (m - 1) + (i - 1)];
  return u;
}

DiscreteField solve_system(const DirichletSystem& sys, SolveInfo* info,
                           double f_norm, double mu_used) {
  std::vector<double> x;
  linalg::LinearSolveReport rep;
  if (sys.drift_free) {
    linalg::CgOptions cg;
    cg.tol = 1e-12;
    std::tie(x, rep) = linalg::solve_spd(sys.matrix, sys.rhs, cg);
  } else {
    std::tie(x, rep) = linalg::solve_general(sys.matrix, sys.rhs);
  }
  DiscreteField u = to_dirichlet_field(sys.m, x);
  if (info) {
    info->report = rep;
    info->h1_norm = grid::norm_h1(u);
    info->f_l2_norm = f_norm;
    info->stability = f_norm > 0.0 ? info->h1_norm / f_norm : 0.0;
    info->h2_surrogate = grid::h2_surrogate(u);
    info->mu_used = mu_used;
  }
  return u;
}

}  // namespace

DirichletSystem assemble_dirichlet(const ProblemSpec& spec, double eps, int m) {
  fields::require_hypotheses(spec.A);
  if (!spec.V.is_identically_zero()) fields::require_hypotheses(spec.V);
  if (!spec.B.is_identically_zero()) fields::require_hypotheses(spec.B);
  if (!spec.a0.is_identically_zero()) fields::require_hypotheses(spec.a0);
  AssemblyTerms t{&spec.A, &spec.V, &spec.B, &spec.a0, spec.effective_mu()};
  return assemble_impl(t, spec.f, eps, m, /*enforce_resolution=*/true);
}

DirichletSystem assemble_dirichlet_adjoint(const ProblemSpec& spec, double eps,
                                           int m) {
  AssemblyTerms t{&spec.A, &spec.B, &spec.V, &spec.a0, spec.effective_mu()};
  return assemble_impl(t, spec.f, eps, m, /*enforce_resolution=*/true);
}

grid::DiscreteField solve_oscillating(const ProblemSpec& spec, double eps, int m,
                                      SolveInfo* info) {
  DirichletSystem sys = assemble_dirichlet(spec, eps, m);
  return solve_system(sys, info, source_l2_norm(spec.f, m), spec.effective_mu());
}

grid::DiscreteField solve_homogenized(const cell::HomogenizedCoefficients& coeffs,
                                      const fields::ScalarExpr& f, int m,
                                      SolveInfo* info) {
  const auto ev = coeffs.A_hat.sym_eigenvalues();
  if (ev[0] <= 0.0)
    throw SolverError("homogenized matrix is not positive definite");
  if (coeffs.A_hat.max_asymmetry() > 1e-6)
    throw SolverError("homogenized matrix is far from symmetric");

  using fields::ScalarExpr;
  using fields::Structure;
  const double a12 = 0.5 * (coeffs.A_hat.a12 + coeffs.A_hat.a21);
  const CoefficientField a_hat = CoefficientField::matrix(
      ScalarExpr::constant(coeffs.A_hat.a11), ScalarExpr::constant(a12),
      ScalarExpr::constant(coeffs.A_hat.a22), Structure::constant, ev[0], ev[1]);
  const double v_norm = coeffs.V_hat.norm();
  const double b_norm = coeffs.B_hat.norm();
  const CoefficientField v_hat =
      v_norm > 0.0 ? CoefficientField::vector(ScalarExpr::constant(coeffs.V_hat.x),
                                              ScalarExpr::constant(coeffs.V_hat.y),
                                              Structure::constant, v_norm)
                   : CoefficientField::zero_vector();
  const CoefficientField b_hat =
      b_norm > 0.0 ? CoefficientField::vector(ScalarExpr::constant(coeffs.B_hat.x),
                                              ScalarExpr::constant(coeffs.B_hat.y),
                                              Structure::constant, b_norm)
                   : CoefficientField::zero_vector();
  const CoefficientField a0_hat =
      coeffs.a0_hat != 0.0
          ? CoefficientField::scalar(ScalarExpr::constant(coeffs.a0_hat),
                                     Structure::constant, std::abs(coeffs.a0_hat))
          : CoefficientField::zero_scalar();

  AssemblyTerms t{&a_hat, &v_hat, &b_hat, &a0_hat, coeffs.mu};
  DirichletSystem sys = assemble_impl(t, f, 1.0, m, /*enforce_resolution=*/false);
  return solve_system(sys, info, source_l2_norm(f, m), coeffs.mu);
}

double source_l2_norm(const fields::ScalarExpr& f, int m) {
  const auto& gr = gauss2x2();
  const double h = 1.0 / m;
  double s = 0.0;
  for (int cj = 0; cj < m; ++cj)
    for (int ci = 0; ci < m; ++ci)
      for (int q = 0; q < 4; ++q) {
        const Vec2 x{(ci + gr.pts[q].x) * h, (cj + gr.pts[q].y) * h};
        const double v = f.eval(x);
        s += gr.wts[q] * h * h * v * v;
      }
  return std::sqrt(s);
}

}  // namespace homog::solver
