#include "homog/rates.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "homog/approx.hpp"

namespace homog::rates {

using grid::DiscreteField;
using grid::gauss2x2;
using grid::kQ1Offsets;
using grid::Q1;

namespace {

enum class NormKind { l2, h1 };

double error_quadrature(const DiscreteField& u, const DiscreteField& v,
                        NormKind kind, double lo, double hi) {
  if (u.m < v.m)
    throw ConfigError("error norms interpolate coarse onto fine: first field "
                      "must be the finer grid");
  const bool same = u.m == v.m;
  const auto& gr = gauss2x2();
  const double h = u.h();
  const double h2 = h * h;
  double total = 0.0;
  const int c_lo = std::max(0, static_cast<int>(std::floor(lo * u.m + 0.5)));
  const int c_hi = std::min(u.m, static_cast<int>(std::floor(hi * u.m + 0.5)));
  for (int cj = c_lo; cj < c_hi; ++cj)
    for (int ci = c_lo; ci < c_hi; ++ci) {
      double du[4];
      for (int a = 0; a < 4; ++a) {
        du[a] = u.at(ci + kQ1Offsets[a][0], cj + kQ1Offsets[a][1]);
        if (same) du[a] -= v.at(ci + kQ1Offsets[a][0], cj + kQ1Offsets[a][1]);
      }
      for (int q = 0; q < 4; ++q) {
        const Vec2 x{(ci + gr.pts[q].x) * h, (cj + gr.pts[q].y) * h};
        const auto N = Q1::shape(gr.pts[q]);
        const auto G = Q1::shape_grad(gr.pts[q]);
        double val = 0.0;
        for (int a = 0; a < 4; ++a) val += N[a] * du[a];
        if (!same) val -= v.eval(x);
        if (kind == NormKind::l2) {
          total += gr.wts[q] * h2 * val * val;
        } else {
          Vec2 g{0.0, 0.0};
          for (int a = 0; a < 4; ++a) g += G[a] * du[a];
          g = g * (1.0 / h);
          if (!same) g = g - v.eval_grad(x);
          total += gr.wts[q] * h2 * (val * val + g.dot(g));
        }
      }
    }
  return std::sqrt(total);
}

}  // namespace

double error_L2(const DiscreteField& u, const DiscreteField& v) {
  return error_quadrature(u, v, NormKind::l2, 0.0, 1.0);
}

double error_H1(const DiscreteField& u, const DiscreteField& v) {
  return error_quadrature(u, v, NormKind::h1, 0.0, 1.0);
}

double error_H1_window(const DiscreteField& u, const DiscreteField& v, double lo,
                       double hi) {
  return error_quadrature(u, v, NormKind::h1, lo, hi);
}

double error_L2(const DiscreteField& u, const std::function<double(Vec2)>& ref) {
  const auto& gr = gauss2x2();
  const double h = u.h();
  const double h2 = h * h;
  double total = 0.0;
  for (int cj = 0; cj < u.m; ++cj)
    for (int ci = 0; ci < u.m; ++ci) {
      double uv[4];
      for (int a = 0; a < 4; ++a)
        uv[a] = u.at(ci + kQ1Offsets[a][0], cj + kQ1Offsets[a][1]);
      for (int q = 0; q < 4; ++q) {
        const Vec2 x{(ci + gr.pts[q].x) * h, (cj + gr.pts[q].y) * h};
        const auto N = Q1::shape(gr.pts[q]);
        double val = -ref(x);
        for (int a = 0; a < 4; ++a) val += N[a] * uv[a];
        total += gr.wts[q] * h2 * val * val;
      }
    }
  return std::sqrt(total);
}

SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3)
    throw ConfigError("slope fit requires at least 3 points, got " +
                      std::to_string(points.size()));
  for (const auto& [e, err] : points)
    if (!(err > 0.0))
      throw ConfigError("degenerate fit: nonpositive error at eps = " +
                        std::to_string(e));
  const size_t n = points.size();
  double sx = 0.0, sy = 0.0;
  std::vector<double> xs(n), ys(n);
  for (size_t i = 0; i < n; ++i) {
    xs[i] = std::log(points[i].first);
    ys[i] = std::log(points[i].second);
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.prefactor = std::exp(my - fit.slope * mx);
  double ss_res = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double pred = my + fit.slope * (xs[i] - mx);
    ss_res += (ys[i] - pred) * (ys[i] - pred);
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

int fine_grid_for(double eps, const RatePolicy& policy) {
  // >= 32 cells per period so the half-resolution Richardson probe still
  // resolves the oscillation (16 cells per period).
  if (policy.cells_per_eps < 32)
    throw ConfigError("rate policy requires cells_per_eps >= 32");
  int m = std::max(policy.m_min,
                   static_cast<int>(std::ceil(policy.cells_per_eps / eps - 1e-9)));
  if (m % 2 != 0) ++m;
  return m;
}

RateReport rate_sweep(const solver::ProblemSpec& spec,
                      const std::vector<double>& eps_list,
                      const RatePolicy& policy, const std::string& config_digest) {
  RateReport report;
  report.config_digest = config_digest;
  report.mu_effective = spec.effective_mu();

  cell::SolveOptions cell_opts;
  cell_opts.tol = policy.cell_tol;
  cell_opts.threads = policy.threads;
  const cell::CellSolution sol =
      cell::solve_correctors(spec.A, spec.V, cell::PeriodicGrid(policy.cell_n),
                             cell_opts);
  report.coeffs = cell::homogenized_coefficients(spec.A, spec.V, spec.B, spec.a0,
                                                 report.mu_effective, sol);
  report.sup_chi = sol.sup_chi();

  std::vector<double> eps_sorted = eps_list;
  std::sort(eps_sorted.begin(), eps_sorted.end(), std::greater<double>());

  std::map<int, DiscreteField> u0_cache;
  auto homogenized_at = [&](int m) -> const DiscreteField& {
    auto it = u0_cache.find(m);
    if (it == u0_cache.end()) {
      solver::SolveInfo info;
      it = u0_cache.emplace(m, solver::solve_homogenized(report.coeffs, spec.f, m,
                                                         &info)).first;
    }
    return it->second;
  };

  for (double eps : eps_sorted) {
    RateRow row;
    row.eps = eps;
    try {
      row.m_fine = fine_grid_for(eps, policy);
      solver::SolveInfo info;
      const DiscreteField u_eps = solver::solve_oscillating(spec, eps, row.m_fine, &info);
      const DiscreteField u_half =
          solver::solve_oscillating(spec, eps, row.m_fine / 2);
      const DiscreteField& u0 = homogenized_at(row.m_fine);
      const DiscreteField v_eps = approx::first_order_approx(u0, sol, eps);

      row.errL2_zero_order = error_L2(u_eps, u0);
      row.errH1_first_order = error_H1(u_eps, v_eps);
      row.errH1_plain = error_H1(u_eps, u0);
      row.errH1_interior = error_H1_window(u_eps, v_eps, 0.25, 0.75);
      row.normH1_ueps = info.h1_norm;
      row.stability = info.stability;
      const double fem_est = error_L2(u_eps, u_half) / 3.0;  // Richardson, O(h^2)
      if (row.errL2_zero_order > policy.error_floor) {
        row.fem_budget = fem_est / row.errL2_zero_order;
        row.budget_ok = row.fem_budget <= policy.budget_limit;
        if (!row.budget_ok) row.note = "discretization budget exceeded";
      } else {
        row.fem_budget = 0.0;
        row.budget_ok = false;
        row.note = "error at discretization floor";
      }
      row.ok = true;
    } catch (const Error& e) {
      row.ok = false;
      row.note = e.what();
    }
    report.rows.push_back(std::move(row));
  }

  // Fit on unflagged rows; drop the largest eps (pre-asymptotic) unless that
  // leaves fewer than 3 points.
  std::vector<const RateRow*> good;
  for (const RateRow& r : report.rows)
    if (r.ok && r.budget_ok) good.push_back(&r);
  if (good.size() >= 4) good.erase(good.begin());
  else if (good.size() == 3) report.fit_note = "largest eps kept: only 3 rows";

  if (good.size() >= 3) {
    auto points = [&](auto field) {
      std::vector<std::pair<double, double>> pts;
      for (const RateRow* r : good) pts.push_back({r->eps, r->*field});
      return pts;
    };
    try {
      report.slopeL2 = fit_slope(points(&RateRow::errL2_zero_order));
      report.slopeH1 = fit_slope(points(&RateRow::errH1_first_order));
      report.slopeH1_plain = fit_slope(points(&RateRow::errH1_plain));
      report.slopeH1_interior = fit_slope(points(&RateRow::errH1_interior));
      report.has_slopes = true;
    } catch (const Error& e) {
      report.has_slopes = false;
      report.fit_note = std::string("degenerate, errors below floor: ") + e.what();
    }
  } else {
    report.has_slopes = false;
    if (report.fit_note.empty())
      report.fit_note = "degenerate, errors below floor or too few rows";
  }
  return report;
}

void write_csv(const RateReport& report, std::ostream& os) {
  os.precision(12);
  os << "eps,m_fine,errL2_zero_order,errH1_first_order,errH1_plain,"
        "errH1_interior,normH1_ueps,stability,fem_budget,budget_ok,note\n";
  for (const RateRow& r : report.rows) {
    os << r.eps << ',' << r.m_fine << ',' << r.errL2_zero_order << ','
       << r.errH1_first_order << ',' << r.errH1_plain << ',' << r.errH1_interior
       << ',' << r.normH1_ueps << ',' << r.stability << ',' << r.fem_budget << ','
       << (r.budget_ok ? 1 : 0) << ',' << '"' << r.note << '"' << '\n';
  }
  os << "# config_digest," << report.config_digest << '\n';
  os << "# mu_effective," << report.mu_effective << '\n';
  if (report.has_slopes) {
    os << "# slopeL2," << report.slopeL2.slope << ",prefactor,"
       << report.slopeL2.prefactor << ",r2," << report.slopeL2.r_squared << '\n';
    os << "# slopeH1," << report.slopeH1.slope << ",prefactor,"
       << report.slopeH1.prefactor << ",r2," << report.slopeH1.r_squared << '\n';
    os << "# slopeH1_plain," << report.slopeH1_plain.slope << ",r2,"
       << report.slopeH1_plain.r_squared << '\n';
    os << "# slopeH1_interior," << report.slopeH1_interior.slope << ",r2,"
       << report.slopeH1_interior.r_squared << '\n';
  } else {
    os << "# slopes,none," << report.fit_note << '\n';
  }
}

namespace {

struct SvgMapper {
  double x_min, x_max, y_min, y_max;
  double px(double x) const { return 70.0 + (x - x_min) / (x_max - x_min) * 500.0; }
  double py(double y) const { return 420.0 - (y - y_min) / (y_max - y_min) * 360.0; }
};

void svg_series(std::ostream& os, const SvgMapper& map,
                const std::vector<std::pair<double, double>>& pts,
                const SlopeFit* fit, const char* color, const char* label,
                int label_row) {
  for (const auto& [e, v] : pts) {
    os << "<circle cx=\"" << map.px(std::log10(e)) << "\" cy=\""
       << map.py(std::log10(v)) << "\" r=\"4\" fill=\"" << color << "\"/>\n";
  }
  if (fit && !pts.empty()) {
    const double x0 = std::log10(pts.back().first);
    const double x1 = std::log10(pts.front().first);
    // fitted line in log10: y = log10(prefactor) + slope * x
    auto yfit = [&](double x) {
      return std::log10(fit->prefactor) + fit->slope * x;
    };
    os << "<line x1=\"" << map.px(x0) << "\" y1=\"" << map.py(yfit(x0))
       << "\" x2=\"" << map.px(x1) << "\" y2=\"" << map.py(yfit(x1))
       << "\" stroke=\"" << color << "\" stroke-dasharray=\"6 3\"/>\n";
  }
  os << "<text x=\"590\" y=\"" << (70 + 20 * label_row) << "\" fill=\"" << color
     << "\" font-size=\"13\">" << label;
  if (fit) os << " (slope " << fit->slope << ")";
  os << "</text>\n";
}

}  // namespace

void write_svg(const RateReport& report, std::ostream& os) {
  std::vector<std::pair<double, double>> l2, h1, h1p;
  for (const RateRow& r : report.rows) {
    if (!r.ok) continue;
    if (r.errL2_zero_order > 0.0) l2.push_back({r.eps, r.errL2_zero_order});
    if (r.errH1_first_order > 0.0) h1.push_back({r.eps, r.errH1_first_order});
    if (r.errH1_plain > 0.0) h1p.push_back({r.eps, r.errH1_plain});
  }
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  bool first = true;
  auto expand = [&](const std::vector<std::pair<double, double>>& pts) {
    for (const auto& [e, v] : pts) {
      const double x = std::log10(e), y = std::log10(v);
      if (first) {
        x_min = x_max = x;
        y_min = y_max = y;
        first = false;
      } else {
        x_min = std::min(x_min, x);
        x_max = std::max(x_max, x);
        y_min = std::min(y_min, y);
        y_max = std::max(y_max, y);
      }
    }
  };
  expand(l2);
  expand(h1);
  expand(h1p);
  if (first) {  // nothing to plot
    x_min = -2;
    x_max = 0;
    y_min = -6;
    y_max = 0;
  }
  if (x_max - x_min < 1e-9) x_max = x_min + 1.0;
  if (y_max - y_min < 1e-9) y_max = y_min + 1.0;
  const double mx = 0.08 * (x_max - x_min), my = 0.08 * (y_max - y_min);
  SvgMapper map{x_min - mx, x_max + mx, y_min - my, y_max + my};

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"760\" height=\"480\" "
        "viewBox=\"0 0 760 480\">\n";
  os << "<rect width=\"760\" height=\"480\" fill=\"white\"/>\n";
  os << "<line x1=\"70\" y1=\"420\" x2=\"570\" y2=\"420\" stroke=\"black\"/>\n";
  os << "<line x1=\"70\" y1=\"60\" x2=\"70\" y2=\"420\" stroke=\"black\"/>\n";
  os << "<text x=\"290\" y=\"455\" font-size=\"14\">log10(eps)</text>\n";
  os << "<text x=\"18\" y=\"240\" font-size=\"14\" transform=\"rotate(-90 18 "
        "240)\">log10(error)</text>\n";
  svg_series(os, map, l2, report.has_slopes ? &report.slopeL2 : nullptr,
             "#1f6fb4", "L2 zero-order", 0);
  svg_series(os, map, h1, report.has_slopes ? &report.slopeH1 : nullptr,
             "#c24b2a", "H1 first-order", 1);
  svg_series(os, map, h1p, report.has_slopes ? &report.slopeH1_plain : nullptr,
             "#58954c", "H1 plain", 2);
  os << "<text x=\"70\" y=\"40\" font-size=\"13\">digest "
     << report.config_digest << "</text>\n";
  os << "</svg>\n";
}

}  // namespace homog::rates
