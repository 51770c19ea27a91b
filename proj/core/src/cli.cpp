#include "homog/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "homog/approx.hpp"
#include "homog/defect.hpp"
#include "homog/rates.hpp"
#include "homog/solver.hpp"
#include "homog/version.hpp"

namespace homog::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

fields::CoefficientField field_or(const json& config, const char* key,
                                  fields::CoefficientField fallback) {
  if (!config.contains(key)) return fallback;
  return io::field_from_json(config.at(key));
}

// Column j of a symmetric matrix field as a vector field (the load A e_j of
// the direction correctors).
fields::CoefficientField matrix_column(const fields::CoefficientField& A, int j) {
  const auto& c = A.components();
  if (A.kind() != fields::Kind::matrix2)
    throw ConfigError("matrix_column requires a matrix field");
  if (j == 1)
    return fields::CoefficientField::vector(c[0], c[1], A.structure(), A.beta());
  if (j == 2)
    return fields::CoefficientField::vector(c[1], c[2], A.structure(), A.beta());
  throw ConfigError("corrector direction must be 1 or 2");
}

void write_json_file(const fs::path& path, json j, const std::string& digest) {
  j["config_digest"] = digest;
  io::write_text_file(path.string(), j.dump(2) + "\n");
}

int cmd_cell(const json& config, const CliOptions& opts, const std::string& digest) {
  io::check_keys(config, {"A", "V", "B", "a0", "mu", "n", "tol"}, "cell config");
  const auto A = io::field_from_json(config.at("A"));
  const auto V = field_or(config, "V", fields::CoefficientField::zero_vector());
  const auto B = field_or(config, "B", fields::CoefficientField::zero_vector());
  const auto a0 = field_or(config, "a0", fields::CoefficientField::zero_scalar());
  const double mu = config.value("mu", 0.0);
  const int n = config.value("n", 256);

  if (opts.dry_run) {
    std::cout << "cell: would solve correctors on a " << n << "x" << n
              << " periodic grid\n";
    return 0;
  }

  fields::require_hypotheses(A);
  if (!V.is_identically_zero()) fields::require_hypotheses(V);
  if (!B.is_identically_zero()) fields::require_hypotheses(B);
  if (!a0.is_identically_zero()) fields::require_hypotheses(a0);

  cell::SolveOptions sopts;
  sopts.tol = config.value("tol", 1e-12);
  sopts.threads = opts.threads;
  std::cout << "cell: solving correctors (n = " << n << ")\n";
  const auto sol = cell::solve_correctors(A, V, cell::PeriodicGrid(n), sopts);
  const auto coeffs = cell::homogenized_coefficients(A, V, B, a0, mu, sol);

  fs::create_directories(opts.out_dir);
  write_json_file(fs::path(opts.out_dir) / "cell_solution.json",
                  io::cell_solution_to_json(sol), digest);
  write_json_file(fs::path(opts.out_dir) / "homogenized.json",
                  io::homogenized_to_json(coeffs), digest);
  std::cout << "cell: A_hat = [[" << coeffs.A_hat.a11 << ", " << coeffs.A_hat.a12
            << "], [" << coeffs.A_hat.a21 << ", " << coeffs.A_hat.a22 << "]]\n";
  return 0;
}

int cmd_solve(const json& config, const CliOptions& opts,
              const std::string& digest) {
  io::check_keys(config, {"A", "V", "B", "a0", "mu", "f", "eps", "m", "exact"},
                 "solve config");
  solver::ProblemSpec spec;
  spec.A = io::field_from_json(config.at("A"));
  spec.V = field_or(config, "V", fields::CoefficientField::zero_vector());
  spec.B = field_or(config, "B", fields::CoefficientField::zero_vector());
  spec.a0 = field_or(config, "a0", fields::CoefficientField::zero_scalar());
  spec.mu = config.value("mu", 0.0);
  spec.f = io::expr_from_json(config.at("f"));
  const double eps = config.at("eps").get<double>();
  const int m = config.at("m").get<int>();

  if (opts.dry_run) {
    std::cout << "solve: would assemble " << (m - 1) * (m - 1)
              << " unknowns at eps = " << eps << "\n";
    return 0;
  }

  std::cout << "solve: eps = " << eps << ", m = " << m << "\n";
  solver::SolveInfo info;
  const auto u = solver::solve_oscillating(spec, eps, m, &info);

  io::write_field_binary(u, opts.out_dir, "solution", digest);
  json rep;
  rep["eps"] = eps;
  rep["m"] = m;
  rep["h1_norm"] = info.h1_norm;
  rep["f_l2_norm"] = info.f_l2_norm;
  rep["stability"] = info.stability;
  rep["h2_surrogate"] = info.h2_surrogate;
  rep["mu_used"] = info.mu_used;
  rep["method"] =
      info.report.method == linalg::LinearSolveReport::Method::cg ? "cg" : "lu";
  rep["iterations"] = info.report.iterations;
  rep["residual_norm"] = info.report.residual_norm;
  rep["version"] = kVersion;
  if (config.contains("exact")) {
    const auto exact = io::expr_from_json(config.at("exact"));
    rep["errL2_vs_exact"] =
        rates::error_L2(u, [&](Vec2 x) { return exact.eval(x); });
  }
  write_json_file(fs::path(opts.out_dir) / "solve_report.json", rep, digest);
  std::cout << "solve: |u|_H1 = " << info.h1_norm << "\n";
  return 0;
}

int cmd_rates(const json& config, const CliOptions& opts,
              const std::string& digest) {
  io::check_keys(config,
                 {"A", "V", "B", "a0", "mu", "f", "eps_list", "cell_n", "m_min",
                  "cells_per_eps", "budget_limit", "cell_tol"},
                 "rates config");
  solver::ProblemSpec spec;
  spec.A = io::field_from_json(config.at("A"));
  spec.V = field_or(config, "V", fields::CoefficientField::zero_vector());
  spec.B = field_or(config, "B", fields::CoefficientField::zero_vector());
  spec.a0 = field_or(config, "a0", fields::CoefficientField::zero_scalar());
  spec.mu = config.value("mu", 0.0);
  spec.f = io::expr_from_json(config.at("f"));

  const auto eps_list = config.at("eps_list").get<std::vector<double>>();
  rates::RatePolicy policy;
  policy.cell_n = config.value("cell_n", policy.cell_n);
  policy.m_min = config.value("m_min", policy.m_min);
  policy.cells_per_eps = config.value("cells_per_eps", policy.cells_per_eps);
  policy.budget_limit = config.value("budget_limit", policy.budget_limit);
  policy.cell_tol = config.value("cell_tol", policy.cell_tol);
  policy.threads = opts.threads;

  if (eps_list.size() < 3)
    throw InsufficientDataError("rate sweep needs >= 3 eps values, got " +
                                std::to_string(eps_list.size()));

  if (opts.dry_run) {
    std::cout << "rates: planned (eps, m_fine) matrix\n";
    for (double e : eps_list)
      std::cout << "  eps = " << e << "  m_fine = " << rates::fine_grid_for(e, policy)
                << "\n";
    return 0;
  }

  std::cout << "rates: sweep over " << eps_list.size() << " eps values\n";
  const auto report = rates::rate_sweep(spec, eps_list, policy, digest);

  fs::create_directories(opts.out_dir);
  {
    std::ostringstream csv;
    rates::write_csv(report, csv);
    io::write_text_file((fs::path(opts.out_dir) / "rates.csv").string(),
                        csv.str());
  }
  {
    std::ostringstream svg;
    rates::write_svg(report, svg);
    io::write_text_file((fs::path(opts.out_dir) / "rates.svg").string(),
                        svg.str());
  }
  write_json_file(fs::path(opts.out_dir) / "rates.json",
                  io::rate_report_to_json(report), digest);

  int ok_rows = 0;
  for (const auto& r : report.rows)
    if (r.ok) ++ok_rows;
  if (ok_rows < 3)
    throw InsufficientDataError("only " + std::to_string(ok_rows) +
                                " rows succeeded; need >= 3");
  if (report.has_slopes)
    std::cout << "rates: slopeL2 = " << report.slopeL2.slope
              << ", slopeH1 = " << report.slopeH1.slope << "\n";
  else
    std::cout << "rates: no slopes (" << report.fit_note << ")\n";
  return 0;
}

int cmd_defect(const json& config, const CliOptions& opts,
               const std::string& digest) {
  io::check_keys(config,
                 {"A", "V", "corrector", "L", "L_check", "n_per_period", "tol"},
                 "defect config");
  const auto A = io::field_from_json(config.at("A"));
  const std::string corrector = config.value("corrector", "v");
  fields::CoefficientField load = fields::CoefficientField::zero_vector();
  if (corrector == "v") {
    if (!config.contains("V"))
      throw ConfigError("defect config requires V when corrector = \"v\"");
    load = io::field_from_json(config.at("V"));
  } else if (corrector == "e1" || corrector == "e2") {
    if (config.contains("V"))
      throw ConfigError("defect config: V must be absent for direction correctors");
    load = matrix_column(A, corrector == "e1" ? 1 : 2);
  } else {
    throw ConfigError("defect corrector must be one of \"v\", \"e1\", \"e2\"");
  }
  const int L = config.value("L", 8);
  const int n_per_period = config.value("n_per_period", 24);

  if (opts.dry_run) {
    std::cout << "defect: would solve a " << 2 * L * n_per_period << "x"
              << 2 * L * n_per_period << " box\n";
    return 0;
  }

  fields::require_hypotheses(A);

  defect::DefectOptions dopts;
  dopts.tol = config.value("tol", 1e-10);

  std::cout << "defect: periodic corrector (n = " << n_per_period << ")\n";
  cell::SolveOptions copts;
  copts.tol = dopts.cell_tol;
  copts.threads = opts.threads;
  const auto per_sol = defect::solve_periodic_part(A, load, n_per_period, copts);

  std::cout << "defect: box solve (L = " << L << ")\n";
  const auto dc =
      defect::solve_defect_part(A, load, per_sol.chi0, L, n_per_period, dopts);
  const double residual = defect::interior_residual(A, load, dc);

  json rep;
  rep["L"] = L;
  rep["n_per_period"] = n_per_period;
  rep["corrector"] = corrector;
  rep["chi00_max_abs"] = dc.chi00_max_abs();
  rep["total_energy"] = dc.total_energy();
  rep["interior_residual"] = residual;
  rep["cg_iterations"] = dc.report.iterations;
  rep["version"] = kVersion;

  if (config.contains("L_check")) {
    const int L2 = config.at("L_check").get<int>();
    std::cout << "defect: self-convergence box (L = " << L2 << ")\n";
    const auto dc2 =
        defect::solve_defect_part(A, load, per_sol.chi0, L2, n_per_period, dopts);
    const int hw = std::min(2, std::min(L, L2));
    const double base = defect::central_h1_norm(dc, hw);
    const double diff = defect::central_h1_diff(dc, dc2, hw);
    rep["self_convergence"] = {{"L_check", L2},
                               {"central_half_width", hw},
                               {"central_h1", base},
                               {"central_h1_change", diff},
                               {"relative_change", base > 0 ? diff / base : 0.0}};
  }

  fs::create_directories(opts.out_dir);
  {
    const auto rows = defect::decay_report(dc);
    std::ostringstream csv;
    csv.precision(12);
    csv << "R,annulus_energy,tail_energy,seminorm_estimate\n";
    for (const auto& r : rows)
      csv << r.R << ',' << r.annulus_energy << ',' << r.tail_energy << ','
          << r.seminorm_estimate << '\n';
    io::write_text_file((fs::path(opts.out_dir) / "decay.csv").string(),
                        csv.str());
  }
  write_json_file(fs::path(opts.out_dir) / "defect.json", rep, digest);
  std::cout << "defect: interior residual = " << residual << "\n";
  return 0;
}

int cmd_meanvalue(const json& config, const CliOptions& opts,
                  const std::string& digest) {
  io::check_keys(config, {"u", "r_max", "levels", "points_per_unit", "cell_n",
                          "tol", "seminorm"},
                 "meanvalue config");
  const auto u = io::field_from_json(config.at("u"));
  const double r_max = config.value("r_max", 64.0);
  const int levels = config.value("levels", 5);
  fields::MeanValueOptions mopts;
  mopts.points_per_unit = config.value("points_per_unit", mopts.points_per_unit);
  mopts.cell_n = config.value("cell_n", mopts.cell_n);
  mopts.tol = config.value("tol", mopts.tol);

  if (opts.dry_run) {
    std::cout << "meanvalue: would average over squares up to R = " << r_max
              << "\n";
    return 0;
  }

  const auto est = fields::mean_value(u, r_max, levels, mopts);
  json rep = io::meanvalue_to_json(est);
  if (config.value("seminorm", false))
    rep["seminorm"] = fields::besicovitch_seminorm(u, r_max, levels, mopts);

  fs::create_directories(opts.out_dir);
  write_json_file(fs::path(opts.out_dir) / "meanvalue.json", rep, digest);
  std::cout << "meanvalue: value = " << est.value
            << " converged = " << (est.converged ? "true" : "false") << "\n";
  return 0;
}

}  // namespace

int run_command(const std::string& command, const json& config,
                const CliOptions& opts) {
  const std::string digest = io::fnv1a_digest(command + ":" + config.dump());
  try {
    if (command == "cell") return cmd_cell(config, opts, digest);
    if (command == "solve") return cmd_solve(config, opts, digest);
    if (command == "rates") return cmd_rates(config, opts, digest);
    if (command == "defect") return cmd_defect(config, opts, digest);
    if (command == "meanvalue") return cmd_meanvalue(config, opts, digest);
    throw ConfigError("unknown command '" + command + "'");
  } catch (const Error& e) {
    json diag;
    diag["error"] = e.what();
    diag["exit_code"] = static_cast<int>(e.exit_code());
    diag["command"] = command;
    std::cerr << diag.dump() << std::endl;
    return static_cast<int>(e.exit_code());
  } catch (const json::exception& e) {
    json diag;
    diag["error"] = std::string("config parse: ") + e.what();
    diag["exit_code"] = 1;
    diag["command"] = command;
    std::cerr << diag.dump() << std::endl;
    return 1;
  }
}

int run_command_file(const std::string& command, const std::string& config_path,
                     const CliOptions& opts) {
  std::ifstream in(config_path);
  if (!in) {
    json diag;
    diag["error"] = "cannot open config file " + config_path;
    diag["exit_code"] = 1;
    std::cerr << diag.dump() << std::endl;
    return 1;
  }
  json config;
  try {
    config = json::parse(in);
  } catch (const json::exception& e) {
    json diag;
    diag["error"] = std::string("config parse: ") + e.what();
    diag["exit_code"] = 1;
    std::cerr << diag.dump() << std::endl;
    return 1;
  }
  return run_command(command, config, opts);
}

}  // namespace homog::cli
