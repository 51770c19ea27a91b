// Batch front-end for the homogenization engine: parses a JSON experiment
// config, dispatches to the library, and writes reports. Exit codes:
// 0 ok, 1 config error, 2 hypothesis violation, 3 solver failure,
// 4 insufficient data.

#include <string>

#include <CLI11.hpp>

#include "homog/cli.hpp"
#include "homog/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"homog: periodic and asymptotic-periodic homogenization engine"};
  app.set_version_flag("--version", std::string(homog::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  homog::cli::CliOptions opts;

  const char* names[] = {"cell", "solve", "rates", "defect", "meanvalue"};
  const char* descs[] = {
      "solve the unit-cell corrector problems and effective coefficients",
      "solve one oscillating Dirichlet problem",
      "run an eps-sweep and fit convergence slopes",
      "solve the asymptotic-periodic (defect) corrector on a truncated box",
      "estimate a mean value / Besicovitch seminorm"};
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], descs[i]);
    sub->add_option("--config", config_path, "JSON experiment config")
        ->required();
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_flag("--dry-run", opts.dry_run, "print the plan, no compute");
    sub->add_option("--threads", opts.threads,
                    "worker bound for independent solves");
  }

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  return homog::cli::run_command_file(command, config_path, opts);
}
