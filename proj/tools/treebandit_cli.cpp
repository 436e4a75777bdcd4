// Experiment runner: `treebandit run <config.json>` and
// `treebandit sweep <config.json>`.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "treebandit/experiment.hpp"

using namespace treebandit;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> reps;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("config", o.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "Output directory (overrides output_dir)");
  cmd->add_option("--seed", o.seed, "Base seed; replication k uses seed + k");
  cmd->add_option("--reps", o.reps, "Number of replications")->check(CLI::PositiveNumber);
  cmd->add_flag("--quiet", o.quiet, "Only report errors");
}

ExperimentSpec load(const Overrides& o) {
  ExperimentSpec spec = load_experiment(o.config);
  if (o.out) spec.output_dir = *o.out;
  if (o.seed) spec.seed = *o.seed;
  if (o.reps) spec.replications = *o.reps;
  spec.quiet = spec.quiet || o.quiet;
  spec.validate();
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bandit algorithms for tree search: experiment runner"};
  app.require_subcommand(1);
  Overrides run_opts, sweep_opts;
  auto* run_cmd = app.add_subcommand("run", "Run replications of one configuration");
  add_common(run_cmd, run_opts);
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the smooth-tree algorithm over a delta grid");
  add_common(sweep_cmd, sweep_opts);
  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const auto spec = load(run_opts);
      const auto result = run_experiment(spec);
      if (!spec.quiet) {
        for (const auto& r : result.replications)
          std::printf("rep %llu seed %llu: R_n/n = %s  barR_n/n = %s\n",
                      static_cast<unsigned long long>(r.replication),
                      static_cast<unsigned long long>(r.seed), format_real(r.regret_per_round()).c_str(),
                      format_real(r.pseudo_regret_per_round()).c_str());
        std::printf("mean R_n/n = %s (std %s over %zu replications)\n",
                    format_real(result.regret_per_round.mean).c_str(),
                    format_real(result.regret_per_round.std).c_str(), result.replications.size());
        std::printf("wrote %zu files to %s\n", result.files.size(), spec.output_dir.string().c_str());
      }
    } else {
      const auto spec = load(sweep_opts);
      const auto rows = delta_sweep(spec);
      if (!spec.quiet) {
        std::printf("%-9s %-8s %-22s %s\n", "algorithm", "delta", "mean R_n/n", "std");
        for (const auto& row : rows)
          std::printf("%-9s %-8s %-22s %s\n", row.label.c_str(), format_real(row.delta).c_str(),
                      format_real(row.regret_per_round.mean).c_str(),
                      format_real(row.regret_per_round.std).c_str());
        std::printf("wrote %s\n", (spec.output_dir / "sweep.csv").string().c_str());
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
