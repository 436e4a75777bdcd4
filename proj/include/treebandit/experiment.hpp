#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "treebandit/engine.hpp"
#include "treebandit/growing.hpp"

namespace treebandit {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnvironmentSpec {
  EnvironmentKind kind = EnvironmentKind::bernoulli_function;
  double a = 0.1;
  std::vector<double> means;
  std::filesystem::path table_path;
  InnerNodeReward inner_rule = InnerNodeReward::rollout;
};

struct EmitFlags {
  bool regret_curve = true;
  bool leaf_histogram = false;
  bool tree_dump = false;
  bool theory_bounds = false;
  bool first_hit = false;
};

struct ExperimentSpec {
  BoundKind algorithm = BoundKind::bast;
  double beta = 0.1;
  /// Tree depth D; 0 only for growing_bast on an unbounded function.
  int depth = 10;
  SmoothnessSeq smoothness = SmoothnessSeq::exponential(5.0, 0.5);
  EnvironmentSpec environment;
  /// Rounds for fixed trees, expansion stages for growing trees.
  std::uint64_t rounds = 10000;
  std::uint64_t replications = 1;
  std::uint64_t seed = 1;
  TieRules ties;
  std::filesystem::path output_dir = "out";
  EmitFlags emit;
  /// 0 selects log-spaced curve checkpoints, otherwise every k-th round.
  std::uint64_t curve_stride = 0;
  std::uint64_t first_hit_budget = 10'000'000;
  std::optional<double> eta;
  std::vector<double> sweep_deltas;
  bool sweep_include_flat_ucb = false;
  unsigned threads = 0;
  bool quiet = false;

  /// Seed of replication k: base seed + k.
  [[nodiscard]] std::uint64_t replication_seed(std::uint64_t k) const { return seed + k; }
  void validate() const;
};

/// Parses a JSON document; relative table paths resolve against base_dir.
ExperimentSpec parse_experiment(const nlohmann::json& doc,
                                const std::filesystem::path& base_dir = ".");
ExperimentSpec load_experiment(const std::filesystem::path& file);
nlohmann::json to_json(const ExperimentSpec& spec);

LeafRewardModel make_environment(const ExperimentSpec& spec, std::uint64_t seed);
RunConfig make_run_config(const ExperimentSpec& spec, std::uint64_t replication);
GrowingRunConfig make_growing_config(const ExperimentSpec& spec, std::uint64_t replication);

/// Calls fn(k) for k in [0, count) on up to `threads` workers (0 = all
/// cores). Each call must touch only its own state.
void parallel_for(std::uint64_t count, unsigned threads,
                  const std::function<void(std::uint64_t)>& fn);

struct ReplicationSummary {
  std::uint64_t replication = 0;
  std::uint64_t seed = 0;
  std::uint64_t rounds = 0;
  double regret = 0.0;
  double pseudo_regret = 0.0;
  std::uint64_t suboptimal_rounds = 0;
  [[nodiscard]] double regret_per_round() const { return regret / static_cast<double>(rounds); }
  [[nodiscard]] double pseudo_regret_per_round() const {
    return pseudo_regret / static_cast<double>(rounds);
  }
};

struct MeanStd {
  double mean = 0.0;
  /// Unbiased (M-1) divisor; 0 when M = 1.
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs);

struct ExperimentResult {
  std::vector<ReplicationSummary> replications;
  MeanStd regret_per_round;
  MeanStd pseudo_regret_per_round;
  std::vector<std::filesystem::path> files;
};

/// Runs every replication and writes the requested outputs.
ExperimentResult run_experiment(const ExperimentSpec& spec);

struct SweepRow {
  std::string label;
  double delta;
  MeanStd regret_per_round;
  MeanStd pseudo_regret_per_round;
  std::vector<ReplicationSummary> replications;
};

/// One smooth-tree experiment per delta (exponential smoothness with the
/// configured gamma; "inf" gives the max-of-children bound), optionally plus a
/// Flat UCB row. Writes sweep.csv and sweep_meta.json.
std::vector<SweepRow> delta_sweep(const ExperimentSpec& spec);

std::string format_real(double x);
nlohmann::json tree_to_json(const TreeIndex& tree, bool visited_only);
std::string tree_to_dot(const TreeIndex& tree, bool visited_only);

}  // namespace treebandit
