#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "treebandit/environment.hpp"
#include "treebandit/policy.hpp"
#include "treebandit/tree.hpp"

namespace treebandit {

enum class TieBreak { left_first, right_first, random };
enum class FirstVisitOrder { action1_first, action2_first };

std::string to_string(TieBreak rule);
TieBreak parse_tie_break(const std::string& name);
std::string to_string(FirstVisitOrder order);
FirstVisitOrder parse_first_visit_order(const std::string& name);

struct TieRules {
  TieBreak tie_break = TieBreak::left_first;
  FirstVisitOrder first_visit_order = FirstVisitOrder::action1_first;
};

/// Exact accumulator for sums of gaps in [0,1]. Each gap is rounded once to
/// a multiple of 2^-63, after which every sum is integer arithmetic and
/// independent of summation order.
class GapSum {
 public:
  static std::uint64_t quantize(double gap);
  void add(std::uint64_t quantized, std::uint64_t times = 1) {
    value_ += static_cast<unsigned __int128>(quantized) * times;
  }
  [[nodiscard]] double value() const;
  friend bool operator==(const GapSum&, const GapSum&) = default;

 private:
  unsigned __int128 value_ = 0;
};

struct RunConfig {
  PolicyConfig policy;
  LeafRewardModel environment;
  std::uint64_t rounds = 1;
  std::uint64_t seed = 0;
  TieRules ties;
  /// Keep one record per round (memory grows with rounds).
  bool record_rounds = false;
  /// Rounds at which cumulative values are captured. Empty selects
  /// log-spaced checkpoints (k * 10^e, k = 1..9) plus the final round.
  std::vector<std::uint64_t> checkpoints;
};

struct RoundRecord {
  std::uint64_t t;
  std::uint64_t leaf;
  double reward;
  double gap;
};

struct Checkpoint {
  std::uint64_t t;
  std::uint64_t leaf;
  double reward;
  double regret;
  double pseudo_regret;
};

struct RunTrace {
  std::uint64_t rounds = 0;
  double mu_star = 0.0;
  std::vector<std::uint64_t> optimal_leaves;
  std::vector<RoundRecord> records;
  std::vector<Checkpoint> checkpoints;
  /// R_n: shortfall against mu* over the rounds that left the optimal set.
  double regret = 0.0;
  /// bar R_n = sum_t Delta_{I_t}.
  GapSum pseudo_regret;
  std::uint64_t suboptimal_rounds = 0;
  std::vector<std::uint64_t> leaf_visits;
  std::vector<std::uint64_t> node_visits;
};

std::vector<std::uint64_t> log_spaced_checkpoints(std::uint64_t rounds);

/// Runs trajectories on a full tree: descend by the larger child bound,
/// sample the leaf, back up visit statistics and the cached bounds of the
/// path.
class SearchEngine {
 public:
  explicit SearchEngine(RunConfig cfg);

  struct Step {
    std::span<const NodeId> path;
    std::uint64_t leaf;
    double reward;
  };

  Step step();
  [[nodiscard]] std::uint64_t rounds_done() const { return trace_.rounds; }
  [[nodiscard]] const TreeIndex& tree() const { return tree_; }
  [[nodiscard]] const RunConfig& config() const { return cfg_; }
  [[nodiscard]] double leaf_mean(std::uint64_t leaf) const { return leaf_means_[leaf]; }
  [[nodiscard]] bool leaf_optimal(std::uint64_t leaf) const { return leaf_optimal_[leaf] != 0; }

  /// The bound the engine uses for `id` when comparing it with its sibling.
  [[nodiscard]] double bound_of(NodeId id) const;
  /// Pure recomputation of the bound of `id` from current statistics.
  [[nodiscard]] double recompute_bound(NodeId id) const;

  /// Trace so far, with leaf and node visit counts filled in.
  [[nodiscard]] RunTrace trace() const;

 private:
  [[nodiscard]] NodeStats stats_of(NodeId id) const;
  NodeId choose_child(NodeId parent);

  RunConfig cfg_;
  TreeIndex tree_;
  bool cached_;
  std::vector<double> leaf_means_;
  std::vector<std::uint64_t> leaf_gaps_;
  std::vector<double> leaf_gap_values_;
  std::vector<char> leaf_optimal_;
  std::vector<NodeId> path_;
  std::vector<std::uint64_t> checkpoints_;
  std::size_t next_checkpoint_ = 0;
  std::mt19937_64 tie_rng_;
  RunTrace trace_;
};

/// Runs cfg.rounds trajectories.
RunTrace run(RunConfig cfg);

/// sqrt(|Sub(n)| log(2/beta) / 2): deviation allowed between R_n and bar R_n.
double pseudo_regret_gap_bound(const RunTrace& trace, double beta);

}  // namespace treebandit
