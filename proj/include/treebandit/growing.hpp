#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "treebandit/engine.hpp"

namespace treebandit {

struct GrowingRunConfig {
  /// kind must be growing_bast; depth_limit 0 for an unbounded tree,
  /// otherwise it must equal the environment's depth.
  PolicyConfig policy;
  LeafRewardModel environment;
  std::uint64_t expansions = 1;
  std::uint64_t seed = 0;
  TieRules ties;
};

/// One stage: either an expansion (two children, one reward each) or, at
/// the depth limit of a bounded model, a single terminal sample.
struct StageRecord {
  std::uint64_t stage;
  NodeId node;
  bool expanded;
  double rewards[2];
};

struct GrowingTrace {
  std::uint64_t stages = 0;
  std::uint64_t terminal_samples = 0;
  std::uint64_t samples = 0;
  double mu_star = 0.0;
  double regret = 0.0;
  double pseudo_regret = 0.0;
  std::vector<StageRecord> records;
  /// Number of frontier (childless) nodes per depth.
  std::vector<std::uint64_t> frontier_profile;
  TreeIndex tree;
};

/// Incremental smooth-tree search: descend the current tree by the larger
/// child bound, then expand the frontier node reached.
///
/// Accounting: a new child starts with one visit holding its own reward;
/// the expanded node and all its ancestors gain both rewards and two
/// visits. Hence for every interior node
///   visits = visits(left) + visits(right) + (node is root ? 0 : 1).
class GrowingSearch {
 public:
  explicit GrowingSearch(GrowingRunConfig cfg);

  StageRecord step();
  [[nodiscard]] const TreeIndex& tree() const { return tree_; }
  [[nodiscard]] const GrowingRunConfig& config() const { return cfg_; }
  [[nodiscard]] double recompute_bound(NodeId id) const;
  [[nodiscard]] GrowingTrace trace() const;

 private:
  void refresh(NodeId id);
  void account(double reward, int depth, std::uint64_t position);

  GrowingRunConfig cfg_;
  TreeIndex tree_;
  std::vector<NodeId> path_;
  std::mt19937_64 tie_rng_;
  GrowingTrace trace_;
};

GrowingTrace run_growing(GrowingRunConfig cfg);

/// Visit bound for a suboptimal node of a grown tree at depth d with gap
/// Delta: 6 log(2^{2d+2}/(beta (Delta - delta_d)^2)) / (Delta - delta_d)^2
/// when Delta > delta_d, otherwise the exponential-smoothness branch.
double growing_visit_bound(double gap, int depth, const SmoothnessSeq& seq, double beta);

}  // namespace treebandit
