#pragma once

#include <cstdint>
#include <vector>

#include "treebandit/engine.hpp"
#include "treebandit/environment.hpp"
#include "treebandit/policy.hpp"

namespace treebandit {

/// Exact node values of a full tree in heap order (same ids as
/// build_full_tree): mu_i is the best leaf mean below i.
struct ValueMap {
  int depth_limit = 0;
  double mu_star = 0.0;
  std::vector<double> mu;
  std::vector<double> gap;
  std::vector<int> depth;
  std::vector<char> optimal;

  [[nodiscard]] std::size_t node_count() const { return mu.size(); }
  [[nodiscard]] bool is_leaf(std::size_t id) const { return depth[id] == depth_limit; }
  /// I_eta: nodes with gap <= eta.
  [[nodiscard]] std::vector<std::size_t> near_optimal_nodes(double eta) const;
  /// J_eta: leaves with gap <= eta.
  [[nodiscard]] std::vector<std::size_t> near_optimal_leaves(double eta) const;
};

ValueMap brute_force_values(const LeafRewardModel& env);

/// Visit envelope N_i for every node; +inf on optimal nodes (unconstrained).
std::vector<double> visit_envelope(const ValueMap& values, const SmoothnessSeq& seq,
                                      double beta);

/// Pseudo-regret bound of the depth-scaled UCT at round n, with
/// beta_n = beta / (2 N n (n+1)).
double uct_regret_bound(int depth_limit, double beta, std::uint64_t n);
/// Same bound given log(1/beta_n) directly.
double uct_regret_bound_at(int depth_limit, double log_inv_beta_n, double n);
/// Constant pseudo-regret bound of Flat UCB (sum over suboptimal leaves).
double flat_regret_bound(const ValueMap& values, double beta);
/// Smooth-tree pseudo-regret bound for exponential smoothness and eta > 0.
double smooth_regret_bound(const ValueMap& values, const SmoothnessSeq& seq, double beta, double eta);

struct FirstHitReport {
  bool hit = false;
  /// Round of the first optimal-leaf visit, or the exhausted budget.
  std::uint64_t rounds = 0;
  int depth_limit = 0;
  BoundKind kind = BoundKind::uct_sqrt;
  /// n_d for d = 0..D: visits of the depth-d node on the optimal branch at
  /// the first hit.
  std::vector<std::uint64_t> visits;
  /// Right-hand side of the recursion at each d = 1..D (index d); entry 0 unused.
  std::vector<double> recursion_rhs;
  std::vector<char> recursion_holds;
  /// 2^{2^{D-1}} / D^{2D(D-1)} as log10, for the square-root sequence.
  double log10_global_lower_bound = 0.0;

  [[nodiscard]] bool all_recursions_hold() const;
};

/// Extracts n_d along the all-action-1 branch from a tree and evaluates the
/// first-hit recursion for `kind`: n_{d-1} >= n_d^2 / D^4 (uct_sqrt) or
/// n_{d-1} >= exp(n_d / (2 D^2)) (uct_log). Other kinds get no recursion.
FirstHitReport first_hit_analysis(const TreeIndex& tree, std::uint64_t round, BoundKind kind);

/// Runs cfg until leaf 0 (the all-action-1 leaf) is first reached or
/// `budget` rounds pass; budget exhaustion is reported as a censored result.
FirstHitReport first_hit_search(RunConfig cfg, std::uint64_t budget);

/// Outcome of watching every bound the engine produces during a run.
struct UpperBoundAudit {
  bool violated = false;
  std::uint64_t first_violation_round = 0;
  NodeId node = kNoNode;
};

/// Runs cfg and reports whether mu_i > B_i ever held for a visited node.
UpperBoundAudit audit_upper_bounds(RunConfig cfg, const ValueMap& values);

/// Nodes with positive gap whose final visit count exceeds `envelope`.
std::vector<std::size_t> envelope_violations(const RunTrace& trace, const ValueMap& values,
                                             const std::vector<double>& envelope);

/// Where a grown tree spends its depth relative to a target point x.
struct GrowthShape {
  int max_depth = 0;
  /// A node at max_depth whose interval contains x, else any node there.
  NodeId deepest = kNoNode;
  bool deepest_contains_x = false;
  /// Deepest node inside a developed side branch: its interval and its
  /// parent's interval both exclude x. Siblings created by expanding a node
  /// above x do not count.
  int max_depth_off_target = 0;
};

GrowthShape growth_shape(const TreeIndex& tree, double x);

}  // namespace treebandit
