#include "treebandit/engine.hpp"

#include <algorithm>
#include <cmath>

namespace treebandit {

std::string to_string(TieBreak rule) {
  switch (rule) {
    case TieBreak::left_first: return "left_first";
    case TieBreak::right_first: return "right_first";
    case TieBreak::random: return "random";
  }
  return "unknown";
}

TieBreak parse_tie_break(const std::string& name) {
  for (auto r : {TieBreak::left_first, TieBreak::right_first, TieBreak::random})
    if (to_string(r) == name) return r;
  throw PolicyError("unknown tie_break '" + name + "' (expected left_first, right_first, random)");
}

std::string to_string(FirstVisitOrder order) {
  return order == FirstVisitOrder::action1_first ? "action1_first" : "action2_first";
}

FirstVisitOrder parse_first_visit_order(const std::string& name) {
  if (name == "action1_first") return FirstVisitOrder::action1_first;
  if (name == "action2_first") return FirstVisitOrder::action2_first;
  throw PolicyError("unknown first_visit_order '" + name +
                    "' (expected action1_first, action2_first)");
}

std::uint64_t GapSum::quantize(double gap) {
  if (!(gap >= 0.0 && gap <= 1.0)) throw PolicyError("gap outside [0,1]");
  return static_cast<std::uint64_t>(std::llround(std::ldexp(gap, 63)));
}

double GapSum::value() const {
  // Split to keep the conversion exact for the high word.
  const auto hi = static_cast<std::uint64_t>(value_ >> 64);
  const auto lo = static_cast<std::uint64_t>(value_);
  return std::ldexp(static_cast<double>(hi), 1) +
         std::ldexp(static_cast<double>(lo), -63);
}

std::vector<std::uint64_t> log_spaced_checkpoints(std::uint64_t rounds) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t scale = 1; scale <= rounds; scale *= 10) {
    for (std::uint64_t k = 1; k <= 9; ++k) {
      const std::uint64_t t = k * scale;
      if (t > rounds) break;
      out.push_back(t);
    }
    if (scale > rounds / 10) break;
  }
  if (out.empty() || out.back() != rounds) out.push_back(rounds);
  return out;
}

SearchEngine::SearchEngine(RunConfig cfg)
    : cfg_(std::move(cfg)),
      tree_(build_full_tree(cfg_.policy.depth_limit)),
      cached_(!bound_reads_parent(cfg_.policy.kind)),
      tie_rng_(cfg_.seed ^ 0x9E3779B97F4A7C15ULL) {
  cfg_.policy.validate();
  if (cfg_.policy.kind == BoundKind::growing_bast)
    throw PolicyError("growing_bast runs on a grown tree, not the fixed-tree engine");
  if (cfg_.rounds < 1) throw PolicyError("rounds must be at least 1");
  if (!cfg_.environment.bounded() || cfg_.environment.depth() != cfg_.policy.depth_limit)
    throw PolicyError("environment depth " + std::to_string(cfg_.environment.depth()) +
                      " does not match tree depth " + std::to_string(cfg_.policy.depth_limit));
  cfg_.environment.reseed(cfg_.seed);

  const auto leaves = tree_.full_leaf_count();
  const auto optimum = cfg_.environment.optimal_value();
  leaf_means_.resize(leaves);
  leaf_gaps_.resize(leaves);
  leaf_gap_values_.resize(leaves);
  leaf_optimal_.assign(leaves, 0);
  for (std::uint64_t j = 0; j < leaves; ++j) {
    leaf_means_[j] = cfg_.environment.true_mean(j);
    leaf_gap_values_[j] = optimum.mu_star - leaf_means_[j];
    leaf_gaps_[j] = GapSum::quantize(leaf_gap_values_[j]);
  }
  for (auto j : optimum.leaves) leaf_optimal_[j] = 1;
  trace_.mu_star = optimum.mu_star;
  trace_.optimal_leaves = optimum.leaves;

  checkpoints_ = cfg_.checkpoints.empty() ? log_spaced_checkpoints(cfg_.rounds) : cfg_.checkpoints;
  std::sort(checkpoints_.begin(), checkpoints_.end());
  checkpoints_.erase(std::unique(checkpoints_.begin(), checkpoints_.end()), checkpoints_.end());
  path_.resize(static_cast<std::size_t>(cfg_.policy.depth_limit) + 1);
}

NodeStats SearchEngine::stats_of(NodeId id) const {
  const auto& rec = tree_.node(id);
  NodeStats s;
  s.mean = rec.mean();
  s.visits = rec.visits;
  s.parent_visits = rec.parent == kNoNode ? 0 : tree_.node(rec.parent).visits;
  s.depth = rec.depth;
  if (rec.has_children())
    s.child_bounds = {tree_.node(rec.first_child).cached_bound,
                      tree_.node(rec.first_child + 1).cached_bound};
  return s;
}

double SearchEngine::recompute_bound(NodeId id) const { return compute_bound(stats_of(id), cfg_.policy); }

double SearchEngine::bound_of(NodeId id) const {
  return cached_ ? tree_.node(id).cached_bound : recompute_bound(id);
}

NodeId SearchEngine::choose_child(NodeId parent) {
  const NodeId left = tree_.node(parent).first_child;
  const NodeId right = left + 1;
  if (tree_.node(left).visits == 0 && tree_.node(right).visits == 0)
    return cfg_.ties.first_visit_order == FirstVisitOrder::action1_first ? left : right;
  const double b_left = bound_of(left);
  const double b_right = bound_of(right);
  if (b_left > b_right) return left;
  if (b_right > b_left) return right;
  switch (cfg_.ties.tie_break) {
    case TieBreak::left_first: return left;
    case TieBreak::right_first: return right;
    case TieBreak::random: return (tie_rng_() >> 63) != 0 ? right : left;
  }
  return left;
}

SearchEngine::Step SearchEngine::step() {
  const int depth = cfg_.policy.depth_limit;
  NodeId node = kRoot;
  path_[0] = node;
  for (int d = 1; d <= depth; ++d) {
    node = choose_child(node);
    path_[static_cast<std::size_t>(d)] = node;
  }
  const std::uint64_t leaf = tree_.node(node).position;
  const double reward = cfg_.environment.sample_reward(leaf);
  tree_.record_visit(path_, reward);

  if (cached_) {
    for (auto it = path_.rbegin(); it != path_.rend(); ++it) {
      auto& rec = tree_.node(*it);
      rec.cached_bound = recompute_bound(*it);
      rec.bound_stale = false;
    }
  } else {
    for (NodeId id : path_) tree_.node(id).bound_stale = false;
  }

  const std::uint64_t t = ++trace_.rounds;
  trace_.pseudo_regret.add(leaf_gaps_[leaf]);
  if (!leaf_optimal_[leaf]) {
    ++trace_.suboptimal_rounds;
    trace_.regret += trace_.mu_star - reward;
  }
  if (cfg_.record_rounds) trace_.records.push_back({t, leaf, reward, leaf_gap_values_[leaf]});
  while (next_checkpoint_ < checkpoints_.size() && checkpoints_[next_checkpoint_] < t)
    ++next_checkpoint_;
  if (next_checkpoint_ < checkpoints_.size() && checkpoints_[next_checkpoint_] == t) {
    trace_.checkpoints.push_back({t, leaf, reward, trace_.regret, trace_.pseudo_regret.value()});
    ++next_checkpoint_;
  }
  return {path_, leaf, reward};
}

RunTrace SearchEngine::trace() const {
  RunTrace out = trace_;
  const auto leaves = tree_.full_leaf_count();
  out.leaf_visits.resize(leaves);
  for (std::uint64_t j = 0; j < leaves; ++j) out.leaf_visits[j] = tree_.node(tree_.full_leaf_id(j)).visits;
  out.node_visits.reserve(tree_.node_count());
  for (const auto& rec : tree_.nodes()) out.node_visits.push_back(rec.visits);
  return out;
}

RunTrace run(RunConfig cfg) {
  const auto rounds = cfg.rounds;
  SearchEngine engine(std::move(cfg));
  for (std::uint64_t t = 0; t < rounds; ++t) engine.step();
  return engine.trace();
}

double pseudo_regret_gap_bound(const RunTrace& trace, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw PolicyError("beta must lie in (0,1)");
  return std::sqrt(static_cast<double>(trace.suboptimal_rounds) * std::log(2.0 / beta) / 2.0);
}

}  // namespace treebandit
