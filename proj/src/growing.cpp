#include "treebandit/growing.hpp"

#include <algorithm>
#include <cmath>

namespace treebandit {

GrowingSearch::GrowingSearch(GrowingRunConfig cfg)
    : cfg_(std::move(cfg)),
      tree_(cfg_.policy.depth_limit),
      tie_rng_(cfg_.seed ^ 0x9E3779B97F4A7C15ULL) {
  if (cfg_.policy.kind != BoundKind::growing_bast)
    throw PolicyError("growing search requires the growing_bast policy");
  cfg_.policy.validate();
  if (cfg_.expansions < 1) throw PolicyError("expansions must be at least 1");
  if (cfg_.policy.depth_limit != (cfg_.environment.bounded() ? cfg_.environment.depth() : 0))
    throw PolicyError("growing tree depth limit must match the environment depth (0 if unbounded)");
  cfg_.environment.reseed(cfg_.seed);
  trace_.mu_star = cfg_.environment.supremum();
}

double GrowingSearch::recompute_bound(NodeId id) const {
  const auto& rec = tree_.node(id);
  NodeStats s;
  s.mean = rec.mean();
  s.visits = rec.visits;
  s.depth = rec.depth;
  if (rec.has_children())
    s.child_bounds = {tree_.node(rec.first_child).cached_bound,
                      tree_.node(rec.first_child + 1).cached_bound};
  return bound_growing_bast(s, cfg_.policy);
}

void GrowingSearch::refresh(NodeId id) {
  auto& rec = tree_.node(id);
  rec.cached_bound = recompute_bound(id);
  rec.bound_stale = false;
}

void GrowingSearch::account(double reward, int depth, std::uint64_t position) {
  ++trace_.samples;
  const double gap = trace_.mu_star - cfg_.environment.node_mean(depth, position);
  trace_.pseudo_regret += gap;
  trace_.regret += trace_.mu_star - reward;
}

StageRecord GrowingSearch::step() {
  path_.clear();
  NodeId node = kRoot;
  path_.push_back(node);
  while (tree_.node(node).has_children()) {
    const NodeId left = tree_.node(node).first_child;
    const NodeId right = left + 1;
    const double b_left = tree_.node(left).cached_bound;
    const double b_right = tree_.node(right).cached_bound;
    if (b_left > b_right) {
      node = left;
    } else if (b_right > b_left) {
      node = right;
    } else {
      switch (cfg_.ties.tie_break) {
        case TieBreak::left_first: node = left; break;
        case TieBreak::right_first: node = right; break;
        case TieBreak::random: node = (tie_rng_() >> 63) != 0 ? right : left; break;
      }
    }
    path_.push_back(node);
  }

  StageRecord record{++trace_.stages, node, false, {0.0, 0.0}};
  const int depth = tree_.node(node).depth;
  const bool terminal = cfg_.policy.depth_limit > 0 && depth >= cfg_.policy.depth_limit;
  if (terminal) {
    const auto position = tree_.node(node).position;
    const double reward = cfg_.environment.sample_node(depth, position);
    tree_.record_visit(path_, reward);
    account(reward, depth, position);
    record.rewards[0] = reward;
    ++trace_.terminal_samples;
  } else {
    const auto kids = tree_.expand(node);
    double sum = 0.0;
    for (int k = 0; k < 2; ++k) {
      auto& child = tree_.node(kids[k]);
      const double reward = cfg_.environment.sample_node(child.depth, child.position);
      child.visits = 1;
      child.reward_sum = reward;
      account(reward, child.depth, child.position);
      record.rewards[k] = reward;
      sum += reward;
      refresh(kids[k]);
    }
    tree_.add_to_path(path_, 2, sum);
    record.expanded = true;
  }
  for (auto it = path_.rbegin(); it != path_.rend(); ++it) refresh(*it);
  trace_.records.push_back(record);
  return record;
}

GrowingTrace GrowingSearch::trace() const {
  GrowingTrace out = trace_;
  out.tree = tree_;
  for (const auto& rec : tree_.nodes()) {
    if (rec.has_children()) continue;
    const auto d = static_cast<std::size_t>(rec.depth);
    if (out.frontier_profile.size() <= d) out.frontier_profile.resize(d + 1, 0);
    ++out.frontier_profile[d];
  }
  return out;
}

GrowingTrace run_growing(GrowingRunConfig cfg) {
  const auto stages = cfg.expansions;
  GrowingSearch search(std::move(cfg));
  for (std::uint64_t s = 0; s < stages; ++s) search.step();
  return search.trace();
}

double growing_visit_bound(double gap, int depth, const SmoothnessSeq& seq, double beta) {
  if (!(gap > 0.0)) throw PolicyError("visit bound needs a positive gap");
  if (!(beta > 0.0 && beta < 1.0)) throw PolicyError("beta must lie in (0,1)");
  if (depth < 0) throw PolicyError("negative depth");
  const double delta_d = smoothness_delta(seq, depth, 0);
  if (gap > delta_d) {
    const double slack = gap - delta_d;
    const double w = slack * slack;
    return 6.0 * std::log(std::ldexp(1.0, 2 * depth + 2) / (beta * w)) / w;
  }
  const double c = seq.exponent_c();
  const double two_c = 2.0 + c;
  return 1.5 * std::pow(seq.delta / c, c) * std::pow(two_c / gap, c + 2.0) *
         std::log(std::ldexp(1.0, 2 * depth) * two_c * two_c / (beta * gap * gap)) *
         std::ldexp(1.0, -depth);
}

}  // namespace treebandit
