#include "treebandit/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace treebandit {

namespace {

// 6 log(scale / (beta w)) / w with w = slack^2.
double visit_count_bound(double slack, double scale, double beta) {
  const double w = slack * slack;
  return 6.0 * std::log(scale / (beta * w)) / w;
}

bool interval_contains(const NodeRecord& rec, double x) {
  const double lo = std::ldexp(static_cast<double>(rec.position), -rec.depth);
  const double hi = std::ldexp(static_cast<double>(rec.position + 1), -rec.depth);
  return x >= lo && x <= hi;
}

}  // namespace

std::vector<std::size_t> ValueMap::near_optimal_nodes(double eta) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < gap.size(); ++i)
    if (gap[i] <= eta) out.push_back(i);
  return out;
}

std::vector<std::size_t> ValueMap::near_optimal_leaves(double eta) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < gap.size(); ++i)
    if (is_leaf(i) && gap[i] <= eta) out.push_back(i);
  return out;
}

ValueMap brute_force_values(const LeafRewardModel& env) {
  const int depth = env.depth();
  if (!env.bounded()) throw EnvironmentError("node values need a depth-bounded model");
  const std::size_t leaves = std::size_t{1} << depth;
  const std::size_t count = 2 * leaves - 1;
  ValueMap v;
  v.depth_limit = depth;
  v.mu.resize(count);
  v.depth.resize(count);
  for (std::size_t j = 0; j < leaves; ++j) {
    v.mu[leaves - 1 + j] = env.true_mean(j);
    v.depth[leaves - 1 + j] = depth;
  }
  for (std::size_t i = leaves - 1; i-- > 0;) {
    v.mu[i] = std::max(v.mu[2 * i + 1], v.mu[2 * i + 2]);
    v.depth[i] = v.depth[2 * i + 1] - 1;
  }
  v.mu_star = v.mu[0];
  v.gap.resize(count);
  v.optimal.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    v.gap[i] = v.mu_star - v.mu[i];
    v.optimal[i] = v.mu[i] == v.mu_star ? 1 : 0;
  }
  return v;
}

std::vector<double> visit_envelope(const ValueMap& values, const SmoothnessSeq& seq,
                                      double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw PolicyError("beta must lie in (0,1)");
  const double scale = 4.0 * (std::ldexp(1.0, values.depth_limit + 1) - 1.0);
  const std::size_t count = values.node_count();
  std::vector<double> env(count, kInfinity);
  for (std::size_t i = count; i-- > 0;) {
    if (values.gap[i] <= 0.0) continue;
    if (values.is_leaf(i)) {
      env[i] = visit_count_bound(values.gap[i], scale, beta);
      continue;
    }
    const double children = env[2 * i + 1] + env[2 * i + 2];
    const double delta_d = smoothness_delta(seq, values.depth[i], values.depth_limit);
    if (values.gap[i] > delta_d) {
      env[i] = std::min(children, visit_count_bound(values.gap[i] - delta_d, scale, beta));
    } else {
      env[i] = children;
    }
  }
  return env;
}

double uct_regret_bound_at(int depth_limit, double log_inv_beta_n, double n) {
  const double r = 1.0 + std::sqrt(2.0);
  return r / 2.0 * (std::pow(r, depth_limit) - 1.0) * std::sqrt(log_inv_beta_n * n) +
         (std::pow(3.0, depth_limit) - 1.0) / 2.0;
}

double uct_regret_bound(int depth_limit, double beta, std::uint64_t n) {
  if (!(beta > 0.0 && beta < 1.0)) throw PolicyError("beta must lie in (0,1)");
  if (n == 0) throw PolicyError("round count must be positive");
  const double nodes = std::ldexp(1.0, depth_limit + 1) - 1.0;
  const double nn = static_cast<double>(n);
  return uct_regret_bound_at(depth_limit, std::log(2.0 * nodes * nn * (nn + 1.0) / beta), nn);
}

double flat_regret_bound(const ValueMap& values, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw PolicyError("beta must lie in (0,1)");
  const double scale = std::ldexp(1.0, values.depth_limit + 2);
  double total = 0.0;
  for (std::size_t i = 0; i < values.node_count(); ++i) {
    if (!values.is_leaf(i) || values.gap[i] <= 0.0) continue;
    const double g = values.gap[i];
    total += 6.0 / g * std::log(scale / (g * g * beta));
  }
  return total;
}

double smooth_regret_bound(const ValueMap& values, const SmoothnessSeq& seq, double beta, double eta) {
  if (!(eta > 0.0)) throw PolicyError("eta must be positive");
  if (!(beta > 0.0 && beta < 1.0)) throw PolicyError("beta must lie in (0,1)");
  const double c = seq.exponent_c();
  const double four_n = 4.0 * (std::ldexp(1.0, values.depth_limit + 1) - 1.0);
  double total = 0.0;
  for (auto i : values.near_optimal_leaves(eta)) {
    const double g = values.gap[i];
    if (g <= 0.0) continue;
    total += 6.0 / g * std::log(four_n / (g * g * beta));
  }
  total += 54.0 * std::pow(3.0 * seq.delta, c) / std::pow(eta, 2.0 + c) *
           std::log(four_n / (eta * eta * beta));
  return total;
}

bool FirstHitReport::all_recursions_hold() const {
  return std::all_of(recursion_holds.begin() + (recursion_holds.empty() ? 0 : 1),
                     recursion_holds.end(), [](char ok) { return ok != 0; });
}

FirstHitReport first_hit_analysis(const TreeIndex& tree, std::uint64_t round, BoundKind kind) {
  FirstHitReport report;
  report.hit = true;
  report.rounds = round;
  report.kind = kind;
  const int depth = tree.depth_limit();
  report.depth_limit = depth;
  // The all-action-1 branch is the left spine: heap ids 2^d - 1.
  for (int d = 0; d <= depth; ++d)
    report.visits.push_back(tree.node(static_cast<NodeId>((std::size_t{1} << d) - 1)).visits);

  const double dd = static_cast<double>(depth);
  if (kind == BoundKind::uct_sqrt || kind == BoundKind::uct_log) {
    report.recursion_rhs.assign(static_cast<std::size_t>(depth) + 1, 0.0);
    report.recursion_holds.assign(static_cast<std::size_t>(depth) + 1, 1);
    for (int d = 1; d <= depth; ++d) {
      const double n_d = static_cast<double>(report.visits[static_cast<std::size_t>(d)]);
      const double rhs = kind == BoundKind::uct_sqrt ? n_d * n_d / std::pow(dd, 4.0)
                                                     : std::exp(n_d / (2.0 * dd * dd));
      report.recursion_rhs[static_cast<std::size_t>(d)] = rhs;
      report.recursion_holds[static_cast<std::size_t>(d)] =
          static_cast<double>(report.visits[static_cast<std::size_t>(d - 1)]) >= rhs ? 1 : 0;
    }
  }
  report.log10_global_lower_bound =
      std::ldexp(1.0, depth - 1) * std::log10(2.0) - 2.0 * dd * (dd - 1.0) * std::log10(dd);
  return report;
}

FirstHitReport first_hit_search(RunConfig cfg, std::uint64_t budget) {
  if (cfg.environment.true_mean(0) != cfg.environment.optimal_value().mu_star)
    throw EnvironmentError("first-hit search expects leaf 0 to be optimal");
  const auto kind = cfg.policy.kind;
  cfg.rounds = std::max<std::uint64_t>(budget, 1);
  cfg.record_rounds = false;
  cfg.checkpoints = {cfg.rounds};
  SearchEngine engine(std::move(cfg));
  for (std::uint64_t t = 1; t <= budget; ++t) {
    if (engine.step().leaf == 0) return first_hit_analysis(engine.tree(), t, kind);
  }
  FirstHitReport censored = first_hit_analysis(engine.tree(), budget, kind);
  censored.hit = false;
  return censored;
}

UpperBoundAudit audit_upper_bounds(RunConfig cfg, const ValueMap& values) {
  const auto rounds = cfg.rounds;
  const bool reads_parent = bound_reads_parent(cfg.policy.kind);
  SearchEngine engine(std::move(cfg));
  if (engine.tree().node_count() != values.node_count())
    throw PolicyError("value map does not match the tree");
  UpperBoundAudit audit;
  auto check = [&](NodeId id, std::uint64_t t) {
    if (engine.tree().node(id).visits == 0) return false;
    if (values.mu[id] > engine.bound_of(id)) {
      audit = {true, t, id};
      return true;
    }
    return false;
  };
  for (std::uint64_t t = 1; t <= rounds; ++t) {
    const auto step = engine.step();
    // Cached bounds change only along the path; parent-dependent bounds
    // also change for the siblings of path nodes.
    for (NodeId id : step.path) {
      if (check(id, t)) return audit;
      if (reads_parent && id != kRoot) {
        const NodeId sibling = (id % 2 == 1) ? id + 1 : id - 1;
        if (check(sibling, t)) return audit;
      }
    }
  }
  return audit;
}

std::vector<std::size_t> envelope_violations(const RunTrace& trace, const ValueMap& values,
                                             const std::vector<double>& envelope) {
  if (trace.node_visits.size() != values.node_count() || envelope.size() != values.node_count())
    throw PolicyError("trace, values and envelope sizes differ");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < values.node_count(); ++i) {
    if (values.gap[i] <= 0.0) continue;
    if (static_cast<double>(trace.node_visits[i]) > envelope[i]) out.push_back(i);
  }
  return out;
}

GrowthShape growth_shape(const TreeIndex& tree, double x) {
  GrowthShape shape;
  for (NodeId id = 0; id < tree.node_count(); ++id) {
    const auto& rec = tree.node(id);
    const bool contains = interval_contains(rec, x);
    if (rec.depth > shape.max_depth || (rec.depth == shape.max_depth && contains &&
                                        !shape.deepest_contains_x)) {
      shape.max_depth = rec.depth;
      shape.deepest = id;
      shape.deepest_contains_x = contains;
    }
    if (!contains && rec.parent != kNoNode && !interval_contains(tree.node(rec.parent), x))
      shape.max_depth_off_target = std::max(shape.max_depth_off_target, rec.depth);
  }
  return shape;
}

}  // namespace treebandit
