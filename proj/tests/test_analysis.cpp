#include <doctest.h>

#include <cmath>

#include "treebandit/analysis.hpp"

using namespace treebandit;

namespace {

RunConfig bad_case_config(BoundKind kind, int depth) {
  RunConfig cfg{.policy = {}, .environment = LeafRewardModel::bad_case(depth)};
  cfg.policy.kind = kind;
  cfg.policy.beta = 0.1;
  cfg.policy.depth_limit = depth;
  cfg.ties.first_visit_order = FirstVisitOrder::action2_first;
  return cfg;
}

}  // namespace

TEST_CASE("brute force values") {
  const auto v = brute_force_values(LeafRewardModel::table({0.2, 0.8}, 1));
  CHECK(v.mu[0] == 0.8);
  CHECK(v.gap[1] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(v.optimal[2]);
  CHECK_FALSE(v.optimal[1]);

  const auto bad = brute_force_values(LeafRewardModel::bad_case(3));
  CHECK(bad.mu_star == 1.0);
  CHECK(bad.mu[2] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  const auto env = LeafRewardModel::bernoulli_function(0.1, 10, 1);
  const auto f = brute_force_values(env);
  CHECK(f.mu_star == env.optimal_value().mu_star);
  const auto opt = f.near_optimal_leaves(0.0);
  REQUIRE(opt.size() == 1);
  CHECK(opt[0] - 1023 == 921);
  for (std::size_t i = 0; i + 1 < f.node_count() / 2; ++i) {
    CHECK(f.mu[i] == std::max(f.mu[2 * i + 1], f.mu[2 * i + 2]));
    CHECK(f.gap[i] >= 0.0);
  }
  CHECK(f.near_optimal_nodes(0.0).size() == 11);
}

TEST_CASE("visit envelope") {
  const auto seq = SmoothnessSeq::exponential(0.01, 0.5);
  const auto v = brute_force_values(LeafRewardModel::table({1.0, 0.5, 0.3, 0.2}, 1));
  const auto env = visit_envelope(v, seq, 0.1);
  CHECK(env[4] == doctest::Approx(168.50601514293937).epsilon(1e-12));
  CHECK(std::isinf(env[0]));
  CHECK(std::isinf(env[1]));
  CHECK(std::isinf(env[3]));
  // Node 2 (gap 0.7, delta_1 = 0.005): its direct term beats the children.
  const double w = (0.7 - 0.005) * (0.7 - 0.005);
  const double direct = 6.0 * std::log(28.0 / (0.1 * w)) / w;
  CHECK(direct < env[5] + env[6]);
  CHECK(env[2] == doctest::Approx(direct).epsilon(1e-12));

  // Gap not above delta_d: the recursion branch, exactly.
  const auto loose = visit_envelope(v, SmoothnessSeq::exponential(2.0, 0.5), 0.1);
  CHECK(loose[2] == loose[5] + loose[6]);

  // Monotonicity in beta and delta.
  const auto tighter = visit_envelope(v, seq, 0.01);
  const auto smoother = visit_envelope(v, SmoothnessSeq::exponential(0.3, 0.5), 0.1);
  for (std::size_t i = 0; i < v.node_count(); ++i) {
    if (std::isinf(env[i])) continue;
    CHECK(tighter[i] > env[i]);
    CHECK(smoother[i] >= env[i]);
  }
}

TEST_CASE("regret bound evaluators") {
  CHECK(uct_regret_bound_at(1, 1.0, 1.0) == doctest::Approx(2.7071067811865475).epsilon(1e-13));
  const auto one = brute_force_values(LeafRewardModel::table({1.0, 0.0}, 1));
  CHECK(flat_regret_bound(one, 0.5) == doctest::Approx(16.635532333438687).epsilon(1e-13));

  const auto v = brute_force_values(LeafRewardModel::table({0.9, 0.5, 0.7, 0.2}, 1));
  const auto seq = SmoothnessSeq::exponential(1.0, 0.5);
  double first = 0.0;
  for (std::size_t i = 3; i < 7; ++i) {
    const double g = v.gap[i];
    if (g > 0.0) first += 6.0 / g * std::log(4.0 * 7.0 / (g * g * 0.1));
  }
  const double eta = 1.0;
  const double tail = 54.0 * std::pow(3.0, 1.0) / std::pow(eta, 3.0) * std::log(28.0 / 0.1);
  CHECK(smooth_regret_bound(v, seq, 0.1, eta) == doctest::Approx(first + tail).epsilon(1e-12));
  CHECK_THROWS_AS(smooth_regret_bound(v, seq, 0.1, 0.0), PolicyError);
  CHECK(uct_regret_bound(4, 0.1, 1000) < uct_regret_bound(4, 0.1, 100000));
}

TEST_CASE("first hit on the adversarial tree") {
  const auto sqrt4 = first_hit_search(bad_case_config(BoundKind::uct_sqrt, 4), 100000);
  REQUIRE(sqrt4.hit);
  // Reference values from an independent simulation.
  CHECK(sqrt4.rounds == 43);
  CHECK(sqrt4.visits[4] == 1);
  CHECK(sqrt4.visits[3] == 2);
  CHECK(sqrt4.all_recursions_hold());

  const auto log3 = first_hit_search(bad_case_config(BoundKind::uct_log, 3), 100000);
  REQUIRE(log3.hit);
  CHECK(log3.rounds == 12);
  CHECK(log3.all_recursions_hold());

  const auto modified = first_hit_search(bad_case_config(BoundKind::modified_uct, 4), 100000);
  REQUIRE(modified.hit);
  CHECK(modified.rounds == 16);

  const auto censored = first_hit_search(bad_case_config(BoundKind::uct_sqrt, 6), 10);
  CHECK_FALSE(censored.hit);
  CHECK(censored.rounds == 10);
  CHECK(censored.visits[6] == 0);
}

TEST_CASE("upper bound audit") {
  RunConfig cfg{.policy = {}, .environment = LeafRewardModel::table({0.3, 0.6, 0.5, 0.1}, 1)};
  cfg.policy.kind = BoundKind::flat_ucb;
  cfg.policy.beta = 0.1;
  cfg.policy.depth_limit = 2;
  cfg.rounds = 3000;
  cfg.seed = 4;
  auto values = brute_force_values(cfg.environment);
  const auto clean = audit_upper_bounds(cfg, values);
  CHECK_FALSE(clean.violated);

  // A value above any bound is caught on the first round.
  values.mu.assign(values.node_count(), 100.0);
  const auto caught = audit_upper_bounds(cfg, values);
  CHECK(caught.violated);
  CHECK(caught.first_violation_round == 1);
}

TEST_CASE("measured visits stay under the envelope") {
  const std::vector<double> means = {0.1, 0.3, 0.2, 0.4, 0.5, 0.45, 0.9, 0.7,
                                     0.6, 0.8, 0.35, 0.25, 0.55, 0.65, 0.15, 0.05};
  const auto seq = SmoothnessSeq::exponential(0.2, 0.5);
  const auto values = brute_force_values(LeafRewardModel::table(means, 0));
  const auto envelope = visit_envelope(values, seq, 0.1);
  int violating = 0;
  const int runs = 20;
  for (int r = 0; r < runs; ++r) {
    RunConfig cfg{.policy = {}, .environment = LeafRewardModel::table(means, 0)};
    cfg.policy = {BoundKind::bast, 0.1, 4, seq};
    cfg.rounds = 20000;
    cfg.seed = 1000 + r;
    const auto trace = run(cfg);
    if (!envelope_violations(trace, values, envelope).empty()) ++violating;
  }
  CHECK(violating <= runs / 10);
}

TEST_CASE("growth shape") {
  TreeIndex tree(0);
  tree.expand(kRoot);      // 1 = [0, .5], 2 = [.5, 1]
  tree.expand(2);          // 3 = [.5, .75], 4 = [.75, 1]
  tree.expand(4);          // 5 = [.75, .875], 6 = [.875, 1]
  const auto at = growth_shape(tree, 0.9);
  CHECK(at.max_depth == 3);
  CHECK(at.deepest == 6);
  CHECK(at.deepest_contains_x);
  CHECK(at.max_depth_off_target == 0);

  tree.expand(1);          // 7, 8 below [0, .5]
  const auto side = growth_shape(tree, 0.9);
  CHECK(side.max_depth_off_target == 2);
  const auto away = growth_shape(tree, 0.1);
  CHECK(away.max_depth == 3);
  CHECK_FALSE(away.deepest_contains_x);
}
