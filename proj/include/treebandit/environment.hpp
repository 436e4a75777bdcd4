#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace treebandit {

class EnvironmentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// f(x) = max(3.6 x (1 - x), 1 - |1 - a - x| / a).
double f_eval(double x, double a);

/// Deterministic reward of the adversarial tree: taking `action` (1 or 2) at
/// the depth-d node of the all-action-1 branch. Action 2 leads to a subtree
/// whose leaves all pay (D - d - 1) / D; action 1 at depth D-1 pays 1.
double bad_case_reward(int depth_of_parent, int action, int depth);

enum class EnvironmentKind { bernoulli_function, bad_case, table };

/// How a depth-bounded table or bad-case model rewards a node above its
/// leaves (growing trees only).
enum class InnerNodeReward {
  rollout,      // reward of a uniformly drawn leaf below the node
  subtree_max,  // Bernoulli with the best leaf mean below the node
};

struct OptimalValue {
  double mu_star;
  std::vector<std::uint64_t> leaves;
};

/// Leaf reward model plus its ground-truth oracle. Owns its random stream;
/// one instance per run.
class LeafRewardModel {
 public:
  /// Noisy function: leaf j pays Bernoulli(f(y_j)). depth = 0 leaves the
  /// model unbounded (node-level sampling only).
  static LeafRewardModel bernoulli_function(double a, int depth, std::uint64_t seed);
  static LeafRewardModel bad_case(int depth, std::uint64_t seed = 0);
  /// Bernoulli leaves with the given means; size must be a power of two >= 2.
  static LeafRewardModel table(std::vector<double> means, std::uint64_t seed);
  static LeafRewardModel table_from_json(const std::filesystem::path& file, std::uint64_t seed);

  [[nodiscard]] EnvironmentKind kind() const { return kind_; }
  [[nodiscard]] int depth() const { return depth_; }
  [[nodiscard]] bool bounded() const { return depth_ > 0; }
  [[nodiscard]] double a() const { return a_; }
  [[nodiscard]] std::uint64_t leaf_count() const;

  [[nodiscard]] double true_mean(std::uint64_t leaf) const;
  [[nodiscard]] OptimalValue optimal_value() const;
  double sample_reward(std::uint64_t leaf);

  /// Expected reward of a node at (depth, position); equals true_mean at
  /// the leaf depth of a bounded model.
  [[nodiscard]] double node_mean(int depth, std::uint64_t position) const;
  double sample_node(int depth, std::uint64_t position);
  /// Best achievable expected reward anywhere in the model.
  [[nodiscard]] double supremum() const;

  void set_inner_rule(InnerNodeReward rule) { inner_rule_ = rule; }
  [[nodiscard]] InnerNodeReward inner_rule() const { return inner_rule_; }
  void reseed(std::uint64_t seed) { rng_.seed(seed); }

 private:
  LeafRewardModel(EnvironmentKind kind, int depth, std::uint64_t seed);
  void check_leaf(std::uint64_t leaf) const;
  void check_node(int depth, std::uint64_t position) const;
  bool bernoulli(double p);
  double uniform01();

  EnvironmentKind kind_;
  int depth_;
  double a_ = 0.0;
  std::vector<double> means_;
  InnerNodeReward inner_rule_ = InnerNodeReward::rollout;
  std::mt19937_64 rng_;
};

std::string to_string(EnvironmentKind kind);

}  // namespace treebandit
