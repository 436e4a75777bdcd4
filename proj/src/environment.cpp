#include "treebandit/environment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "treebandit/tree.hpp"

namespace treebandit {

double f_eval(double x, double a) {
  if (!(a > 0.0)) throw EnvironmentError("f: a must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw EnvironmentError("f: x outside [0,1]");
  const double bump = 3.6 * x * (1.0 - x);
  const double spike = 1.0 - std::abs(1.0 - a - x) / a;
  return std::max(bump, spike);
}

double bad_case_reward(int depth_of_parent, int action, int depth) {
  if (depth < 1) throw EnvironmentError("bad case: depth must be at least 1");
  if (depth_of_parent < 0 || depth_of_parent >= depth)
    throw EnvironmentError("bad case: parent depth outside [0, D-1]");
  if (action != 1 && action != 2) throw EnvironmentError("bad case: action must be 1 or 2");
  if (action == 2)
    return static_cast<double>(depth - depth_of_parent - 1) / static_cast<double>(depth);
  if (depth_of_parent == depth - 1) return 1.0;
  throw EnvironmentError("bad case: action 1 above depth D-1 leads to a node, not a reward");
}

std::string to_string(EnvironmentKind kind) {
  switch (kind) {
    case EnvironmentKind::bernoulli_function: return "bernoulli_function";
    case EnvironmentKind::bad_case: return "bad_case";
    case EnvironmentKind::table: return "table";
  }
  return "unknown";
}

LeafRewardModel::LeafRewardModel(EnvironmentKind kind, int depth, std::uint64_t seed)
    : kind_(kind), depth_(depth), rng_(seed) {}

LeafRewardModel LeafRewardModel::bernoulli_function(double a, int depth, std::uint64_t seed) {
  if (!(a > 0.0)) throw EnvironmentError("bernoulli_function: a must be positive");
  if (depth < 0 || depth > 62) throw EnvironmentError("bernoulli_function: depth out of range");
  LeafRewardModel m(EnvironmentKind::bernoulli_function, depth, seed);
  m.a_ = a;
  return m;
}

LeafRewardModel LeafRewardModel::bad_case(int depth, std::uint64_t seed) {
  if (depth < 1 || depth > kMaxFullDepth) throw EnvironmentError("bad_case: depth out of range");
  return LeafRewardModel(EnvironmentKind::bad_case, depth, seed);
}

LeafRewardModel LeafRewardModel::table(std::vector<double> means, std::uint64_t seed) {
  const auto size = means.size();
  if (size < 2 || (size & (size - 1)) != 0)
    throw EnvironmentError("table: number of leaf means must be a power of two >= 2");
  for (double m : means)
    if (!(m >= 0.0 && m <= 1.0)) throw EnvironmentError("table: leaf mean outside [0,1]");
  int depth = 0;
  while ((std::size_t{1} << depth) < size) ++depth;
  LeafRewardModel model(EnvironmentKind::table, depth, seed);
  model.means_ = std::move(means);
  return model;
}

LeafRewardModel LeafRewardModel::table_from_json(const std::filesystem::path& file,
                                                 std::uint64_t seed) {
  std::ifstream in(file);
  if (!in) throw EnvironmentError("table: cannot open " + file.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw EnvironmentError("table: " + file.string() + " is not valid JSON: " + e.what());
  }
  if (!doc.is_array()) throw EnvironmentError("table: expected a JSON array of leaf means");
  std::vector<double> means;
  for (const auto& v : doc) {
    if (!v.is_number()) throw EnvironmentError("table: leaf means must be numbers");
    means.push_back(v.get<double>());
  }
  return table(std::move(means), seed);
}

std::uint64_t LeafRewardModel::leaf_count() const {
  if (!bounded()) throw EnvironmentError("unbounded model has no leaf set");
  return std::uint64_t{1} << depth_;
}

void LeafRewardModel::check_leaf(std::uint64_t leaf) const {
  if (leaf >= leaf_count()) throw EnvironmentError("leaf index out of range");
}

void LeafRewardModel::check_node(int depth, std::uint64_t position) const {
  if (depth < 0 || depth > 62 || (bounded() && depth > depth_))
    throw EnvironmentError("node depth out of range");
  if (position >= (std::uint64_t{1} << depth)) throw EnvironmentError("node position out of range");
}

double LeafRewardModel::true_mean(std::uint64_t leaf) const {
  check_leaf(leaf);
  switch (kind_) {
    case EnvironmentKind::bernoulli_function:
      return f_eval(leaf_index_to_interval(leaf, depth_).center, a_);
    case EnvironmentKind::table:
      return means_[leaf];
    case EnvironmentKind::bad_case: {
      // Leaf bits read from the root: 0 = action 1, 1 = action 2. The first
      // action 2 taken at depth d fixes the payoff.
      for (int d = 0; d < depth_; ++d) {
        if ((leaf >> (depth_ - 1 - d)) & 1U) return bad_case_reward(d, 2, depth_);
      }
      return bad_case_reward(depth_ - 1, 1, depth_);
    }
  }
  return 0.0;
}

OptimalValue LeafRewardModel::optimal_value() const {
  const auto count = leaf_count();
  OptimalValue out{-kInfinity, {}};
  for (std::uint64_t j = 0; j < count; ++j) {
    const double mu = true_mean(j);
    if (mu > out.mu_star) {
      out.mu_star = mu;
      out.leaves.clear();
    }
    if (mu == out.mu_star) out.leaves.push_back(j);
  }
  return out;
}

double LeafRewardModel::uniform01() {
  return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

bool LeafRewardModel::bernoulli(double p) { return uniform01() < p; }

double LeafRewardModel::sample_reward(std::uint64_t leaf) {
  check_leaf(leaf);
  if (kind_ == EnvironmentKind::bad_case) return true_mean(leaf);
  return bernoulli(true_mean(leaf)) ? 1.0 : 0.0;
}

double LeafRewardModel::node_mean(int depth, std::uint64_t position) const {
  check_node(depth, position);
  if (kind_ == EnvironmentKind::bernoulli_function)
    return f_eval(leaf_index_to_interval(position, depth).center, a_);
  if (depth == depth_) return true_mean(position);
  const int below = depth_ - depth;
  const std::uint64_t first = position << below;
  const std::uint64_t count = std::uint64_t{1} << below;
  double acc = 0.0;
  for (std::uint64_t j = first; j < first + count; ++j) {
    const double mu = true_mean(j);
    acc = inner_rule_ == InnerNodeReward::subtree_max ? std::max(acc, mu) : acc + mu;
  }
  return inner_rule_ == InnerNodeReward::subtree_max ? acc : acc / static_cast<double>(count);
}

double LeafRewardModel::sample_node(int depth, std::uint64_t position) {
  check_node(depth, position);
  if (kind_ == EnvironmentKind::bernoulli_function)
    return bernoulli(node_mean(depth, position)) ? 1.0 : 0.0;
  if (depth == depth_) return sample_reward(position);
  if (inner_rule_ == InnerNodeReward::subtree_max)
    return bernoulli(node_mean(depth, position)) ? 1.0 : 0.0;
  const int below = depth_ - depth;
  const std::uint64_t offset = rng_() >> (64 - below);
  return sample_reward((position << below) + offset);
}

double LeafRewardModel::supremum() const {
  if (kind_ == EnvironmentKind::bernoulli_function && !bounded()) {
    // The spike peaks at x = 1 - a when that point lies in [0,1]; otherwise
    // its best value is at x = 0. The bump peaks at 0.9.
    const double spike = a_ <= 1.0 ? 1.0 : 1.0 / a_;
    return std::max(0.9, spike);
  }
  return optimal_value().mu_star;
}

}  // namespace treebandit
