#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "treebandit/tree.hpp"

using namespace treebandit;

namespace {

std::vector<NodeId> leaf_path(const TreeIndex& tree, std::uint64_t leaf) {
  std::vector<NodeId> path;
  for (NodeId id = tree.full_leaf_id(leaf);; id = tree.node(id).parent) {
    path.push_back(id);
    if (id == kRoot) break;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

TEST_CASE("full tree sizes") {
  CHECK(build_full_tree(1).node_count() == 3);
  CHECK(build_full_tree(1).full_leaf_count() == 2);
  CHECK(build_full_tree(2).node_count() == 7);
  CHECK(build_full_tree(2).full_leaf_count() == 4);
  CHECK(build_full_tree(17).node_count() == 262143);
  CHECK_THROWS_AS(build_full_tree(0), TreeError);
  CHECK_THROWS_AS(build_full_tree(kMaxFullDepth + 1), TreeError);
}

TEST_CASE("heap layout") {
  const auto tree = build_full_tree(3);
  for (NodeId id = 0; id < 7; ++id) {
    const auto kids = tree.children(id);
    REQUIRE(kids);
    CHECK((*kids)[0] == 2 * id + 1);
    CHECK((*kids)[1] == 2 * id + 2);
    CHECK(tree.node((*kids)[0]).position == 2 * tree.node(id).position);
    CHECK(tree.node((*kids)[1]).position == 2 * tree.node(id).position + 1);
  }
  CHECK_FALSE(tree.children(tree.full_leaf_id(0)));
  CHECK(tree.full_leaf_id(5) == 12);
}

TEST_CASE("leaf intervals") {
  auto i0 = leaf_index_to_interval(0, 1);
  CHECK(i0.center == 0.25);
  CHECK(i0.halfwidth == 0.25);
  CHECK(leaf_index_to_interval(3, 2).center == 0.875);
  // Leaf 921 = [0.8994140625, 0.900390625] holds 0.9.
  CHECK(leaf_index_to_interval(921, 10).center == 0.89990234375);
  CHECK(leaf_index_to_interval(922, 10).center == 0.90087890625);

  // Intervals tile [0,1]: consecutive, disjoint interiors, exact endpoints.
  for (int depth : {1, 4, 10}) {
    double right = 0.0;
    const std::uint64_t leaves = std::uint64_t{1} << depth;
    for (std::uint64_t j = 0; j < leaves; ++j) {
      const auto iv = leaf_index_to_interval(j, depth);
      CHECK(iv.center - iv.halfwidth == right);
      right = iv.center + iv.halfwidth;
    }
    CHECK(right == 1.0);
  }
}

TEST_CASE("record_visit basics") {
  auto tree = build_full_tree(3);
  const auto path = leaf_path(tree, 5);
  tree.record_visit(path, 1.0);
  for (NodeId id : path) {
    CHECK(tree.node(id).visits == 1);
    CHECK(tree.node(id).mean() == 1.0);
    CHECK(tree.node(id).bound_stale);
  }
  tree.record_visit(leaf_path(tree, 2), 0.0);
  CHECK(tree.node(kRoot).mean() == 0.5);

  CHECK_THROWS_AS(tree.record_visit(path, 1.5), TreeError);
  CHECK_THROWS_AS(tree.record_visit(std::vector<NodeId>{0, 1, 5}, 0.5), TreeError);
  CHECK_THROWS_AS(tree.record_visit(std::vector<NodeId>{0, 2, 3, 7}, 0.5), TreeError);
}

TEST_CASE("conservation under random trajectories") {
  std::mt19937_64 rng(7);
  for (int depth : {1, 3, 6}) {
    auto tree = build_full_tree(depth);
    std::uniform_int_distribution<std::uint64_t> pick(0, tree.full_leaf_count() - 1);
    std::uniform_int_distribution<int> bit(0, 8);
    for (int t = 0; t < 2000; ++t)
      tree.record_visit(leaf_path(tree, pick(rng)), bit(rng) / 8.0);
    CHECK(tree.node(kRoot).visits == 2000);
    for (NodeId id = 0; id < tree.node_count(); ++id) {
      const auto kids = tree.children(id);
      if (!kids) continue;
      const auto& a = tree.node((*kids)[0]);
      const auto& b = tree.node((*kids)[1]);
      CHECK(tree.node(id).visits == a.visits + b.visits);
      // Rewards are multiples of 1/8, so the sums are exact.
      CHECK(tree.node(id).reward_sum == a.reward_sum + b.reward_sum);
    }
  }
}

TEST_CASE("grown tree expansion") {
  TreeIndex tree(0);
  CHECK(tree.node_count() == 1);
  const auto kids = tree.expand(kRoot);
  CHECK(kids[0] == 1);
  CHECK(kids[1] == 2);
  CHECK(tree.node(2).depth == 1);
  CHECK(tree.node(2).position == 1);
  CHECK(tree.node(2).parent == kRoot);
  CHECK_THROWS_AS(tree.expand(kRoot), TreeError);
  const auto grand = tree.expand(2);
  CHECK(tree.node(grand[1]).position == 3);
  CHECK(node_interval(tree.node(grand[1])).center == 0.875);

  TreeIndex bounded(1);
  const auto b = bounded.expand(kRoot);
  CHECK_THROWS_AS(bounded.expand(b[0]), TreeError);
}
