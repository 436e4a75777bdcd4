#include "treebandit/tree.hpp"

#include <cmath>
#include <string>

namespace treebandit {

TreeIndex::TreeIndex(int depth_limit) : depth_limit_(depth_limit) {
  if (depth_limit < 0) throw TreeError("depth limit must be non-negative");
  nodes_.emplace_back();
}

std::optional<std::array<NodeId, 2>> TreeIndex::children(NodeId id) const {
  const auto& rec = node(id);
  if (!rec.has_children()) return std::nullopt;
  return std::array<NodeId, 2>{rec.first_child, rec.first_child + 1};
}

std::array<NodeId, 2> TreeIndex::expand(NodeId id) {
  if (id >= nodes_.size()) throw TreeError("expand: unknown node " + std::to_string(id));
  if (nodes_[id].has_children()) throw TreeError("expand: node already has children");
  if (depth_limit_ > 0 && nodes_[id].depth >= depth_limit_)
    throw TreeError("expand: node is at the depth limit");
  if (nodes_.size() + 2 > kNoNode) throw TreeError("expand: node arena exhausted");

  const auto first = static_cast<NodeId>(nodes_.size());
  const NodeRecord parent = nodes_[id];
  for (std::uint64_t k = 0; k < 2; ++k) {
    NodeRecord child;
    child.depth = parent.depth + 1;
    child.position = 2 * parent.position + k;
    child.parent = id;
    nodes_.push_back(child);
  }
  nodes_[id].first_child = first;
  return {first, first + 1};
}

void TreeIndex::check_path(std::span<const NodeId> path, bool require_leaf) const {
  if (path.empty() || path.front() != kRoot) throw TreeError("path must start at the root");
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (path[k] >= nodes_.size()) throw TreeError("path contains an unknown node");
    if (k > 0 && nodes_[path[k]].parent != path[k - 1])
      throw TreeError("path is not connected");
  }
  if (require_leaf && nodes_[path.back()].has_children())
    throw TreeError("path does not end at a leaf");
}

void TreeIndex::record_visit(std::span<const NodeId> path, double reward) {
  if (!(reward >= 0.0 && reward <= 1.0)) throw TreeError("reward outside [0,1]");
  check_path(path, true);
  for (NodeId id : path) {
    auto& rec = nodes_[id];
    ++rec.visits;
    rec.reward_sum += reward;
    rec.bound_stale = true;
  }
}

void TreeIndex::add_to_path(std::span<const NodeId> path, std::uint64_t visits,
                            double reward_sum) {
  if (!(reward_sum >= 0.0 && reward_sum <= static_cast<double>(visits)))
    throw TreeError("reward sum inconsistent with visit count");
  check_path(path, false);
  for (NodeId id : path) {
    auto& rec = nodes_[id];
    rec.visits += visits;
    rec.reward_sum += reward_sum;
    rec.bound_stale = true;
  }
}

std::uint64_t TreeIndex::full_leaf_count() const {
  if (!full_) throw TreeError("not a full tree");
  return std::uint64_t{1} << depth_limit_;
}

NodeId TreeIndex::full_leaf_id(std::uint64_t leaf) const {
  const auto leaves = full_leaf_count();
  if (leaf >= leaves) throw TreeError("leaf index out of range");
  return static_cast<NodeId>(leaves - 1 + leaf);
}

TreeIndex build_full_tree(int depth) {
  if (depth < 1) throw TreeError("full tree depth must be at least 1");
  if (depth > kMaxFullDepth) throw TreeError("full tree depth " + std::to_string(depth) +
                                             " exceeds the index range");
  TreeIndex tree(depth);
  tree.full_ = true;
  const std::size_t count = (std::size_t{1} << (depth + 1)) - 1;
  tree.nodes_.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto& rec = tree.nodes_[i];
    // floor(log2(i + 1))
    int d = 0;
    while ((std::size_t{2} << d) <= i + 1) ++d;
    rec.depth = d;
    rec.position = (i + 1) - (std::size_t{1} << d);
    rec.parent = i == 0 ? kNoNode : static_cast<NodeId>((i - 1) / 2);
    rec.first_child = d < depth ? static_cast<NodeId>(2 * i + 1) : kNoNode;
  }
  return tree;
}

Interval leaf_index_to_interval(std::uint64_t leaf, int depth) {
  if (depth < 0 || depth > 62) throw TreeError("depth out of range");
  const std::uint64_t count = std::uint64_t{1} << depth;
  if (leaf >= count) throw TreeError("leaf index out of range");
  const double width = std::ldexp(1.0, -depth);
  return {(static_cast<double>(leaf) + 0.5) * width, 0.5 * width};
}

}  // namespace treebandit
