#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace treebandit {

using NodeId = std::uint32_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
inline constexpr NodeId kRoot = 0;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Largest depth accepted for a fully materialised tree.
inline constexpr int kMaxFullDepth = 30;

class TreeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Per-node statistics. Rewards are kept as a running sum so the mean is
/// computed on read and never drifts.
struct NodeRecord {
  int depth = 0;
  /// Position of the node among the 2^depth nodes of its level, left to
  /// right. Identifies the dyadic interval [pos/2^d, (pos+1)/2^d].
  std::uint64_t position = 0;
  std::uint64_t visits = 0;
  double reward_sum = 0.0;
  double cached_bound = kInfinity;
  bool bound_stale = false;
  NodeId parent = kNoNode;
  /// Children are always allocated as a consecutive pair; first_child is
  /// action 1 (left), first_child + 1 is action 2 (right).
  NodeId first_child = kNoNode;

  [[nodiscard]] bool has_children() const { return first_child != kNoNode; }
  [[nodiscard]] double mean() const {
    return visits == 0 ? 0.0 : reward_sum / static_cast<double>(visits);
  }
};

struct Interval {
  double center;
  double halfwidth;
};

/// Arena storage for binary trees. A full tree is laid out in heap order
/// (children of i at 2i+1, 2i+2), so leaf j of a depth-D tree has id
/// 2^D - 1 + j. Grown trees append child pairs as they are expanded.
class TreeIndex {
 public:
  /// Tree holding only the root; `depth_limit` of 0 means unbounded.
  explicit TreeIndex(int depth_limit = 0);

  [[nodiscard]] int depth_limit() const { return depth_limit_; }
  [[nodiscard]] std::size_t node_count() const { return nodes_.size(); }

  [[nodiscard]] const NodeRecord& node(NodeId id) const { return nodes_.at(id); }
  [[nodiscard]] NodeRecord& node(NodeId id) { return nodes_.at(id); }
  [[nodiscard]] std::span<const NodeRecord> nodes() const { return nodes_; }

  [[nodiscard]] std::optional<std::array<NodeId, 2>> children(NodeId id) const;

  /// Appends two children under a childless node and returns their ids.
  std::array<NodeId, 2> expand(NodeId id);

  /// Adds one visit with `reward` to every node of a root-to-leaf path and
  /// marks their cached bounds stale.
  void record_visit(std::span<const NodeId> path, double reward);

  /// Adds `visits` and `reward_sum` to a connected root-to-node path.
  void add_to_path(std::span<const NodeId> path, std::uint64_t visits, double reward_sum);

  /// Id of leaf j in a full tree built by build_full_tree.
  [[nodiscard]] NodeId full_leaf_id(std::uint64_t leaf) const;
  [[nodiscard]] std::uint64_t full_leaf_count() const;
  [[nodiscard]] bool is_full() const { return full_; }

 private:
  friend TreeIndex build_full_tree(int depth);
  void check_path(std::span<const NodeId> path, bool require_leaf) const;

  int depth_limit_;
  bool full_ = false;
  std::vector<NodeRecord> nodes_;
};

/// Full binary tree of the given depth, all nodes unvisited.
TreeIndex build_full_tree(int depth);

/// Center and halfwidth of [j/2^D, (j+1)/2^D].
Interval leaf_index_to_interval(std::uint64_t leaf, int depth);

/// Interval of a node at `depth` and `position` (same formula, any depth).
inline Interval node_interval(const NodeRecord& rec) {
  return leaf_index_to_interval(rec.position, rec.depth);
}

}  // namespace treebandit
