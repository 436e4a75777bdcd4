#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace treebandit {

class PolicyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class BoundKind { uct_log, uct_sqrt, modified_uct, flat_ucb, bast, growing_bast };
enum class SmoothnessKind { exponential, polynomial, linear, zero, infinite };

std::string to_string(BoundKind kind);
BoundKind parse_bound_kind(const std::string& name);
std::string to_string(SmoothnessKind kind);
SmoothnessKind parse_smoothness_kind(const std::string& name);

/// Per-depth smoothness coefficients delta_d.
struct SmoothnessSeq {
  SmoothnessKind kind = SmoothnessKind::zero;
  double delta = 0.0;
  double gamma = 0.5;   // exponential
  double alpha = -1.0;  // polynomial

  static SmoothnessSeq exponential(double delta, double gamma) {
    return {SmoothnessKind::exponential, delta, gamma, -1.0};
  }
  static SmoothnessSeq polynomial(double delta, double alpha) {
    return {SmoothnessKind::polynomial, delta, 0.5, alpha};
  }
  static SmoothnessSeq linear(double delta) { return {SmoothnessKind::linear, delta, 0.5, -1.0}; }
  static SmoothnessSeq zero() { return {}; }
  static SmoothnessSeq infinite() { return {SmoothnessKind::infinite, 0.0, 0.5, -1.0}; }

  void validate() const;
  /// log 2 / log(1/gamma); exponential sequences only.
  [[nodiscard]] double exponent_c() const;
};

struct PolicyConfig {
  BoundKind kind = BoundKind::bast;
  double beta = 0.1;
  /// D. Zero means unbounded (growing trees only).
  int depth_limit = 1;
  SmoothnessSeq smoothness;

  /// N = 2^{D+1} - 1.
  [[nodiscard]] double node_count() const;
  void validate() const;
};

/// What a bound formula reads from a node.
struct NodeStats {
  double mean = 0.0;
  std::uint64_t visits = 0;
  std::uint64_t parent_visits = 0;
  int depth = 0;
  std::optional<std::pair<double, double>> child_bounds;
};

struct ModifiedUctCoeffs {
  double k;
  double k_prime;
};

double bound_uct_log(const NodeStats& stats);
double bound_uct_sqrt(const NodeStats& stats);
ModifiedUctCoeffs modified_uct_coeffs(int depth, int depth_limit);
double bound_modified_uct(const NodeStats& stats, const PolicyConfig& cfg);
double bound_flat_ucb(const NodeStats& stats, const PolicyConfig& cfg);
double smoothness_delta(const SmoothnessSeq& seq, int depth, int depth_limit);
/// c_n = sqrt(log(2 N n (n+1) / beta) / (2 n)), n >= 1.
double bast_confidence(std::uint64_t visits, const PolicyConfig& cfg);
double bound_bast(const NodeStats& stats, const PolicyConfig& cfg);
/// c_{d,n} = sqrt(log(2^{2d+1} n (n+1) / beta) / (2 n)), n >= 1.
double growing_confidence(int depth, std::uint64_t visits, double beta);
/// Smooth-tree bound with the depth-dependent interval. A node without child
/// bounds above the depth limit is a frontier node of a grown tree: its
/// unexplored subtree contributes +inf to the max, leaving X + delta_d + c.
double bound_growing_bast(const NodeStats& stats, const PolicyConfig& cfg);

/// Dispatches on cfg.kind.
double compute_bound(const NodeStats& stats, const PolicyConfig& cfg);

/// True when the bound of cfg.kind reads the parent's visit count, which
/// rules out caching it between rounds.
bool bound_reads_parent(BoundKind kind);

}  // namespace treebandit
