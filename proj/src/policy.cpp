#include "treebandit/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace treebandit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kSqrt2 = std::sqrt(2.0);

double as_double(std::uint64_t n) { return static_cast<double>(n); }

bool is_leaf(const NodeStats& stats, const PolicyConfig& cfg) {
  return stats.depth >= cfg.depth_limit;
}

double max_child(const NodeStats& stats) {
  if (!stats.child_bounds) throw PolicyError("internal node requires both child bounds");
  return std::max(stats.child_bounds->first, stats.child_bounds->second);
}

// sqrt(log(1/beta_n) / (2n)) for beta_n = beta / (scale n (n+1)).
double hoeffding_radius(double scale, std::uint64_t visits, double beta) {
  const double n = as_double(visits);
  return std::sqrt(std::log(scale * n * (n + 1.0) / beta) / (2.0 * n));
}

}  // namespace

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::uct_log: return "uct_log";
    case BoundKind::uct_sqrt: return "uct_sqrt";
    case BoundKind::modified_uct: return "modified_uct";
    case BoundKind::flat_ucb: return "flat_ucb";
    case BoundKind::bast: return "bast";
    case BoundKind::growing_bast: return "growing_bast";
  }
  return "unknown";
}

BoundKind parse_bound_kind(const std::string& name) {
  for (auto k : {BoundKind::uct_log, BoundKind::uct_sqrt, BoundKind::modified_uct,
                 BoundKind::flat_ucb, BoundKind::bast, BoundKind::growing_bast})
    if (to_string(k) == name) return k;
  throw PolicyError("unknown algorithm '" + name +
                    "' (expected uct_log, uct_sqrt, modified_uct, flat_ucb, bast, growing_bast)");
}

std::string to_string(SmoothnessKind kind) {
  switch (kind) {
    case SmoothnessKind::exponential: return "exponential";
    case SmoothnessKind::polynomial: return "polynomial";
    case SmoothnessKind::linear: return "linear";
    case SmoothnessKind::zero: return "zero";
    case SmoothnessKind::infinite: return "infinite";
  }
  return "unknown";
}

SmoothnessKind parse_smoothness_kind(const std::string& name) {
  for (auto k : {SmoothnessKind::exponential, SmoothnessKind::polynomial, SmoothnessKind::linear,
                 SmoothnessKind::zero, SmoothnessKind::infinite})
    if (to_string(k) == name) return k;
  throw PolicyError("unknown smoothness kind '" + name + "'");
}

void SmoothnessSeq::validate() const {
  if (kind == SmoothnessKind::zero || kind == SmoothnessKind::infinite) return;
  if (!(delta >= 0.0)) throw PolicyError("smoothness delta must be >= 0");
  if (kind == SmoothnessKind::exponential && !(gamma > 0.0 && gamma < 1.0))
    throw PolicyError("exponential smoothness needs gamma in (0,1)");
  if (kind == SmoothnessKind::polynomial && !(alpha < 0.0))
    throw PolicyError("polynomial smoothness needs alpha < 0");
}

double SmoothnessSeq::exponent_c() const {
  if (kind != SmoothnessKind::exponential) throw PolicyError("c is defined for exponential smoothness only");
  return std::log(2.0) / std::log(1.0 / gamma);
}

double PolicyConfig::node_count() const { return std::ldexp(1.0, depth_limit + 1) - 1.0; }

void PolicyConfig::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) throw PolicyError("beta must lie in (0,1)");
  if (depth_limit < 0 || depth_limit > 62) throw PolicyError("depth limit out of range");
  if (depth_limit == 0 && kind != BoundKind::growing_bast)
    throw PolicyError("only growing_bast accepts an unbounded depth");
  if (kind == BoundKind::bast || kind == BoundKind::growing_bast) smoothness.validate();
}

double bound_uct_log(const NodeStats& stats) {
  if (stats.visits == 0) return kInf;
  const double log_p = stats.parent_visits > 1 ? std::log(as_double(stats.parent_visits)) : 0.0;
  return stats.mean + std::sqrt(2.0 * log_p / as_double(stats.visits));
}

double bound_uct_sqrt(const NodeStats& stats) {
  if (stats.visits == 0) return kInf;
  return stats.mean + std::sqrt(std::sqrt(as_double(stats.parent_visits)) / as_double(stats.visits));
}

ModifiedUctCoeffs modified_uct_coeffs(int depth, int depth_limit) {
  if (depth < 0 || depth > depth_limit) throw PolicyError("depth outside [0, D]");
  const int horizon = depth_limit - depth;
  const double k = (1.0 + kSqrt2) / kSqrt2 * (std::pow(1.0 + kSqrt2, horizon) - 1.0);
  const double k_prime = (std::pow(3.0, horizon) - 1.0) / 2.0;
  return {k, k_prime};
}

double bound_modified_uct(const NodeStats& stats, const PolicyConfig& cfg) {
  if (!(cfg.beta > 0.0 && cfg.beta < 1.0)) throw PolicyError("beta must lie in (0,1)");
  if (stats.visits == 0) return kInf;
  const auto [k, k_prime] = modified_uct_coeffs(stats.depth, cfg.depth_limit);
  const double n = as_double(stats.visits);
  return stats.mean + (k + 1.0) * hoeffding_radius(2.0 * cfg.node_count(), stats.visits, cfg.beta) +
         k_prime / n;
}

double bound_flat_ucb(const NodeStats& stats, const PolicyConfig& cfg) {
  if (is_leaf(stats, cfg)) {
    if (stats.visits == 0) return kInf;
    return stats.mean +
           hoeffding_radius(std::ldexp(1.0, cfg.depth_limit + 1), stats.visits, cfg.beta);
  }
  return max_child(stats);
}

double smoothness_delta(const SmoothnessSeq& seq, int depth, int depth_limit) {
  switch (seq.kind) {
    case SmoothnessKind::exponential: return seq.delta * std::pow(seq.gamma, depth);
    case SmoothnessKind::polynomial: return seq.delta * std::pow(std::max(depth, 1), seq.alpha);
    case SmoothnessKind::linear: return seq.delta * static_cast<double>(depth_limit - depth);
    case SmoothnessKind::zero: return 0.0;
    case SmoothnessKind::infinite: return kInf;
  }
  return 0.0;
}

double bast_confidence(std::uint64_t visits, const PolicyConfig& cfg) {
  if (visits == 0) throw PolicyError("confidence interval undefined at zero visits");
  return hoeffding_radius(2.0 * cfg.node_count(), visits, cfg.beta);
}

double bound_bast(const NodeStats& stats, const PolicyConfig& cfg) {
  if (is_leaf(stats, cfg)) {
    if (stats.visits == 0) return kInf;
    return stats.mean + bast_confidence(stats.visits, cfg);
  }
  const double children = max_child(stats);
  if (stats.visits == 0) return kInf;
  const double own = stats.mean + smoothness_delta(cfg.smoothness, stats.depth, cfg.depth_limit) +
                     bast_confidence(stats.visits, cfg);
  return std::min(children, own);
}

double growing_confidence(int depth, std::uint64_t visits, double beta) {
  if (visits == 0) throw PolicyError("confidence interval undefined at zero visits");
  if (depth < 0) throw PolicyError("negative depth");
  return hoeffding_radius(std::ldexp(1.0, 2 * depth + 1), visits, beta);
}

double bound_growing_bast(const NodeStats& stats, const PolicyConfig& cfg) {
  if (stats.visits == 0) return kInf;
  const double c = growing_confidence(stats.depth, stats.visits, cfg.beta);
  const bool terminal = cfg.depth_limit > 0 && stats.depth >= cfg.depth_limit;
  if (terminal) return stats.mean + c;
  const double children = stats.child_bounds ? std::max(stats.child_bounds->first,
                                                        stats.child_bounds->second)
                                             : kInf;
  const double own = stats.mean + smoothness_delta(cfg.smoothness, stats.depth, cfg.depth_limit) + c;
  return std::min(children, own);
}

double compute_bound(const NodeStats& stats, const PolicyConfig& cfg) {
  switch (cfg.kind) {
    case BoundKind::uct_log: return bound_uct_log(stats);
    case BoundKind::uct_sqrt: return bound_uct_sqrt(stats);
    case BoundKind::modified_uct: return bound_modified_uct(stats, cfg);
    case BoundKind::flat_ucb: return bound_flat_ucb(stats, cfg);
    case BoundKind::bast: return bound_bast(stats, cfg);
    case BoundKind::growing_bast: return bound_growing_bast(stats, cfg);
  }
  return kInf;
}

bool bound_reads_parent(BoundKind kind) {
  return kind == BoundKind::uct_log || kind == BoundKind::uct_sqrt;
}

}  // namespace treebandit
