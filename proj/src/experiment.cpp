#include "treebandit/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "treebandit/analysis.hpp"

namespace treebandit {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

json json_real(double x) {
  if (std::isfinite(x)) return x;
  return format_real(x);
}

double read_real(const json& v, const std::string& what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return kInfinity;
  }
  throw ConfigError(what + ": expected a number or \"inf\"");
}

template <typename T>
T read_field(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

InnerNodeReward parse_inner_rule(const std::string& name) {
  if (name == "rollout") return InnerNodeReward::rollout;
  if (name == "subtree_max") return InnerNodeReward::subtree_max;
  throw ConfigError("unknown inner_rule '" + name + "' (expected rollout, subtree_max)");
}

std::string inner_rule_name(InnerNodeReward rule) {
  return rule == InnerNodeReward::rollout ? "rollout" : "subtree_max";
}

EnvironmentKind parse_environment_kind(const std::string& name) {
  for (auto k : {EnvironmentKind::bernoulli_function, EnvironmentKind::bad_case,
                 EnvironmentKind::table})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown environment kind '" + name +
                    "' (expected bernoulli_function, bad_case, table)");
}

void write_text(const fs::path& file, const std::string& text, ExperimentResult* result) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + file.string());
  out << text;
  if (!out) throw ConfigError("error while writing " + file.string());
  if (result) result->files.push_back(file);
}

std::vector<std::uint64_t> curve_checkpoints(const ExperimentSpec& spec) {
  if (spec.curve_stride == 0) return log_spaced_checkpoints(spec.rounds);
  std::vector<std::uint64_t> out;
  for (std::uint64_t t = spec.curve_stride; t <= spec.rounds; t += spec.curve_stride)
    out.push_back(t);
  if (out.empty() || out.back() != spec.rounds) out.push_back(spec.rounds);
  return out;
}

// x maximising f on [0,1] for the noisy-function model.
double function_argmax(double a) { return a <= 1.0 ? 1.0 - a : 0.0; }

}  // namespace

void ExperimentSpec::validate() const {
  PolicyConfig policy{algorithm, beta, depth, smoothness};
  try {
    policy.validate();
  } catch (const PolicyError& e) {
    throw ConfigError(e.what());
  }
  if (replications < 1) throw ConfigError("replications must be at least 1");
  if (rounds < 1) throw ConfigError("rounds must be at least 1");
  if (depth == 0 && environment.kind != EnvironmentKind::bernoulli_function)
    throw ConfigError("an unbounded depth needs the bernoulli_function environment");
  if (algorithm != BoundKind::growing_bast && depth > 24)
    throw ConfigError("fixed-tree depth above 24 does not fit in memory");
  if (environment.kind == EnvironmentKind::table && environment.means.empty() &&
      environment.table_path.empty())
    throw ConfigError("table environment needs 'means' or 'path'");
  if (eta && !(*eta > 0.0)) throw ConfigError("eta must be positive");
}

ExperimentSpec parse_experiment(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("experiment config must be a JSON object");
  ExperimentSpec spec;
  try {
    spec.algorithm = parse_bound_kind(read_field<std::string>(doc, "algorithm", "bast"));
    if (doc.contains("tie_break"))
      spec.ties.tie_break = parse_tie_break(doc.at("tie_break").get<std::string>());
    if (doc.contains("first_visit_order"))
      spec.ties.first_visit_order =
          parse_first_visit_order(doc.at("first_visit_order").get<std::string>());
  } catch (const PolicyError& e) {
    throw ConfigError(e.what());
  }
  spec.beta = read_field<double>(doc, "beta", spec.beta);
  spec.depth = read_field<int>(doc, "depth", spec.depth);
  spec.rounds = read_field<std::uint64_t>(doc, "rounds", spec.rounds);
  spec.replications = read_field<std::uint64_t>(doc, "replications", spec.replications);
  spec.seed = read_field<std::uint64_t>(doc, "seed", spec.seed);
  spec.output_dir = read_field<std::string>(doc, "output_dir", spec.output_dir.string());
  spec.curve_stride = read_field<std::uint64_t>(doc, "curve_stride", spec.curve_stride);
  spec.first_hit_budget = read_field<std::uint64_t>(doc, "first_hit_budget", spec.first_hit_budget);
  spec.threads = read_field<unsigned>(doc, "threads", spec.threads);
  spec.quiet = read_field<bool>(doc, "quiet", spec.quiet);
  if (doc.contains("eta")) spec.eta = read_real(doc.at("eta"), "eta");

  if (doc.contains("smoothness")) {
    const auto& s = doc.at("smoothness");
    try {
      spec.smoothness.kind = parse_smoothness_kind(read_field<std::string>(s, "kind", "exponential"));
    } catch (const PolicyError& e) {
      throw ConfigError(e.what());
    }
    if (s.contains("delta")) spec.smoothness.delta = read_real(s.at("delta"), "smoothness.delta");
    spec.smoothness.gamma = read_field<double>(s, "gamma", spec.smoothness.gamma);
    spec.smoothness.alpha = read_field<double>(s, "alpha", spec.smoothness.alpha);
    if (std::isinf(spec.smoothness.delta)) spec.smoothness.kind = SmoothnessKind::infinite;
  }

  if (doc.contains("environment")) {
    const auto& e = doc.at("environment");
    auto& env = spec.environment;
    env.kind = parse_environment_kind(read_field<std::string>(e, "kind", "bernoulli_function"));
    env.a = read_field<double>(e, "a", env.a);
    env.means = read_field<std::vector<double>>(e, "means", {});
    if (e.contains("path")) {
      fs::path p = e.at("path").get<std::string>();
      env.table_path = p.is_relative() ? base_dir / p : p;
    }
    env.inner_rule = parse_inner_rule(read_field<std::string>(e, "inner_rule", "rollout"));
  }

  if (doc.contains("emit")) {
    const auto& e = doc.at("emit");
    EmitFlags flags{false, false, false, false, false};
    if (!e.is_array()) throw ConfigError("emit must be an array of output names");
    for (const auto& item : e) {
      const auto name = item.get<std::string>();
      if (name == "regret_curve") flags.regret_curve = true;
      else if (name == "leaf_histogram") flags.leaf_histogram = true;
      else if (name == "tree_dump") flags.tree_dump = true;
      else if (name == "theory_bounds") flags.theory_bounds = true;
      else if (name == "first_hit") flags.first_hit = true;
      else throw ConfigError("unknown emit flag '" + name + "'");
    }
    spec.emit = flags;
  }

  if (doc.contains("sweep")) {
    const auto& s = doc.at("sweep");
    if (s.contains("deltas")) {
      for (const auto& v : s.at("deltas")) spec.sweep_deltas.push_back(read_real(v, "sweep.deltas"));
    }
    spec.sweep_include_flat_ucb = read_field<bool>(s, "include_flat_ucb", false);
  }
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config " + file.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError(file.string() + " is not valid JSON: " + e.what());
  }
  return parse_experiment(doc, file.parent_path());
}

json to_json(const ExperimentSpec& spec) {
  json doc;
  doc["algorithm"] = to_string(spec.algorithm);
  doc["beta"] = spec.beta;
  doc["depth"] = spec.depth;
  doc["smoothness"] = {{"kind", to_string(spec.smoothness.kind)},
                       {"delta", json_real(spec.smoothness.delta)},
                       {"gamma", spec.smoothness.gamma},
                       {"alpha", spec.smoothness.alpha}};
  json env = {{"kind", to_string(spec.environment.kind)},
              {"inner_rule", inner_rule_name(spec.environment.inner_rule)}};
  if (spec.environment.kind == EnvironmentKind::bernoulli_function) env["a"] = spec.environment.a;
  if (!spec.environment.means.empty()) env["means"] = spec.environment.means;
  if (!spec.environment.table_path.empty()) env["path"] = spec.environment.table_path.string();
  doc["environment"] = env;
  doc["rounds"] = spec.rounds;
  doc["replications"] = spec.replications;
  doc["seed"] = spec.seed;
  doc["tie_break"] = to_string(spec.ties.tie_break);
  doc["first_visit_order"] = to_string(spec.ties.first_visit_order);
  doc["output_dir"] = spec.output_dir.string();
  json emit = json::array();
  if (spec.emit.regret_curve) emit.push_back("regret_curve");
  if (spec.emit.leaf_histogram) emit.push_back("leaf_histogram");
  if (spec.emit.tree_dump) emit.push_back("tree_dump");
  if (spec.emit.theory_bounds) emit.push_back("theory_bounds");
  if (spec.emit.first_hit) emit.push_back("first_hit");
  doc["emit"] = emit;
  doc["curve_stride"] = spec.curve_stride;
  doc["first_hit_budget"] = spec.first_hit_budget;
  if (spec.eta) doc["eta"] = *spec.eta;
  if (!spec.sweep_deltas.empty()) {
    json deltas = json::array();
    for (double d : spec.sweep_deltas) deltas.push_back(json_real(d));
    doc["sweep"] = {{"deltas", deltas}, {"include_flat_ucb", spec.sweep_include_flat_ucb}};
  }
  return doc;
}

LeafRewardModel make_environment(const ExperimentSpec& spec, std::uint64_t seed) {
  const auto& env = spec.environment;
  LeafRewardModel model = [&] {
    switch (env.kind) {
      case EnvironmentKind::bernoulli_function:
        return LeafRewardModel::bernoulli_function(env.a, spec.depth, seed);
      case EnvironmentKind::bad_case:
        return LeafRewardModel::bad_case(spec.depth, seed);
      case EnvironmentKind::table:
        return env.means.empty() ? LeafRewardModel::table_from_json(env.table_path, seed)
                                 : LeafRewardModel::table(env.means, seed);
    }
    throw ConfigError("unknown environment kind");
  }();
  if (model.bounded() && model.depth() != spec.depth)
    throw ConfigError("table holds " + std::to_string(model.leaf_count()) +
                      " leaf means but depth is " + std::to_string(spec.depth));
  model.set_inner_rule(env.inner_rule);
  return model;
}

RunConfig make_run_config(const ExperimentSpec& spec, std::uint64_t replication) {
  const auto seed = spec.replication_seed(replication);
  RunConfig cfg{PolicyConfig{spec.algorithm, spec.beta, spec.depth, spec.smoothness},
                make_environment(spec, seed)};
  cfg.rounds = spec.rounds;
  cfg.seed = seed;
  cfg.ties = spec.ties;
  cfg.checkpoints = curve_checkpoints(spec);
  return cfg;
}

GrowingRunConfig make_growing_config(const ExperimentSpec& spec, std::uint64_t replication) {
  const auto seed = spec.replication_seed(replication);
  GrowingRunConfig cfg{PolicyConfig{BoundKind::growing_bast, spec.beta, spec.depth, spec.smoothness},
                       make_environment(spec, seed)};
  cfg.expansions = spec.rounds;
  cfg.seed = seed;
  cfg.ties = spec.ties;
  return cfg;
}

void parallel_for(std::uint64_t count, unsigned threads,
                  const std::function<void(std::uint64_t)>& fn) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, count));
  if (threads <= 1) {
    for (std::uint64_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::uint64_t k = next++; k < count; k = next++) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  if (xs.empty()) return out;
  for (double x : xs) out.mean += x;
  out.mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return out;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  return out;
}

json tree_to_json(const TreeIndex& tree, bool visited_only) {
  json nodes = json::array();
  for (NodeId id = 0; id < tree.node_count(); ++id) {
    const auto& rec = tree.node(id);
    if (visited_only && rec.visits == 0) continue;
    const double lo = std::ldexp(static_cast<double>(rec.position), -rec.depth);
    const double hi = std::ldexp(static_cast<double>(rec.position + 1), -rec.depth);
    json node = {{"id", id},
                 {"parent", rec.parent == kNoNode ? json(nullptr) : json(rec.parent)},
                 {"depth", rec.depth},
                 {"position", rec.position},
                 {"interval", {lo, hi}},
                 {"visits", rec.visits},
                 {"mean", rec.mean()},
                 {"bound", json_real(rec.cached_bound)}};
    if (rec.has_children()) node["children"] = {rec.first_child, rec.first_child + 1};
    nodes.push_back(node);
  }
  return {{"depth_limit", tree.depth_limit()}, {"node_count", tree.node_count()}, {"nodes", nodes}};
}

std::string tree_to_dot(const TreeIndex& tree, bool visited_only) {
  std::ostringstream out;
  out << "digraph tree {\n  node [shape=point];\n";
  for (NodeId id = 0; id < tree.node_count(); ++id) {
    const auto& rec = tree.node(id);
    if (visited_only && rec.visits == 0) continue;
    out << "  n" << id << " [tooltip=\"d=" << rec.depth << " pos=" << rec.position
        << " n=" << rec.visits << "\"];\n";
    if (rec.parent != kNoNode) out << "  n" << rec.parent << " -> n" << id << ";\n";
  }
  out << "}\n";
  return out.str();
}

namespace {

ReplicationSummary summarize(const RunTrace& trace, std::uint64_t k, std::uint64_t seed) {
  return {k, seed, trace.rounds, trace.regret, trace.pseudo_regret.value(), trace.suboptimal_rounds};
}

void finish_aggregates(ExperimentResult& result) {
  std::vector<double> r, rb;
  for (const auto& s : result.replications) {
    r.push_back(s.regret_per_round());
    rb.push_back(s.pseudo_regret_per_round());
  }
  result.regret_per_round = mean_std(r);
  result.pseudo_regret_per_round = mean_std(rb);
}

json summary_json(const ReplicationSummary& s) {
  return {{"replication", s.replication},
          {"seed", s.seed},
          {"rounds", s.rounds},
          {"regret", s.regret},
          {"pseudo_regret", s.pseudo_regret},
          {"regret_per_round", s.regret_per_round()},
          {"pseudo_regret_per_round", s.pseudo_regret_per_round()},
          {"suboptimal_rounds", s.suboptimal_rounds}};
}

std::string rep_name(const char* stem, std::uint64_t k, const char* ext) {
  return std::string(stem) + "_rep" + std::to_string(k) + ext;
}

ExperimentResult run_fixed(const ExperimentSpec& spec) {
  const auto& out_dir = spec.output_dir;
  const auto reps = spec.replications;
  std::vector<RunTrace> traces(reps);
  std::vector<FirstHitReport> hits(spec.emit.first_hit ? reps : 0);
  parallel_for(reps, spec.threads, [&](std::uint64_t k) {
    traces[k] = run(make_run_config(spec, k));
    if (spec.emit.first_hit) hits[k] = first_hit_search(make_run_config(spec, k), spec.first_hit_budget);
  });

  ExperimentResult result;
  for (std::uint64_t k = 0; k < reps; ++k)
    result.replications.push_back(summarize(traces[k], k, spec.replication_seed(k)));
  finish_aggregates(result);

  if (spec.emit.regret_curve) {
    for (std::uint64_t k = 0; k < reps; ++k) {
      std::ostringstream csv;
      csv << "t,leaf,reward,regret,pseudo_regret\n";
      for (const auto& c : traces[k].checkpoints)
        csv << c.t << ',' << c.leaf << ',' << format_real(c.reward) << ',' << format_real(c.regret)
            << ',' << format_real(c.pseudo_regret) << '\n';
      write_text(out_dir / rep_name("curve", k, ".csv"), csv.str(), &result);
    }
    std::ostringstream agg;
    agg << "# replications=" << reps << "; std uses the unbiased (M-1) divisor\n";
    agg << "t,mean_regret_per_round,std_regret_per_round,mean_pseudo_regret_per_round,"
           "std_pseudo_regret_per_round\n";
    const auto points = traces.front().checkpoints.size();
    for (std::size_t p = 0; p < points; ++p) {
      std::vector<double> r, rb;
      const auto t = traces.front().checkpoints[p].t;
      for (const auto& tr : traces) {
        r.push_back(tr.checkpoints[p].regret / static_cast<double>(t));
        rb.push_back(tr.checkpoints[p].pseudo_regret / static_cast<double>(t));
      }
      const auto a = mean_std(r);
      const auto b = mean_std(rb);
      agg << t << ',' << format_real(a.mean) << ',' << format_real(a.std) << ','
          << format_real(b.mean) << ',' << format_real(b.std) << '\n';
    }
    write_text(out_dir / "curve_aggregate.csv", agg.str(), &result);
  }

  if (spec.emit.leaf_histogram) {
    for (std::uint64_t k = 0; k < reps; ++k) {
      std::ostringstream csv;
      csv << "leaf,center,visits,fraction\n";
      const auto& tr = traces[k];
      for (std::uint64_t j = 0; j < tr.leaf_visits.size(); ++j) {
        csv << j << ',' << format_real(leaf_index_to_interval(j, spec.depth).center) << ','
            << tr.leaf_visits[j] << ','
            << format_real(static_cast<double>(tr.leaf_visits[j]) / static_cast<double>(tr.rounds))
            << '\n';
      }
      write_text(out_dir / rep_name("histogram", k, ".csv"), csv.str(), &result);
    }
  }

  if (spec.emit.tree_dump) {
    for (std::uint64_t k = 0; k < reps; ++k) {
      // Rebuild the final tree by replaying the replication.
      SearchEngine engine(make_run_config(spec, k));
      for (std::uint64_t t = 0; t < spec.rounds; ++t) engine.step();
      write_text(out_dir / rep_name("tree", k, ".json"), tree_to_json(engine.tree(), true).dump(1) + "\n",
                 &result);
      write_text(out_dir / rep_name("tree", k, ".dot"), tree_to_dot(engine.tree(), true), &result);
    }
  }

  if (spec.emit.theory_bounds) {
    const auto values = brute_force_values(make_environment(spec, spec.seed));
    json doc;
    doc["beta"] = spec.beta;
    doc["depth"] = spec.depth;
    doc["mu_star"] = values.mu_star;
    doc["rounds"] = spec.rounds;
    doc["modified_uct_regret_bound"] = uct_regret_bound(spec.depth, spec.beta, spec.rounds);
    doc["flat_ucb_regret_bound"] = flat_regret_bound(values, spec.beta);
    if (spec.smoothness.kind == SmoothnessKind::exponential && spec.eta)
      doc["bast_regret_bound"] = {{"eta", *spec.eta},
                              {"bound", smooth_regret_bound(values, spec.smoothness, spec.beta, *spec.eta)}};
    json reps_json = json::array();
    std::vector<double> envelope;
    if (spec.algorithm == BoundKind::bast)
      envelope = visit_envelope(values, spec.smoothness, spec.beta);
    for (std::uint64_t k = 0; k < reps; ++k) {
      const auto& tr = traces[k];
      json r = {{"replication", k},
                {"pseudo_regret", tr.pseudo_regret.value()},
                {"regret", tr.regret},
                {"deviation", std::abs(tr.regret - tr.pseudo_regret.value())},
                {"deviation_bound", pseudo_regret_gap_bound(tr, spec.beta)}};
      if (!envelope.empty()) r["envelope_violations"] = envelope_violations(tr, values, envelope).size();
      reps_json.push_back(r);
    }
    doc["replications"] = reps_json;
    if (!envelope.empty() && values.node_count() <= 2047) {
      json nodes = json::array();
      for (std::size_t i = 0; i < values.node_count(); ++i)
        nodes.push_back({{"node", i},
                         {"depth", values.depth[i]},
                         {"gap", values.gap[i]},
                         {"envelope", json_real(envelope[i])}});
      doc["visit_envelope"] = nodes;
    }
    write_text(out_dir / "theory_bounds.json", doc.dump(1) + "\n", &result);
  }

  if (spec.emit.first_hit) {
    json arr = json::array();
    for (std::uint64_t k = 0; k < reps; ++k) {
      const auto& h = hits[k];
      json rhs = json::array();
      for (double v : h.recursion_rhs) rhs.push_back(json_real(v));
      std::vector<bool> holds(h.recursion_holds.begin(), h.recursion_holds.end());
      arr.push_back({{"replication", k},
                     {"hit", h.hit},
                     {"censored", !h.hit},
                     {"rounds", h.rounds},
                     {"visits_by_depth", h.visits},
                     {"recursion_rhs", rhs},
                     {"recursion_holds", holds},
                     {"log10_global_lower_bound", h.log10_global_lower_bound}});
    }
    write_text(out_dir / "first_hit.json",
               json{{"algorithm", to_string(spec.algorithm)},
                    {"budget", spec.first_hit_budget},
                    {"replications", arr}}
                       .dump(1) + "\n",
               &result);
  }
  return result;
}

ExperimentResult run_grown(const ExperimentSpec& spec) {
  const auto reps = spec.replications;
  std::vector<GrowingTrace> traces(reps);
  parallel_for(reps, spec.threads,
               [&](std::uint64_t k) { traces[k] = run_growing(make_growing_config(spec, k)); });

  ExperimentResult result;
  json reps_json = json::array();
  for (std::uint64_t k = 0; k < reps; ++k) {
    const auto& tr = traces[k];
    result.replications.push_back(
        {k, spec.replication_seed(k), tr.samples, tr.regret, tr.pseudo_regret, 0});
    json r = {{"replication", k},
              {"stages", tr.stages},
              {"samples", tr.samples},
              {"terminal_samples", tr.terminal_samples},
              {"node_count", tr.tree.node_count()},
              {"frontier_profile", tr.frontier_profile},
              {"regret", tr.regret},
              {"pseudo_regret", tr.pseudo_regret}};
    if (spec.environment.kind == EnvironmentKind::bernoulli_function) {
      const double x_star = function_argmax(spec.environment.a);
      const auto shape = growth_shape(tr.tree, x_star);
      r["shape"] = {{"x_star", x_star},
                    {"max_depth", shape.max_depth},
                    {"deepest_contains_x_star", shape.deepest_contains_x},
                    {"max_depth_off_target", shape.max_depth_off_target}};
    }
    reps_json.push_back(r);
    if (spec.emit.tree_dump) {
      write_text(spec.output_dir / rep_name("tree", k, ".json"),
                 tree_to_json(tr.tree, false).dump(1) + "\n", &result);
      write_text(spec.output_dir / rep_name("tree", k, ".dot"), tree_to_dot(tr.tree, false), &result);
    }
  }
  finish_aggregates(result);
  write_text(spec.output_dir / "growing.json", json{{"replications", reps_json}}.dump(1) + "\n",
             &result);
  return result;
}

void prepare_output(const ExperimentSpec& spec) {
  std::error_code ec;
  fs::create_directories(spec.output_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + spec.output_dir.string() + ": " +
                            ec.message());
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  prepare_output(spec);
  ExperimentResult result =
      spec.algorithm == BoundKind::growing_bast ? run_grown(spec) : run_fixed(spec);
  write_text(spec.output_dir / "config.json", to_json(spec).dump(1) + "\n", &result);
  json reps = json::array();
  for (const auto& s : result.replications) reps.push_back(summary_json(s));
  json summary = {{"algorithm", to_string(spec.algorithm)},
                  {"replications", reps},
                  {"mean_regret_per_round", result.regret_per_round.mean},
                  {"std_regret_per_round", result.regret_per_round.std},
                  {"mean_pseudo_regret_per_round", result.pseudo_regret_per_round.mean},
                  {"std_pseudo_regret_per_round", result.pseudo_regret_per_round.std},
                  {"std_divisor", "M-1"}};
  write_text(spec.output_dir / "summary.json", summary.dump(1) + "\n", &result);
  return result;
}

std::vector<SweepRow> delta_sweep(const ExperimentSpec& spec) {
  if (spec.sweep_deltas.empty() && !spec.sweep_include_flat_ucb)
    throw ConfigError("sweep needs at least one delta (sweep.deltas) or include_flat_ucb");
  if (spec.algorithm == BoundKind::growing_bast)
    throw ConfigError("delta sweep runs on a fixed tree; use algorithm bast");
  spec.validate();
  prepare_output(spec);

  struct Job {
    std::string label;
    double delta;
    ExperimentSpec spec;
  };
  std::vector<Job> jobs;
  for (double delta : spec.sweep_deltas) {
    ExperimentSpec s = spec;
    s.algorithm = BoundKind::bast;
    if (std::isinf(delta)) {
      s.smoothness = SmoothnessSeq::infinite();
    } else if (delta == 0.0) {
      s.smoothness = SmoothnessSeq::zero();
    } else {
      s.smoothness = SmoothnessSeq::exponential(delta, spec.smoothness.gamma);
    }
    jobs.push_back({"bast", delta, s});
  }
  if (spec.sweep_include_flat_ucb) {
    ExperimentSpec s = spec;
    s.algorithm = BoundKind::flat_ucb;
    jobs.push_back({"flat_ucb", kInfinity, s});
  }

  const auto reps = spec.replications;
  std::vector<ReplicationSummary> flat(jobs.size() * reps);
  parallel_for(flat.size(), spec.threads, [&](std::uint64_t idx) {
    const auto& job = jobs[idx / reps];
    const auto k = idx % reps;
    flat[idx] = summarize(run(make_run_config(job.spec, k)), k, job.spec.replication_seed(k));
  });

  std::vector<SweepRow> rows;
  std::ostringstream csv;
  csv << "# replications=" << reps << "; std uses the unbiased (M-1) divisor\n";
  csv << "# bast rows: c_n = sqrt(log(2 N n (n+1) / beta) / (2n)) with N = 2^(D+1) - 1\n";
  csv << "# flat_ucb row: leaf interval with beta_n = beta / (2^(D+1) n (n+1))\n";
  csv << "algorithm,delta,mean_regret_per_round,std_regret_per_round,"
         "mean_pseudo_regret_per_round,std_pseudo_regret_per_round,replications\n";
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    SweepRow row{jobs[j].label, jobs[j].delta, {}, {}, {}};
    std::vector<double> r, rb;
    for (std::uint64_t k = 0; k < reps; ++k) {
      const auto& s = flat[j * reps + k];
      row.replications.push_back(s);
      r.push_back(s.regret_per_round());
      rb.push_back(s.pseudo_regret_per_round());
    }
    row.regret_per_round = mean_std(r);
    row.pseudo_regret_per_round = mean_std(rb);
    csv << row.label << ',' << format_real(row.delta) << ',' << format_real(row.regret_per_round.mean)
        << ',' << format_real(row.regret_per_round.std) << ','
        << format_real(row.pseudo_regret_per_round.mean) << ','
        << format_real(row.pseudo_regret_per_round.std) << ',' << reps << '\n';
    rows.push_back(std::move(row));
  }
  write_text(spec.output_dir / "sweep.csv", csv.str(), nullptr);

  json meta = {{"config", to_json(spec)},
               {"std_divisor", "M-1"},
               {"beta_n_conventions",
                {{"bast", "beta / (2 N n (n+1)), N = 2^(D+1) - 1"},
                 {"flat_ucb", "beta / (2^(D+1) n (n+1))"}}},
               {"note", "delta = inf reduces the smooth-tree bound to the max of the children's "
                        "bounds; it differs from flat_ucb only through the beta_n convention"}};
  write_text(spec.output_dir / "sweep_meta.json", meta.dump(1) + "\n", nullptr);
  write_text(spec.output_dir / "config.json", to_json(spec).dump(1) + "\n", nullptr);
  return rows;
}

}  // namespace treebandit
