#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "treebandit/experiment.hpp"

using namespace treebandit;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("treebandit_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json small_config(const fs::path& out) {
  return {{"algorithm", "bast"},
          {"beta", 0.1},
          {"depth", 5},
          {"smoothness", {{"kind", "exponential"}, {"delta", 2.0}, {"gamma", 0.5}}},
          {"environment", {{"kind", "bernoulli_function"}, {"a", 0.1}}},
          {"rounds", 3000},
          {"replications", 3},
          {"seed", 11},
          {"output_dir", out.string()},
          {"emit", {"regret_curve", "leaf_histogram", "tree_dump", "theory_bounds"}}};
}

}  // namespace

TEST_CASE("config parsing") {
  auto doc = small_config("out");
  doc["smoothness"]["delta"] = "inf";
  doc["tie_break"] = "random";
  doc["first_visit_order"] = "action2_first";
  const auto spec = parse_experiment(doc);
  CHECK(spec.algorithm == BoundKind::bast);
  CHECK(spec.depth == 5);
  CHECK(spec.smoothness.kind == SmoothnessKind::infinite);
  CHECK(spec.ties.tie_break == TieBreak::random);
  CHECK(spec.ties.first_visit_order == FirstVisitOrder::action2_first);
  CHECK(spec.emit.leaf_histogram);
  CHECK_FALSE(spec.emit.first_hit);
  CHECK(spec.replication_seed(2) == 13);

  // Round trip through to_json.
  const auto again = parse_experiment(to_json(spec));
  CHECK(to_json(again) == to_json(spec));

  auto bad = small_config("out");
  bad["algorithm"] = "uct";
  CHECK_THROWS_AS(parse_experiment(bad), ConfigError);
  bad = small_config("out");
  bad["replications"] = 0;
  CHECK_THROWS_AS(parse_experiment(bad), ConfigError);
  bad = small_config("out");
  bad["emit"] = {"everything"};
  CHECK_THROWS_AS(parse_experiment(bad), ConfigError);
  bad = small_config("out");
  bad["beta"] = 1.5;
  CHECK_THROWS_AS(parse_experiment(bad), ConfigError);
  bad = small_config("out");
  bad["environment"] = {{"kind", "table"}};
  CHECK_THROWS_AS(parse_experiment(bad), ConfigError);
  CHECK_THROWS_AS(parse_experiment(json::array()), ConfigError);
}

TEST_CASE("mean and unbiased std") {
  const auto one = mean_std({2.0});
  CHECK(one.mean == 2.0);
  CHECK(one.std == 0.0);
  const auto two = mean_std({1.0, 3.0});
  CHECK(two.mean == 2.0);
  CHECK(two.std == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("format real") {
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(kInfinity) == "inf");
  CHECK(format_real(2.0) == "2");
}

TEST_CASE("run outputs are deterministic") {
  const auto a_dir = scratch("det_a");
  const auto b_dir = scratch("det_b");
  const auto a = run_experiment(parse_experiment(small_config(a_dir)));
  const auto b = run_experiment(parse_experiment(small_config(b_dir)));
  REQUIRE(a.files.size() == b.files.size());
  for (const auto& f : a.files) {
    const auto name = f.filename();
    if (name == "config.json") continue;  // echoes output_dir
    CAPTURE(name.string());
    CHECK(slurp(a_dir / name) == slurp(b_dir / name));
  }
  CHECK(a.replications.size() == 3);
  CHECK(a.replications[1].seed == 12);

  // Histogram visit counts sum to n.
  std::ifstream hist(a_dir / "histogram_rep0.csv");
  std::string line;
  std::getline(hist, line);
  CHECK(line == "leaf,center,visits,fraction");
  std::uint64_t total = 0;
  int rows = 0;
  while (std::getline(hist, line)) {
    std::stringstream ss(line);
    std::string leaf, center, visits;
    std::getline(ss, leaf, ',');
    std::getline(ss, center, ',');
    std::getline(ss, visits, ',');
    total += std::stoull(visits);
    ++rows;
  }
  CHECK(rows == 32);
  CHECK(total == 3000);

  const auto agg = slurp(a_dir / "curve_aggregate.csv");
  CHECK(agg.find("(M-1)") != std::string::npos);
  CHECK(fs::exists(a_dir / "tree_rep2.dot"));
  CHECK(fs::exists(a_dir / "theory_bounds.json"));
  const auto summary = json::parse(slurp(a_dir / "summary.json"));
  CHECK(summary.is_object());
}

TEST_CASE("growing run") {
  const auto dir = scratch("growing");
  json doc = {{"algorithm", "growing_bast"},
              {"depth", 0},
              {"rounds", 200},
              {"smoothness", {{"kind", "exponential"}, {"delta", 5.0}, {"gamma", 0.5}}},
              {"environment", {{"kind", "bernoulli_function"}, {"a", 0.1}}},
              {"output_dir", dir.string()},
              {"emit", {"tree_dump"}}};
  run_experiment(parse_experiment(doc));
  const auto tree = json::parse(slurp(dir / "tree_rep0.json"));
  CHECK(tree.is_object());
  CHECK(fs::exists(dir / "growing.json"));
}

TEST_CASE("delta sweep") {
  const auto dir = scratch("sweep");
  auto doc = small_config(dir);
  doc["rounds"] = 2000;
  doc["replications"] = 2;
  doc["sweep"] = {{"deltas", {0, 2, "inf"}}, {"include_flat_ucb", true}};
  const auto spec = parse_experiment(doc);
  const auto rows = delta_sweep(spec);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].delta == 0.0);
  CHECK(std::isinf(rows[2].delta));
  CHECK(rows[3].label == "flat_ucb");
  const auto first = slurp(dir / "sweep.csv");
  CHECK(first.find("2^(D+1) n (n+1)") != std::string::npos);
  CHECK(first.find("\nbast,inf,") != std::string::npos);
  delta_sweep(spec);
  CHECK(slurp(dir / "sweep.csv") == first);
}

TEST_CASE("command line") {
  const auto dir = scratch("cli");
  const auto cfg = dir / "config.json";
  {
    auto doc = small_config(dir / "run");
    doc["replications"] = 1;
    std::ofstream(cfg) << doc.dump();
  }
  const std::string cli = TREEBANDIT_CLI;
  const auto quiet = " > " + (dir / "log.txt").string() + " 2>&1";
  CHECK(std::system((cli + " run " + cfg.string() + " --reps 2 --seed 5" + quiet).c_str()) == 0);
  CHECK(fs::exists(dir / "run" / "curve_rep1.csv"));
  const auto echoed = json::parse(slurp(dir / "run" / "config.json"));
  CHECK(echoed["seed"] == 5);
  CHECK(std::system((cli + " run " + cfg.string() + " --out " + (dir / "other").string() + " --quiet" + quiet).c_str()) == 0);
  CHECK(fs::exists(dir / "other" / "summary.json"));
  CHECK(slurp(dir / "log.txt").empty());

  {
    auto doc = small_config(dir / "sweep");
    doc["sweep"] = {{"deltas", {1, "inf"}}};
    std::ofstream(dir / "sweep.json") << doc.dump();
  }
  CHECK(std::system((cli + " sweep " + (dir / "sweep.json").string() + quiet).c_str()) == 0);
  CHECK(fs::exists(dir / "sweep" / "sweep.csv"));

  {
    std::ofstream(dir / "broken.json") << "{\"algorithm\": \"nope\"}";
  }
  CHECK(std::system((cli + " run " + (dir / "broken.json").string() + quiet).c_str()) != 0);
  CHECK(slurp(dir / "log.txt").find("error:") != std::string::npos);
  CHECK(std::system((cli + quiet).c_str()) != 0);
}
