#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "edgectl/experiment.hpp"

using namespace edgectl;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small(Scenario s, ControllerKind c = ControllerKind::dqn) {
  auto cfg = default_config();
  cfg.scenario = s;
  cfg.controller = c;
  cfg.episodes = 3;
  cfg.max_steps = 60;
  cfg.eval_episodes = 1;
  cfg.agent.warmup = 20;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("zero-jitter latencies are exact") {
  for (auto c : {ControllerKind::dqn, ControllerKind::pid}) {
    const auto cloud = run_seed(small(Scenario::cloud_only, c), 1);
    const auto edge = run_seed(small(Scenario::edge_collab, c), 1);
    for (const auto& r : cloud.records) {
      CHECK(r.latency_min_ms == 1500);
      CHECK(r.latency_max_ms == 1500);
      CHECK(r.edge_utilization == 0.0);
    }
    for (const auto& r : edge.records) {
      CHECK(r.latency_min_ms == 300);
      CHECK(r.latency_max_ms == 300);
      CHECK(r.cloud_fallback_loops == 0);
    }
  }
}

TEST_CASE("jitter keeps the mean latency close") {
  auto cfg = small(Scenario::cloud_only, ControllerKind::pid);
  cfg.latency.values.jitter = 0.1;
  const auto run = run_seed(cfg, 4);
  double sum = 0, n = 0;
  for (const auto& r : run.records) {
    sum += r.latency_mean_ms * static_cast<double>(r.loops);
    n += static_cast<double>(r.loops);
    CHECK(r.latency_min_ms >= 1500 * 0.9 - 1e-9);
    CHECK(r.latency_max_ms <= 1500 * 1.1 + 1e-9);
  }
  CHECK(std::abs(sum / n - 1500) < 75);
}

TEST_CASE("runs are deterministic and files byte-identical") {
  auto cfg = small(Scenario::edge_collab);
  cfg.seeds = {1, 2};
  const auto a = run_experiment(cfg, 1);
  const auto b = run_experiment(cfg, 2);
  REQUIRE(a.size() == 2);
  CHECK(a[0].records == b[0].records);
  CHECK(a[1].records == b[1].records);
  CHECK_FALSE(a[0].records == a[1].records);
  const auto base = fs::temp_directory_path() / "edgectl_exp_det";
  fs::remove_all(base);
  const auto fa = write_results(cfg, a, base / "a");
  const auto fb = write_results(cfg, b, base / "b");
  REQUIRE(fa.size() == 3);
  for (std::size_t i = 0; i < fa.size(); ++i) {
    CHECK(fa[i].filename() == fb[i].filename());
    CHECK(slurp(fa[i]) == slurp(fb[i]));
  }
  CHECK(fa[0].filename() == "metrics_edge-collab_dqn_seed1.jsonl");
  CHECK(read_metrics(fa[0]) == a[0].records);
}

TEST_CASE("metric bounds") {
  for (auto s : {Scenario::edge_collab, Scenario::cloud_only}) {
    const auto run = run_seed(small(s), 7);
    REQUIRE(run.records.size() == 4);
    for (const auto& r : run.records) {
      CHECK(r.action_accuracy >= 0.0);
      CHECK(r.action_accuracy <= 1.0);
      CHECK(r.edge_utilization >= 0.0);
      CHECK(r.edge_utilization <= 1.0);
      CHECK(r.uninterrupted_steps <= r.steps);
      CHECK(r.steps <= 60);
      CHECK(r.latency_min_ms >= 300);
    }
    CHECK(run.records.back().phase == "eval");
  }
}

TEST_CASE("edge latencies are all below cloud latencies") {
  auto cloud = small(Scenario::cloud_only);
  auto edge = small(Scenario::edge_collab);
  cloud.latency.values.jitter = edge.latency.values.jitter = 0.1;
  double cloud_min = 1e18, edge_max = 0;
  for (const auto& r : run_seed(cloud, 3).records) cloud_min = std::min(cloud_min, r.latency_min_ms);
  for (const auto& r : run_seed(edge, 3).records) edge_max = std::max(edge_max, r.latency_max_ms);
  CHECK(edge_max < cloud_min);
}

TEST_CASE("an unplaceable policy module falls back to the cloud") {
  auto cfg = small(Scenario::edge_collab, ControllerKind::pid);
  for (auto& r : cfg.allocator.resources) {
    r.capacity = 1.0;
    r.current_load = 0.0;
  }
  cfg.allocator.modules = {{0, 2.0, 1.0}, {1, 0.5, 0.5}};
  const auto run = run_seed(cfg, 1);
  for (const auto& r : run.records) {
    CHECK(r.latency_min_ms == 1500);
    CHECK(r.cloud_fallback_loops == r.loops);
  }
}

TEST_CASE("minute-scale cloud preset") {
  auto cfg = small(Scenario::cloud_only, ControllerKind::pid);
  cfg.latency.values = sim::cloud_minute_latency_preset();
  cfg.episodes = 1;
  const auto run = run_seed(cfg, 1);
  CHECK(run.records[0].latency_min_ms == 60000);
}

TEST_CASE("divergence marks the seed and the sweep goes on") {
  auto cfg = small(Scenario::edge_collab);
  cfg.agent.learning_rate = 1e6;
  cfg.agent.reward_scale = 1.0;
  cfg.seeds = {1, 2};
  const auto results = run_experiment(cfg, 1);
  REQUIRE(results.size() == 2);
  for (const auto& r : results) {
    CHECK(r.status == "diverged");
    CHECK_FALSE(r.message.empty());
  }
  const auto dir = fs::temp_directory_path() / "edgectl_exp_div";
  fs::remove_all(dir);
  const auto files = write_results(cfg, results, dir);
  CHECK(slurp(files[0]).find("\"status\":\"diverged\"") != std::string::npos);
}

TEST_CASE("oracle action is the best two-step lookahead") {
  const plant::PlantConfig pc;
  Rng rng(10);
  for (int k = 0; k < 50; ++k) {
    plant::BoilerState s = plant::nominal_state(pc);
    s.water_level = rng.uniform(0.3, 0.8);
    s.pressure = rng.uniform(800, 1300);
    s.pump_pos = plant::kActuatorLevels[rng.below(3)];
    s.valve_pos = plant::kActuatorLevels[rng.below(3)];
    const int best = oracle_action(pc, s, 0.95);
    auto value = [&](int a) {
      const auto r1 = plant::predict(pc, s, plant::command_from_action(a));
      if (r1.failed) return r1.reward;
      double m = -1e300;
      for (int b = 0; b < 9; ++b) m = std::max(m, plant::predict(pc, r1.state, plant::command_from_action(b)).reward);
      return r1.reward + 0.95 * m;
    };
    for (int a = 0; a < 9; ++a) {
      CHECK(value(best) >= value(a));
      if (a < best) CHECK(value(a) < value(best));
    }
  }
  CHECK(oracle_action(pc, plant::nominal_state(pc), 0.95) == 4);
}

TEST_CASE("trace-driven inlet temperature") {
  const auto dir = fs::temp_directory_path() / "edgectl_exp_trace";
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "inlet.csv");
    out << "timestamp,sensor_id,value,unit\n";
    for (int m = 0; m < 30; ++m) out << m * 60 << ",inlet," << 55 + (m % 10) << ",degC\n";
  }
  auto cfg = small(Scenario::edge_collab, ControllerKind::pid);
  cfg.trace.path = (dir / "inlet.csv").string();
  cfg.trace.sensor_id = "inlet";
  const auto a = run_seed(cfg, 1);
  const auto b = run_seed(small(Scenario::edge_collab, ControllerKind::pid), 1);
  CHECK(a.records.size() == b.records.size());
  CHECK_FALSE(a.records == b.records);
  cfg.trace.sensor_id = "other";
  CHECK_THROWS(run_seed(cfg, 1));
}
