// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "edgectl/allocator.hpp"
#include "edgectl/config.hpp"
#include "edgectl/dqn.hpp"
#include "edgectl/experiment.hpp"
#include "edgectl/trace.hpp"
#include "oracles.hpp"

using namespace edgectl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

Outcome latency() {
  Outcome o;
  o.pass = true;
  std::ostringstream d;
  for (auto scenario : {Scenario::cloud_only, Scenario::edge_collab}) {
    const double expected = scenario == Scenario::cloud_only ? 1500.0 : 300.0;
    for (double jitter : {0.0, 0.1}) {
      auto cfg = default_config();
      cfg.scenario = scenario;
      cfg.controller = ControllerKind::pid;
      cfg.episodes = 4;
      cfg.eval_episodes = 0;
      cfg.latency.values.jitter = jitter;
      const auto run = run_seed(cfg, 1);
      double sum = 0.0;
      std::int64_t loops = 0;
      bool exact = true;
      for (const auto& r : run.records) {
        sum += r.latency_mean_ms * static_cast<double>(r.loops);
        loops += r.loops;
        exact = exact && r.latency_min_ms == expected && r.latency_max_ms == expected;
      }
      const double mean = sum / static_cast<double>(loops);
      bool ok = loops >= 1000;
      if (jitter == 0.0) {
        ok = ok && exact && mean == expected;
      } else {
        ok = ok && std::abs(mean - expected) <= 0.05 * expected;
      }
      o.pass = o.pass && ok;
      d << to_string(scenario) << (jitter == 0.0 ? "" : "+jitter") << " mean " << fmt("%.2f", mean)
        << " ms over " << loops << " loops; ";
    }
  }
  o.detail = d.str();
  return o;
}

Outcome allocator_oracle() {
  Rng rng(20240601);
  int mismatches = 0, infeasible = 0, greedy_above = 0, greedy_equal = 0;
  for (int k = 0; k < 200; ++k) {
    const auto g = oracle::random_gap(rng, 3, 3);
    const auto exact = alloc::solve_exact(g.modules, g.resources, g.weights);
    const auto greedy = alloc::solve_greedy(g.modules, g.resources, g.weights);
    const double brute = oracle::brute_force_gap(g);
    if (std::abs(exact.objective - brute) > 1e-9 * std::max(1.0, brute)) ++mismatches;
    if (!alloc::validate(exact, g.modules, g.resources).empty()) ++infeasible;
    if (!alloc::validate(greedy, g.modules, g.resources).empty()) ++infeasible;
    if (greedy.objective > exact.objective + 1e-12) ++greedy_above;
    if (std::abs(greedy.objective - exact.objective) <= 1e-12) ++greedy_equal;
  }
  Outcome o;
  o.pass = mismatches == 0 && infeasible == 0 && greedy_above == 0;
  o.detail = "200 instances: " + std::to_string(mismatches) + " exact/brute-force mismatches, " +
             std::to_string(infeasible) + " infeasible plans, greedy above exact " +
             std::to_string(greedy_above) + ", greedy optimal on " + std::to_string(greedy_equal);
  return o;
}

Outcome gradients() {
  Rng rng(77);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) worst = std::max(worst, oracle::gradient_check({4, 8, 9}, rng, 1e-5));
  Outcome o;
  o.pass = worst < 1e-4;
  o.detail = "max relative error " + fmt("%.3e", worst) + " over 100 draws on [4, 8, 9]";
  return o;
}

struct Sweep {
  std::vector<RunResult> dqn;
  std::vector<RunResult> pid;
};

double mean_reward(const std::vector<MetricsRecord>& rs, const std::string& phase, std::size_t from,
                   std::size_t count) {
  std::vector<double> v;
  for (const auto& r : rs) {
    if (r.phase == phase) v.push_back(r.cumulative_reward);
  }
  if (from + count > v.size()) return std::nan("");
  return std::accumulate(v.begin() + static_cast<std::ptrdiff_t>(from),
                         v.begin() + static_cast<std::ptrdiff_t>(from + count), 0.0) /
         static_cast<double>(count);
}

Outcome learning(const Sweep& s) {
  Outcome o;
  o.pass = true;
  std::ostringstream d;
  for (const auto& run : s.dqn) {
    const double first = mean_reward(run.records, "train", 0, 50);
    const double last = mean_reward(run.records, "train", 250, 50);
    const bool ok = run.status == "ok" && last > first;
    o.pass = o.pass && ok;
    d << "seed " << run.seed << ": " << fmt("%.1f", first) << " -> " << fmt("%.1f", last)
      << (run.status == "ok" ? "" : " (" + run.status + ")") << "; ";
  }
  o.detail = d.str();
  return o;
}

Outcome ordering(const Sweep& s) {
  double dqn_reward = 0.0, pid_reward = 0.0;
  int dqn_failures = 0, pid_failures = 0, dqn_n = 0, pid_n = 0;
  bool all_ok = true;
  for (const auto& run : s.dqn) {
    all_ok = all_ok && run.status == "ok";
    for (const auto& r : run.records) {
      if (r.phase != "eval") continue;
      dqn_reward += r.cumulative_reward;
      dqn_failures += r.failures;
      ++dqn_n;
    }
  }
  for (const auto& run : s.pid) {
    for (const auto& r : run.records) {
      if (r.phase != "eval") continue;
      pid_reward += r.cumulative_reward;
      pid_failures += r.failures;
      ++pid_n;
    }
  }
  Outcome o;
  const double dm = dqn_reward / std::max(dqn_n, 1), pm = pid_reward / std::max(pid_n, 1);
  o.pass = all_ok && dqn_n > 0 && pid_n == dqn_n && dm > pm && dqn_failures <= pid_failures;
  o.detail = "eval episodes: DQN mean reward " + fmt("%.1f", dm) + " vs PID " + fmt("%.1f", pm) +
             "; failures DQN " + std::to_string(dqn_failures) + " vs PID " +
             std::to_string(pid_failures);
  return o;
}

Outcome replay_and_target() {
  std::ostringstream d;
  bool ok = true;
  {
    agent::ReplayBuffer buf(5000);
    Rng rng(6);
    std::vector<double> inserted;
    std::size_t max_size = 0;
    for (int i = 0; i < 20000; ++i) {
      agent::Transition t;
      t.reward = rng.normal();
      t.action = static_cast<int>(rng.below(9));
      t.obs = {rng.uniform()};
      t.next_obs = t.obs;
      inserted.push_back(t.reward);
      buf.push(t);
      max_size = std::max(max_size, buf.size());
      if (i % 997 == 0 || i == 19999) {
        const std::size_t n = std::min<std::size_t>(inserted.size(), 5000);
        for (std::size_t k = 0; k < buf.size(); ++k) {
          if (buf.at(k).reward != inserted[inserted.size() - n + k]) ok = false;
        }
      }
    }
    ok = ok && max_size == 5000;
    d << "max buffer size " << max_size << ", FIFO order " << (ok ? "held" : "broken") << "; ";
  }
  {
    agent::Hyperparams hp;
    hp.warmup = 16;
    agent::DqnAgent ag(8, hp, 3);
    Rng rng(4);
    auto snapshot = ag.target().flat_params();
    int syncs_checked = 0, stable_violations = 0, sync_violations = 0;
    std::uint64_t last_steps = 0;
    for (int i = 0; i < 2000; ++i) {
      agent::Transition t;
      for (int k = 0; k < 8; ++k) {
        t.obs.push_back(rng.uniform(-1, 1));
        t.next_obs.push_back(rng.uniform(-1, 1));
      }
      t.action = ag.act(t.obs, 0.5);
      t.reward = -rng.uniform(0, 50);
      t.done = rng.below(20) == 0;
      ag.observe(t);
      if (ag.train_steps() == last_steps) continue;
      last_steps = ag.train_steps();
      if (last_steps % 100 == 0) {
        ++syncs_checked;
        if (!(ag.target() == ag.policy())) ++sync_violations;
        snapshot = ag.target().flat_params();
      } else if (ag.target().flat_params() != snapshot) {
        ++stable_violations;
      }
    }
    ok = ok && syncs_checked > 0 && sync_violations == 0 && stable_violations == 0;
    d << syncs_checked << " syncs checked, " << sync_violations << " unequal after sync, "
      << stable_violations << " target changes between syncs";
  }
  return {ok, d.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism(const fs::path& cli, const fs::path& work) {
  fs::remove_all(work);
  fs::create_directories(work);
  {
    std::ofstream cfg(work / "config.json");
    cfg << R"({"episodes": 6, "eval_episodes": 2, "max_steps": 300, "seeds": [11],
               "latency": {"jitter": 0.1}, "allocator": {"rebalance_interval": 20}})";
  }
  std::vector<std::string> files;
  for (const char* out : {"a", "b"}) {
    const std::string cmd = "\"" + cli.string() + "\" run --config \"" + (work / "config.json").string() +
                            "\" --out \"" + (work / out).string() + "\" > /dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, "run command failed: " + cmd};
  }
  bool same = true;
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(work / "a")) {
    const auto other = work / "b" / entry.path().filename();
    same = same && fs::exists(other) && slurp(entry.path()) == slurp(other);
    ++compared;
  }
  const auto metrics = work / "a" / "metrics_edge-collab_dqn_seed11.jsonl";
  const bool nonempty = fs::exists(metrics) && fs::file_size(metrics) > 0;
  return {same && compared >= 2 && nonempty,
          std::to_string(compared) + " output files compared, " + (same ? "byte-identical" : "different")};
}

Outcome resampling() {
  std::ostringstream csv;
  csv << "timestamp,sensor_id,value,unit\n";
  const std::vector<std::pair<std::string, std::string>> sensors{
      {"boiler_temp", "degC"}, {"room_humidity", "%RH"}, {"bus_voltage", "V"}};
  Rng rng(5);
  std::map<std::string, std::vector<double>> source;
  for (int minute = 0; minute < 60; ++minute) {
    for (const auto& [id, unit] : sensors) {
      const double v = std::round(rng.uniform(0, 1000)) / 10.0;
      source[id].push_back(v);
      csv << minute * 60 << ',' << id << ',' << v << ',' << unit << '\n';
    }
  }
  std::istringstream in(csv.str());
  const auto rows = trace::resample(trace::parse_trace(in), 60, 5);
  bool ok = true;
  std::ostringstream d;
  for (const auto& [id, unit] : sensors) {
    std::vector<double> expected;
    std::vector<std::int64_t> times;
    for (std::size_t m = 0; m < source[id].size(); ++m) {
      for (int r = 0; r < 12; ++r) {
        expected.push_back(source[id][m]);
        times.push_back(static_cast<std::int64_t>(m) * 60 + 5 * r);
      }
    }
    std::vector<double> got;
    std::vector<std::int64_t> got_times;
    for (const auto& row : rows) {
      if (row.sensor_id != id) continue;
      got.push_back(row.value);
      got_times.push_back(row.timestamp);
    }
    ok = ok && got.size() == 720 && got == expected && got_times == times;
    d << id << " " << got.size() << " rows; ";
  }
  return {ok, d.str() + (ok ? "hold values match" : "mismatch")};
}

template <typename F>
Outcome timed(F&& f, double budget_s, double& elapsed) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o = f();
  elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (elapsed >= budget_s) {
    o.pass = false;
    o.detail += " (over the " + fmt("%.0f", budget_s) + " s budget)";
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path cli = EDGECTL_CLI_PATH;
  fs::path work = fs::temp_directory_path() / "edgectl_acceptance";
  if (argc > 1) cli = argv[1];
  if (argc > 2) work = argv[2];

  int failures = 0;
  auto report = [&](int id, const std::string& name, const Outcome& o, double elapsed) {
    std::printf("[%s] %d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(),
                o.detail.c_str(), elapsed);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  };

  double t = 0.0;
  auto o1 = timed(latency, 10.0, t);
  report(1, "latency reproduction", o1, t);
  auto o2 = timed(allocator_oracle, 60.0, t);
  report(2, "allocator oracle equivalence", o2, t);
  auto o3 = timed(gradients, 30.0, t);
  report(3, "gradient correctness", o3, t);

  Sweep sweep;
  double t_dqn = 0.0, t_pid = 0.0;
  {
    auto cfg = default_config();
    cfg.seeds = {1, 2, 3, 4, 5};
    const auto t0 = std::chrono::steady_clock::now();
    sweep.dqn = run_experiment(cfg, jobs());
    t_dqn = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    cfg.controller = ControllerKind::pid;
    const auto t1 = std::chrono::steady_clock::now();
    sweep.pid = run_experiment(cfg, jobs());
    t_pid = std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
    write_results(cfg, sweep.pid, work / "sweep");
    cfg.controller = ControllerKind::dqn;
    write_results(cfg, sweep.dqn, work / "sweep");
  }
  auto o4 = learning(sweep);
  if (t_dqn >= 600.0) {
    o4.pass = false;
    o4.detail += " (over the 600 s budget)";
  }
  report(4, "learning signal", o4, t_dqn);
  auto o5 = ordering(sweep);
  if (t_dqn + t_pid >= 900.0) {
    o5.pass = false;
    o5.detail += " (over the 900 s budget)";
  }
  report(5, "DRL vs PID ordering", o5, t_dqn + t_pid);

  auto o6 = timed(replay_and_target, 60.0, t);
  report(6, "replay and target properties", o6, t);
  auto o7 = timed([&] { return determinism(cli, work / "determinism"); }, 120.0, t);
  report(7, "determinism", o7, t);
  auto o8 = timed(resampling, 10.0, t);
  report(8, "trace resampling", o8, t);

  std::printf("%d of 8 criteria passed\n", 8 - failures);
  return failures == 0 ? 0 : 1;
}
