#include "edgectl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include "edgectl/trace.hpp"

namespace edgectl {

namespace {

using sim::NodeId;
using sim::SimTime;

enum TimerTag : int { kTick = 1, kComputeDone = 2, kReport = 3, kRebalance = 4 };

// Edge servers report their state to the cloud every this many periods.
constexpr int kReportPeriods = 10;

enum class Phase { train, run, eval };

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::train: return "train";
    case Phase::run: return "run";
    case Phase::eval: return "eval";
  }
  return "?";
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  Rng base(seed);
  return base.fork(salt).bits();
}

std::uint64_t episode_seed(std::uint64_t seed, Phase phase, int episode) {
  // Train and run phases share disturbances so DQN and PID see the same
  // episodes; eval gets its own stream.
  const std::uint64_t stream = phase == Phase::eval ? 2 : 1;
  return derive_seed(seed, (stream << 32) + static_cast<std::uint64_t>(episode));
}

SimTime jittered(SimTime base, double jitter, Rng& rng) {
  if (jitter <= 0.0 || base <= 0) return base;
  const auto lo = static_cast<SimTime>(std::ceil(static_cast<double>(base) * (1.0 - jitter)));
  const auto hi = static_cast<SimTime>(std::floor(static_cast<double>(base) * (1.0 + jitter)));
  if (hi <= lo) return lo;
  return lo + static_cast<SimTime>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

std::vector<double> state_values(const plant::BoilerState& s) {
  return {s.inlet_temp, s.outlet_temp, s.water_level, s.pressure, s.pump_pos, s.valve_pos};
}

plant::BoilerState state_from_values(const std::vector<double>& v) {
  plant::BoilerState s;
  s.inlet_temp = v[0];
  s.outlet_temp = v[1];
  s.water_level = v[2];
  s.pressure = v[3];
  s.pump_pos = v[4];
  s.valve_pos = v[5];
  return s;
}

struct EpisodeStats {
  int steps = 0;
  double reward = 0.0;
  double deviation = 0.0;
  bool failed = false;
  std::vector<double> latencies;
  std::int64_t matches = 0;
  std::int64_t fallback = 0;
  double busy_ms = 0.0;
  double loss_sum = 0.0;
  std::int64_t loss_count = 0;
};

class SeedRun {
 public:
  SeedRun(const ExperimentConfig& cfg, std::uint64_t seed) : cfg_(cfg), seed_(seed) {
    alloc_rng_ = Rng(derive_seed(seed, 0xA110C));
    if (cfg.controller == ControllerKind::dqn) {
      agent_.emplace(static_cast<int>(plant::kObservationLength), cfg.agent,
                     derive_seed(seed, 0xA6E47));
    } else {
      pid_.emplace(cfg.pid, cfg.plant);
    }
    if (!cfg.trace.path.empty()) {
      const auto rows = trace::ingest_trace(cfg.trace.path, static_cast<int>(cfg.plant.dt_s),
                                            cfg.trace.source_period_s);
      inlet_trace_ = trace::channel(rows, cfg.trace.sensor_id);
      if (inlet_trace_.empty()) {
        throw std::runtime_error("trace has no samples for sensor " + cfg.trace.sensor_id);
      }
      const double mean = std::accumulate(inlet_trace_.begin(), inlet_trace_.end(), 0.0) /
                          static_cast<double>(inlet_trace_.size());
      for (auto& v : inlet_trace_) v = cfg.plant.nominal_inlet + (v - mean);
    }
    const auto& res = cfg.allocator.resources;
    background_.assign(res.size(), 0.0);
    if (cfg.scenario == Scenario::edge_collab) {
      plan_ = solve(nullptr, res);
      update_policy_host();
    }
  }

  RunResult run() {
    RunResult result;
    result.seed = seed_;
    try {
      if (agent_) {
        for (int e = 0; e < cfg_.episodes; ++e) {
          result.records.push_back(run_episode(Phase::train, e));
        }
      } else {
        for (int e = 0; e < cfg_.episodes; ++e) {
          result.records.push_back(run_episode(Phase::run, e));
        }
      }
      for (int e = 0; e < cfg_.eval_episodes; ++e) {
        result.records.push_back(run_episode(Phase::eval, e));
      }
    } catch (const agent::DivergenceError& err) {
      result.status = "diverged";
      result.message = err.what();
    }
    return result;
  }

 private:
  alloc::AssignmentPlan solve(const alloc::AssignmentPlan* previous,
                              const std::vector<alloc::EdgeResource>& resources) {
    const auto& a = cfg_.allocator;
    if (a.mode == "greedy") return alloc::solve_greedy(a.modules, resources, a.weights, previous);
    if (previous) return alloc::rebalance(*previous, a.modules, resources, a.weights);
    return alloc::solve_exact(a.modules, resources, a.weights);
  }

  void update_policy_host() {
    policy_host_resource_ = -1;
    const auto& mods = cfg_.allocator.modules;
    for (std::size_t j = 0; j < mods.size(); ++j) {
      if (mods[j].id != cfg_.allocator.policy_module) continue;
      policy_host_resource_ = plan_.host_index(j);
    }
  }

  sim::Topology build_topology() {
    const auto& lat = cfg_.latency.values;
    const double j = lat.jitter;
    sim::Topology topo;
    edge_nodes_.clear();
    for (std::size_t i = 0; i < cfg_.allocator.resources.size(); ++i) {
      edge_nodes_.push_back(topo.add_node(sim::NodeKind::edge_server,
                                          "edge-" + std::to_string(cfg_.allocator.resources[i].id)));
    }
    cloud_node_ = topo.add_node(sim::NodeKind::cloud_center, "cloud");
    sensor_node_ = topo.add_node(sim::NodeKind::sensor, "boiler", edge_nodes_.front());
    for (NodeId e : edge_nodes_) {
      topo.set_link(sensor_node_, e, {lat.edge.uplink_ms, j});
      topo.set_link(e, sensor_node_, {lat.edge.downlink_ms, j});
      topo.set_link(e, cloud_node_, {lat.backhaul_ms, j});
      topo.set_link(cloud_node_, e, {lat.backhaul_ms, j});
    }
    topo.set_link(sensor_node_, cloud_node_, {lat.cloud.uplink_ms, j});
    topo.set_link(cloud_node_, sensor_node_, {lat.cloud.downlink_ms, j});
    topo.validate();
    return topo;
  }

  NodeId route() const {
    if (cfg_.scenario == Scenario::cloud_only || policy_host_resource_ < 0) return cloud_node_;
    return edge_nodes_[static_cast<std::size_t>(policy_host_resource_)];
  }

  int edge_index(NodeId node) const {
    for (std::size_t i = 0; i < edge_nodes_.size(); ++i) {
      if (edge_nodes_[i] == node) return static_cast<int>(i);
    }
    return -1;
  }

  // Controller side: turns a reading into an action, learning on the way.
  std::optional<int> decide(const sim::SensorReading& reading) {
    const auto state = state_from_values(reading.values);
    if (pid_) {
      if (reading.last) return std::nullopt;
      return plant::action_from_command(pid_->act(state));
    }
    auto obs = plant::observe(cfg_.plant, state, history_);
    if (training_ && prev_obs_) {
      agent::Transition t{*prev_obs_, prev_action_, reading.reward, obs, reading.done};
      const double loss = agent_->observe(std::move(t));
      if (loss >= 0.0) {
        stats_.loss_sum += loss;
        ++stats_.loss_count;
      }
    }
    history_.push_back({state, reading.reward});
    if (history_.size() > plant::kHistoryLength) history_.erase(history_.begin());
    if (reading.last) return std::nullopt;
    const double eps = training_ ? epsilon_ : 0.0;
    const int action = agent_->act(obs, eps);
    prev_obs_ = std::move(obs);
    prev_action_ = action;
    if (training_) ++env_steps_;
    return action;
  }

  std::vector<sim::Outgoing> on_controller(NodeId self, const sim::Event& ev, SimTime now) {
    std::vector<sim::Outgoing> out;
    if (const auto* reading = std::get_if<sim::SensorReading>(&ev.payload)) {
      auto& q = pending_[self];
      q.push_back(*reading);
      const SimTime compute = jittered(cfg_.latency.values.edge.compute_ms, cfg_.latency.values.jitter,
                                       compute_rng_);
      const SimTime cloud_compute = jittered(cfg_.latency.values.cloud.compute_ms,
                                             cfg_.latency.values.jitter, compute_rng_);
      const SimTime cost = self == cloud_node_ ? cloud_compute : compute;
      SimTime& busy_until = busy_until_[self];
      const SimTime start = std::max(now, busy_until);
      busy_until = start + cost;
      if (edge_index(self) >= 0) stats_.busy_ms += static_cast<double>(cost);
      out.push_back({self, sim::Timer{kComputeDone, reading->loop_id}, busy_until - now});
      return out;
    }
    if (const auto* timer = std::get_if<sim::Timer>(&ev.payload)) {
      if (timer->tag == kComputeDone) {
        auto& q = pending_[self];
        const sim::SensorReading reading = std::move(q.front());
        q.pop_front();
        if (auto action = decide(reading)) {
          out.push_back({sensor_node_,
                         sim::ControlCommand{reading.loop_id, reading.emitted_at, *action}, 0});
        }
      } else if (timer->tag == kReport && self != cloud_node_) {
        const int i = edge_index(self);
        const auto& r = cfg_.allocator.resources[static_cast<std::size_t>(i)];
        auto& bg = background_[static_cast<std::size_t>(i)];
        bg += alloc_rng_.normal() * cfg_.allocator.load_drift * r.capacity;
        bg = std::clamp(bg, 0.0, cfg_.allocator.max_background_fraction * r.capacity);
        out.push_back({cloud_node_, sim::StateReport{self, stats_.busy_ms, bg}, 0});
        if (episode_active_) {
          out.push_back({self, sim::Timer{kReport, 0}, kReportPeriods * sim::kControlPeriodMs});
        }
      } else if (timer->tag == kRebalance && self == cloud_node_) {
        const auto updated = solve(&plan_, reported_resources());
        const bool changed = updated.x != plan_.x;
        plan_ = updated;
        if (changed) {
          sim::AllocationUpdate upd;
          for (std::size_t j = 0; j < cfg_.allocator.modules.size(); ++j) {
            const int h = plan_.host_index(j);
            upd.host_of_module.push_back(h < 0 ? -1 : edge_nodes_[static_cast<std::size_t>(h)]);
          }
          out.push_back({sensor_node_, upd, 0});
        }
        if (episode_active_) {
          out.push_back({self, sim::Timer{kRebalance, 0},
                         cfg_.allocator.rebalance_interval * sim::kControlPeriodMs});
        }
      }
      return out;
    }
    if (const auto* report = std::get_if<sim::StateReport>(&ev.payload)) {
      reported_background_[report->from] = report->background_load;
    }
    return out;
  }

  std::vector<alloc::EdgeResource> reported_resources() const {
    auto res = cfg_.allocator.resources;
    for (std::size_t i = 0; i < res.size(); ++i) {
      auto it = reported_background_.find(edge_nodes_[i]);
      if (it != reported_background_.end()) res[i].current_load += it->second;
    }
    return res;
  }

  std::vector<sim::Outgoing> on_sensor(const sim::Event& ev, SimTime now) {
    std::vector<sim::Outgoing> out;
    const auto& pc = cfg_.plant;
    if (const auto* cmd = std::get_if<sim::ControlCommand>(&ev.payload)) {
      if (!episode_active_) return out;
      stats_.latencies.push_back(static_cast<double>(now - cmd->reading_emitted_at));
      if (auto it = oracle_.find(cmd->loop_id); it != oracle_.end()) {
        if (it->second == cmd->action) ++stats_.matches;
        oracle_.erase(it);
      }
      current_ = plant::advance(pc, current_, applied_,
                                static_cast<double>(now - segment_start_) / 1000.0);
      segment_start_ = now;
      applied_ = plant::command_from_action(cmd->action);
      return out;
    }
    if (const auto* upd = std::get_if<sim::AllocationUpdate>(&ev.payload)) {
      const auto& mods = cfg_.allocator.modules;
      for (std::size_t j = 0; j < mods.size() && j < upd->host_of_module.size(); ++j) {
        if (mods[j].id != cfg_.allocator.policy_module) continue;
        policy_host_resource_ = edge_index(upd->host_of_module[j]);
      }
      return out;
    }
    const auto* timer = std::get_if<sim::Timer>(&ev.payload);
    if (!timer || timer->tag != kTick) return out;

    double reward = 0.0;
    if (tick_ == 0) {
      start_ = plant::reset(pc, plant_rng_);
      applied_ = {start_.pump_pos, start_.valve_pos};
    } else {
      const auto integrated = plant::advance(pc, current_, applied_,
                                             static_cast<double>(now - segment_start_) / 1000.0);
      auto noise = plant::sample_noise(pc, plant_rng_);
      if (!inlet_trace_.empty()) {
        const double target =
            inlet_trace_[static_cast<std::size_t>(global_period_) % inlet_trace_.size()];
        noise.inlet_temp = target - integrated.inlet_temp;
      }
      const auto res = plant::finish_period(pc, start_, integrated, noise);
      reward = res.reward;
      start_ = res.state;
      ++stats_.steps;
      ++global_period_;
      stats_.reward += res.reward;
      stats_.deviation += plant::deviation_cost(pc, res.state);
      stats_.failed = res.failed;
    }
    current_ = start_;
    segment_start_ = now;
    ++tick_;

    sim::SensorReading reading;
    reading.loop_id = tick_;
    reading.emitted_at = now;
    reading.values = state_values(start_);
    reading.reward = reward;
    reading.done = stats_.failed;
    reading.last = stats_.failed || stats_.steps >= cfg_.max_steps;
    if (!reading.last) {
      oracle_[reading.loop_id] = oracle_action(pc, start_, cfg_.agent.gamma);
    } else {
      episode_active_ = false;
    }
    const NodeId target = route();
    if (target == cloud_node_ && cfg_.scenario == Scenario::edge_collab && !reading.last) {
      ++stats_.fallback;
    }
    const bool last = reading.last;
    out.push_back({target, std::move(reading), 0});
    if (!last) out.push_back({sensor_node_, sim::Timer{kTick, 0}, sim::kControlPeriodMs});
    return out;
  }

  MetricsRecord run_episode(Phase phase, int episode) {
    const std::uint64_t eseed = episode_seed(seed_, phase, episode);
    Rng episode_rng(eseed);
    plant_rng_ = episode_rng.fork(1);
    compute_rng_ = episode_rng.fork(2);
    sim::Kernel kernel(build_topology(), episode_rng.fork(3).bits());

    training_ = phase == Phase::train;
    const std::uint64_t total = static_cast<std::uint64_t>(cfg_.episodes) *
                                static_cast<std::uint64_t>(cfg_.max_steps);
    epsilon_ = agent_ ? agent::epsilon_at(cfg_.agent, env_steps_, total) : 0.0;
    stats_ = EpisodeStats{};
    tick_ = 0;
    oracle_.clear();
    pending_.clear();
    busy_until_.clear();
    history_.clear();
    prev_obs_.reset();
    if (pid_) pid_->reset();
    if (cfg_.scenario == Scenario::edge_collab) update_policy_host();
    episode_active_ = true;

    kernel.set_handler(sensor_node_, [this](const sim::Event& ev, SimTime now) {
      if (training_ && agent_) {
        epsilon_ = agent::epsilon_at(
            cfg_.agent, env_steps_,
            static_cast<std::uint64_t>(cfg_.episodes) * static_cast<std::uint64_t>(cfg_.max_steps));
      }
      return on_sensor(ev, now);
    });
    for (NodeId e : edge_nodes_) {
      kernel.set_handler(e, [this, e](const sim::Event& ev, SimTime now) {
        return on_controller(e, ev, now);
      });
    }
    kernel.set_handler(cloud_node_, [this](const sim::Event& ev, SimTime now) {
      return on_controller(cloud_node_, ev, now);
    });

    kernel.schedule_local(sensor_node_, sim::Timer{kTick, 0}, 0);
    if (cfg_.scenario == Scenario::edge_collab) {
      for (NodeId e : edge_nodes_) {
        kernel.schedule_local(e, sim::Timer{kReport, 0}, kReportPeriods * sim::kControlPeriodMs);
      }
      const std::int64_t interval = cfg_.allocator.rebalance_interval;
      const std::int64_t until_next = interval - (global_period_ % interval);
      kernel.schedule_local(cloud_node_, sim::Timer{kRebalance, 0},
                            until_next * sim::kControlPeriodMs);
    }
    kernel.run();

    MetricsRecord r;
    r.seed = seed_;
    r.scenario = to_string(cfg_.scenario);
    r.controller = to_string(cfg_.controller);
    r.phase = phase_name(phase);
    r.episode = episode;
    r.steps = stats_.steps;
    r.cumulative_reward = stats_.reward;
    r.loops = static_cast<std::int64_t>(stats_.latencies.size());
    if (!stats_.latencies.empty()) {
      const auto& l = stats_.latencies;
      r.latency_mean_ms = std::accumulate(l.begin(), l.end(), 0.0) / static_cast<double>(l.size());
      r.latency_p50_ms = percentile(l, 50.0);
      r.latency_p95_ms = percentile(l, 95.0);
      r.latency_min_ms = *std::min_element(l.begin(), l.end());
      r.latency_max_ms = *std::max_element(l.begin(), l.end());
      r.action_accuracy = static_cast<double>(stats_.matches) / static_cast<double>(l.size());
    }
    r.failures = stats_.failed ? 1 : 0;
    r.uninterrupted_steps = stats_.steps - r.failures;
    r.control_loss = stats_.steps > 0 ? stats_.deviation / stats_.steps : 0.0;
    const double duration_ms = static_cast<double>(std::max(stats_.steps, 1)) *
                               static_cast<double>(sim::kControlPeriodMs);
    r.edge_utilization =
        std::clamp(stats_.busy_ms / (duration_ms * static_cast<double>(edge_nodes_.size())), 0.0, 1.0);
    r.cloud_fallback_loops = stats_.fallback;
    r.epsilon = training_ ? agent::epsilon_at(cfg_.agent, env_steps_, total) : 0.0;
    r.mean_td_loss = stats_.loss_count > 0 ? stats_.loss_sum / static_cast<double>(stats_.loss_count) : 0.0;
    r.train_steps = agent_ ? static_cast<std::int64_t>(agent_->train_steps()) : 0;
    return r;
  }

  const ExperimentConfig& cfg_;
  std::uint64_t seed_;
  std::optional<agent::DqnAgent> agent_;
  std::optional<pid::BoilerPid> pid_;
  std::vector<double> inlet_trace_;

  Rng alloc_rng_;
  Rng plant_rng_;
  Rng compute_rng_;
  alloc::AssignmentPlan plan_;
  int policy_host_resource_ = 0;
  std::vector<double> background_;
  std::map<NodeId, double> reported_background_;

  std::vector<NodeId> edge_nodes_;
  NodeId cloud_node_ = -1;
  NodeId sensor_node_ = -1;

  // Per-episode state.
  bool training_ = false;
  bool episode_active_ = false;
  double epsilon_ = 0.0;
  std::uint64_t env_steps_ = 0;
  std::int64_t global_period_ = 0;
  std::int64_t tick_ = 0;
  EpisodeStats stats_;
  plant::BoilerState start_;
  plant::BoilerState current_;
  plant::ActuatorCommand applied_;
  SimTime segment_start_ = 0;
  std::map<std::int64_t, int> oracle_;
  std::map<NodeId, std::deque<sim::SensorReading>> pending_;
  std::map<NodeId, SimTime> busy_until_;
  std::vector<plant::HistoryEntry> history_;
  std::optional<std::vector<double>> prev_obs_;
  int prev_action_ = 0;
};

}  // namespace

int oracle_action(const plant::PlantConfig& cfg, const plant::BoilerState& s, double gamma) {
  int best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < plant::kNumActions; ++a) {
    const auto first = plant::predict(cfg, s, plant::command_from_action(a));
    double value = first.reward;
    if (!first.failed) {
      double next_best = -std::numeric_limits<double>::infinity();
      for (int b = 0; b < plant::kNumActions; ++b) {
        next_best = std::max(next_best,
                             plant::predict(cfg, first.state, plant::command_from_action(b)).reward);
      }
      value += gamma * next_best;
    }
    if (value > best_value) {
      best_value = value;
      best = a;
    }
  }
  return best;
}

RunResult run_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  SeedRun run(cfg, seed);
  return run.run();
}

std::vector<RunResult> run_experiment(const ExperimentConfig& cfg, int jobs) {
  validate(cfg);
  std::vector<RunResult> results(cfg.seeds.size());
  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1, cfg.seeds.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) results[i] = run_seed(cfg, cfg.seeds[i]);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < cfg.seeds.size(); i = next++) {
        try {
          results[i] = run_seed(cfg, cfg.seeds[i]);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return results;
}

std::string metrics_filename(const ExperimentConfig& cfg, std::uint64_t seed) {
  return std::string("metrics_") + to_string(cfg.scenario) + "_" + to_string(cfg.controller) +
         "_seed" + std::to_string(seed) + ".jsonl";
}

std::vector<std::filesystem::path> write_results(const ExperimentConfig& cfg,
                                                 const std::vector<RunResult>& results,
                                                 const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (const auto& r : results) {
    const auto path = out_dir / metrics_filename(cfg, r.seed);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const auto& rec : r.records) write_metrics_line(rec, out);
    if (r.status != "ok") {
      out << nlohmann::json{{"seed", r.seed}, {"status", r.status}, {"message", r.message}}.dump()
          << '\n';
    }
    if (!out) throw std::runtime_error("error writing " + path.string());
    written.push_back(path);
  }

  const auto summary = out_dir / (std::string("summary_") + to_string(cfg.scenario) + "_" +
                                  to_string(cfg.controller) + ".csv");
  std::ofstream out(summary, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + summary.string());
  out << "seed,status,phase,episodes,run_reward,mean_reward,failures,mean_latency_ms,"
         "mean_control_loss,mean_action_accuracy,mean_uninterrupted_steps\n";
  for (const auto& r : results) {
    std::vector<std::string> phases;
    for (const auto& rec : r.records) {
      if (std::find(phases.begin(), phases.end(), rec.phase) == phases.end()) phases.push_back(rec.phase);
    }
    if (phases.empty()) {
      out << r.seed << ',' << r.status << ",,0,0,0,0,0,0,0,0\n";
      continue;
    }
    for (const auto& phase : phases) {
      double reward = 0.0, latency = 0.0, loss = 0.0, acc = 0.0, up = 0.0;
      long failures = 0, n = 0;
      for (const auto& rec : r.records) {
        if (rec.phase != phase) continue;
        ++n;
        reward += rec.cumulative_reward;
        latency += rec.latency_mean_ms;
        loss += rec.control_loss;
        acc += rec.action_accuracy;
        up += rec.uninterrupted_steps;
        failures += rec.failures;
      }
      const double dn = static_cast<double>(n);
      out << r.seed << ',' << r.status << ',' << phase << ',' << n << ',' << format_number(reward)
          << ',' << format_number(reward / dn) << ',' << failures << ','
          << format_number(latency / dn) << ',' << format_number(loss / dn) << ','
          << format_number(acc / dn) << ',' << format_number(up / dn) << '\n';
    }
  }
  if (!out) throw std::runtime_error("error writing " + summary.string());
  written.push_back(summary);
  return written;
}

}  // namespace edgectl
