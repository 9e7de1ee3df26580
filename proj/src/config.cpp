#include "edgectl/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace edgectl {

const char* to_string(Scenario s) {
  return s == Scenario::cloud_only ? "cloud-only" : "edge-collab";
}

const char* to_string(ControllerKind c) { return c == ControllerKind::dqn ? "dqn" : "pid"; }

Scenario parse_scenario(const std::string& s) {
  if (s == "cloud-only") return Scenario::cloud_only;
  if (s == "edge-collab") return Scenario::edge_collab;
  throw ConfigError("scenario", "expected cloud-only or edge-collab, got \"" + s + "\"");
}

ControllerKind parse_controller(const std::string& s) {
  if (s == "dqn") return ControllerKind::dqn;
  if (s == "pid") return ControllerKind::pid;
  throw ConfigError("controller", "expected dqn or pid, got \"" + s + "\"");
}

std::vector<alloc::EdgeResource> default_edge_resources() {
  return {
      {0, 4.0, 0.5, 100.0, 1.0},
      {1, 3.0, 0.5, 50.0, 0.6},
      {2, 2.5, 0.5, 80.0, 0.8},
  };
}

std::vector<alloc::ControlModule> default_control_modules() {
  // 0: Q-policy, 1: state estimator, 2: data preprocessing, 3: anomaly monitor.
  return {
      {0, 1.5, 1.0},
      {1, 1.0, 0.6},
      {2, 0.8, 0.3},
      {3, 0.7, 0.5},
  };
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.allocator.resources = default_edge_resources();
  cfg.allocator.modules = default_control_modules();
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') {
    cfg.out_dir = env;
  }
  return cfg;
}

namespace {

class Section {
 public:
  Section(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  bool has(const std::string& k) {
    seen_.insert(k);
    return j_.contains(k);
  }

  template <typename T>
  void get(const std::string& k, T& out) {
    if (!has(k)) return;
    const auto& v = j_.at(k);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(key(k), "expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError(key(k), "expected an integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError(key(k), "expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError(key(k), "expected a string");
      }
      out = v.get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(key(k), e.what());
    }
  }

  Section child(const std::string& k) {
    seen_.insert(k);
    static const nlohmann::json empty = nlohmann::json::object();
    return Section(j_.contains(k) ? j_.at(k) : empty, key(k));
  }

  const nlohmann::json& raw(const std::string& k) {
    seen_.insert(k);
    return j_.at(k);
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError(key(k), "unknown key");
    }
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

void read_loop(Section s, sim::LoopLatency& loop) {
  s.get("uplink_ms", loop.uplink_ms);
  s.get("compute_ms", loop.compute_ms);
  s.get("downlink_ms", loop.downlink_ms);
  s.finish();
}

void read_gains(Section s, pid::PidGains& g) {
  s.get("kp", g.kp);
  s.get("ki", g.ki);
  s.get("kd", g.kd);
  s.get("output_lo", g.output_lo);
  s.get("output_hi", g.output_hi);
  s.get("integral_clamp", g.integral_clamp);
  s.finish();
}

void read_plant(Section s, plant::PlantConfig& p) {
  s.get("dt_s", p.dt_s);
  s.get("level_setpoint", p.level_setpoint);
  s.get("nominal_pressure", p.nominal_pressure);
  s.get("outlet_setpoint", p.outlet_setpoint);
  s.get("nominal_inlet", p.nominal_inlet);
  s.get("inflow_rate", p.inflow_rate);
  s.get("outflow_rate", p.outflow_rate);
  s.get("pressure_tau_s", p.pressure_tau_s);
  s.get("pressure_temp_gain", p.pressure_temp_gain);
  s.get("pressure_valve_gain", p.pressure_valve_gain);
  s.get("temp_tau_s", p.temp_tau_s);
  s.get("temp_level_loss", p.temp_level_loss);
  s.get("inlet_reversion_per_s", p.inlet_reversion_per_s);
  {
    auto e = s.child("envelope");
    e.get("min_level", p.envelope.min_level);
    e.get("max_level", p.envelope.max_level);
    e.get("max_pressure", p.envelope.max_pressure);
    e.get("max_outlet_temp", p.envelope.max_outlet_temp);
    e.finish();
  }
  {
    auto r = s.child("reward");
    r.get("level", p.reward.level);
    r.get("pressure", p.reward.pressure);
    r.get("outlet_temp", p.reward.outlet_temp);
    r.get("actuation", p.reward.actuation);
    r.get("failure_penalty", p.reward.failure_penalty);
    r.finish();
  }
  {
    auto n = s.child("noise");
    n.get("level", p.noise.level);
    n.get("pressure", p.noise.pressure);
    n.get("outlet_temp", p.noise.outlet_temp);
    n.get("inlet_temp", p.noise.inlet_temp);
    n.get("reset_level", p.noise.reset_level);
    n.get("reset_pressure", p.noise.reset_pressure);
    n.get("reset_outlet_temp", p.noise.reset_outlet_temp);
    n.get("reset_inlet_temp", p.noise.reset_inlet_temp);
    n.finish();
  }
  s.finish();
}

void read_agent(Section s, agent::Hyperparams& h) {
  s.get("learning_rate", h.learning_rate);
  s.get("gamma", h.gamma);
  s.get("target_update", h.target_update);
  s.get("batch_size", h.batch_size);
  s.get("replay_capacity", h.replay_capacity);
  if (s.has("hidden")) {
    const auto& v = s.raw("hidden");
    if (!v.is_array()) throw ConfigError(s.key("hidden"), "expected an array of integers");
    h.hidden.clear();
    for (const auto& e : v) {
      if (!e.is_number_integer()) throw ConfigError(s.key("hidden"), "expected integers");
      h.hidden.push_back(e.get<int>());
    }
  }
  s.get("epsilon_start", h.epsilon_start);
  s.get("epsilon_end", h.epsilon_end);
  s.get("epsilon_decay_fraction", h.epsilon_decay_fraction);
  s.get("train_every", h.train_every);
  s.get("warmup", h.warmup);
  s.get("reward_scale", h.reward_scale);
  s.finish();
}

void read_allocator(Section s, AllocatorConfig& a) {
  s.get("mode", a.mode);
  {
    auto w = s.child("weights");
    w.get("bandwidth", a.weights.bandwidth);
    w.get("compute", a.weights.compute);
    w.finish();
  }
  s.get("rebalance_interval", a.rebalance_interval);
  s.get("load_drift", a.load_drift);
  s.get("max_background_fraction", a.max_background_fraction);
  s.get("policy_module", a.policy_module);
  if (s.has("resources")) {
    const auto& arr = s.raw("resources");
    if (!arr.is_array()) throw ConfigError(s.key("resources"), "expected an array");
    a.resources.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Section r(arr[i], s.key("resources[" + std::to_string(i) + "]"));
      alloc::EdgeResource res;
      res.id = static_cast<int>(i);
      r.get("id", res.id);
      r.get("capacity", res.capacity);
      r.get("current_load", res.current_load);
      r.get("bandwidth", res.bandwidth);
      r.get("compute_rating", res.compute_rating);
      r.finish();
      a.resources.push_back(res);
    }
  }
  if (s.has("modules")) {
    const auto& arr = s.raw("modules");
    if (!arr.is_array()) throw ConfigError(s.key("modules"), "expected an array");
    a.modules.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Section m(arr[i], s.key("modules[" + std::to_string(i) + "]"));
      alloc::ControlModule mod;
      mod.id = static_cast<int>(i);
      m.get("id", mod.id);
      m.get("load", mod.load);
      m.get("intensity", mod.intensity);
      m.finish();
      a.modules.push_back(mod);
    }
  }
  s.finish();
}

}  // namespace

void validate(const ExperimentConfig& c) {
  require(!c.seeds.empty(), "seeds", "at least one seed is required");
  require(c.episodes >= 1, "episodes", "must be >= 1");
  require(c.max_steps >= 1, "max_steps", "must be >= 1");
  require(c.eval_episodes >= 0, "eval_episodes", "must be >= 0");

  const auto& p = c.plant;
  require(p.dt_s > 0.0, "plant.dt_s", "must be > 0");
  require(p.level_setpoint > 0.0 && p.level_setpoint < 1.0, "plant.level_setpoint", "must lie in (0, 1)");
  require(p.nominal_pressure > 0.0, "plant.nominal_pressure", "must be > 0");
  require(p.outlet_setpoint > 0.0 && p.outlet_setpoint < 600.0, "plant.outlet_setpoint", "must lie in (0, 600)");
  require(p.nominal_inlet >= 0.0 && p.nominal_inlet < p.outlet_setpoint, "plant.nominal_inlet",
          "must lie in [0, outlet_setpoint)");
  require(p.inflow_rate > 0.0, "plant.inflow_rate", "must be > 0");
  require(p.outflow_rate > 0.0, "plant.outflow_rate", "must be > 0");
  require(p.pressure_tau_s >= p.dt_s, "plant.pressure_tau_s", "must be >= dt_s");
  require(p.temp_tau_s >= p.dt_s, "plant.temp_tau_s", "must be >= dt_s");
  require(p.inlet_reversion_per_s >= 0.0 && p.inlet_reversion_per_s * p.dt_s <= 1.0,
          "plant.inlet_reversion_per_s", "must lie in [0, 1/dt_s]");
  const auto& e = p.envelope;
  require(e.min_level < e.max_level, "plant.envelope.min_level", "must be < max_level");
  require(e.min_level >= 0.0 && e.max_level <= 1.0, "plant.envelope.max_level", "levels must lie in [0, 1]");
  require(e.min_level < p.level_setpoint && p.level_setpoint < e.max_level, "plant.level_setpoint",
          "must lie inside the envelope");
  require(e.max_pressure > p.nominal_pressure, "plant.envelope.max_pressure", "must exceed nominal_pressure");
  require(e.max_outlet_temp > p.outlet_setpoint, "plant.envelope.max_outlet_temp",
          "must exceed outlet_setpoint");
  const auto& w = p.reward;
  require(w.level >= 0.0, "plant.reward.level", "must be >= 0");
  require(w.pressure >= 0.0, "plant.reward.pressure", "must be >= 0");
  require(w.outlet_temp >= 0.0, "plant.reward.outlet_temp", "must be >= 0");
  require(w.actuation >= 0.0, "plant.reward.actuation", "must be >= 0");
  require(w.failure_penalty >= 0.0, "plant.reward.failure_penalty", "must be >= 0");
  const auto& n = p.noise;
  for (double v : {n.level, n.pressure, n.outlet_temp, n.inlet_temp, n.reset_level, n.reset_pressure,
                   n.reset_outlet_temp, n.reset_inlet_temp}) {
    require(v >= 0.0, "plant.noise", "noise amplitudes must be >= 0");
  }

  const auto& h = c.agent;
  require(h.learning_rate > 0.0, "agent.learning_rate", "must be > 0");
  require(h.gamma > 0.0 && h.gamma < 1.0, "agent.gamma", "must lie in (0, 1)");
  require(h.target_update >= 1, "agent.target_update", "must be >= 1");
  require(h.batch_size >= 1, "agent.batch_size", "must be >= 1");
  require(h.replay_capacity >= h.batch_size, "agent.replay_capacity", "must be >= batch_size");
  for (int width : h.hidden) require(width > 0, "agent.hidden", "layer widths must be > 0");
  require(h.epsilon_start >= 0.0 && h.epsilon_start <= 1.0, "agent.epsilon_start", "must lie in [0, 1]");
  require(h.epsilon_end >= 0.0 && h.epsilon_end <= 1.0, "agent.epsilon_end", "must lie in [0, 1]");
  require(h.epsilon_decay_fraction >= 0.0 && h.epsilon_decay_fraction <= 1.0,
          "agent.epsilon_decay_fraction", "must lie in [0, 1]");
  require(h.train_every >= 1, "agent.train_every", "must be >= 1");
  require(h.warmup >= 0, "agent.warmup", "must be >= 0");
  require(h.reward_scale > 0.0, "agent.reward_scale", "must be > 0");

  try {
    pid::check_gains(c.pid.level);
  } catch (const std::invalid_argument& ex) {
    throw ConfigError("pid.level", ex.what());
  }
  try {
    pid::check_gains(c.pid.pressure);
  } catch (const std::invalid_argument& ex) {
    throw ConfigError("pid.pressure", ex.what());
  }

  const auto& l = c.latency.values;
  for (const auto* loop : {&l.edge, &l.cloud}) {
    require(loop->uplink_ms > 0 && loop->downlink_ms > 0, "latency", "link delays must be > 0");
    require(loop->compute_ms >= 0, "latency", "compute delay must be >= 0");
  }
  require(l.backhaul_ms > 0, "latency.backhaul_ms", "must be > 0");
  require(l.jitter >= 0.0 && l.jitter < 1.0, "latency.jitter", "must lie in [0, 1)");

  const auto& a = c.allocator;
  require(a.mode == "exact" || a.mode == "greedy", "allocator.mode", "expected exact or greedy");
  try {
    alloc::check_weights(a.weights);
  } catch (const std::invalid_argument& ex) {
    throw ConfigError("allocator.weights", ex.what());
  }
  require(a.rebalance_interval >= 1, "allocator.rebalance_interval", "must be >= 1");
  require(a.load_drift >= 0.0, "allocator.load_drift", "must be >= 0");
  require(a.max_background_fraction >= 0.0 && a.max_background_fraction <= 1.0,
          "allocator.max_background_fraction", "must lie in [0, 1]");
  require(!a.resources.empty() || c.scenario == Scenario::cloud_only, "allocator.resources",
          "edge-collab needs at least one edge resource");
  std::set<int> ids;
  for (const auto& r : a.resources) {
    require(ids.insert(r.id).second, "allocator.resources", "duplicate resource id");
    require(r.capacity > 0.0, "allocator.resources", "capacity must be > 0");
    require(r.current_load >= 0.0 && r.current_load <= r.capacity, "allocator.resources",
            "current_load must lie in [0, capacity]");
    require(r.bandwidth > 0.0, "allocator.resources", "bandwidth must be > 0");
    require(r.compute_rating > 0.0 && r.compute_rating <= 1.0, "allocator.resources",
            "compute_rating must lie in (0, 1]");
  }
  ids.clear();
  bool has_policy = false;
  for (const auto& m : a.modules) {
    require(ids.insert(m.id).second, "allocator.modules", "duplicate module id");
    require(m.load > 0.0, "allocator.modules", "load must be > 0");
    require(m.intensity > 0.0 && m.intensity <= 1.0, "allocator.modules", "intensity must lie in (0, 1]");
    has_policy = has_policy || m.id == a.policy_module;
  }
  require(has_policy || c.scenario == Scenario::cloud_only, "allocator.policy_module",
          "no module with this id");

  if (!c.trace.path.empty()) {
    require(std::filesystem::exists(c.trace.path), "trace.path", "file does not exist: " + c.trace.path);
    require(!c.trace.sensor_id.empty(), "trace.sensor_id", "required when trace.path is set");
  }
  require(c.trace.source_period_s > 0 && c.trace.source_period_s % 5 == 0, "trace.source_period_s",
          "must be a positive multiple of 5");
}

ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  ExperimentConfig c = default_config();
  Section root(j, "");
  if (root.has("scenario")) {
    std::string s;
    root.get("scenario", s);
    c.scenario = parse_scenario(s);
  }
  if (root.has("controller")) {
    std::string s;
    root.get("controller", s);
    c.controller = parse_controller(s);
  }
  if (root.has("seeds")) {
    const auto& v = root.raw("seeds");
    if (!v.is_array()) throw ConfigError("seeds", "expected an array of non-negative integers");
    c.seeds.clear();
    for (const auto& e : v) {
      if (!e.is_number_unsigned()) throw ConfigError("seeds", "expected non-negative integers");
      c.seeds.push_back(e.get<std::uint64_t>());
    }
  }
  root.get("episodes", c.episodes);
  root.get("max_steps", c.max_steps);
  root.get("eval_episodes", c.eval_episodes);
  read_plant(root.child("plant"), c.plant);
  read_agent(root.child("agent"), c.agent);
  {
    auto s = root.child("pid");
    read_gains(s.child("level"), c.pid.level);
    read_gains(s.child("pressure"), c.pid.pressure);
    s.get("pump_bias", c.pid.pump_bias);
    s.get("valve_bias", c.pid.valve_bias);
    s.finish();
  }
  {
    auto s = root.child("latency");
    if (s.has("preset")) {
      s.get("preset", c.latency.preset);
      auto preset = sim::latency_preset_by_name(c.latency.preset);
      if (!preset) throw ConfigError("latency.preset", "unknown preset \"" + c.latency.preset + "\"");
      c.latency.values = *preset;
    }
    read_loop(s.child("edge"), c.latency.values.edge);
    read_loop(s.child("cloud"), c.latency.values.cloud);
    s.get("backhaul_ms", c.latency.values.backhaul_ms);
    s.get("jitter", c.latency.values.jitter);
    s.finish();
  }
  read_allocator(root.child("allocator"), c.allocator);
  {
    auto s = root.child("trace");
    s.get("path", c.trace.path);
    s.get("sensor_id", c.trace.sensor_id);
    s.get("source_period_s", c.trace.source_period_s);
    s.finish();
    if (!c.trace.path.empty() && !base_dir.empty()) {
      std::filesystem::path p(c.trace.path);
      if (p.is_relative()) c.trace.path = (base_dir / p).lexically_normal().string();
    }
  }
  root.get("out_dir", c.out_dir);
  root.finish();
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  nlohmann::json j = nlohmann::json::object();
  if (text.find_first_not_of(" \t\r\n") != std::string::npos) {
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("<file>", std::string("malformed config: ") + e.what());
    }
  }
  return config_from_json(j, path.parent_path());
}

namespace {

nlohmann::json loop_json(const sim::LoopLatency& l) {
  return {{"uplink_ms", l.uplink_ms}, {"compute_ms", l.compute_ms}, {"downlink_ms", l.downlink_ms}};
}

nlohmann::json gains_json(const pid::PidGains& g) {
  return {{"kp", g.kp},
          {"ki", g.ki},
          {"kd", g.kd},
          {"output_lo", g.output_lo},
          {"output_hi", g.output_hi},
          {"integral_clamp", g.integral_clamp}};
}

}  // namespace

nlohmann::json to_json(const ExperimentConfig& c) {
  const auto& p = c.plant;
  nlohmann::json plant = {
      {"dt_s", p.dt_s},
      {"level_setpoint", p.level_setpoint},
      {"nominal_pressure", p.nominal_pressure},
      {"outlet_setpoint", p.outlet_setpoint},
      {"nominal_inlet", p.nominal_inlet},
      {"inflow_rate", p.inflow_rate},
      {"outflow_rate", p.outflow_rate},
      {"pressure_tau_s", p.pressure_tau_s},
      {"pressure_temp_gain", p.pressure_temp_gain},
      {"pressure_valve_gain", p.pressure_valve_gain},
      {"temp_tau_s", p.temp_tau_s},
      {"temp_level_loss", p.temp_level_loss},
      {"inlet_reversion_per_s", p.inlet_reversion_per_s},
      {"envelope",
       {{"min_level", p.envelope.min_level},
        {"max_level", p.envelope.max_level},
        {"max_pressure", p.envelope.max_pressure},
        {"max_outlet_temp", p.envelope.max_outlet_temp}}},
      {"reward",
       {{"level", p.reward.level},
        {"pressure", p.reward.pressure},
        {"outlet_temp", p.reward.outlet_temp},
        {"actuation", p.reward.actuation},
        {"failure_penalty", p.reward.failure_penalty}}},
      {"noise",
       {{"level", p.noise.level},
        {"pressure", p.noise.pressure},
        {"outlet_temp", p.noise.outlet_temp},
        {"inlet_temp", p.noise.inlet_temp},
        {"reset_level", p.noise.reset_level},
        {"reset_pressure", p.noise.reset_pressure},
        {"reset_outlet_temp", p.noise.reset_outlet_temp},
        {"reset_inlet_temp", p.noise.reset_inlet_temp}}},
  };
  const auto& h = c.agent;
  nlohmann::json agent = {
      {"learning_rate", h.learning_rate},
      {"gamma", h.gamma},
      {"target_update", h.target_update},
      {"batch_size", h.batch_size},
      {"replay_capacity", h.replay_capacity},
      {"hidden", h.hidden},
      {"epsilon_start", h.epsilon_start},
      {"epsilon_end", h.epsilon_end},
      {"epsilon_decay_fraction", h.epsilon_decay_fraction},
      {"train_every", h.train_every},
      {"warmup", h.warmup},
      {"reward_scale", h.reward_scale},
  };
  nlohmann::json resources = nlohmann::json::array();
  for (const auto& r : c.allocator.resources) {
    resources.push_back({{"id", r.id},
                         {"capacity", r.capacity},
                         {"current_load", r.current_load},
                         {"bandwidth", r.bandwidth},
                         {"compute_rating", r.compute_rating}});
  }
  nlohmann::json modules = nlohmann::json::array();
  for (const auto& m : c.allocator.modules) {
    modules.push_back({{"id", m.id}, {"load", m.load}, {"intensity", m.intensity}});
  }
  return {
      {"scenario", to_string(c.scenario)},
      {"controller", to_string(c.controller)},
      {"seeds", c.seeds},
      {"episodes", c.episodes},
      {"max_steps", c.max_steps},
      {"eval_episodes", c.eval_episodes},
      {"plant", plant},
      {"agent", agent},
      {"pid",
       {{"level", gains_json(c.pid.level)},
        {"pressure", gains_json(c.pid.pressure)},
        {"pump_bias", c.pid.pump_bias},
        {"valve_bias", c.pid.valve_bias}}},
      {"latency",
       {{"preset", c.latency.preset},
        {"edge", loop_json(c.latency.values.edge)},
        {"cloud", loop_json(c.latency.values.cloud)},
        {"backhaul_ms", c.latency.values.backhaul_ms},
        {"jitter", c.latency.values.jitter}}},
      {"allocator",
       {{"mode", c.allocator.mode},
        {"weights",
         {{"bandwidth", c.allocator.weights.bandwidth}, {"compute", c.allocator.weights.compute}}},
        {"rebalance_interval", c.allocator.rebalance_interval},
        {"load_drift", c.allocator.load_drift},
        {"max_background_fraction", c.allocator.max_background_fraction},
        {"policy_module", c.allocator.policy_module},
        {"resources", resources},
        {"modules", modules}}},
      {"trace",
       {{"path", c.trace.path},
        {"sensor_id", c.trace.sensor_id},
        {"source_period_s", c.trace.source_period_s}}},
      {"out_dir", c.out_dir},
  };
}

}  // namespace edgectl
