#include "edgectl/boiler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edgectl::plant {

namespace {

constexpr double kMaxTemp = 600.0;

BoilerState clamp_state(BoilerState s) {
  s.water_level = std::clamp(s.water_level, 0.0, 1.0);
  s.pressure = std::max(s.pressure, 0.0);
  s.outlet_temp = std::clamp(s.outlet_temp, 0.0, kMaxTemp);
  s.inlet_temp = std::clamp(s.inlet_temp, 0.0, kMaxTemp);
  return s;
}

double level_scale(const PlantConfig& cfg) {
  return 0.5 * (cfg.envelope.max_level - cfg.envelope.min_level);
}
double pressure_scale(const PlantConfig& cfg) {
  return cfg.envelope.max_pressure - cfg.nominal_pressure;
}
double temp_scale(const PlantConfig& cfg) {
  return cfg.envelope.max_outlet_temp - cfg.outlet_setpoint;
}

}  // namespace

ActuatorCommand command_from_action(int action) {
  if (action < 0 || action >= kNumActions) {
    throw std::out_of_range("action index out of range: " + std::to_string(action));
  }
  return ActuatorCommand{kActuatorLevels[static_cast<std::size_t>(action / 3)],
                         kActuatorLevels[static_cast<std::size_t>(action % 3)]};
}

int action_from_command(const ActuatorCommand& cmd) {
  auto index_of = [](double level) {
    for (std::size_t i = 0; i < kActuatorLevels.size(); ++i) {
      if (kActuatorLevels[i] == level) return static_cast<int>(i);
    }
    throw std::invalid_argument("actuator level is not one of {0, 0.5, 1}");
  };
  return 3 * index_of(cmd.pump_level) + index_of(cmd.valve_level);
}

BoilerState nominal_state(const PlantConfig& cfg) {
  BoilerState s;
  s.inlet_temp = cfg.nominal_inlet;
  s.outlet_temp = cfg.outlet_setpoint;
  s.water_level = cfg.level_setpoint;
  s.pressure = cfg.nominal_pressure;
  s.pump_pos = 0.5;
  s.valve_pos = 0.5;
  return s;
}

BoilerState reset(const PlantConfig& cfg, Rng& rng) {
  const auto& n = cfg.noise;
  BoilerState s = nominal_state(cfg);
  s.water_level += rng.uniform(-1.0, 1.0) * n.reset_level;
  s.pressure += rng.uniform(-1.0, 1.0) * n.reset_pressure;
  s.outlet_temp += rng.uniform(-1.0, 1.0) * n.reset_outlet_temp;
  s.inlet_temp += rng.uniform(-1.0, 1.0) * n.reset_inlet_temp;

  // Pull back inside the envelope if a large reset amplitude was configured.
  const auto& e = cfg.envelope;
  const double level_margin = 0.1 * (e.max_level - e.min_level);
  s.water_level = std::clamp(s.water_level, e.min_level + level_margin, e.max_level - level_margin);
  s.pressure = std::min(s.pressure, cfg.nominal_pressure + 0.5 * pressure_scale(cfg));
  s.outlet_temp = std::min(s.outlet_temp, cfg.outlet_setpoint + 0.5 * temp_scale(cfg));
  return clamp_state(s);
}

bool violates_envelope(const PlantConfig& cfg, const BoilerState& s) {
  const auto& e = cfg.envelope;
  return s.water_level < e.min_level || s.water_level > e.max_level ||
         s.pressure > e.max_pressure || s.outlet_temp > e.max_outlet_temp;
}

ProcessNoise sample_noise(const PlantConfig& cfg, Rng& rng) {
  ProcessNoise p;
  p.level = rng.normal() * cfg.noise.level;
  p.pressure = rng.normal() * cfg.noise.pressure;
  p.outlet_temp = rng.normal() * cfg.noise.outlet_temp;
  p.inlet_temp = rng.normal() * cfg.noise.inlet_temp;
  return p;
}

double inflow(const PlantConfig& cfg, double pump) { return cfg.inflow_rate * pump; }

double outflow(const PlantConfig& cfg, double valve, double pressure) {
  return cfg.outflow_rate * valve * std::sqrt(std::max(pressure, 0.0) / cfg.nominal_pressure);
}

BoilerState advance(const PlantConfig& cfg, const BoilerState& s, const ActuatorCommand& cmd,
                    double dt_s) {
  if (s.failed || dt_s <= 0.0) {
    BoilerState same = s;
    if (!s.failed) {
      same.pump_pos = cmd.pump_level;
      same.valve_pos = cmd.valve_level;
    }
    return same;
  }
  BoilerState n = s;
  n.pump_pos = cmd.pump_level;
  n.valve_pos = cmd.valve_level;

  n.water_level = s.water_level +
                  (inflow(cfg, cmd.pump_level) - outflow(cfg, cmd.valve_level, s.pressure)) * dt_s;

  const double pressure_target =
      cfg.nominal_pressure *
      (1.0 + cfg.pressure_temp_gain * (s.outlet_temp - cfg.outlet_setpoint) / cfg.outlet_setpoint -
       cfg.pressure_valve_gain * (cmd.valve_level - 0.5));
  n.pressure = s.pressure + (dt_s / cfg.pressure_tau_s) * (pressure_target - s.pressure);

  const double heat_rise = cfg.outlet_setpoint - cfg.nominal_inlet;
  const double temp_target =
      s.inlet_temp +
      heat_rise * (1.0 - cfg.temp_level_loss * (s.water_level - cfg.level_setpoint));
  n.outlet_temp = s.outlet_temp + (dt_s / cfg.temp_tau_s) * (temp_target - s.outlet_temp);

  n.inlet_temp = s.inlet_temp + cfg.inlet_reversion_per_s * dt_s * (cfg.nominal_inlet - s.inlet_temp);
  return clamp_state(n);
}

double deviation_cost(const PlantConfig& cfg, const BoilerState& s) {
  const double dl = (s.water_level - cfg.level_setpoint) / level_scale(cfg);
  const double dp = (s.pressure - cfg.nominal_pressure) / pressure_scale(cfg);
  const double dt = (s.outlet_temp - cfg.outlet_setpoint) / temp_scale(cfg);
  return dl * dl + dp * dp + dt * dt;
}

double reward(const PlantConfig& cfg, const BoilerState& s, const ActuatorCommand& cmd) {
  const auto& w = cfg.reward;
  const double dl = (s.water_level - cfg.level_setpoint) / level_scale(cfg);
  const double dp = (s.pressure - cfg.nominal_pressure) / pressure_scale(cfg);
  const double dt = (s.outlet_temp - cfg.outlet_setpoint) / temp_scale(cfg);
  const double du_pump = cmd.pump_level - s.pump_pos;
  const double du_valve = cmd.valve_level - s.valve_pos;
  return -(w.level * dl * dl + w.pressure * dp * dp + w.outlet_temp * dt * dt) -
         w.actuation * (du_pump * du_pump + du_valve * du_valve);
}

StepResult finish_period(const PlantConfig& cfg, const BoilerState& period_start,
                         const BoilerState& integrated, const ProcessNoise& noise) {
  if (period_start.failed) {
    return StepResult{period_start, -cfg.reward.failure_penalty, true};
  }
  BoilerState next = integrated;
  next.water_level += noise.level;
  next.pressure += noise.pressure;
  next.outlet_temp += noise.outlet_temp;
  next.inlet_temp += noise.inlet_temp;
  next = clamp_state(next);
  next.failed = violates_envelope(cfg, next);

  BoilerState scored = next;
  scored.pump_pos = period_start.pump_pos;
  scored.valve_pos = period_start.valve_pos;
  double r = reward(cfg, scored, ActuatorCommand{next.pump_pos, next.valve_pos});
  if (next.failed) r -= cfg.reward.failure_penalty;
  return StepResult{next, r, next.failed};
}

StepResult step(const PlantConfig& cfg, const BoilerState& s, const ActuatorCommand& cmd,
                const ProcessNoise& noise) {
  return finish_period(cfg, s, advance(cfg, s, cmd, cfg.dt_s), noise);
}

std::array<double, kStateFeatures> state_features(const PlantConfig& cfg, const BoilerState& s) {
  return {(s.water_level - cfg.level_setpoint) / level_scale(cfg),
          (s.pressure - cfg.nominal_pressure) / pressure_scale(cfg),
          (s.outlet_temp - cfg.outlet_setpoint) / temp_scale(cfg),
          (s.inlet_temp - cfg.nominal_inlet) / temp_scale(cfg),
          2.0 * (s.pump_pos - 0.5),
          2.0 * (s.valve_pos - 0.5)};
}

double reward_feature(const PlantConfig& cfg, double reward) {
  const auto& w = cfg.reward;
  const double scale = w.level + w.pressure + w.outlet_temp;
  return std::clamp(reward / scale, -2.0, 0.0);
}

std::vector<double> observe(const PlantConfig& cfg, const BoilerState& current,
                            std::span<const HistoryEntry> history) {
  std::vector<double> obs(kObservationLength, 0.0);
  const auto cur = state_features(cfg, current);
  std::copy(cur.begin(), cur.end(), obs.begin());

  const std::size_t used = std::min(history.size(), kHistoryLength);
  for (std::size_t k = 0; k < used; ++k) {
    const HistoryEntry& h = history[history.size() - 1 - k];
    const auto f = state_features(cfg, h.state);
    const std::size_t base = kStateFeatures + k * (kStateFeatures + 1);
    std::copy(f.begin(), f.end(), obs.begin() + static_cast<std::ptrdiff_t>(base));
    obs[base + kStateFeatures] = reward_feature(cfg, h.reward);
  }
  return obs;
}

}  // namespace edgectl::plant
