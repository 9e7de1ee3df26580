#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "edgectl/rng.hpp"

namespace edgectl::plant {

struct BoilerState {
  double inlet_temp = 60.0;    // degC
  double outlet_temp = 180.0;  // degC
  double water_level = 0.5;    // fraction of drum capacity
  double pressure = 1000.0;    // kPa
  double pump_pos = 0.5;
  double valve_pos = 0.5;
  bool failed = false;

  bool operator==(const BoilerState&) const = default;
};

inline constexpr std::array<double, 3> kActuatorLevels{0.0, 0.5, 1.0};
inline constexpr int kNumActions = 9;

struct ActuatorCommand {
  double pump_level = 0.5;
  double valve_level = 0.5;

  bool operator==(const ActuatorCommand&) const = default;
};

// index = 3 * pump_index + valve_index.
ActuatorCommand command_from_action(int action);
int action_from_command(const ActuatorCommand& cmd);

struct SafetyEnvelope {
  double min_level = 0.15;
  double max_level = 0.95;
  double max_pressure = 1600.0;
  double max_outlet_temp = 252.0;

  bool operator==(const SafetyEnvelope&) const = default;
};

struct RewardWeights {
  double level = 10.0;
  double pressure = 10.0;
  double outlet_temp = 10.0;
  double actuation = 0.1;
  double failure_penalty = 500.0;

  bool operator==(const RewardWeights&) const = default;
};

struct NoiseConfig {
  double level = 0.004;
  double pressure = 8.0;
  double outlet_temp = 0.8;
  double inlet_temp = 1.5;
  double reset_level = 0.05;
  double reset_pressure = 20.0;
  double reset_outlet_temp = 4.0;
  double reset_inlet_temp = 5.0;

  bool operator==(const NoiseConfig&) const = default;
};

// Difference-equation coefficients. With the defaults the setpoint is an
// equilibrium under pump = valve = 0.5 and the level climbs from the setpoint
// to the upper envelope bound in 40 steps with the pump fully open and the
// valve shut.
struct PlantConfig {
  double dt_s = 5.0;

  double level_setpoint = 0.5;
  double nominal_pressure = 1000.0;
  double outlet_setpoint = 180.0;
  double nominal_inlet = 60.0;

  double inflow_rate = 0.00225;   // level fraction per second at pump = 1
  double outflow_rate = 0.00225;  // level fraction per second at valve = 1, p = p0
  double pressure_tau_s = 30.0;
  double pressure_temp_gain = 2.0;
  double pressure_valve_gain = 0.4;
  double temp_tau_s = 60.0;
  double temp_level_loss = 1.5;
  double inlet_reversion_per_s = 0.002;

  SafetyEnvelope envelope{};
  RewardWeights reward{};
  NoiseConfig noise{};

  bool operator==(const PlantConfig&) const = default;
};

BoilerState nominal_state(const PlantConfig& cfg);

// Nominal operating point perturbed by bounded seeded noise; never violates
// the safety envelope.
BoilerState reset(const PlantConfig& cfg, Rng& rng);

bool violates_envelope(const PlantConfig& cfg, const BoilerState& s);

struct ProcessNoise {
  double level = 0.0;
  double pressure = 0.0;
  double outlet_temp = 0.0;
  double inlet_temp = 0.0;
};

ProcessNoise sample_noise(const PlantConfig& cfg, Rng& rng);

double inflow(const PlantConfig& cfg, double pump);
double outflow(const PlantConfig& cfg, double valve, double pressure);

// Deterministic explicit-Euler integration over dt_s with `cmd` applied.
// Actuators take the commanded positions immediately.
BoilerState advance(const PlantConfig& cfg, const BoilerState& s, const ActuatorCommand& cmd,
                    double dt_s);

// Squared, envelope-normalised setpoint deviation (the control-loss term).
double deviation_cost(const PlantConfig& cfg, const BoilerState& s);

// Reward for being in `s` and issuing `cmd`: zero at the setpoint with no
// actuator change, negative otherwise. No failure penalty.
double reward(const PlantConfig& cfg, const BoilerState& s, const ActuatorCommand& cmd);

struct StepResult {
  BoilerState state;
  double reward = 0.0;
  bool failed = false;
};

// Closes a control period: adds process noise and clamps `integrated`,
// checks the envelope, and scores it against the actuator positions held at
// the start of the period.
StepResult finish_period(const PlantConfig& cfg, const BoilerState& period_start,
                         const BoilerState& integrated, const ProcessNoise& noise);

StepResult step(const PlantConfig& cfg, const BoilerState& s, const ActuatorCommand& cmd,
                const ProcessNoise& noise = {});

// Noise-free step used by model-based oracles.
inline StepResult predict(const PlantConfig& cfg, const BoilerState& s,
                          const ActuatorCommand& cmd) {
  return step(cfg, s, cmd, ProcessNoise{});
}

inline constexpr std::size_t kHistoryLength = 10;
inline constexpr std::size_t kStateFeatures = 6;
inline constexpr std::size_t kObservationLength =
    kStateFeatures + kHistoryLength * (kStateFeatures + 1);

struct HistoryEntry {
  BoilerState state;
  double reward = 0.0;
};

// Normalised features: deviations of level, pressure, outlet and inlet
// temperature, then actuator positions centred on 0.5.
std::array<double, kStateFeatures> state_features(const PlantConfig& cfg, const BoilerState& s);

double reward_feature(const PlantConfig& cfg, double reward);

// `history` is chronological (oldest first). The window places the most
// recent entry first and zero-pads when fewer than 10 entries exist.
std::vector<double> observe(const PlantConfig& cfg, const BoilerState& current,
                            std::span<const HistoryEntry> history);

}  // namespace edgectl::plant
