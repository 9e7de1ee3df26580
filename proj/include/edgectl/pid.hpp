#pragma once

#include <utility>

#include "edgectl/boiler.hpp"

namespace edgectl::pid {

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double output_lo = -1.0;
  double output_hi = 1.0;
  double integral_clamp = 1.0;

  bool operator==(const PidGains&) const = default;
};

struct PidState {
  double integral = 0.0;
  double previous_error = 0.0;
  bool initialized = false;

  bool operator==(const PidState&) const = default;
};

void check_gains(const PidGains& gains);

// output = clamp(kp*e + ki*integral + kd*de/dt, lo, hi), e = setpoint - measurement.
// The integral accumulates e*dt and is clamped to +-integral_clamp; the
// derivative term is zero on the first call.
std::pair<double, PidState> pid_step(const PidGains& gains, const PidState& state, double setpoint,
                                     double measurement, double dt_s = 5.0);

// Nearest of {0, 0.5, 1}; exact midpoints round down.
double quantize_level(double output);
plant::ActuatorCommand pid_to_command(double pump_output, double valve_output);

// Two independent loops on the boiler: the pump tracks the level setpoint and
// the valve (reverse acting) tracks the nominal pressure. Outputs are offsets
// around the 0.5 operating point.
struct BoilerPidConfig {
  PidGains level{80.0, 0.05, 0.0, -0.5, 0.5, 10.0};
  PidGains pressure{5.0, 0.0, 0.0, -0.5, 0.5, 10.0};
  double pump_bias = 0.5;
  double valve_bias = 0.5;

  bool operator==(const BoilerPidConfig&) const = default;
};

class BoilerPid {
 public:
  BoilerPid(BoilerPidConfig cfg, plant::PlantConfig plant) : cfg_(cfg), plant_(std::move(plant)) {}

  plant::ActuatorCommand act(const plant::BoilerState& s);
  void reset() { level_ = {}; pressure_ = {}; }

 private:
  BoilerPidConfig cfg_;
  plant::PlantConfig plant_;
  PidState level_;
  PidState pressure_;
};

}  // namespace edgectl::pid
