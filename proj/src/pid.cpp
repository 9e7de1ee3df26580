#include "edgectl/pid.hpp"

#include <algorithm>
#include <stdexcept>

namespace edgectl::pid {

void check_gains(const PidGains& g) {
  if (g.kp < 0.0 || g.ki < 0.0 || g.kd < 0.0) throw std::invalid_argument("PID gains must be >= 0");
  if (!(g.output_lo < g.output_hi)) throw std::invalid_argument("PID output limits need lo < hi");
  if (!(g.integral_clamp > 0.0)) throw std::invalid_argument("PID integral clamp must be > 0");
}

std::pair<double, PidState> pid_step(const PidGains& gains, const PidState& state, double setpoint,
                                     double measurement, double dt_s) {
  if (!(dt_s > 0.0)) throw std::invalid_argument("PID dt must be positive");
  const double error = setpoint - measurement;
  PidState next;
  next.integral = std::clamp(state.integral + error * dt_s, -gains.integral_clamp,
                             gains.integral_clamp);
  const double derivative = state.initialized ? (error - state.previous_error) / dt_s : 0.0;
  next.previous_error = error;
  next.initialized = true;
  const double raw = gains.kp * error + gains.ki * next.integral + gains.kd * derivative;
  return {std::clamp(raw, gains.output_lo, gains.output_hi), next};
}

double quantize_level(double output) {
  const double v = std::clamp(output, 0.0, 1.0);
  if (v <= 0.25) return 0.0;
  if (v <= 0.75) return 0.5;
  return 1.0;
}

plant::ActuatorCommand pid_to_command(double pump_output, double valve_output) {
  return plant::ActuatorCommand{quantize_level(pump_output), quantize_level(valve_output)};
}

plant::ActuatorCommand BoilerPid::act(const plant::BoilerState& s) {
  const double dt = plant_.dt_s;
  auto [pump_offset, level_state] =
      pid_step(cfg_.level, level_, plant_.level_setpoint, s.water_level, dt);
  // Reverse acting: pressure above nominal opens the valve.
  auto [valve_offset, pressure_state] =
      pid_step(cfg_.pressure, pressure_, s.pressure / plant_.nominal_pressure, 1.0, dt);
  level_ = level_state;
  pressure_ = pressure_state;
  return pid_to_command(cfg_.pump_bias + pump_offset, cfg_.valve_bias + valve_offset);
}

}  // namespace edgectl::pid
