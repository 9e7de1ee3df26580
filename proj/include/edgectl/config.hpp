#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "edgectl/allocator.hpp"
#include "edgectl/boiler.hpp"
#include "edgectl/dqn.hpp"
#include "edgectl/pid.hpp"
#include "edgectl/sim_core.hpp"

namespace edgectl {

enum class Scenario { cloud_only, edge_collab };
enum class ControllerKind { dqn, pid };

const char* to_string(Scenario s);
const char* to_string(ControllerKind c);
Scenario parse_scenario(const std::string& s);
ControllerKind parse_controller(const std::string& s);

struct LatencyConfig {
  std::string preset = "default";
  sim::LatencyPreset values = sim::default_latency_preset();

  bool operator==(const LatencyConfig&) const = default;
};

struct AllocatorConfig {
  std::string mode = "exact";
  alloc::AffinityWeights weights{};
  int rebalance_interval = 100;  // control periods between rebalances
  double load_drift = 0.05;      // std-dev of background load change per report
  double max_background_fraction = 0.25;
  int policy_module = 0;         // module id that hosts the controller
  std::vector<alloc::EdgeResource> resources;
  std::vector<alloc::ControlModule> modules;

  bool operator==(const AllocatorConfig&) const = default;
};

struct TraceConfig {
  std::string path;  // empty: inlet temperature follows the plant's own dynamics
  std::string sensor_id;
  int source_period_s = 60;

  bool operator==(const TraceConfig&) const = default;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::edge_collab;
  ControllerKind controller = ControllerKind::dqn;
  std::vector<std::uint64_t> seeds{1};
  int episodes = 300;
  int max_steps = 500;
  int eval_episodes = 20;
  plant::PlantConfig plant{};
  agent::Hyperparams agent{};
  pid::BoilerPidConfig pid{};
  LatencyConfig latency{};
  AllocatorConfig allocator{};
  TraceConfig trace{};
  std::string out_dir = "results";

  bool operator==(const ExperimentConfig&) const = default;
};

// One simulated day of 5-second periods.
inline constexpr int kStepsPerDay = 17280;

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

std::vector<alloc::EdgeResource> default_edge_resources();
std::vector<alloc::ControlModule> default_control_modules();
ExperimentConfig default_config();

// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "EDGECTL_OUT_DIR";

// Missing keys take defaults; unknown keys and out-of-range values raise
// ConfigError naming the dotted key. Relative trace paths resolve against
// `base_dir`.
ExperimentConfig config_from_json(const nlohmann::json& j,
                                  const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

void validate(const ExperimentConfig& cfg);

}  // namespace edgectl
