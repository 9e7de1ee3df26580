#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "edgectl/boiler.hpp"
#include "edgectl/config.hpp"
#include "edgectl/metrics.hpp"

namespace edgectl {

struct RunResult {
  std::uint64_t seed = 0;
  std::string status = "ok";  // "ok" or "diverged"
  std::string message;
  std::vector<MetricsRecord> records;
};

// Action maximising r(s, a) + gamma * max_a' r(s', a') under the noise-free
// plant model, searched exhaustively over both steps. Ties go to the lowest
// index.
int oracle_action(const plant::PlantConfig& cfg, const plant::BoilerState& s, double gamma);

// Simulates one seed end to end. Deterministic in (cfg, seed). Agent
// divergence ends the run early with status "diverged".
RunResult run_seed(const ExperimentConfig& cfg, std::uint64_t seed);

// All seeds of the config; up to `jobs` seeds run concurrently. Results are
// returned in seed order.
std::vector<RunResult> run_experiment(const ExperimentConfig& cfg, int jobs = 1);

std::string metrics_filename(const ExperimentConfig& cfg, std::uint64_t seed);

// One JSON-lines file per seed plus summary_<scenario>_<controller>.csv.
// Returns the files written.
std::vector<std::filesystem::path> write_results(const ExperimentConfig& cfg,
                                                 const std::vector<RunResult>& results,
                                                 const std::filesystem::path& out_dir);

}  // namespace edgectl
