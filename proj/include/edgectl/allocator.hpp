#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace edgectl::alloc {

struct EdgeResource {
  int id = 0;
  double capacity = 1.0;      // Capacity(r_i)
  double current_load = 0.0;  // l_i
  double bandwidth = 100.0;   // Mbps
  double compute_rating = 1.0;

  bool operator==(const EdgeResource&) const = default;
};

struct ControlModule {
  int id = 0;
  double load = 1.0;  // Load(c_j)
  double intensity = 0.5;

  bool operator==(const ControlModule&) const = default;
};

struct AffinityWeights {
  double bandwidth = 0.5;
  double compute = 0.5;

  bool operator==(const AffinityWeights&) const = default;
};

// x[i][j] == 1 iff module j is placed on resource i. Indices follow the
// order of the instance vectors; the id vectors record that order.
struct AssignmentPlan {
  std::vector<int> resource_ids;
  std::vector<int> module_ids;
  std::vector<std::vector<std::uint8_t>> x;
  double objective = 0.0;

  // Resource index hosting module j, or -1.
  int host_index(std::size_t module_index) const;
  std::vector<int> unassigned_modules() const;
  std::size_t assigned_count() const;
  bool operator==(const AssignmentPlan&) const = default;
};

class TooLargeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InstanceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void check_weights(const AffinityWeights& w);

// A(c, r) = (w_bw * bandwidth / max_bandwidth + w_cpu * compute_rating) * (1 + intensity).
double affinity(const ControlModule& module, const EdgeResource& resource,
                const AffinityWeights& weights, double max_bandwidth);

double max_bandwidth(std::span<const EdgeResource> resources);

// [resource][module] affinities.
std::vector<std::vector<double>> affinity_matrix(std::span<const ControlModule> modules,
                                                 std::span<const EdgeResource> resources,
                                                 const AffinityWeights& weights);

inline constexpr double kDefaultEnumerationGuard = 1e7;

// Exhaustive search with capacity pruning. Among plans with equal objective the
// one preserving the most placements of `previous` wins, then the
// lexicographically smallest x read row-major.
AssignmentPlan solve_exact(std::span<const ControlModule> modules,
                           std::span<const EdgeResource> resources, const AffinityWeights& weights,
                           double guard = kDefaultEnumerationGuard,
                           const AssignmentPlan* previous = nullptr);

// Modules by load descending (id ascending on ties), each to the feasible
// resource with the highest affinity; the previous host wins affinity ties.
AssignmentPlan solve_greedy(std::span<const ControlModule> modules,
                            std::span<const EdgeResource> resources,
                            const AffinityWeights& weights,
                            const AssignmentPlan* previous = nullptr);

bool within_guard(std::size_t modules, std::size_t resources,
                  double guard = kDefaultEnumerationGuard);

// Re-solves against updated resource loads and capacities, preferring the
// existing placements on ties.
AssignmentPlan rebalance(const AssignmentPlan& plan, std::span<const ControlModule> modules,
                         std::span<const EdgeResource> updated, const AffinityWeights& weights,
                         double guard = kDefaultEnumerationGuard);

enum class ViolationKind { shape, multiple_assignment, capacity };

struct Violation {
  ViolationKind kind;
  int id;  // module id for multiple_assignment, resource id for capacity
  std::string message;
};

std::vector<Violation> validate(const AssignmentPlan& plan, std::span<const ControlModule> modules,
                                std::span<const EdgeResource> resources);

double plan_objective(const AssignmentPlan& plan, std::span<const ControlModule> modules,
                      std::span<const EdgeResource> resources, const AffinityWeights& weights);

struct Instance {
  std::vector<EdgeResource> resources;
  std::vector<ControlModule> modules;
  AffinityWeights weights;
  std::string solver = "exact";
};

Instance instance_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Instance& inst);
nlohmann::json to_json(const AssignmentPlan& plan);
AssignmentPlan plan_from_json(const nlohmann::json& j);

}  // namespace edgectl::alloc
