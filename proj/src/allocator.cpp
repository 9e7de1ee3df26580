#include "edgectl/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace edgectl::alloc {

namespace {

constexpr double kCapacityEps = 1e-9;

bool objective_tie(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

void check_instance(std::span<const ControlModule> modules, std::span<const EdgeResource> resources) {
  for (const auto& r : resources) {
    if (!(r.capacity >= 0.0) || !(r.current_load >= 0.0) || !(r.bandwidth >= 0.0) ||
        !(r.compute_rating >= 0.0) || r.compute_rating > 1.0) {
      throw InstanceError("resource " + std::to_string(r.id) + " has an out-of-range field");
    }
  }
  for (const auto& m : modules) {
    if (!(m.load > 0.0) || !(m.intensity >= 0.0) || m.intensity > 1.0) {
      throw InstanceError("module " + std::to_string(m.id) + " has an out-of-range field");
    }
  }
}

AssignmentPlan empty_plan(std::span<const ControlModule> modules,
                          std::span<const EdgeResource> resources) {
  AssignmentPlan p;
  for (const auto& r : resources) p.resource_ids.push_back(r.id);
  for (const auto& m : modules) p.module_ids.push_back(m.id);
  p.x.assign(resources.size(), std::vector<std::uint8_t>(modules.size(), 0));
  return p;
}

// Previous host per module index of the current instance, matched by id.
std::vector<int> previous_hosts(const AssignmentPlan* previous,
                                std::span<const ControlModule> modules,
                                std::span<const EdgeResource> resources) {
  std::vector<int> hosts(modules.size(), -1);
  if (previous == nullptr) return hosts;
  for (std::size_t j = 0; j < modules.size(); ++j) {
    auto mj = std::find(previous->module_ids.begin(), previous->module_ids.end(), modules[j].id);
    if (mj == previous->module_ids.end()) continue;
    const int prev_index = previous->host_index(static_cast<std::size_t>(mj - previous->module_ids.begin()));
    if (prev_index < 0) continue;
    const int rid = previous->resource_ids[static_cast<std::size_t>(prev_index)];
    for (std::size_t i = 0; i < resources.size(); ++i) {
      if (resources[i].id == rid) hosts[j] = static_cast<int>(i);
    }
  }
  return hosts;
}

class ExactSearch {
 public:
  ExactSearch(const std::vector<std::vector<double>>& a, std::vector<double> residual,
              std::span<const ControlModule> modules, std::vector<int> prev)
      : a_(a),
        residual_(std::move(residual)),
        modules_(modules),
        prev_(std::move(prev)),
        choice_(modules.size(), -1),
        best_choice_(modules.size(), -1) {
    const std::size_t m = modules.size();
    // Optimistic bound on the affinity still obtainable from modules j..m-1.
    suffix_bound_.assign(m + 1, 0.0);
    for (std::size_t j = m; j-- > 0;) {
      double best = 0.0;
      for (const auto& row : a_) best = std::max(best, row[j]);
      suffix_bound_[j] = suffix_bound_[j + 1] + best;
    }
  }

  std::vector<int> run() {
    descend(0, 0.0, 0);
    return best_choice_;
  }

  double best_objective() const { return best_objective_; }

 private:
  void descend(std::size_t j, double value, int preserved) {
    if (have_best_ && value + suffix_bound_[j] < best_objective_ &&
        !objective_tie(value + suffix_bound_[j], best_objective_)) {
      return;
    }
    if (j == choice_.size()) {
      consider(value, preserved);
      return;
    }
    choice_[j] = -1;
    descend(j + 1, value, preserved);
    for (std::size_t i = 0; i < residual_.size(); ++i) {
      const double load = modules_[j].load;
      if (load > residual_[i] + kCapacityEps) continue;
      residual_[i] -= load;
      choice_[j] = static_cast<int>(i);
      descend(j + 1, value + a_[i][j], preserved + (prev_[j] == static_cast<int>(i) ? 1 : 0));
      residual_[i] += load;
    }
    choice_[j] = -1;
  }

  // Row-major x comparison: resource i's row first, module order within it.
  bool lexicographically_smaller(const std::vector<int>& lhs, const std::vector<int>& rhs) const {
    for (std::size_t i = 0; i < residual_.size(); ++i) {
      for (std::size_t j = 0; j < lhs.size(); ++j) {
        const int l = lhs[j] == static_cast<int>(i) ? 1 : 0;
        const int r = rhs[j] == static_cast<int>(i) ? 1 : 0;
        if (l != r) return l < r;
      }
    }
    return false;
  }

  void consider(double value, int preserved) {
    bool take = false;
    if (!have_best_ || (value > best_objective_ && !objective_tie(value, best_objective_))) {
      take = true;
    } else if (objective_tie(value, best_objective_)) {
      if (preserved != best_preserved_) {
        take = preserved > best_preserved_;
      } else {
        take = lexicographically_smaller(choice_, best_choice_);
      }
    }
    if (take) {
      have_best_ = true;
      best_objective_ = value;
      best_preserved_ = preserved;
      best_choice_ = choice_;
    }
  }

  const std::vector<std::vector<double>>& a_;
  std::vector<double> residual_;
  std::span<const ControlModule> modules_;
  std::vector<int> prev_;
  std::vector<int> choice_;
  std::vector<int> best_choice_;
  std::vector<double> suffix_bound_;
  bool have_best_ = false;
  double best_objective_ = 0.0;
  int best_preserved_ = -1;
};

std::vector<double> residuals(std::span<const EdgeResource> resources) {
  std::vector<double> r;
  r.reserve(resources.size());
  for (const auto& res : resources) r.push_back(res.capacity - res.current_load);
  return r;
}

}  // namespace

int AssignmentPlan::host_index(std::size_t module_index) const {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (module_index < x[i].size() && x[i][module_index]) return static_cast<int>(i);
  }
  return -1;
}

std::vector<int> AssignmentPlan::unassigned_modules() const {
  std::vector<int> out;
  for (std::size_t j = 0; j < module_ids.size(); ++j) {
    if (host_index(j) < 0) out.push_back(module_ids[j]);
  }
  return out;
}

std::size_t AssignmentPlan::assigned_count() const {
  std::size_t n = 0;
  for (const auto& row : x) n += static_cast<std::size_t>(std::count(row.begin(), row.end(), 1));
  return n;
}

void check_weights(const AffinityWeights& w) {
  if (!(w.bandwidth >= 0.0) || !(w.compute >= 0.0)) {
    throw InstanceError("affinity weights must be non-negative");
  }
  if (std::abs(w.bandwidth + w.compute - 1.0) > 1e-9) {
    throw InstanceError("affinity weights must sum to 1");
  }
}

double max_bandwidth(std::span<const EdgeResource> resources) {
  double best = 0.0;
  for (const auto& r : resources) best = std::max(best, r.bandwidth);
  return best;
}

double affinity(const ControlModule& module, const EdgeResource& resource,
                const AffinityWeights& weights, double max_bw) {
  const double bw = max_bw > 0.0 ? resource.bandwidth / max_bw : 0.0;
  return (weights.bandwidth * bw + weights.compute * resource.compute_rating) *
         (1.0 + module.intensity);
}

std::vector<std::vector<double>> affinity_matrix(std::span<const ControlModule> modules,
                                                 std::span<const EdgeResource> resources,
                                                 const AffinityWeights& weights) {
  check_weights(weights);
  const double max_bw = max_bandwidth(resources);
  std::vector<std::vector<double>> a(resources.size(), std::vector<double>(modules.size()));
  for (std::size_t i = 0; i < resources.size(); ++i) {
    for (std::size_t j = 0; j < modules.size(); ++j) {
      a[i][j] = affinity(modules[j], resources[i], weights, max_bw);
    }
  }
  return a;
}

bool within_guard(std::size_t modules, std::size_t resources, double guard) {
  return std::pow(static_cast<double>(resources + 1), static_cast<double>(modules)) <= guard;
}

AssignmentPlan solve_exact(std::span<const ControlModule> modules,
                           std::span<const EdgeResource> resources, const AffinityWeights& weights,
                           double guard, const AssignmentPlan* previous) {
  check_instance(modules, resources);
  if (!within_guard(modules.size(), resources.size(), guard)) {
    throw TooLargeError("instance with " + std::to_string(modules.size()) + " modules and " +
                        std::to_string(resources.size()) +
                        " resources exceeds the enumeration guard; use solve_greedy");
  }
  const auto a = affinity_matrix(modules, resources, weights);
  ExactSearch search(a, residuals(resources), modules, previous_hosts(previous, modules, resources));
  const auto choice = search.run();

  AssignmentPlan plan = empty_plan(modules, resources);
  for (std::size_t j = 0; j < choice.size(); ++j) {
    if (choice[j] >= 0) plan.x[static_cast<std::size_t>(choice[j])][j] = 1;
  }
  plan.objective = plan_objective(plan, modules, resources, weights);
  return plan;
}

AssignmentPlan solve_greedy(std::span<const ControlModule> modules,
                            std::span<const EdgeResource> resources,
                            const AffinityWeights& weights, const AssignmentPlan* previous) {
  check_instance(modules, resources);
  const auto a = affinity_matrix(modules, resources, weights);
  const auto prev = previous_hosts(previous, modules, resources);
  auto residual = residuals(resources);

  std::vector<std::size_t> order(modules.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    if (modules[l].load != modules[r].load) return modules[l].load > modules[r].load;
    return modules[l].id < modules[r].id;
  });

  AssignmentPlan plan = empty_plan(modules, resources);
  for (std::size_t j : order) {
    int best = -1;
    for (std::size_t i = 0; i < resources.size(); ++i) {
      if (modules[j].load > residual[i] + kCapacityEps) continue;
      if (best < 0) {
        best = static_cast<int>(i);
        continue;
      }
      const double cur = a[static_cast<std::size_t>(best)][j];
      if (a[i][j] > cur || (a[i][j] == cur && prev[j] == static_cast<int>(i))) {
        best = static_cast<int>(i);
      }
    }
    if (best >= 0) {
      plan.x[static_cast<std::size_t>(best)][j] = 1;
      residual[static_cast<std::size_t>(best)] -= modules[j].load;
    }
  }
  plan.objective = plan_objective(plan, modules, resources, weights);
  return plan;
}

AssignmentPlan rebalance(const AssignmentPlan& plan, std::span<const ControlModule> modules,
                         std::span<const EdgeResource> updated, const AffinityWeights& weights,
                         double guard) {
  for (const auto& r : updated) {
    if (std::find(plan.resource_ids.begin(), plan.resource_ids.end(), r.id) ==
        plan.resource_ids.end()) {
      throw InstanceError("resource " + std::to_string(r.id) + " is not part of the plan");
    }
  }
  if (within_guard(modules.size(), updated.size(), guard)) {
    return solve_exact(modules, updated, weights, guard, &plan);
  }
  return solve_greedy(modules, updated, weights, &plan);
}

std::vector<Violation> validate(const AssignmentPlan& plan, std::span<const ControlModule> modules,
                                std::span<const EdgeResource> resources) {
  std::vector<Violation> out;
  if (plan.x.size() != resources.size()) {
    out.push_back({ViolationKind::shape, -1, "plan has " + std::to_string(plan.x.size()) +
                                                 " rows for " + std::to_string(resources.size()) +
                                                 " resources"});
    return out;
  }
  for (const auto& row : plan.x) {
    if (row.size() != modules.size()) {
      out.push_back({ViolationKind::shape, -1, "plan row length does not match module count"});
      return out;
    }
  }
  for (std::size_t j = 0; j < modules.size(); ++j) {
    int hosts = 0;
    for (const auto& row : plan.x) hosts += row[j] ? 1 : 0;
    if (hosts > 1) {
      out.push_back({ViolationKind::multiple_assignment, modules[j].id,
                     "module " + std::to_string(modules[j].id) + " assigned to " +
                         std::to_string(hosts) + " resources"});
    }
  }
  for (std::size_t i = 0; i < resources.size(); ++i) {
    double used = resources[i].current_load;
    for (std::size_t j = 0; j < modules.size(); ++j) {
      if (plan.x[i][j]) used += modules[j].load;
    }
    if (used > resources[i].capacity + kCapacityEps) {
      out.push_back({ViolationKind::capacity, resources[i].id,
                     "resource " + std::to_string(resources[i].id) + " load " +
                         std::to_string(used) + " exceeds capacity " +
                         std::to_string(resources[i].capacity)});
    }
  }
  return out;
}

double plan_objective(const AssignmentPlan& plan, std::span<const ControlModule> modules,
                      std::span<const EdgeResource> resources, const AffinityWeights& weights) {
  const double max_bw = max_bandwidth(resources);
  double total = 0.0;
  for (std::size_t j = 0; j < modules.size(); ++j) {
    for (std::size_t i = 0; i < resources.size(); ++i) {
      if (plan.x[i][j]) total += affinity(modules[j], resources[i], weights, max_bw);
    }
  }
  return total;
}

Instance instance_from_json(const nlohmann::json& j) {
  Instance inst;
  for (const auto& r : j.at("resources")) {
    EdgeResource res;
    res.id = r.at("id").get<int>();
    res.capacity = r.at("capacity").get<double>();
    res.current_load = r.value("current_load", 0.0);
    res.bandwidth = r.value("bandwidth", 100.0);
    res.compute_rating = r.value("compute_rating", 1.0);
    inst.resources.push_back(res);
  }
  for (const auto& m : j.at("modules")) {
    ControlModule mod;
    mod.id = m.at("id").get<int>();
    mod.load = m.at("load").get<double>();
    mod.intensity = m.value("intensity", 0.5);
    inst.modules.push_back(mod);
  }
  if (j.contains("weights")) {
    inst.weights.bandwidth = j["weights"].value("bandwidth", 0.5);
    inst.weights.compute = j["weights"].value("compute", 0.5);
  }
  inst.solver = j.value("solver", std::string("exact"));
  if (inst.solver != "exact" && inst.solver != "greedy") {
    throw InstanceError("solver must be \"exact\" or \"greedy\"");
  }
  check_weights(inst.weights);
  check_instance(inst.modules, inst.resources);
  return inst;
}

nlohmann::json to_json(const Instance& inst) {
  nlohmann::json j;
  j["resources"] = nlohmann::json::array();
  for (const auto& r : inst.resources) {
    j["resources"].push_back({{"id", r.id},
                              {"capacity", r.capacity},
                              {"current_load", r.current_load},
                              {"bandwidth", r.bandwidth},
                              {"compute_rating", r.compute_rating}});
  }
  j["modules"] = nlohmann::json::array();
  for (const auto& m : inst.modules) {
    j["modules"].push_back({{"id", m.id}, {"load", m.load}, {"intensity", m.intensity}});
  }
  j["weights"] = {{"bandwidth", inst.weights.bandwidth}, {"compute", inst.weights.compute}};
  j["solver"] = inst.solver;
  return j;
}

nlohmann::json to_json(const AssignmentPlan& plan) {
  nlohmann::json j;
  j["resources"] = plan.resource_ids;
  j["modules"] = plan.module_ids;
  j["x"] = nlohmann::json::array();
  for (const auto& row : plan.x) {
    std::vector<int> r(row.begin(), row.end());
    j["x"].push_back(r);
  }
  j["objective"] = plan.objective;
  j["unassigned"] = plan.unassigned_modules();
  return j;
}

AssignmentPlan plan_from_json(const nlohmann::json& j) {
  AssignmentPlan p;
  p.resource_ids = j.at("resources").get<std::vector<int>>();
  p.module_ids = j.at("modules").get<std::vector<int>>();
  for (const auto& row : j.at("x")) {
    std::vector<std::uint8_t> r;
    for (const auto& v : row) r.push_back(static_cast<std::uint8_t>(v.get<int>() != 0));
    p.x.push_back(std::move(r));
  }
  p.objective = j.value("objective", 0.0);
  return p;
}

}  // namespace edgectl::alloc
