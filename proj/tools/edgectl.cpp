#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "edgectl/allocator.hpp"
#include "edgectl/config.hpp"
#include "edgectl/experiment.hpp"
#include "edgectl/metrics.hpp"

namespace {

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const auto v = std::stoull(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad seed \"" + item + "\"");
    seeds.push_back(v);
  }
  if (seeds.empty()) throw std::invalid_argument("--seeds needs at least one seed");
  return seeds;
}

std::vector<edgectl::MetricsRecord> load_phase(const std::string& path, const std::string& phase) {
  auto all = edgectl::read_metrics(path);
  if (phase.empty()) return all;
  std::vector<edgectl::MetricsRecord> out;
  for (auto& r : all) {
    if (r.phase == phase) out.push_back(std::move(r));
  }
  if (out.empty()) throw std::runtime_error(path + ": no records in phase " + phase);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edge-cloud collaborative boiler control simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment sweep");
  std::string config_path, scenario, controller, seeds_text, out_dir;
  int jobs = 1;
  int episodes = 0;
  run->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--scenario", scenario, "cloud-only or edge-collab");
  run->add_option("--controller", controller, "dqn or pid");
  run->add_option("--seeds", seeds_text, "comma-separated seed list");
  run->add_option("--episodes", episodes, "override the episode count");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--jobs", jobs, "seeds simulated concurrently")->check(CLI::PositiveNumber);

  auto* cmp = app.add_subcommand("compare", "compare two metrics files");
  std::string metrics_a, metrics_b, phase;
  bool as_json = false;
  cmp->add_option("metrics_a", metrics_a)->required()->check(CLI::ExistingFile);
  cmp->add_option("metrics_b", metrics_b)->required()->check(CLI::ExistingFile);
  cmp->add_option("--phase", phase, "only records of this phase (train, run, eval)");
  cmp->add_flag("--json", as_json, "print JSON instead of a table");

  auto* al = app.add_subcommand("alloc", "solve a module placement instance");
  std::string instance_path;
  al->add_option("--instance", instance_path, "instance JSON")->required()->check(CLI::ExistingFile);

  auto* plot = app.add_subcommand("plot-data", "write reward/failure series as CSV");
  std::string plot_in, plot_out, plot_phase;
  plot->add_option("metrics", plot_in)->required()->check(CLI::ExistingFile);
  plot->add_option("--out", plot_out)->required();
  plot->add_option("--phase", plot_phase, "only records of this phase");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto cfg = edgectl::load_config(config_path);
      if (!scenario.empty()) cfg.scenario = edgectl::parse_scenario(scenario);
      if (!controller.empty()) cfg.controller = edgectl::parse_controller(controller);
      if (!seeds_text.empty()) cfg.seeds = parse_seeds(seeds_text);
      if (episodes > 0) cfg.episodes = episodes;
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      edgectl::validate(cfg);
      const auto results = edgectl::run_experiment(cfg, jobs);
      const auto files = edgectl::write_results(cfg, results, cfg.out_dir);
      int failed = 0;
      for (const auto& r : results) {
        if (r.status != "ok") {
          ++failed;
          std::cerr << "seed " << r.seed << ": " << r.status << ": " << r.message << '\n';
        }
      }
      for (const auto& f : files) std::cout << f.string() << '\n';
      return failed == 0 ? 0 : 3;
    }
    if (*cmp) {
      const auto a = load_phase(metrics_a, phase);
      const auto b = load_phase(metrics_b, phase);
      const auto report = edgectl::compare(a, b);
      if (as_json) {
        std::cout << edgectl::to_json(report).dump(2) << '\n';
      } else {
        std::cout << edgectl::format_table(report);
      }
      return 0;
    }
    if (*al) {
      std::ifstream in(instance_path);
      const auto inst = edgectl::alloc::instance_from_json(nlohmann::json::parse(in));
      const auto plan =
          inst.solver == "greedy"
              ? edgectl::alloc::solve_greedy(inst.modules, inst.resources, inst.weights)
              : edgectl::alloc::solve_exact(inst.modules, inst.resources, inst.weights);
      std::cout << edgectl::alloc::to_json(plan).dump(2) << '\n';
      return 0;
    }
    if (*plot) {
      const auto metrics = load_phase(plot_in, plot_phase);
      edgectl::emit_plot_data(metrics, plot_out);
      return 0;
    }
  } catch (const edgectl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
