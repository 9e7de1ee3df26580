// Grid search over the boiler PID gains. Scores each candidate by mean
// episode reward on tuning seeds that are disjoint from the evaluation seeds.
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "edgectl/config.hpp"
#include "edgectl/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"PID gain grid search"};
  std::string config_path;
  std::vector<std::uint64_t> seeds{101, 102, 103};
  int episodes = 20;
  app.add_option("--config", config_path, "base config (JSON); defaults otherwise");
  app.add_option("--seeds", seeds, "tuning seeds")->delimiter(',');
  app.add_option("--episodes", episodes, "episodes per seed");
  CLI11_PARSE(app, argc, argv);

  auto cfg = config_path.empty() ? edgectl::default_config() : edgectl::load_config(config_path);
  cfg.controller = edgectl::ControllerKind::pid;
  cfg.seeds = seeds;
  cfg.episodes = episodes;
  cfg.eval_episodes = 0;

  const std::vector<double> level_kp{1, 2, 5, 10, 20, 40, 80, 160, 320};
  const std::vector<double> level_ki{0, 0.001, 0.005, 0.02, 0.05};
  const std::vector<double> level_kd{0, 5, 20};
  const std::vector<double> pressure_kp{0, 0.5, 1, 2, 5, 10, 20, 50};
  const std::vector<double> pressure_ki{0, 0.001, 0.01};

  double best = -std::numeric_limits<double>::infinity();
  edgectl::pid::BoilerPidConfig best_cfg = cfg.pid;
  for (double lp : level_kp)
    for (double li : level_ki)
      for (double ld : level_kd)
        for (double pp : pressure_kp)
          for (double pi : pressure_ki) {
            auto c = cfg;
            c.pid.level.kp = lp;
            c.pid.level.ki = li;
            c.pid.level.kd = ld;
            c.pid.pressure.kp = pp;
            c.pid.pressure.ki = pi;
            double total = 0.0;
            int n = 0;
            for (const auto& run : edgectl::run_experiment(c, 1)) {
              for (const auto& r : run.records) {
                total += r.cumulative_reward;
                ++n;
              }
            }
            const double mean = total / n;
            if (mean > best) {
              best = mean;
              best_cfg = c.pid;
              std::cout << "level kp=" << lp << " ki=" << li << " kd=" << ld << "  pressure kp=" << pp
                        << " ki=" << pi << "  mean reward " << mean << std::endl;
            }
          }
  auto c = cfg;
  c.pid = best_cfg;
  std::cout << edgectl::to_json(c)["pid"].dump(2) << '\n';
  return 0;
}
