#include <doctest.h>

#include <cmath>
#include <vector>

#include "edgectl/boiler.hpp"

using namespace edgectl;
using namespace edgectl::plant;

namespace {

// Straight-line evaluation of the plant's difference equations with the
// default coefficients written out by hand.
BoilerState oracle_step(BoilerState s, double pump, double valve) {
  const double dt = 5.0, k = 0.00225;
  BoilerState n = s;
  n.pump_pos = pump;
  n.valve_pos = valve;
  n.water_level = s.water_level + (k * pump - k * valve * std::sqrt(s.pressure / 1000.0)) * dt;
  const double p_target = 1000.0 * (1.0 + 2.0 * (s.outlet_temp - 180.0) / 180.0 - 0.4 * (valve - 0.5));
  n.pressure = s.pressure + (dt / 30.0) * (p_target - s.pressure);
  const double t_target = s.inlet_temp + 120.0 * (1.0 - 1.5 * (s.water_level - 0.5));
  n.outlet_temp = s.outlet_temp + (dt / 60.0) * (t_target - s.outlet_temp);
  n.inlet_temp = s.inlet_temp + 0.002 * dt * (60.0 - s.inlet_temp);
  return n;
}

BoilerState random_state(Rng& rng) {
  BoilerState s;
  s.water_level = rng.uniform(0.2, 0.9);
  s.pressure = rng.uniform(600.0, 1500.0);
  s.outlet_temp = rng.uniform(120.0, 240.0);
  s.inlet_temp = rng.uniform(40.0, 80.0);
  s.pump_pos = kActuatorLevels[rng.below(3)];
  s.valve_pos = kActuatorLevels[rng.below(3)];
  return s;
}

}  // namespace

TEST_CASE("action index is bijective with the 3x3 grid") {
  for (int a = 0; a < kNumActions; ++a) {
    const auto c = command_from_action(a);
    CHECK(c.pump_level == kActuatorLevels[static_cast<std::size_t>(a / 3)]);
    CHECK(c.valve_level == kActuatorLevels[static_cast<std::size_t>(a % 3)]);
    CHECK(action_from_command(c) == a);
  }
  CHECK_THROWS(command_from_action(9));
  CHECK_THROWS(command_from_action(-1));
}

TEST_CASE("zero reset noise gives the nominal state") {
  PlantConfig cfg;
  cfg.noise.reset_level = cfg.noise.reset_pressure = 0.0;
  cfg.noise.reset_outlet_temp = cfg.noise.reset_inlet_temp = 0.0;
  Rng rng(9);
  CHECK(reset(cfg, rng) == nominal_state(cfg));
}

TEST_CASE("reset is deterministic and stays inside the envelope") {
  PlantConfig cfg;
  Rng a(4), b(4);
  CHECK(reset(cfg, a) == reset(cfg, b));
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(seed);
    const auto s = reset(cfg, rng);
    CHECK_FALSE(violates_envelope(cfg, s));
    CHECK_FALSE(s.failed);
  }
}

TEST_CASE("balanced flows keep the level") {
  PlantConfig cfg;
  const auto s = nominal_state(cfg);
  const auto r = predict(cfg, s, {0.5, 0.5});
  CHECK(r.state.water_level == doctest::Approx(s.water_level).epsilon(1e-12));
  CHECK(r.reward == doctest::Approx(0.0));
}

TEST_CASE("full pump with closed valve fills monotonically") {
  PlantConfig cfg;
  cfg.envelope.max_level = 2.0;  // let it run into the clamp
  auto s = nominal_state(cfg);
  int steps_to_bound = -1;
  for (int i = 0; i < 400; ++i) {
    const auto r = predict(cfg, s, {1.0, 0.0});
    if (s.water_level < 1.0) {
      CHECK(r.state.water_level > s.water_level);
    } else {
      CHECK(r.state.water_level == 1.0);
    }
    if (steps_to_bound < 0 && r.state.water_level >= 0.95 - 1e-9) steps_to_bound = i + 1;
    s = r.state;
  }
  CHECK(steps_to_bound == 40);
}

TEST_CASE("trajectory matches a direct evaluation of the update equations") {
  PlantConfig cfg;
  for (auto start : {nominal_state(cfg), BoilerState{70.0, 200.0, 0.6, 1100.0, 0.5, 0.5, false}}) {
    auto s = start;
    auto o = start;
    for (int i = 0; i < 200; ++i) {
      s = predict(cfg, s, {0.5, 0.5}).state;
      o = oracle_step(o, 0.5, 0.5);
      REQUIRE(s.water_level == doctest::Approx(o.water_level).epsilon(1e-12));
      REQUIRE(s.pressure == doctest::Approx(o.pressure).epsilon(1e-12));
      REQUIRE(s.outlet_temp == doctest::Approx(o.outlet_temp).epsilon(1e-12));
      REQUIRE(s.inlet_temp == doctest::Approx(o.inlet_temp).epsilon(1e-12));
    }
  }
}

TEST_CASE("mass balance holds away from the clamp") {
  PlantConfig cfg;
  Rng rng(21);
  for (int i = 0; i < 5000; ++i) {
    const auto s = random_state(rng);
    const auto cmd = command_from_action(static_cast<int>(rng.below(9)));
    const auto n = advance(cfg, s, cmd, cfg.dt_s);
    if (n.water_level <= 0.0 || n.water_level >= 1.0) continue;
    const double expected =
        (inflow(cfg, cmd.pump_level) - outflow(cfg, cmd.valve_level, s.pressure)) * cfg.dt_s;
    CHECK(std::abs((n.water_level - s.water_level) - expected) < 1e-9);
  }
}

TEST_CASE("failure is detected and absorbing") {
  PlantConfig cfg;
  BoilerState s = nominal_state(cfg);
  s.water_level = 0.94;
  const auto r = predict(cfg, s, {1.0, 0.0});
  CHECK(r.failed);
  CHECK(r.state.failed);
  CHECK(r.reward < -cfg.reward.failure_penalty);
  const auto again = predict(cfg, r.state, {0.0, 1.0});
  CHECK(again.failed);
  CHECK(again.state == r.state);
  CHECK(again.reward == -cfg.reward.failure_penalty);
}

TEST_CASE("reward is zero at the setpoint and bounded") {
  PlantConfig cfg;
  cfg.reward.actuation = 0.0;
  CHECK(reward(cfg, nominal_state(cfg), {1.0, 0.0}) == 0.0);

  PlantConfig dflt;
  Rng rng(5);
  const double bound = dflt.reward.level + dflt.reward.pressure + dflt.reward.outlet_temp;
  for (int i = 0; i < 2000; ++i) {
    const auto s = random_state(rng);
    const auto r = predict(dflt, s, command_from_action(static_cast<int>(rng.below(9))));
    CHECK(r.reward <= 0.0);
    // Inside the envelope every normalised deviation is at most ~1.
    if (!r.failed) CHECK(r.reward >= -(bound * 2.0 + 2.0 * dflt.reward.actuation));
  }
}

TEST_CASE("reward does not increase with level deviation") {
  PlantConfig cfg;
  auto s = nominal_state(cfg);
  double prev = 1.0;
  for (double d = 0.0; d <= 0.45; d += 0.005) {
    s.water_level = cfg.level_setpoint + d;
    const double up = reward(cfg, s, {0.5, 0.5});
    s.water_level = cfg.level_setpoint - d;
    const double down = reward(cfg, s, {0.5, 0.5});
    CHECK(up <= prev);
    CHECK(down <= prev);
    prev = std::max(up, down);
  }
}

TEST_CASE("observation layout") {
  PlantConfig cfg;
  const auto cur = nominal_state(cfg);
  SUBCASE("empty history") {
    const auto obs = observe(cfg, cur, {});
    CHECK(obs.size() == kObservationLength);
    for (std::size_t i = kStateFeatures; i < obs.size(); ++i) CHECK(obs[i] == 0.0);
  }
  std::vector<HistoryEntry> hist;
  for (int i = 0; i < 15; ++i) {
    BoilerState s = cur;
    s.water_level = 0.3 + 0.01 * i;
    hist.push_back({s, -1.0 * i});
  }
  SUBCASE("history of 10 has no padding") {
    const std::span<const HistoryEntry> ten(hist.data(), 10);
    const auto obs = observe(cfg, cur, ten);
    CHECK(obs.size() == kObservationLength);
    const std::size_t last_block = kStateFeatures + 9 * (kStateFeatures + 1);
    CHECK(obs[last_block] != 0.0);
  }
  SUBCASE("history of 15 uses the latest 10, most recent first") {
    const auto obs = observe(cfg, cur, hist);
    std::vector<double> expected;
    const auto c = state_features(cfg, cur);
    expected.insert(expected.end(), c.begin(), c.end());
    for (int k = 14; k >= 5; --k) {
      const auto f = state_features(cfg, hist[static_cast<std::size_t>(k)].state);
      expected.insert(expected.end(), f.begin(), f.end());
      expected.push_back(reward_feature(cfg, hist[static_cast<std::size_t>(k)].reward));
    }
    CHECK(obs == expected);
  }
}

TEST_CASE("noise is seeded") {
  PlantConfig cfg;
  Rng a(1), b(1);
  const auto na = sample_noise(cfg, a);
  const auto nb = sample_noise(cfg, b);
  CHECK(na.level == nb.level);
  CHECK(na.pressure == nb.pressure);
  const auto s = nominal_state(cfg);
  CHECK(step(cfg, s, {0.5, 0.5}, na).state == step(cfg, s, {0.5, 0.5}, nb).state);
}
