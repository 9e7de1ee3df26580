#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "edgectl/mlp.hpp"
#include "edgectl/rng.hpp"

namespace edgectl::agent {

inline constexpr int kNumActions = 9;

struct Transition {
  std::vector<double> obs;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_obs;
  bool done = false;
};

// Bounded FIFO ring; the oldest transition is evicted once full.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 5000);

  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t inserted() const { return inserted_; }

  // i = 0 is the oldest retained transition.
  const Transition& at(std::size_t i) const;

  // Uniform with replacement.
  std::vector<std::size_t> sample_indices(std::size_t batch, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::vector<Transition> items_;
  std::size_t head_ = 0;  // physical index of the oldest item once full
  std::uint64_t inserted_ = 0;
};

struct Hyperparams {
  double learning_rate = 0.01;
  double gamma = 0.95;
  int target_update = 100;  // train steps between target syncs
  int batch_size = 16;
  int replay_capacity = 5000;
  std::vector<int> hidden{64, 64};
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.3;
  // Environment steps between train steps.
  int train_every = 1;
  // Buffer size required before the first train step (at least batch_size).
  int warmup = 200;
  // Rewards are multiplied by this before they enter the buffer.
  double reward_scale = 0.01;

  bool operator==(const Hyperparams&) const = default;
};

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Greedy with probability 1 - epsilon (ties go to the lowest index), uniform
// otherwise.
int select_action(std::span<const double> values, double epsilon, Rng& rng);

int argmax(std::span<const double> values);

double bellman_target(double reward, bool done, double gamma, std::span<const double> next_values);

// One SGD step on the mean squared TD error of `batch`. Returns the loss
// before the update. Throws DivergenceError when the loss is not finite, in
// which case the policy is left untouched.
double train_step(MlpPolicy& policy, const MlpPolicy& target,
                  std::span<const Transition* const> batch, const Hyperparams& hp);

void sync_target(const MlpPolicy& policy, MlpPolicy& target);

// Linear decay from epsilon_start to epsilon_end over the first
// epsilon_decay_fraction of `total_steps`.
double epsilon_at(const Hyperparams& hp, std::uint64_t step, std::uint64_t total_steps);

class DqnAgent {
 public:
  DqnAgent(int observation_length, Hyperparams hp, std::uint64_t seed);

  const MlpPolicy& policy() const { return policy_; }
  const MlpPolicy& target() const { return target_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  const Hyperparams& hyperparams() const { return hp_; }
  std::uint64_t train_steps() const { return train_steps_; }
  std::uint64_t target_syncs() const { return target_syncs_; }

  std::vector<double> q_values(std::span<const double> obs) const { return policy_.forward(obs); }
  int act(std::span<const double> obs, double epsilon);

  // Stores the transition (reward scaled) and trains when due. Returns the
  // loss of the train step taken, or a negative value when none was taken.
  double observe(Transition t);

  // Direct train step on an explicit batch; advances the train-step counter
  // and syncs the target every `target_update` steps.
  double train_on(std::span<const Transition* const> batch);

 private:
  Hyperparams hp_;
  MlpPolicy policy_;
  MlpPolicy target_;
  ReplayBuffer buffer_;
  Rng rng_;
  std::uint64_t env_steps_ = 0;
  std::uint64_t train_steps_ = 0;
  std::uint64_t target_syncs_ = 0;
};

std::vector<int> network_layout(int observation_length, const std::vector<int>& hidden);

}  // namespace edgectl::agent
