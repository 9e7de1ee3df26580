#include "edgectl/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace edgectl::agent {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("replay capacity must be positive");
  items_.reserve(capacity_);
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
  }
  ++inserted_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= items_.size()) throw std::out_of_range("replay index out of range");
  return items_[(head_ + i) % items_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch, Rng& rng) const {
  if (batch > items_.size()) {
    throw std::invalid_argument("cannot sample " + std::to_string(batch) + " from a buffer of " +
                                std::to_string(items_.size()));
  }
  std::vector<std::size_t> idx(batch);
  for (auto& i : idx) i = static_cast<std::size_t>(rng.below(items_.size()));
  return idx;
}

int argmax(std::span<const double> values) {
  if (values.empty()) throw DimensionError("argmax of an empty vector");
  int best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

int select_action(std::span<const double> values, double epsilon, Rng& rng) {
  if (values.empty()) throw DimensionError("no action values");
  if (rng.uniform() < epsilon) return static_cast<int>(rng.below(values.size()));
  return argmax(values);
}

double bellman_target(double reward, bool done, double gamma, std::span<const double> next_values) {
  if (done) return reward;
  return reward + gamma * *std::max_element(next_values.begin(), next_values.end());
}

double train_step(MlpPolicy& policy, const MlpPolicy& target,
                  std::span<const Transition* const> batch, const Hyperparams& hp) {
  if (static_cast<int>(batch.size()) != hp.batch_size) {
    throw DimensionError("batch of " + std::to_string(batch.size()) + " but batch_size is " +
                         std::to_string(hp.batch_size));
  }
  const auto n = static_cast<Eigen::Index>(batch.size());
  const Eigen::Index in = policy.input_size();
  Eigen::MatrixXd obs(in, n);
  Eigen::MatrixXd next(in, n);
  std::vector<int> actions(batch.size());
  for (Eigen::Index b = 0; b < n; ++b) {
    const Transition& t = *batch[static_cast<std::size_t>(b)];
    if (static_cast<Eigen::Index>(t.obs.size()) != in ||
        static_cast<Eigen::Index>(t.next_obs.size()) != in) {
      throw DimensionError("transition observation length does not match the network");
    }
    obs.col(b) = Eigen::Map<const Eigen::VectorXd>(t.obs.data(), in);
    next.col(b) = Eigen::Map<const Eigen::VectorXd>(t.next_obs.data(), in);
    actions[static_cast<std::size_t>(b)] = t.action;
  }

  const Eigen::MatrixXd next_q = target.forward_batch(next);
  std::vector<double> targets(batch.size());
  for (Eigen::Index b = 0; b < n; ++b) {
    const Transition& t = *batch[static_cast<std::size_t>(b)];
    const auto col = next_q.col(b);
    targets[static_cast<std::size_t>(b)] =
        bellman_target(t.reward, t.done, hp.gamma, std::span<const double>(col.data(), col.size()));
  }

  MlpGradients grads;
  const double loss = td_loss_gradient(policy, obs, actions, targets, grads);
  if (!std::isfinite(loss)) throw DivergenceError("TD loss is not finite");
  apply_sgd(policy, grads, hp.learning_rate);
  return loss;
}

void sync_target(const MlpPolicy& policy, MlpPolicy& target) {
  if (!target.same_shape(policy) && target.num_layers() != 0) {
    throw DimensionError("target and policy shapes differ");
  }
  target = policy;
}

double epsilon_at(const Hyperparams& hp, std::uint64_t step, std::uint64_t total_steps) {
  const double horizon = hp.epsilon_decay_fraction * static_cast<double>(total_steps);
  if (horizon <= 0.0) return hp.epsilon_end;
  const double frac = std::min(1.0, static_cast<double>(step) / horizon);
  return hp.epsilon_start + (hp.epsilon_end - hp.epsilon_start) * frac;
}

std::vector<int> network_layout(int observation_length, const std::vector<int>& hidden) {
  std::vector<int> sizes{observation_length};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(kNumActions);
  return sizes;
}

DqnAgent::DqnAgent(int observation_length, Hyperparams hp, std::uint64_t seed)
    : hp_(std::move(hp)),
      buffer_(static_cast<std::size_t>(hp_.replay_capacity)),
      rng_(seed) {
  Rng init = rng_.fork(1);
  policy_ = MlpPolicy::glorot(network_layout(observation_length, hp_.hidden), init);
  target_ = policy_;
}

int DqnAgent::act(std::span<const double> obs, double epsilon) {
  const auto q = policy_.forward(obs);
  return select_action(q, epsilon, rng_);
}

double DqnAgent::observe(Transition t) {
  t.reward *= hp_.reward_scale;
  buffer_.push(std::move(t));
  ++env_steps_;
  const auto ready = static_cast<std::size_t>(std::max(hp_.warmup, hp_.batch_size));
  if (buffer_.size() < ready || env_steps_ % static_cast<std::uint64_t>(hp_.train_every) != 0) {
    return -1.0;
  }
  const auto idx = buffer_.sample_indices(static_cast<std::size_t>(hp_.batch_size), rng_);
  std::vector<const Transition*> batch;
  batch.reserve(idx.size());
  for (auto i : idx) batch.push_back(&buffer_.at(i));
  return train_on(batch);
}

double DqnAgent::train_on(std::span<const Transition* const> batch) {
  const double loss = train_step(policy_, target_, batch, hp_);
  ++train_steps_;
  if (train_steps_ % static_cast<std::uint64_t>(hp_.target_update) == 0) {
    sync_target(policy_, target_);
    ++target_syncs_;
  }
  return loss;
}

}  // namespace edgectl::agent
