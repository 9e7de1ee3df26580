#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "edgectl/rng.hpp"

namespace edgectl::agent {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Fully-connected network: rectifier on hidden layers, identity on the output.
// weights[l] has shape (layer_sizes[l+1], layer_sizes[l]).
class MlpPolicy {
 public:
  MlpPolicy() = default;
  // Zero-initialised parameters.
  explicit MlpPolicy(std::vector<int> layer_sizes);

  // Uniform in +-sqrt(6 / (fan_in + fan_out)).
  static MlpPolicy glorot(std::vector<int> layer_sizes, Rng& rng);

  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  std::size_t num_layers() const { return weights_.size(); }
  int input_size() const { return layer_sizes_.front(); }
  int output_size() const { return layer_sizes_.back(); }

  Eigen::MatrixXd& weight(std::size_t l) { return weights_[l]; }
  const Eigen::MatrixXd& weight(std::size_t l) const { return weights_[l]; }
  Eigen::VectorXd& bias(std::size_t l) { return biases_[l]; }
  const Eigen::VectorXd& bias(std::size_t l) const { return biases_[l]; }

  std::vector<double> forward(std::span<const double> input) const;
  // Column-per-sample batch evaluation.
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const;

  std::size_t param_count() const;
  // Per layer: weights row-major, then bias.
  std::vector<double> flat_params() const;
  void set_flat_params(std::span<const double> params);

  bool all_finite() const;
  bool same_shape(const MlpPolicy& other) const { return layer_sizes_ == other.layer_sizes_; }
  bool operator==(const MlpPolicy& other) const;

 private:
  std::vector<int> layer_sizes_;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
};

std::size_t param_count(std::span<const int> layer_sizes);

struct MlpGradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  std::vector<double> flat() const;
};

// Mean over the batch of (Q(s_b)[a_b] - y_b)^2; only the taken action's value
// contributes. `inputs` holds one sample per column.
double td_loss(const MlpPolicy& net, const Eigen::MatrixXd& inputs, std::span<const int> actions,
               std::span<const double> targets);

// Loss plus its analytic gradient by backpropagation.
double td_loss_gradient(const MlpPolicy& net, const Eigen::MatrixXd& inputs,
                        std::span<const int> actions, std::span<const double> targets,
                        MlpGradients& grads);

void apply_sgd(MlpPolicy& net, const MlpGradients& grads, double learning_rate);

// JSON layout: {"layer_sizes": [...], "layers": [{"weights": [row-major],
// "bias": [...]}, ...]}.
nlohmann::json to_json(const MlpPolicy& net);
MlpPolicy policy_from_json(const nlohmann::json& j);

// Binary layout, little-endian: "EDQN", u32 version (1), u32 layer-size
// count, u32 sizes, then per layer f64 weights row-major followed by f64 bias.
void write_binary(const MlpPolicy& net, std::ostream& out);
MlpPolicy read_binary(std::istream& in);

}  // namespace edgectl::agent
