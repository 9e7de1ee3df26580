#include "edgectl/mlp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

namespace edgectl::agent {

namespace {

void check_sizes(const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw DimensionError("a network needs at least input and output sizes");
  for (int s : sizes) {
    if (s <= 0) throw DimensionError("layer sizes must be positive");
  }
}

}  // namespace

MlpPolicy::MlpPolicy(std::vector<int> layer_sizes) : layer_sizes_(std::move(layer_sizes)) {
  check_sizes(layer_sizes_);
  for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    weights_.emplace_back(Eigen::MatrixXd::Zero(layer_sizes_[l + 1], layer_sizes_[l]));
    biases_.emplace_back(Eigen::VectorXd::Zero(layer_sizes_[l + 1]));
  }
}

MlpPolicy MlpPolicy::glorot(std::vector<int> layer_sizes, Rng& rng) {
  MlpPolicy net(std::move(layer_sizes));
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    auto& w = net.weights_[l];
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-limit, limit);
    }
  }
  return net;
}

std::vector<double> MlpPolicy::forward(std::span<const double> input) const {
  if (static_cast<int>(input.size()) != input_size()) {
    throw DimensionError("input length " + std::to_string(input.size()) +
                         " does not match input layer " + std::to_string(input_size()));
  }
  Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(input.data(), input_size());
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::VectorXd z = weights_[l] * a + biases_[l];
    a = (l + 1 < weights_.size()) ? Eigen::VectorXd(z.cwiseMax(0.0)) : z;
  }
  return {a.data(), a.data() + a.size()};
}

Eigen::MatrixXd MlpPolicy::forward_batch(const Eigen::MatrixXd& inputs) const {
  if (inputs.rows() != input_size()) throw DimensionError("batch rows do not match input layer");
  Eigen::MatrixXd a = inputs;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = weights_[l] * a;
    z.colwise() += biases_[l];
    if (l + 1 < weights_.size()) {
      a = z.cwiseMax(0.0);
    } else {
      a = std::move(z);
    }
  }
  return a;
}

std::size_t param_count(std::span<const int> layer_sizes) {
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const auto fan_in = static_cast<std::size_t>(layer_sizes[l]);
    const auto fan_out = static_cast<std::size_t>(layer_sizes[l + 1]);
    total += fan_in * fan_out + fan_out;
  }
  return total;
}

std::size_t MlpPolicy::param_count() const { return agent::param_count(layer_sizes_); }

std::vector<double> MlpPolicy::flat_params() const {
  std::vector<double> out;
  out.reserve(param_count());
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const auto& w = weights_[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) out.push_back(w(r, c));
    }
    out.insert(out.end(), biases_[l].data(), biases_[l].data() + biases_[l].size());
  }
  return out;
}

void MlpPolicy::set_flat_params(std::span<const double> params) {
  if (params.size() != param_count()) throw DimensionError("parameter vector has wrong length");
  std::size_t k = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    auto& w = weights_[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = params[k++];
    }
    for (Eigen::Index i = 0; i < biases_[l].size(); ++i) biases_[l](i) = params[k++];
  }
}

bool MlpPolicy::all_finite() const {
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
  }
  return true;
}

bool MlpPolicy::operator==(const MlpPolicy& other) const {
  if (layer_sizes_ != other.layer_sizes_) return false;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (weights_[l] != other.weights_[l] || biases_[l] != other.biases_[l]) return false;
  }
  return true;
}

std::vector<double> MlpGradients::flat() const {
  std::vector<double> out;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const auto& w = weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) out.push_back(w(r, c));
    }
    out.insert(out.end(), biases[l].data(), biases[l].data() + biases[l].size());
  }
  return out;
}

namespace {

void check_batch(const MlpPolicy& net, const Eigen::MatrixXd& inputs, std::span<const int> actions,
                 std::span<const double> targets) {
  if (inputs.rows() != net.input_size()) throw DimensionError("batch rows do not match input layer");
  if (static_cast<std::size_t>(inputs.cols()) != actions.size() ||
      actions.size() != targets.size()) {
    throw DimensionError("batch inputs, actions and targets differ in length");
  }
  for (int a : actions) {
    if (a < 0 || a >= net.output_size()) throw DimensionError("action index outside output layer");
  }
}

}  // namespace

double td_loss(const MlpPolicy& net, const Eigen::MatrixXd& inputs, std::span<const int> actions,
               std::span<const double> targets) {
  check_batch(net, inputs, actions, targets);
  const Eigen::MatrixXd q = net.forward_batch(inputs);
  double sum = 0.0;
  for (std::size_t b = 0; b < actions.size(); ++b) {
    const double err = q(actions[b], static_cast<Eigen::Index>(b)) - targets[b];
    sum += err * err;
  }
  return sum / static_cast<double>(actions.size());
}

double td_loss_gradient(const MlpPolicy& net, const Eigen::MatrixXd& inputs,
                        std::span<const int> actions, std::span<const double> targets,
                        MlpGradients& grads) {
  check_batch(net, inputs, actions, targets);
  const std::size_t layers = net.num_layers();
  const auto batch = static_cast<double>(actions.size());

  // activations[0] is the input; pre[l] is layer l's pre-activation.
  std::vector<Eigen::MatrixXd> activations(layers + 1);
  std::vector<Eigen::MatrixXd> pre(layers);
  activations[0] = inputs;
  for (std::size_t l = 0; l < layers; ++l) {
    pre[l] = net.weight(l) * activations[l];
    pre[l].colwise() += net.bias(l);
    activations[l + 1] = (l + 1 < layers) ? Eigen::MatrixXd(pre[l].cwiseMax(0.0)) : pre[l];
  }

  const Eigen::MatrixXd& q = activations[layers];
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(q.rows(), q.cols());
  double sum = 0.0;
  for (std::size_t b = 0; b < actions.size(); ++b) {
    const auto col = static_cast<Eigen::Index>(b);
    const double err = q(actions[b], col) - targets[b];
    sum += err * err;
    delta(actions[b], col) = 2.0 * err / batch;
  }

  grads.weights.resize(layers);
  grads.biases.resize(layers);
  for (std::size_t l = layers; l-- > 0;) {
    grads.weights[l] = delta * activations[l].transpose();
    grads.biases[l] = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = net.weight(l).transpose() * delta;
      delta = back.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return sum / batch;
}

void apply_sgd(MlpPolicy& net, const MlpGradients& grads, double learning_rate) {
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    net.weight(l) -= learning_rate * grads.weights[l];
    net.bias(l) -= learning_rate * grads.biases[l];
  }
}

nlohmann::json to_json(const MlpPolicy& net) {
  nlohmann::json j;
  j["layer_sizes"] = net.layer_sizes();
  j["layers"] = nlohmann::json::array();
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const auto& w = net.weight(l);
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(w.size()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
    }
    const auto& b = net.bias(l);
    j["layers"].push_back({{"weights", flat},
                           {"bias", std::vector<double>(b.data(), b.data() + b.size())}});
  }
  return j;
}

MlpPolicy policy_from_json(const nlohmann::json& j) {
  MlpPolicy net(j.at("layer_sizes").get<std::vector<int>>());
  const auto& layers = j.at("layers");
  if (layers.size() != net.num_layers()) throw DimensionError("layer count mismatch in JSON");
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const auto w = layers[l].at("weights").get<std::vector<double>>();
    const auto b = layers[l].at("bias").get<std::vector<double>>();
    auto& wm = net.weight(l);
    if (static_cast<Eigen::Index>(w.size()) != wm.size() ||
        static_cast<Eigen::Index>(b.size()) != net.bias(l).size()) {
      throw DimensionError("parameter array size mismatch in layer " + std::to_string(l));
    }
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < wm.rows(); ++r) {
      for (Eigen::Index c = 0; c < wm.cols(); ++c) wm(r, c) = w[k++];
    }
    for (std::size_t i = 0; i < b.size(); ++i) net.bias(l)(static_cast<Eigen::Index>(i)) = b[i];
  }
  return net;
}

namespace {

template <typename T>
void put(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw std::runtime_error("truncated policy checkpoint");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

constexpr char kMagic[4] = {'E', 'D', 'Q', 'N'};

}  // namespace

void write_binary(const MlpPolicy& net, std::ostream& out) {
  out.write(kMagic, 4);
  put<std::uint32_t>(out, 1);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(net.layer_sizes().size()));
  for (int s : net.layer_sizes()) put<std::uint32_t>(out, static_cast<std::uint32_t>(s));
  for (double p : net.flat_params()) put<double>(out, p);
}

MlpPolicy read_binary(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("not a policy checkpoint");
  }
  if (get<std::uint32_t>(in) != 1) throw std::runtime_error("unsupported checkpoint version");
  const auto count = get<std::uint32_t>(in);
  std::vector<int> sizes;
  for (std::uint32_t i = 0; i < count; ++i) sizes.push_back(static_cast<int>(get<std::uint32_t>(in)));
  MlpPolicy net(std::move(sizes));
  std::vector<double> params(net.param_count());
  for (double& p : params) p = get<double>(in);
  net.set_flat_params(params);
  return net;
}

}  // namespace edgectl::agent
