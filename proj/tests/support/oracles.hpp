#pragma once

// Independent reference computations shared by the unit and acceptance tests.
// Nothing here calls into the code under test except to read parameters.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "edgectl/allocator.hpp"
#include "edgectl/mlp.hpp"
#include "edgectl/rng.hpp"

namespace oracle {

struct GapInstance {
  std::vector<edgectl::alloc::EdgeResource> resources;
  std::vector<edgectl::alloc::ControlModule> modules;
  edgectl::alloc::AffinityWeights weights;
};

inline GapInstance random_gap(edgectl::Rng& rng, int max_resources = 3, int max_modules = 3) {
  GapInstance g;
  const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_resources)));
  const int m = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_modules) + 1));
  for (int i = 0; i < n; ++i) {
    edgectl::alloc::EdgeResource r;
    r.id = 10 + i;
    r.capacity = rng.uniform(0.5, 4.0);
    r.current_load = rng.uniform(0.0, 0.5) * r.capacity;
    r.bandwidth = rng.uniform(10.0, 200.0);
    r.compute_rating = rng.uniform(0.05, 1.0);
    g.resources.push_back(r);
  }
  for (int j = 0; j < m; ++j) {
    edgectl::alloc::ControlModule c;
    c.id = 100 + j;
    c.load = rng.uniform(0.2, 2.5);
    c.intensity = rng.uniform(0.05, 1.0);
    g.modules.push_back(c);
  }
  const double w = rng.uniform();
  g.weights = {w, 1.0 - w};
  return g;
}

// Affinity written out from its closed form.
inline double closed_form_affinity(const edgectl::alloc::ControlModule& c, const edgectl::alloc::EdgeResource& r,
                       const edgectl::alloc::AffinityWeights& w, double max_bw) {
  return (w.bandwidth * r.bandwidth / max_bw + w.compute * r.compute_rating) * (1.0 + c.intensity);
}

// Enumerates every choice of host (or none) per module: (n+1)^m plans.
inline double brute_force_gap(const GapInstance& g) {
  const std::size_t n = g.resources.size(), m = g.modules.size();
  double max_bw = 0.0;
  for (const auto& r : g.resources) max_bw = std::max(max_bw, r.bandwidth);
  std::size_t total = 1;
  for (std::size_t j = 0; j < m; ++j) total *= n + 1;
  double best = -1.0;
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<double> used(n, 0.0);
    double obj = 0.0;
    std::size_t c = code;
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t choice = c % (n + 1);
      c /= n + 1;
      if (choice == n) continue;
      used[choice] += g.modules[j].load;
      obj += closed_form_affinity(g.modules[j], g.resources[choice], g.weights, max_bw);
    }
    bool ok = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (g.resources[i].current_load + used[i] > g.resources[i].capacity + 1e-9) ok = false;
    }
    if (ok) best = std::max(best, obj);
  }
  return best;
}

// Plain loops over the stored parameters.
inline std::vector<double> forward(const edgectl::agent::MlpPolicy& net, std::vector<double> x) {
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const auto& w = net.weight(l);
    const auto& b = net.bias(l);
    std::vector<double> y(static_cast<std::size_t>(w.rows()));
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      double s = b(i);
      for (Eigen::Index k = 0; k < w.cols(); ++k) s += w(i, k) * x[static_cast<std::size_t>(k)];
      const bool hidden = l + 1 < net.num_layers();
      y[static_cast<std::size_t>(i)] = hidden ? std::max(s, 0.0) : s;
    }
    x = std::move(y);
  }
  return x;
}

inline double loss(const edgectl::agent::MlpPolicy& net, const std::vector<std::vector<double>>& xs,
                   const std::vector<int>& actions, const std::vector<double>& targets) {
  double s = 0.0;
  for (std::size_t b = 0; b < xs.size(); ++b) {
    const double e = forward(net, xs[b])[static_cast<std::size_t>(actions[b])] - targets[b];
    s += e * e;
  }
  return s / static_cast<double>(xs.size());
}

// Max relative error between backprop and central differences (step h) for
// one random network and batch drawn from `rng`.
inline double gradient_check(const std::vector<int>& sizes, edgectl::Rng& rng, double h = 1e-5) {
  auto net = edgectl::agent::MlpPolicy::glorot(sizes, rng);
  // Non-zero biases so that every parameter gets exercised.
  auto p = net.flat_params();
  for (auto& v : p) v += rng.uniform(-0.1, 0.1);
  net.set_flat_params(p);

  const std::size_t batch = 1 + rng.below(16);
  std::vector<std::vector<double>> xs(batch);
  std::vector<int> actions(batch);
  std::vector<double> targets(batch);
  Eigen::MatrixXd inputs(sizes.front(), static_cast<Eigen::Index>(batch));
  for (std::size_t b = 0; b < batch; ++b) {
    for (int k = 0; k < sizes.front(); ++k) {
      const double v = rng.uniform(-1.0, 1.0);
      xs[b].push_back(v);
      inputs(k, static_cast<Eigen::Index>(b)) = v;
    }
    actions[b] = static_cast<int>(rng.below(static_cast<std::uint64_t>(sizes.back())));
    targets[b] = rng.uniform(-2.0, 2.0);
  }

  edgectl::agent::MlpGradients g;
  edgectl::agent::td_loss_gradient(net, inputs, actions, targets, g);
  const auto analytic = g.flat();

  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto plus = p, minus = p;
    plus[i] += h;
    minus[i] -= h;
    net.set_flat_params(plus);
    const double lp = loss(net, xs, actions, targets);
    net.set_flat_params(minus);
    const double lm = loss(net, xs, actions, targets);
    const double numeric = (lp - lm) / (2.0 * h);
    const double scale = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-8});
    worst = std::max(worst, std::abs(numeric - analytic[i]) / scale);
  }
  net.set_flat_params(p);
  return worst;
}

}  // namespace oracle
