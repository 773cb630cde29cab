#pragma once

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "actevo/activation.hpp"
#include "actevo/dataset.hpp"
#include "actevo/evolve.hpp"
#include "actevo/rng.hpp"
#include "actevo/schedule.hpp"

namespace actevo {

/// One fitness evaluation: network shape, data, schedule, and optimizer
/// constants.  layer_widths runs input -> hidden... -> classes; every hidden
/// layer is followed by the candidate activation.
struct TrainSpec {
  std::vector<int> layer_widths = {2, 16, 16, 2};
  DatasetRef dataset;
  LrSchedule schedule;
  double momentum = 0.9;  // Nesterov
  double l2 = 1e-4;       // weights only
  int batch_size = 32;
  Granularity granularity = Granularity::per_channel;
  std::uint64_t seed = 0;

  void validate() const {
    if (layer_widths.size() < 3) {
      throw std::invalid_argument("need at least one hidden layer");
    }
    for (int w : layer_widths) {
      if (w < 1) throw std::invalid_argument("layer widths must be positive");
    }
    if (batch_size < 1) throw std::invalid_argument("batch_size must be positive");
    schedule.validate();
  }
};

/// Dense network with the candidate activation after every hidden layer and
/// a softmax cross-entropy head.  Activation parameters live per hidden
/// layer, either one value per parameter index (per-layer) or one per hidden
/// unit (per-channel and per-neuron, which coincide for dense layers).
class Mlp {
 public:
  Mlp(std::vector<int> widths, ActivationDef act, Granularity granularity, Rng& rng)
      : widths_(std::move(widths)), act_(std::move(act)), granularity_(granularity) {
    if (widths_.size() < 3) throw std::invalid_argument("need at least one hidden layer");
    const int layers = static_cast<int>(widths_.size()) - 1;
    w_.resize(static_cast<std::size_t>(layers));
    b_.resize(static_cast<std::size_t>(layers));
    for (int l = 0; l < layers; ++l) {
      const int fan_in = widths_[static_cast<std::size_t>(l)];
      const int fan_out = widths_[static_cast<std::size_t>(l) + 1];
      w_[static_cast<std::size_t>(l)].resize(static_cast<std::size_t>(fan_in) * fan_out);
      b_[static_cast<std::size_t>(l)].assign(static_cast<std::size_t>(fan_out), 0.0);
      // Fan-in-scaled Gaussian init, sd = sqrt(2 / fan_in).
      const double sd = std::sqrt(2.0 / fan_in);
      for (double& v : w_[static_cast<std::size_t>(l)]) v = sd * rng.normal();
    }
    act_params_.resize(static_cast<std::size_t>(hidden_layers()));
    for (int l = 0; l < hidden_layers(); ++l) {
      const int g = groups(l);
      auto& p = act_params_[static_cast<std::size_t>(l)];
      p.resize(static_cast<std::size_t>(g) * act_.param_count);
      for (int u = 0; u < g; ++u) {
        for (int j = 0; j < act_.param_count; ++j) {
          p[static_cast<std::size_t>(u) * act_.param_count + j] =
              act_.init[static_cast<std::size_t>(j)];
        }
      }
    }
  }

  int layers() const { return static_cast<int>(widths_.size()) - 1; }
  int hidden_layers() const { return layers() - 1; }
  int input_dim() const { return widths_.front(); }
  int classes() const { return widths_.back(); }
  const ActivationDef& activation() const { return act_; }
  Granularity granularity() const { return granularity_; }

  int groups(int hidden_layer) const {
    return granularity_ == Granularity::per_layer
               ? 1
               : widths_[static_cast<std::size_t>(hidden_layer) + 1];
  }

  /// Total number of activation parameters in the network.
  int activation_param_total() const {
    int total = 0;
    for (int l = 0; l < hidden_layers(); ++l) total += groups(l) * act_.param_count;
    return total;
  }

  std::span<const double> act_params_for(int hidden_layer, int unit) const {
    const int g = granularity_ == Granularity::per_layer ? 0 : unit;
    return std::span<const double>(
        act_params_[static_cast<std::size_t>(hidden_layer)].data() +
            static_cast<std::size_t>(g) * act_.param_count,
        static_cast<std::size_t>(act_.param_count));
  }

  std::vector<std::vector<double>>& weights() { return w_; }
  std::vector<std::vector<double>>& biases() { return b_; }
  std::vector<std::vector<double>>& act_params() { return act_params_; }
  const std::vector<std::vector<double>>& weights() const { return w_; }
  const std::vector<std::vector<double>>& biases() const { return b_; }
  const std::vector<std::vector<double>>& act_params() const { return act_params_; }

  const std::vector<int>& widths() const { return widths_; }

  /// Forward pass for one sample; returns the predicted class.
  int predict(const double* x) const {
    std::vector<double> cur(x, x + input_dim());
    std::vector<double> next;
    for (int l = 0; l < layers(); ++l) {
      affine(l, cur, next);
      if (l < hidden_layers()) {
        for (int u = 0; u < static_cast<int>(next.size()); ++u) {
          next[static_cast<std::size_t>(u)] =
              act_.value(next[static_cast<std::size_t>(u)], act_params_for(l, u));
        }
      }
      cur.swap(next);
    }
    int best = 0;
    for (int c = 1; c < classes(); ++c) {
      if (cur[static_cast<std::size_t>(c)] > cur[static_cast<std::size_t>(best)]) best = c;
    }
    return best;
  }

  void affine(int l, const std::vector<double>& in, std::vector<double>& out) const {
    const int fan_in = widths_[static_cast<std::size_t>(l)];
    const int fan_out = widths_[static_cast<std::size_t>(l) + 1];
    out.assign(static_cast<std::size_t>(fan_out), 0.0);
    const auto& w = w_[static_cast<std::size_t>(l)];
    for (int o = 0; o < fan_out; ++o) {
      double sum = b_[static_cast<std::size_t>(l)][static_cast<std::size_t>(o)];
      const double* row = w.data() + static_cast<std::size_t>(o) * fan_in;
      for (int i = 0; i < fan_in; ++i) sum += row[static_cast<std::size_t>(i)] * in[static_cast<std::size_t>(i)];
      out[static_cast<std::size_t>(o)] = sum;
    }
  }

 private:
  std::vector<int> widths_;
  ActivationDef act_;
  Granularity granularity_;
  std::vector<std::vector<double>> w_;   // [layer] (out x in, row-major)
  std::vector<std::vector<double>> b_;   // [layer]
  std::vector<std::vector<double>> act_params_;  // [hidden layer][group * k + j]
};

/// Constructs the network for a candidate graph, rejecting graphs with more
/// than three parameters (the evolution-side contract).
inline Mlp build_network(const TrainSpec& spec, const ActivationGraph& graph, Rng& rng) {
  if (graph.param_count() > 3) {
    throw std::invalid_argument("candidate graphs carry at most 3 parameters");
  }
  return Mlp(spec.layer_widths, graph_activation(graph), spec.granularity, rng);
}

}  // namespace actevo
