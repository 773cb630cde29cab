#pragma once

#include <chrono>
#include <cmath>
#include <vector>

#include "actevo/network.hpp"

namespace actevo {

/// Gradient buffers matching an Mlp's parameter layout.
struct Gradients {
  std::vector<std::vector<double>> w, b, act;

  explicit Gradients(const Mlp& m) {
    w.resize(m.weights().size());
    b.resize(m.biases().size());
    act.resize(m.act_params().size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i].assign(m.weights()[i].size(), 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) b[i].assign(m.biases()[i].size(), 0.0);
    for (std::size_t i = 0; i < act.size(); ++i) act[i].assign(m.act_params()[i].size(), 0.0);
  }

  void zero() {
    for (auto& v : w) std::fill(v.begin(), v.end(), 0.0);
    for (auto& v : b) std::fill(v.begin(), v.end(), 0.0);
    for (auto& v : act) std::fill(v.begin(), v.end(), 0.0);
  }
};

namespace detail {

struct SampleStats {
  double loss = 0.0;
  bool correct = false;
};

// Forward and backward for one sample; accumulates into `grads` when given.
inline SampleStats sample_pass(const Mlp& m, const double* x, int label, Gradients* grads) {
  const int layers = m.layers();
  const int hid = m.hidden_layers();
  thread_local std::vector<std::vector<double>> pre, post;
  pre.assign(static_cast<std::size_t>(layers), {});
  post.assign(static_cast<std::size_t>(layers), {});
  thread_local std::vector<double> cur;
  cur.assign(x, x + m.input_dim());
  thread_local std::vector<double> dparams;
  dparams.resize(static_cast<std::size_t>(m.activation().param_count));

  for (int l = 0; l < layers; ++l) {
    m.affine(l, cur, pre[static_cast<std::size_t>(l)]);
    post[static_cast<std::size_t>(l)] = pre[static_cast<std::size_t>(l)];
    if (l < hid) {
      auto& act_out = post[static_cast<std::size_t>(l)];
      for (int u = 0; u < static_cast<int>(act_out.size()); ++u) {
        act_out[static_cast<std::size_t>(u)] = m.activation().value(
            pre[static_cast<std::size_t>(l)][static_cast<std::size_t>(u)],
            m.act_params_for(l, u));
      }
    }
    cur = post[static_cast<std::size_t>(l)];
  }

  // Softmax cross-entropy via log-sum-exp.
  auto& logits = post[static_cast<std::size_t>(layers - 1)];
  double zmax = logits[0];
  int argmax = 0;
  for (int c = 1; c < m.classes(); ++c) {
    if (logits[static_cast<std::size_t>(c)] > zmax) {
      zmax = logits[static_cast<std::size_t>(c)];
      argmax = c;
    }
  }
  double sum = 0.0;
  for (int c = 0; c < m.classes(); ++c) sum += std::exp(logits[static_cast<std::size_t>(c)] - zmax);
  const double lse = std::log(sum) + zmax;

  SampleStats stats;
  stats.loss = lse - logits[static_cast<std::size_t>(label)];
  stats.correct = argmax == label;
  if (grads == nullptr) return stats;

  // delta at the logits.
  thread_local std::vector<double> delta, delta_prev;
  delta.assign(static_cast<std::size_t>(m.classes()), 0.0);
  for (int c = 0; c < m.classes(); ++c) {
    delta[static_cast<std::size_t>(c)] =
        std::exp(logits[static_cast<std::size_t>(c)] - lse) - (c == label ? 1.0 : 0.0);
  }

  for (int l = layers - 1; l >= 0; --l) {
    const int fan_in = m.widths()[static_cast<std::size_t>(l)];
    const int fan_out = m.widths()[static_cast<std::size_t>(l) + 1];
    const double* in_ptr = l == 0 ? x : post[static_cast<std::size_t>(l - 1)].data();
    auto& gw = grads->w[static_cast<std::size_t>(l)];
    auto& gb = grads->b[static_cast<std::size_t>(l)];
    for (int o = 0; o < fan_out; ++o) {
      const double d = delta[static_cast<std::size_t>(o)];
      gb[static_cast<std::size_t>(o)] += d;
      double* grow = gw.data() + static_cast<std::size_t>(o) * fan_in;
      for (int i = 0; i < fan_in; ++i) grow[static_cast<std::size_t>(i)] += d * in_ptr[i];
    }
    if (l == 0) break;
    // dL/d post[l-1]
    delta_prev.assign(static_cast<std::size_t>(fan_in), 0.0);
    const auto& w = m.weights()[static_cast<std::size_t>(l)];
    for (int o = 0; o < fan_out; ++o) {
      const double d = delta[static_cast<std::size_t>(o)];
      const double* row = w.data() + static_cast<std::size_t>(o) * fan_in;
      for (int i = 0; i < fan_in; ++i) {
        delta_prev[static_cast<std::size_t>(i)] += d * row[static_cast<std::size_t>(i)];
      }
    }
    // Through the activation of hidden layer l-1.
    const int hl = l - 1;
    for (int u = 0; u < fan_in; ++u) {
      double dz = 0.0;
      m.activation().grad(pre[static_cast<std::size_t>(hl)][static_cast<std::size_t>(u)],
                          m.act_params_for(hl, u), dz,
                          std::span<double>(dparams.data(), dparams.size()));
      const double up = delta_prev[static_cast<std::size_t>(u)];
      const int group = m.granularity() == Granularity::per_layer ? 0 : u;
      auto& gact = grads->act[static_cast<std::size_t>(hl)];
      for (int j = 0; j < m.activation().param_count; ++j) {
        gact[static_cast<std::size_t>(group) * m.activation().param_count + j] +=
            up * dparams[static_cast<std::size_t>(j)];
      }
      delta_prev[static_cast<std::size_t>(u)] = up * dz;
    }
    delta = delta_prev;
  }
  return stats;
}

}  // namespace detail

/// Mean loss over the given rows; no gradient.  Used by the trainer's
/// validation pass and by finite-difference checks.
inline double batch_loss(const Mlp& m, const Split& split, std::span<const int> rows) {
  double total = 0.0;
  for (int r : rows) {
    total += detail::sample_pass(m, split.row(r), split.y[static_cast<std::size_t>(r)], nullptr).loss;
  }
  return total / static_cast<double>(rows.size());
}

/// Mean loss and accumulated mean gradients over the given rows.
inline double batch_loss_and_grad(const Mlp& m, const Split& split, std::span<const int> rows,
                                  Gradients& grads) {
  grads.zero();
  double total = 0.0;
  for (int r : rows) {
    total += detail::sample_pass(m, split.row(r), split.y[static_cast<std::size_t>(r)], &grads).loss;
  }
  const double scale = 1.0 / static_cast<double>(rows.size());
  for (auto& v : grads.w) {
    for (double& g : v) g *= scale;
  }
  for (auto& v : grads.b) {
    for (double& g : v) g *= scale;
  }
  for (auto& v : grads.act) {
    for (double& g : v) g *= scale;
  }
  return total * scale;
}

inline double split_accuracy(const Mlp& m, const Split& split) {
  if (split.rows() == 0) return 0.0;
  int correct = 0;
  for (int i = 0; i < split.rows(); ++i) {
    if (m.predict(split.row(i)) == split.y[static_cast<std::size_t>(i)]) ++correct;
  }
  return static_cast<double>(correct) / split.rows();
}

/// Minibatch SGD with Nesterov momentum on weights, biases, and activation
/// parameters jointly; L2 applies to weights only.  Any non-finite batch
/// loss or parameter halts training immediately with status unstable and
/// fitness 0.  Otherwise fitness is the final-epoch validation accuracy.
inline FitnessRecord train_model(Mlp& model, const Dataset& data, const TrainSpec& spec,
                                 const LrSchedule& schedule, std::uint64_t shuffle_seed) {
  const auto t0 = std::chrono::steady_clock::now();
  auto finish = [&](FitnessRecord r) {
    r.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  };

  FitnessRecord rec;
  Rng shuffle_rng(Rng::mix(shuffle_seed, 0x5f5f5f5fULL));
  Gradients grads(model);
  Gradients momentum(model);

  std::vector<int> order(static_cast<std::size_t>(data.train.rows()));
  std::iota(order.begin(), order.end(), 0);

  auto params_finite = [&]() {
    for (const auto& v : model.weights()) {
      for (double p : v) {
        if (!std::isfinite(p)) return false;
      }
    }
    for (const auto& v : model.biases()) {
      for (double p : v) {
        if (!std::isfinite(p)) return false;
      }
    }
    for (const auto& v : model.act_params()) {
      for (double p : v) {
        if (!std::isfinite(p)) return false;
      }
    }
    return true;
  };

  for (int epoch = 0; epoch < schedule.total_epochs; ++epoch) {
    const double lr = lr_at(schedule, epoch);
    // Seeded Fisher-Yates shuffle per epoch.
    for (int i = data.train.rows() - 1; i > 0; --i) {
      std::swap(order[static_cast<std::size_t>(i)],
                order[shuffle_rng.index(static_cast<std::size_t>(i + 1))]);
    }
    double epoch_loss = 0.0;
    int epoch_correct = 0;
    for (int start = 0; start < data.train.rows(); start += spec.batch_size) {
      const int end = std::min(start + spec.batch_size, data.train.rows());
      grads.zero();
      double batch_total = 0.0;
      for (int i = start; i < end; ++i) {
        const int r = order[static_cast<std::size_t>(i)];
        const auto stats =
            detail::sample_pass(model, data.train.row(r), data.train.y[static_cast<std::size_t>(r)], &grads);
        batch_total += stats.loss;
        if (stats.correct) ++epoch_correct;
      }
      if (!std::isfinite(batch_total)) {
        rec.status = FitnessStatus::unstable;
        rec.fitness = 0.0;
        return finish(rec);
      }
      epoch_loss += batch_total;
      const double scale = 1.0 / (end - start);
      // Nesterov step: buf = mu*buf + g; p -= lr * (g + mu*buf).
      auto step = [&](std::vector<double>& param, std::vector<double>& grad,
                      std::vector<double>& buf, double l2) {
        for (std::size_t i = 0; i < param.size(); ++i) {
          const double g = grad[i] * scale + l2 * param[i];
          buf[i] = spec.momentum * buf[i] + g;
          param[i] -= lr * (g + spec.momentum * buf[i]);
        }
      };
      for (std::size_t l = 0; l < model.weights().size(); ++l) {
        step(model.weights()[l], grads.w[l], momentum.w[l], spec.l2);
        step(model.biases()[l], grads.b[l], momentum.b[l], 0.0);
      }
      for (std::size_t l = 0; l < model.act_params().size(); ++l) {
        step(model.act_params()[l], grads.act[l], momentum.act[l], 0.0);
      }
      if (!params_finite()) {
        rec.status = FitnessStatus::unstable;
        rec.fitness = 0.0;
        return finish(rec);
      }
    }

    rec.curves.lr.push_back(lr);
    rec.curves.train_loss.push_back(epoch_loss / data.train.rows());
    rec.curves.train_acc.push_back(static_cast<double>(epoch_correct) / data.train.rows());
    rec.curves.val_acc.push_back(split_accuracy(model, data.val));
    // Per-layer mean of each activation parameter index.
    std::vector<std::vector<double>> layer_means;
    for (int l = 0; l < model.hidden_layers(); ++l) {
      const int k = model.activation().param_count;
      std::vector<double> means(static_cast<std::size_t>(k), 0.0);
      const int g = model.groups(l);
      for (int u = 0; u < g; ++u) {
        for (int j = 0; j < k; ++j) {
          means[static_cast<std::size_t>(j)] +=
              model.act_params()[static_cast<std::size_t>(l)]
                                [static_cast<std::size_t>(u) * k + j];
        }
      }
      for (double& mv : means) mv /= g;
      layer_means.push_back(std::move(means));
    }
    rec.curves.param_means.push_back(std::move(layer_means));
  }

  rec.status = FitnessStatus::ok;
  rec.fitness = rec.curves.val_acc.empty() ? 0.0 : rec.curves.val_acc.back();
  return finish(rec);
}

/// Desk-scale default evaluation setup: a 2-16-16-2 network on two_spirals,
/// 60 full epochs (30 compressed), base lr 0.1 decayed by 0.2 at 0.3/0.6/0.8
/// of the run, batch 32.  Trains in a fraction of a second and separates
/// good activations from bad ones measurably.
inline TrainSpec default_desk_spec() {
  TrainSpec spec;
  spec.layer_widths = {2, 16, 16, 2};
  spec.dataset.kind = DatasetKind::two_spirals;
  spec.dataset.train_size = 1024;
  spec.dataset.val_size = 256;
  spec.dataset.test_size = 256;
  spec.dataset.classes = 2;
  spec.dataset.noise = 0.05;
  spec.dataset.seed = 7;
  spec.schedule.base_lr = 0.1;
  spec.schedule.decay = 0.2;
  spec.schedule.milestones = {18, 36, 48};
  spec.schedule.total_epochs = 60;
  spec.batch_size = 32;
  spec.l2 = 1e-4;
  spec.granularity = Granularity::per_channel;
  spec.seed = 1;
  return spec;
}

/// Convenience wrapper owning the spec, the generated dataset, and the
/// compressed schedule; its methods are the fitness functions handed to the
/// search and to reranking.
class Trainer {
 public:
  explicit Trainer(TrainSpec spec, int compression = 2)
      : spec_(std::move(spec)),
        data_(generate_dataset(spec_.dataset)),
        compressed_(compress(spec_.schedule, compression)) {
    spec_.validate();
  }

  const TrainSpec& spec() const { return spec_; }
  const Dataset& data() const { return data_; }
  const LrSchedule& compressed_schedule() const { return compressed_; }

  FitnessRecord train_def(const ActivationDef& def, const LrSchedule& schedule,
                          std::uint64_t seed) const {
    Rng rng(Rng::mix(seed, 0xACDCULL));
    Mlp model(spec_.layer_widths, def, spec_.granularity, rng);
    return train_model(model, data_, spec_, schedule, seed);
  }

  /// Search-time fitness: compressed schedule.
  FitnessRecord fitness_compressed(const ActivationGraph& graph, std::uint64_t seed) const {
    return train_def(graph_activation(graph), compressed_, seed);
  }

  /// Rerank/final fitness: the original schedule.
  FitnessRecord fitness_full(const ActivationGraph& graph, std::uint64_t run_seed) const {
    return train_def(graph_activation(graph), spec_.schedule, run_seed);
  }

  FitnessFn compressed_fn() const {
    return [this](const ActivationGraph& g, std::uint64_t seed) {
      return fitness_compressed(g, seed);
    };
  }

  FullFitnessFn full_fn() const {
    return [this](const ActivationGraph& g, std::uint64_t seed) {
      return fitness_full(g, seed);
    };
  }

 private:
  TrainSpec spec_;
  Dataset data_;
  LrSchedule compressed_;
};

/// Cross-evaluation matrix: cell (i, j) is the mean full fitness of graph i
/// under spec j over `runs` seeds; unstable runs contribute 0 and set the
/// cell's flag.
struct CrossEvalResult {
  std::vector<std::vector<double>> mean_fitness;
  std::vector<std::vector<bool>> any_unstable;
};

inline CrossEvalResult cross_evaluate(const std::vector<ActivationGraph>& graphs,
                                      const std::vector<TrainSpec>& specs, int runs,
                                      std::uint64_t base_seed) {
  if (graphs.empty() || specs.empty()) {
    throw std::invalid_argument("cross_evaluate needs graphs and specs");
  }
  CrossEvalResult out;
  out.mean_fitness.assign(graphs.size(), std::vector<double>(specs.size(), 0.0));
  out.any_unstable.assign(graphs.size(), std::vector<bool>(specs.size(), false));
  for (std::size_t j = 0; j < specs.size(); ++j) {
    const Trainer trainer(specs[j]);
    for (std::size_t i = 0; i < graphs.size(); ++i) {
      double sum = 0.0;
      for (int r = 0; r < runs; ++r) {
        const auto seed = Rng::mix(base_seed, (i * specs.size() + j) * 131ULL +
                                                  static_cast<std::uint64_t>(r));
        const auto rec = trainer.fitness_full(graphs[i], seed);
        sum += rec.fitness;
        if (rec.status == FitnessStatus::unstable) out.any_unstable[i][j] = true;
      }
      out.mean_fitness[i][j] = sum / runs;
    }
  }
  return out;
}

}  // namespace actevo
