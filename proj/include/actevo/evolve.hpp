#pragma once

#include <chrono>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>

#include "actevo/expr.hpp"
#include "actevo/fitness.hpp"
#include "actevo/mutate.hpp"
#include "actevo/rng.hpp"

namespace actevo {

enum class Granularity { per_layer, per_channel, per_neuron };

inline constexpr std::string_view granularity_name(Granularity g) {
  switch (g) {
    case Granularity::per_layer: return "per-layer";
    case Granularity::per_channel: return "per-channel";
    case Granularity::per_neuron: return "per-neuron";
  }
  return "?";
}

inline std::optional<Granularity> granularity_from_name(std::string_view s) {
  if (s == "per-layer") return Granularity::per_layer;
  if (s == "per-channel") return Granularity::per_channel;
  if (s == "per-neuron") return Granularity::per_neuron;
  return std::nullopt;
}

enum class SearchMode { sequential, asynchronous };

/// Parameters of the regularized-evolution search.
struct EvolutionConfig {
  int population = 64;     // P: sliding window size
  int tournament = 16;     // S: sample size, with replacement
  long budget = 1000;      // C: total evaluations
  double threshold = 0.2;  // V: minimum fitness for population admission
  Granularity granularity = Granularity::per_channel;
  bool parameterize = true;  // false runs the nonparametric baseline
  std::uint64_t seed = 0;
  SearchMode mode = SearchMode::sequential;

  void validate() const {
    if (tournament < 1 || tournament > population) {
      throw std::invalid_argument("require 1 <= S <= P");
    }
    if (population > budget) {
      throw std::invalid_argument("require P <= C");
    }
    if (threshold < 0.0 || threshold >= 1.0) {
      throw std::invalid_argument("require 0 <= V < 1");
    }
  }
};

/// One evaluated candidate.
struct Candidate {
  ActivationGraph graph;
  std::optional<FitnessRecord> fitness;
  std::optional<long> parent_seq;
  std::string mutation;  // "init" or one of the four mutation names
  long seq = -1;

  double fitness_value() const { return fitness ? fitness->fitness : 0.0; }
};

struct SearchHistory {
  std::vector<Candidate> entries;    // in evaluation order; seq is dense
  std::vector<double> best_so_far;   // over all evaluated candidates
  std::vector<double> window_avg;    // mean fitness of the last P evaluated

  void record(Candidate c, int window_size) {
    c.seq = static_cast<long>(entries.size());
    const double f = c.fitness_value();
    best_so_far.push_back(entries.empty() ? f : std::max(best_so_far.back(), f));
    entries.push_back(std::move(c));
    double sum = 0.0;
    std::size_t n = std::min<std::size_t>(entries.size(), static_cast<std::size_t>(window_size));
    for (std::size_t i = entries.size() - n; i < entries.size(); ++i) {
      sum += entries[i].fitness_value();
    }
    window_avg.push_back(sum / static_cast<double>(n));
  }
};

/// Fitness callback: evaluates one parameterized graph with a derived seed.
using FitnessFn = std::function<FitnessRecord(const ActivationGraph&, std::uint64_t)>;

/// Seed handed to the fitness function for evaluation number `seq`.
inline std::uint64_t evaluation_seed(std::uint64_t search_seed, long seq) {
  return Rng::mix(search_seed, static_cast<std::uint64_t>(seq));
}

namespace detail {

// Candidate generation shared by the sequential loop and the coordinator so
// that, with one worker and sequential arrival, both consume the random
// stream identically.

inline ActivationGraph make_seed_graph(Rng& rng, bool with_params) {
  ActivationGraph g = init_random(rng);
  return with_params ? parameterize(g, rng) : g;
}

inline std::pair<ActivationGraph, MutationKind> make_child_graph(const ActivationGraph& parent,
                                                                 Rng& rng, bool with_params) {
  auto [g, kind] = mutate(parent, rng);
  if (with_params) g = parameterize(g, rng);
  return {std::move(g), kind};
}

// Tournament: S draws with replacement over `window`; the fittest sampled
// candidate at or above the threshold wins, ties broken toward the most
// recent sequence number.  Returns nothing if no sampled candidate clears
// the threshold (possible only for the completed-window semantics of the
// asynchronous mode).
template <typename WindowT>
inline std::optional<std::size_t> pick_parent(const WindowT& window, int tournament,
                                              double threshold, Rng& rng) {
  std::optional<std::size_t> best;
  for (int s = 0; s < tournament; ++s) {
    const std::size_t i = rng.index(window.size());
    const Candidate& c = window[i];
    if (c.fitness_value() < threshold || c.fitness->status != FitnessStatus::ok) continue;
    if (!best) {
      best = i;
      continue;
    }
    const Candidate& b = window[*best];
    if (c.fitness_value() > b.fitness_value() ||
        (c.fitness_value() == b.fitness_value() && c.seq > b.seq)) {
      best = i;
    }
  }
  return best;
}

}  // namespace detail

/// Sequential regularized evolution.  Seeds random parameterized candidates
/// until P have been accepted, then repeatedly samples S with replacement
/// from the population, mutates and re-parameterizes the fittest sample, and
/// evaluates the child.  Candidates below V (and unstable ones) are recorded
/// and counted toward C but never enter the population; an accepted
/// candidate evicts the oldest member once the window is full.
inline SearchHistory evolve(const EvolutionConfig& config, const FitnessFn& fitness_fn) {
  config.validate();
  Rng rng(config.seed);
  SearchHistory history;
  std::deque<Candidate> population;

  for (long seq = 0; seq < config.budget; ++seq) {
    Candidate cand;
    if (population.size() < static_cast<std::size_t>(config.population)) {
      cand.graph = detail::make_seed_graph(rng, config.parameterize);
      cand.mutation = "init";
    } else {
      const auto parent = detail::pick_parent(population, config.tournament,
                                              config.threshold, rng);
      // The sequential population only holds accepted members, so the
      // tournament always finds a parent.
      const Candidate& p = population[*parent];
      auto [g, kind] = detail::make_child_graph(p.graph, rng, config.parameterize);
      cand.graph = std::move(g);
      cand.mutation = std::string(mutation_name(kind));
      cand.parent_seq = p.seq;
    }

    FitnessRecord record;
    try {
      record = fitness_fn(cand.graph, evaluation_seed(config.seed, seq));
    } catch (const std::exception&) {
      record.status = FitnessStatus::unstable;
    }
    if (record.status == FitnessStatus::unstable) record.fitness = 0.0;
    cand.fitness = std::move(record);
    cand.seq = seq;

    const bool accepted = cand.fitness->status == FitnessStatus::ok &&
                          cand.fitness->fitness >= config.threshold;
    history.record(cand, config.population);
    if (accepted) {
      population.push_back(std::move(cand));
      if (population.size() > static_cast<std::size_t>(config.population)) {
        population.pop_front();
      }
    }
  }
  return history;
}

/// A reranked candidate with its adjusted fitness.
struct RankedCandidate {
  Candidate candidate;
  double adjusted_fitness = 0.0;
  std::vector<FitnessRecord> full_runs;
};

/// Full-schedule fitness callback used by reranking.
using FullFitnessFn = std::function<FitnessRecord(const ActivationGraph&, std::uint64_t)>;

/// Reranks the search: the top_n candidates by search fitness (deduplicated
/// by canonical expression, ties toward earlier discovery) are re-evaluated
/// `runs` times with the full schedule and distinct derived seeds; the
/// adjusted fitness is the mean, with unstable runs contributing 0.  Returns
/// the best `keep` by adjusted fitness.
inline std::vector<RankedCandidate> rerank(const SearchHistory& history,
                                           const FullFitnessFn& full_fitness_fn,
                                           std::uint64_t seed, int top_n = 10, int runs = 2,
                                           int keep = 3) {
  if (history.entries.empty()) {
    throw std::invalid_argument("rerank needs a nonempty history");
  }
  std::vector<const Candidate*> pool;
  std::map<std::string, bool> seen;
  std::vector<const Candidate*> ordered;
  ordered.reserve(history.entries.size());
  for (const Candidate& c : history.entries) ordered.push_back(&c);
  std::stable_sort(ordered.begin(), ordered.end(), [](const Candidate* a, const Candidate* b) {
    if (a->fitness_value() != b->fitness_value()) {
      return a->fitness_value() > b->fitness_value();
    }
    return a->seq < b->seq;
  });
  for (const Candidate* c : ordered) {
    const std::string key = print_expr(c->graph);
    if (seen.emplace(key, true).second) {
      pool.push_back(c);
      if (static_cast<int>(pool.size()) == top_n) break;
    }
  }

  std::vector<RankedCandidate> ranked;
  ranked.reserve(pool.size());
  for (const Candidate* c : pool) {
    RankedCandidate rc;
    rc.candidate = *c;
    double sum = 0.0;
    for (int r = 0; r < runs; ++r) {
      const std::uint64_t run_seed =
          Rng::mix(seed, static_cast<std::uint64_t>(c->seq) * 1000003ULL +
                             static_cast<std::uint64_t>(r));
      FitnessRecord rec;
      try {
        rec = full_fitness_fn(c->graph, run_seed);
      } catch (const std::exception&) {
        rec.status = FitnessStatus::unstable;
      }
      if (rec.status == FitnessStatus::unstable) rec.fitness = 0.0;
      sum += rec.fitness;
      rc.full_runs.push_back(std::move(rec));
    }
    rc.adjusted_fitness = runs > 0 ? sum / runs : 0.0;
    ranked.push_back(std::move(rc));
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedCandidate& a, const RankedCandidate& b) {
                     if (a.adjusted_fitness != b.adjusted_fitness) {
                       return a.adjusted_fitness > b.adjusted_fitness;
                     }
                     return a.candidate.seq < b.candidate.seq;
                   });
  if (static_cast<int>(ranked.size()) > keep) {
    ranked.resize(static_cast<std::size_t>(keep));
  }
  return ranked;
}

/// Options for the synthetic fitness function used by search bookkeeping
/// tests and distributed dry runs.
struct SyntheticFitnessOptions {
  double unstable_fraction = 0.0;  // fraction of expressions marked unstable
  double sleep_seconds = 0.0;      // artificial evaluation time (wall clock)
  double runtime_seconds = 0.001;  // runtime recorded in the result
};

/// Deterministic fitness derived from the canonical expression text (FNV-1a
/// hash mapped to [0, 1)).  Identical across processes, so duplicate
/// evaluations of a reassigned task return identical records.
inline FitnessRecord synthetic_fitness(const ActivationGraph& g,
                                       const SyntheticFitnessOptions& opt = {}) {
  const std::string text = print_expr(g);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  if (opt.sleep_seconds > 0.0) {
    std::this_thread::sleep_for(std::chrono::duration<double>(opt.sleep_seconds));
  }
  FitnessRecord rec;
  rec.runtime_seconds = opt.runtime_seconds;
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  if (u < opt.unstable_fraction) {
    rec.status = FitnessStatus::unstable;
    rec.fitness = 0.0;
  } else {
    rec.status = FitnessStatus::ok;
    rec.fitness = static_cast<double>((h * 0x9e3779b97f4a7c15ULL) >> 11) * 0x1.0p-53;
  }
  return rec;
}

inline FitnessFn make_synthetic_fitness(SyntheticFitnessOptions opt = {}) {
  return [opt](const ActivationGraph& g, std::uint64_t) { return synthetic_fitness(g, opt); };
}

/// Non-dominated filter over per-context fitness vectors: a candidate is
/// dropped when some other candidate is >= in every coordinate and > in at
/// least one.  Survivors keep their input order (sequence order).
inline std::vector<std::size_t> pareto_front(
    const std::vector<std::vector<double>>& fitness_vectors) {
  const std::size_t n = fitness_vectors.size();
  std::vector<std::size_t> survivors;
  for (std::size_t i = 0; i < n; ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < n && !dominated; ++j) {
      if (j == i) continue;
      bool all_ge = true;
      bool any_gt = false;
      for (std::size_t k = 0; k < fitness_vectors[i].size(); ++k) {
        if (fitness_vectors[j][k] < fitness_vectors[i][k]) all_ge = false;
        if (fitness_vectors[j][k] > fitness_vectors[i][k]) any_gt = true;
      }
      dominated = all_ge && any_gt;
    }
    if (!dominated) survivors.push_back(i);
  }
  return survivors;
}

/// Pareto filter over candidates; each candidate owns one fitness per
/// evaluation context.
inline std::vector<Candidate> pareto_general(
    const std::vector<Candidate>& candidates,
    const std::vector<std::vector<double>>& fitness_vectors) {
  if (candidates.size() != fitness_vectors.size()) {
    throw std::invalid_argument("one fitness vector per candidate required");
  }
  std::vector<Candidate> out;
  for (std::size_t i : pareto_front(fitness_vectors)) {
    out.push_back(candidates[i]);
  }
  return out;
}

}  // namespace actevo
