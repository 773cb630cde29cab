// Acceptance suite: one check per release criterion, each printing a single
// PASS/FAIL line.  Run with no arguments for the full suite or with a list
// of criterion numbers.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "actevo/actevo.hpp"

using namespace actevo;

namespace {

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw CheckFailure(what);
}

double rel_err(double a, double b) {
  const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) / scale;
}

double central_diff(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// ---------------------------------------------------------------------------
// criterion 1: census exactness

std::string criterion_census() {
  const auto census = count_space();
  const unsigned long long expected[7] = {108ULL,         5832ULL,        427923ULL,
                                          31177872ULL,    2210558364ULL,  152059087566ULL,
                                          10015741690785ULL};
  for (int j = 0; j < 7; ++j) {
    require(census.per_node_total[static_cast<std::size_t>(j)] == expected[j],
            "per-size count mismatch at " + std::to_string(j + 1) + " nodes");
  }
  require(census.total == 10170042948450ULL, "grand total mismatch");

  // The named CLI surface prints the same total.
  const std::string cmd = std::string(ACTEVO_CLI_PATH) + " space-count 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  require(pipe != nullptr, "could not run the space-count command");
  std::string out;
  char buf[512];
  while (fgets(buf, sizeof(buf), pipe) != nullptr) out += buf;
  pclose(pipe);
  require(out.find("total: 10170042948450") != std::string::npos,
          "space-count output lacks the expected total");
  return "total 10,170,042,948,450 over 7 node sizes; CLI output agrees";
}

// ---------------------------------------------------------------------------
// criterion 2: arrangement enumeration

std::string criterion_arrangements() {
  const auto report = shape_census_report();
  int disagreements = 0;
  for (const auto& row : report.rows) {
    if (row.binary == 3 && row.unary == 4) {
      require(!row.agrees, "(3,4) unexpectedly agrees with the table");
      require(row.enumerated == 5 && row.table_count == 1,
              "(3,4) discrepancy is not 5 vs 1");
      ++disagreements;
    } else {
      require(row.agrees, "row (" + std::to_string(row.binary) + "," +
                              std::to_string(row.unary) + ") disagrees with the table");
    }
  }
  require(disagreements == 1, "expected exactly one discrepancy row");
  require(shape_report_text(report).find("DISCREPANCY") != std::string::npos,
          "discrepancy report missing");
  return "all rows match except (b=3,u=4): tool 5 vs table 1, reported";
}

// ---------------------------------------------------------------------------
// criterion 3: indicator constructions

std::string criterion_indicators() {
  Rng rng(90210);
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform(-5.0, 5.0);
    const double b = a + rng.uniform(1e-6, 5.0);
    double x;
    switch (rng.index(5)) {
      case 0: x = a; break;
      case 1: x = b; break;
      case 2: x = a + (b - a) * rng.real(); break;
      default: x = rng.uniform(-8.0, 8.0); break;
    }
    require(build_indicator(IndicatorKind::left, a, b)(x) == (x < b ? 1.0 : 0.0),
            "left indicator mismatch");
    require(build_indicator(IndicatorKind::right, a, b)(x) == (x > a ? 1.0 : 0.0),
            "right indicator mismatch");
    require(build_indicator(IndicatorKind::open_interval, a, b)(x) ==
                (x > a && x < b ? 1.0 : 0.0),
            "interval indicator mismatch");
    require(build_indicator(IndicatorKind::point, a, b)(x) == (x == a ? 1.0 : 0.0),
            "point indicator mismatch");
  }
  return "1000 random (a,b,x): all four indicator graphs exact (0/1, no tolerance)";
}

// ---------------------------------------------------------------------------
// criterion 4: gradient correctness

// Smallest distance to a derivative kink encountered while evaluating.
double min_kink_margin(const ActivationGraph& g, std::span<const double> params, double x) {
  struct Walker {
    const ActivationGraph& g;
    std::span<const double> params;
    double x;
    double margin;

    double factor(int consumer, int slot) const {
      for (const ParamSite& s : g.param_sites) {
        if (s.edge.consumer == consumer && s.edge.slot == slot) {
          return params[static_cast<std::size_t>(s.index)];
        }
      }
      return 1.0;
    }

    double visit(int id) {
      const auto& node = g.nodes[static_cast<std::size_t>(id)];
      double in[2] = {0.0, 0.0};
      for (int s = 0; s < arity(node.op); ++s) {
        const int c = node.child[static_cast<std::size_t>(s)];
        in[s] = (c == -1 ? x : visit(c)) * factor(id, s);
      }
      double m = 1e18;
      switch (node.op) {
        case OpKind::relu:
        case OpKind::abs:
        case OpKind::safe_reciprocal:
        case OpKind::elu:
        case OpKind::selu:
        case OpKind::bessel_i0e:
        case OpKind::bessel_i1e:
          m = std::fabs(in[0]);
          break;
        case OpKind::hard_sigmoid:
          m = std::fabs(std::fabs(in[0]) - 2.5);
          break;
        case OpKind::max:
        case OpKind::min:
          m = std::fabs(in[0] - in[1]);
          break;
        case OpKind::safe_div:
          m = std::fabs(in[1]);
          break;
        case OpKind::pow:
          m = in[0] - 1e-2 > 0.0 ? in[0] : 0.0;
          break;
        default:
          break;
      }
      margin = std::min(margin, m);
      return op_forward(node.op, in[0], in[1]);
    }
  };
  Walker w{g, params, x, 1e18};
  w.visit(g.root);
  return w.margin;
}

std::string criterion_gradients() {
  Rng rng(20260808);
  int graphs_checked = 0;
  while (graphs_checked < 200) {
    ActivationGraph g = init_random(rng);
    const int steps = static_cast<int>(rng.index(4));
    for (int m = 0; m < steps; ++m) g = mutate(g, rng).first;
    g = parameterize(g, rng);
    require(node_count(g) <= 8 && g.param_count() <= 3, "sampled graph out of contract");
    std::vector<double> params(static_cast<std::size_t>(g.param_count()));
    for (auto& p : params) p = rng.uniform(0.5, 1.5);
    const double x = rng.uniform(-3.0, 3.0);
    if (min_kink_margin(g, params, x) < 1e-3) continue;
    const auto r = eval_grad(g, params, x);
    if (!std::isfinite(r.value) || !std::isfinite(r.d_input)) continue;
    const double fd = central_diff([&](double t) { return eval(g, params, t); }, x, 1e-5);
    if (!std::isfinite(fd)) continue;
    require(rel_err(r.d_input, fd) <= 1e-4, "d/dx mismatch: " + print_expr(g));
    bool usable = true;
    for (std::size_t j = 0; j < params.size(); ++j) {
      auto perturbed = params;
      const double fd_p = central_diff(
          [&](double t) {
            perturbed[j] = t;
            return eval(g, perturbed, x);
          },
          params[j], 1e-5);
      if (!std::isfinite(fd_p)) {
        usable = false;
        break;
      }
      require(rel_err(r.d_params[j], fd_p) <= 1e-4,
              "d/dparam mismatch: " + print_expr(g));
    }
    if (!usable) continue;
    ++graphs_checked;
  }

  // End to end through a 2-4-2 network loss.
  TrainSpec spec = default_desk_spec();
  spec.layer_widths = {2, 4, 2};
  const Dataset data = generate_dataset(spec.dataset);
  std::vector<int> rows;
  for (int i = 0; i < 16; ++i) rows.push_back(i);

  int nets_checked = 0;
  while (nets_checked < 20) {
    ActivationGraph g = init_random(rng);
    const int steps = static_cast<int>(rng.index(3));
    for (int m = 0; m < steps; ++m) g = mutate(g, rng).first;
    g = parameterize(g, rng);
    Rng net_rng(rng.next_u64());
    Mlp model(spec.layer_widths, graph_activation(g), Granularity::per_neuron, net_rng);

    // The whole batch must evaluate clear of kinks, and at sane magnitudes,
    // for central differences to be meaningful.
    bool clean = true;
    std::vector<double> cur, next;
    for (int r : rows) {
      cur.assign(data.train.row(r), data.train.row(r) + 2);
      for (int l = 0; l < model.layers() - 1 && clean; ++l) {
        model.affine(l, cur, next);
        for (int u = 0; u < static_cast<int>(next.size()); ++u) {
          const auto p = model.act_params_for(l, u);
          if (min_kink_margin(g, p, next[static_cast<std::size_t>(u)]) < 1e-3) clean = false;
          next[static_cast<std::size_t>(u)] =
              model.activation().value(next[static_cast<std::size_t>(u)], p);
          if (std::fabs(next[static_cast<std::size_t>(u)]) > 1e4) clean = false;
        }
        cur.swap(next);
      }
      if (!clean) break;
    }
    const double base = batch_loss(model, data.train, rows);
    if (!clean || !std::isfinite(base) || std::fabs(base) > 1e3) continue;

    Gradients grads(model);
    batch_loss_and_grad(model, data.train, rows, grads);
    auto fd_check = [&](double* param, double analytic) {
      const double h = 1e-6;
      const double saved = *param;
      *param = saved + h;
      const double up = batch_loss(model, data.train, rows);
      *param = saved - h;
      const double down = batch_loss(model, data.train, rows);
      *param = saved;
      require(rel_err(analytic, (up - down) / (2.0 * h)) <= 1e-4,
              "network gradient mismatch: " + print_expr(g));
    };
    Rng pick(rng.next_u64());
    for (int t = 0; t < 20; ++t) {
      const std::size_t l = pick.index(model.weights().size());
      const std::size_t i = pick.index(model.weights()[l].size());
      fd_check(&model.weights()[l][i], grads.w[l][i]);
    }
    for (std::size_t l = 0; l < model.act_params().size(); ++l) {
      for (std::size_t i = 0; i < model.act_params()[l].size(); ++i) {
        fd_check(&model.act_params()[l][i], grads.act[l][i]);
      }
    }
    ++nets_checked;
  }
  return "200 random graphs and 20 end-to-end 2-4-2 networks within 1e-4 of central differences";
}

// ---------------------------------------------------------------------------
// criterion 5: mutation semantics

std::string criterion_mutations() {
  Rng rng(555);
  int binary_inserts = 0, one_node_overrides = 0, big_removes = 0;
  for (int i = 0; i < 10000; ++i) {
    ActivationGraph parent = init_random(rng);
    const int steps = static_cast<int>(rng.index(6));
    for (int m = 0; m < steps; ++m) parent = mutate(parent, rng).first;

    // Binary-insert neutrality: exact eval equality pre/post.
    {
      const auto edges = enumerate_edges(parent);
      const auto op = static_cast<OpKind>(kUnaryCount + rng.index(kBinaryCount));
      const Edge e = edges[rng.index(edges.size())];
      const auto child = insert_at(parent, op, e);
      for (int p = 0; p < 5; ++p) {
        const double x = rng.uniform(-8.0, 8.0);
        const double va = eval(strip_params(parent), x);
        const double vb = eval(child, x);
        require((std::isnan(va) && std::isnan(vb)) || va == vb,
                "binary insert changed the function");
      }
      ++binary_inserts;
    }

    const auto [child, kind] = mutate(parent, rng);
    require(node_count(child) <= 8, "node bound exceeded");
    require(node_count(child) >= 1, "empty graph");
    switch (kind) {
      case MutationKind::change: {
        require(shape_signature(child) == shape_signature(parent), "change altered shape");
        int diffs = 0;
        for (std::size_t n = 0; n < parent.nodes.size(); ++n) {
          if (parent.nodes[n].op != child.nodes[n].op) {
            ++diffs;
            require(arity(parent.nodes[n].op) == arity(child.nodes[n].op),
                    "change altered arity");
          }
        }
        require(diffs == 1, "change must replace exactly one operator");
        break;
      }
      case MutationKind::regenerate:
        require(shape_signature(child) == shape_signature(parent),
                "regenerate altered shape");
        for (std::size_t n = 0; n < parent.nodes.size(); ++n) {
          require(arity(parent.nodes[n].op) == arity(child.nodes[n].op),
                  "regenerate altered arity");
        }
        break;
      case MutationKind::insert:
        require(node_count(child) > node_count(parent), "insert did not grow the graph");
        break;
      case MutationKind::remove:
        require(node_count(child) < node_count(parent), "remove did not shrink the graph");
        break;
    }

    // Dispatch overrides.
    if (i % 10 == 0) {
      const auto one = parse_expr("tanh(x)");
      const auto [c1, k1] = mutate(one, rng);
      require(k1 != MutationKind::remove, "remove applied to a 1-node graph");
      ++one_node_overrides;

      const auto big = parse_expr("tanh(tanh(tanh(tanh(tanh(tanh(tanh(tanh(x))))))))");
      const auto [c8, k8] = mutate(big, rng);
      require(k8 == MutationKind::remove, "8-node graph did not receive a remove");
      require(node_count(c8) == 7, "remove from an 8-node chain must leave 7");
      ++big_removes;
    }
  }
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "10000 mutations; %d binary-insert neutrality checks, %d+%d override checks",
                binary_inserts, one_node_overrides, big_removes);
  return detail;
}

// ---------------------------------------------------------------------------
// criterion 6: evolution bookkeeping

std::string criterion_bookkeeping() {
  EvolutionConfig cfg;
  cfg.population = 8;
  cfg.tournament = 4;
  cfg.budget = 200;
  cfg.threshold = 0.3;
  cfg.seed = 2024;
  const auto fitness = make_synthetic_fitness({.unstable_fraction = 0.1});
  const auto history = evolve(cfg, fitness);

  require(history.entries.size() == 200, "history must have exactly C entries");
  for (std::size_t i = 0; i < history.entries.size(); ++i) {
    require(history.entries[i].seq == static_cast<long>(i), "sequence numbers not dense");
    if (i > 0) {
      require(history.best_so_far[i] >= history.best_so_far[i - 1],
              "best-so-far trace not monotone");
    }
  }
  // Window reconstruction: every parent was an accepted member at issue time.
  std::deque<long> window;
  std::map<long, double> fitness_by_seq;
  for (const Candidate& c : history.entries) {
    if (c.parent_seq) {
      require(std::find(window.begin(), window.end(), *c.parent_seq) != window.end(),
              "parent not in the population window");
      require(fitness_by_seq.at(*c.parent_seq) >= cfg.threshold,
              "population member below the threshold");
    }
    fitness_by_seq[c.seq] = c.fitness_value();
    if (c.fitness->status == FitnessStatus::ok && c.fitness_value() >= cfg.threshold) {
      window.push_back(c.seq);
      if (window.size() > 8) window.pop_front();
    }
  }
  const auto replay = evolve(cfg, fitness);
  require(history_jsonl(history) == history_jsonl(replay), "replay not byte-identical");
  return "200 entries, monotone best-so-far, gate respected, byte-identical replay";
}

// ---------------------------------------------------------------------------
// criterion 7: desk-scale search efficacy

std::string criterion_search_efficacy() {
  const Trainer trainer(default_desk_spec());

  EvolutionConfig cfg;
  cfg.population = 8;
  cfg.tournament = 4;
  cfg.budget = 60;
  cfg.threshold = 0.5;
  cfg.granularity = Granularity::per_channel;
  cfg.seed = 7101;
  const auto history = evolve(cfg, trainer.compressed_fn());
  require(history.entries.size() == 60, "search must evaluate exactly C candidates");

  const auto ranked = rerank(history, trainer.full_fn(), cfg.seed, 10, 2, 3);
  require(!ranked.empty(), "rerank returned nothing");
  const ActivationGraph best = ranked.front().candidate.graph;
  const ActivationGraph relu = parse_expr("relu(x)");

  double best_mean = 0.0, relu_mean = 0.0;
  for (int s = 0; s < 5; ++s) {
    const std::uint64_t seed = 101 + static_cast<std::uint64_t>(s);
    best_mean += trainer.fitness_full(best, seed).fitness;
    relu_mean += trainer.fitness_full(relu, seed).fitness;
  }
  best_mean /= 5.0;
  relu_mean /= 5.0;

  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "best %s: mean val acc %.4f vs relu %.4f over 5 seeds",
                print_expr(best).c_str(), best_mean, relu_mean);
  require(relu_mean >= 0.95, "relu baseline floor not met on the default task");
  require(best_mean >= relu_mean, std::string("evolved function lost to relu: ") + detail);
  return detail;
}

// ---------------------------------------------------------------------------
// criterion 8: schedule compression

std::string criterion_compression() {
  LrSchedule plain;
  plain.base_lr = 0.1;
  plain.milestones = {60, 120, 160};
  plain.decay = 0.2;
  plain.total_epochs = 200;
  const auto cw = compress(plain);
  require(cw.total_epochs == 100, "epochs must halve");
  require(cw.milestones == std::vector<int>({30, 60, 80}), "milestones must map to 30/60/80");

  LrSchedule warmed;
  warmed.warmup = LrSchedule::Warmup{0.01, 1};
  warmed.base_lr = 0.1;
  warmed.milestones = {91, 137};
  warmed.decay = 0.1;
  warmed.total_epochs = 200;
  const auto cr = compress(warmed);
  require(cr.total_epochs == 100, "epochs must halve");
  require(cr.milestones == std::vector<int>({46, 68}), "milestones must map to 46/68");
  require(cr.warmup.has_value() && cr.warmup->epochs == 1 && cr.warmup->lr == 0.01,
          "warmup must be preserved");
  require(lr_at(cr, 0) == 0.01, "warmup learning rate must be 0.01");
  return "(200; 60/120/160) -> (100; 30/60/80) and (200; 91/137 + warmup) -> (100; 46/68)";
}

// ---------------------------------------------------------------------------
// criterion 9: instability containment

std::string criterion_instability() {
  const Trainer trainer(default_desk_spec());
  const auto overflow = parse_expr("exp(exp(exp(square(x))))");
  const auto rec = trainer.fitness_compressed(overflow, 1);
  require(rec.status == FitnessStatus::unstable, "overflow candidate must be unstable");
  require(rec.fitness == 0.0, "unstable fitness must be 0");
  require(rec.runtime_seconds < 2.0, "unstable detection must be immediate");

  // A search whose evaluations include such candidates runs to full budget.
  EvolutionConfig cfg;
  cfg.population = 4;
  cfg.tournament = 2;
  cfg.budget = 20;
  cfg.threshold = 0.3;
  cfg.seed = 99;
  long calls = 0;
  int unstable_seen = 0;
  const auto history = evolve(cfg, [&](const ActivationGraph& g, std::uint64_t seed) {
    ++calls;
    // Every fifth evaluation trains the overflowing candidate instead,
    // exercising the real undefined-loss path inside a live search.
    const auto rec2 = (calls % 5 == 0) ? trainer.fitness_compressed(overflow, seed)
                                       : trainer.fitness_compressed(g, seed);
    if (rec2.status == FitnessStatus::unstable) ++unstable_seen;
    return rec2;
  });
  require(history.entries.size() == 20, "search must reach the full budget");
  require(unstable_seen >= 4, "injected overflow candidates must be unstable");
  for (const Candidate& c : history.entries) {
    if (c.fitness->status == FitnessStatus::unstable) {
      require(c.fitness_value() == 0.0, "unstable entries must carry fitness 0");
    }
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "overflow chain unstable in %.2fs; search ran 20/20 with %d unstable entries",
                rec.runtime_seconds, unstable_seen);
  return detail;
}

// ---------------------------------------------------------------------------
// criterion 10: distributed equivalence and fault tolerance

std::string criterion_distributed() {
  // Equivalence: one worker, sequential arrival == sequential evolve.
  EvolutionConfig cfg;
  cfg.population = 8;
  cfg.tournament = 4;
  cfg.budget = 50;
  cfg.threshold = 0.0;
  cfg.seed = 424242;
  cfg.mode = SearchMode::asynchronous;
  {
    Coordinator coordinator(cfg, {.task_timeout_seconds = 10.0}, "127.0.0.1", 0);
    const auto port = coordinator.port();
    SearchHistory async_history;
    std::thread serve_thread([&] { async_history = coordinator.run(); });
    WorkerOptions wo;
    wo.worker_id = "solo";
    wo.heartbeat_seconds = 0.05;
    std::thread worker(
        [&] { run_worker("127.0.0.1", port, make_synthetic_fitness(), wo); });
    serve_thread.join();
    worker.join();
    EvolutionConfig seq = cfg;
    seq.mode = SearchMode::sequential;
    const auto seq_history = evolve(seq, make_synthetic_fitness());
    require(history_jsonl(async_history) == history_jsonl(seq_history),
            "single-worker trajectory differs from the sequential search");
  }

  // Fault tolerance: 4 workers, C = 200, two workers killed mid-task.
  cfg.budget = 200;
  Coordinator coordinator(cfg, {.task_timeout_seconds = 0.25}, "127.0.0.1", 0);
  const auto port = coordinator.port();
  SearchHistory history;
  std::thread serve_thread([&] { history = coordinator.run(); });

  auto doomed = [&port] {
    // Takes a task and dies without replying: a killed worker on the wire.
    try {
      Fd sock = tcp_connect("127.0.0.1", port);
      send_all(sock.get(), encode_message(hello_message("doomed")));
      LineReader reader(sock.get());
      std::string line;
      reader.read_line(line);
    } catch (const std::exception&) {
    }
  };
  std::thread victim1(doomed);

  std::vector<std::thread> workers;
  for (int i = 0; i < 4; ++i) {
    workers.emplace_back([&, i] {
      WorkerOptions wo;
      wo.worker_id = "w" + std::to_string(i);
      wo.heartbeat_seconds = 0.05;
      run_worker("127.0.0.1", port, make_synthetic_fitness({.sleep_seconds = 0.002}), wo);
    });
  }
  // A second casualty once the run is underway.
  std::this_thread::sleep_for(std::chrono::milliseconds(150));
  std::thread victim2(doomed);

  serve_thread.join();
  victim1.join();
  victim2.join();
  for (auto& t : workers) t.join();

  require(history.entries.size() == 200, "completed count must equal the budget");
  std::set<long> seqs;
  for (const Candidate& c : history.entries) seqs.insert(c.seq);
  require(seqs.size() == 200, "sequence numbers must be unique and dense");
  return "1-worker run replays the sequential search; 200/200 tasks despite two killed workers";
}

// ---------------------------------------------------------------------------
// criterion 11: baseline zoo fidelity

std::string criterion_zoo() {
  const auto selu_def = baseline("selu");
  require(selu_def.value(1.0, {}) == 1.05070098, "selu(1) must equal 1.05070098 exactly");
  require(baseline("prelu").init == std::vector<double>{0.25},
          "prelu alpha must initialize to 0.25");
  const auto pau = baseline("pau");
  const std::vector<double> expected_pau = {0.02979246, 0.61837738, 2.32335207, 3.05202660,
                                            1.48548002, 0.25103717, 1.14201226, 4.39322834,
                                            0.87154450, 0.34720652};
  require(pau.init == expected_pau, "pau coefficients must match the published constants");
  require(kSplashBreakpoints == std::array<double, 4>{0.0, 1.0, 2.0, 2.5},
          "splash breakpoints must be [0, 1, 2, 2.5]");
  const auto splash = baseline("splash");
  require(splash.value(1.5, splash.init) == 1.5,
          "splash must start as max(0, x) on the positive side");
  return "selu(1), prelu alpha, pau coefficients, splash breakpoints all exact";
}

struct Criterion {
  int id;
  const char* name;
  std::function<std::string()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "census exactness", criterion_census},
      {2, "arrangement enumeration", criterion_arrangements},
      {3, "indicator constructions", criterion_indicators},
      {4, "gradient correctness", criterion_gradients},
      {5, "mutation semantics", criterion_mutations},
      {6, "evolution bookkeeping", criterion_bookkeeping},
      {7, "desk-scale search efficacy", criterion_search_efficacy},
      {8, "schedule compression", criterion_compression},
      {9, "instability containment", criterion_instability},
      {10, "distributed equivalence and fault tolerance", criterion_distributed},
      {11, "baseline zoo fidelity", criterion_zoo},
  };

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && selected.count(c.id) == 0) continue;
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      detail = c.run();
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %2d: %s (%.2fs) -- %s\n", ok ? "PASS" : "FAIL", c.id, c.name,
                elapsed, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures;
}
