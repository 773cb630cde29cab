// actevo command-line interface: search, evaluation, training, analysis, and
// the coordinator/worker pair.  One JSON configuration file drives
// everything; command-line flags override file values.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "actevo/actevo.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Exit codes, one per failure class.
constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitParse = 3;
constexpr int kExitIo = 4;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed,
                         const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

actevo::Granularity parse_granularity(const std::string& s, const std::string& where) {
  const auto g = actevo::granularity_from_name(s);
  if (!g) throw ConfigError(where + ": granularity must be per-layer, per-channel, or per-neuron");
  return *g;
}

actevo::DatasetRef dataset_from_json(const json& j) {
  reject_unknown_keys(j, {"kind", "train", "val", "test", "classes", "noise", "seed", "path"},
                      "train.dataset");
  actevo::DatasetRef ref;
  if (j.contains("kind")) {
    const auto kind = actevo::dataset_kind_from_name(j["kind"].get<std::string>());
    if (!kind) throw ConfigError("unknown dataset kind: " + j["kind"].get<std::string>());
    ref.kind = *kind;
  }
  ref.train_size = j.value("train", ref.train_size);
  ref.val_size = j.value("val", ref.val_size);
  ref.test_size = j.value("test", ref.test_size);
  ref.classes = j.value("classes", ref.classes);
  ref.noise = j.value("noise", ref.noise);
  ref.seed = j.value("seed", ref.seed);
  ref.path = j.value("path", ref.path);
  return ref;
}

actevo::LrSchedule schedule_from_json(const json& j) {
  reject_unknown_keys(j, {"base_lr", "decay", "milestones", "total_epochs", "warmup"},
                      "train.schedule");
  actevo::LrSchedule s;
  s.base_lr = j.value("base_lr", s.base_lr);
  s.decay = j.value("decay", s.decay);
  if (j.contains("milestones")) s.milestones = j["milestones"].get<std::vector<int>>();
  s.total_epochs = j.value("total_epochs", s.total_epochs);
  if (j.contains("warmup") && !j["warmup"].is_null()) {
    reject_unknown_keys(j["warmup"], {"lr", "epochs"}, "train.schedule.warmup");
    actevo::LrSchedule::Warmup w;
    w.lr = j["warmup"].value("lr", w.lr);
    w.epochs = j["warmup"].value("epochs", w.epochs);
    s.warmup = w;
  }
  s.validate();
  return s;
}

actevo::TrainSpec default_train_spec() { return actevo::default_desk_spec(); }

actevo::TrainSpec train_spec_from_json(const json& j) {
  reject_unknown_keys(j,
                      {"layer_widths", "batch_size", "momentum", "l2", "granularity", "seed",
                       "dataset", "schedule"},
                      "train");
  actevo::TrainSpec spec = default_train_spec();
  if (j.contains("layer_widths")) spec.layer_widths = j["layer_widths"].get<std::vector<int>>();
  spec.batch_size = j.value("batch_size", spec.batch_size);
  spec.momentum = j.value("momentum", spec.momentum);
  spec.l2 = j.value("l2", spec.l2);
  if (j.contains("granularity")) {
    spec.granularity = parse_granularity(j["granularity"].get<std::string>(), "train");
  }
  spec.seed = j.value("seed", spec.seed);
  if (j.contains("dataset")) spec.dataset = dataset_from_json(j["dataset"]);
  if (j.contains("schedule")) spec.schedule = schedule_from_json(j["schedule"]);
  spec.validate();
  return spec;
}

actevo::EvolutionConfig evolution_from_json(const json& j) {
  reject_unknown_keys(
      j, {"population", "tournament", "budget", "threshold", "parameterize", "granularity",
          "seed", "mode"},
      "evolution");
  actevo::EvolutionConfig cfg;
  cfg.population = j.value("population", cfg.population);
  cfg.tournament = j.value("tournament", cfg.tournament);
  cfg.budget = j.value("budget", cfg.budget);
  cfg.threshold = j.value("threshold", cfg.threshold);
  cfg.parameterize = j.value("parameterize", cfg.parameterize);
  if (j.contains("granularity")) {
    cfg.granularity = parse_granularity(j["granularity"].get<std::string>(), "evolution");
  }
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("mode")) {
    const std::string mode = j["mode"].get<std::string>();
    if (mode == "sequential") {
      cfg.mode = actevo::SearchMode::sequential;
    } else if (mode == "asynchronous") {
      cfg.mode = actevo::SearchMode::asynchronous;
    } else {
      throw ConfigError("evolution.mode must be sequential or asynchronous");
    }
  }
  cfg.validate();
  return cfg;
}

struct RunConfig {
  json raw;
  actevo::EvolutionConfig evolution;
  actevo::TrainSpec train;
  int rerank_top_n = 10;
  int rerank_runs = 2;
  int rerank_keep = 3;
  int compression = 2;
  double task_timeout_seconds = 120.0;
  double heartbeat_seconds = 1.0;
  std::string output_dir = "out";
};

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config is not valid JSON: " + path);
  reject_unknown_keys(
      j, {"seed", "output_dir", "evolution", "train", "rerank", "distrib", "compression",
          "cross_eval"},
      "config");
  RunConfig cfg;
  cfg.raw = j;
  if (j.contains("evolution")) cfg.evolution = evolution_from_json(j["evolution"]);
  cfg.train = j.contains("train") ? train_spec_from_json(j["train"]) : default_train_spec();
  if (j.contains("seed")) {
    cfg.evolution.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("rerank")) {
    reject_unknown_keys(j["rerank"], {"top_n", "runs", "keep"}, "rerank");
    cfg.rerank_top_n = j["rerank"].value("top_n", cfg.rerank_top_n);
    cfg.rerank_runs = j["rerank"].value("runs", cfg.rerank_runs);
    cfg.rerank_keep = j["rerank"].value("keep", cfg.rerank_keep);
  }
  if (j.contains("distrib")) {
    reject_unknown_keys(j["distrib"], {"task_timeout_seconds", "heartbeat_seconds", "spec_ref"},
                        "distrib");
    cfg.task_timeout_seconds = j["distrib"].value("task_timeout_seconds", cfg.task_timeout_seconds);
    cfg.heartbeat_seconds = j["distrib"].value("heartbeat_seconds", cfg.heartbeat_seconds);
  }
  cfg.compression = j.value("compression", cfg.compression);
  // Precedence: --out flag (applied by callers) > config > ACTEVO_OUT > "out".
  if (const char* env_out = std::getenv("ACTEVO_OUT")) cfg.output_dir = env_out;
  cfg.output_dir = j.value("output_dir", cfg.output_dir);
  return cfg;
}

std::string provenance_header(const json& resolved) {
  return std::string("actevo ") + actevo::kVersion + "\nconfig: " + resolved.dump();
}

json resolved_config_json(const RunConfig& cfg) {
  json j = cfg.raw;
  j["resolved"] = {
      {"version", actevo::kVersion},
      {"evolution",
       {{"population", cfg.evolution.population},
        {"tournament", cfg.evolution.tournament},
        {"budget", cfg.evolution.budget},
        {"threshold", cfg.evolution.threshold},
        {"parameterize", cfg.evolution.parameterize},
        {"granularity", std::string(actevo::granularity_name(cfg.evolution.granularity))},
        {"seed", cfg.evolution.seed},
        {"mode",
         cfg.evolution.mode == actevo::SearchMode::sequential ? "sequential" : "asynchronous"}}},
      {"rerank", {{"top_n", cfg.rerank_top_n}, {"runs", cfg.rerank_runs}, {"keep", cfg.rerank_keep}}},
      {"compression", cfg.compression},
      {"output_dir", cfg.output_dir},
  };
  return j;
}

std::pair<std::string, std::uint16_t> split_host_port(const std::string& s) {
  const auto pos = s.rfind(':');
  if (pos == std::string::npos) throw ConfigError("expected addr:port, got " + s);
  const std::string host = s.substr(0, pos);
  const int port = std::stoi(s.substr(pos + 1));
  if (port < 0 || port > 65535) throw ConfigError("port out of range in " + s);
  return {host.empty() ? "0.0.0.0" : host, static_cast<std::uint16_t>(port)};
}

void write_search_outputs(const RunConfig& cfg, const actevo::SearchHistory& history,
                          const std::vector<actevo::RankedCandidate>& ranked) {
  fs::create_directories(cfg.output_dir);
  const json resolved = resolved_config_json(cfg);
  const std::string header = provenance_header(resolved);
  actevo::write_file(cfg.output_dir + "/history.jsonl", actevo::history_jsonl(history));
  actevo::write_file(cfg.output_dir + "/progress.csv", actevo::progress_csv(history, header));
  actevo::write_file(cfg.output_dir + "/resolved_config.json", resolved.dump(2) + "\n");

  json report;
  report["version"] = actevo::kVersion;
  report["evaluations"] = history.entries.size();
  report["top_functions"] = json::array();
  for (const auto& rc : ranked) {
    json entry;
    entry["expr"] = actevo::print_expr(rc.candidate.graph);
    entry["k"] = rc.candidate.graph.param_count();
    entry["search_fitness"] = rc.candidate.fitness_value();
    entry["adjusted_fitness"] = rc.adjusted_fitness;
    entry["seq"] = rc.candidate.seq;
    json runs = json::array();
    for (const auto& r : rc.full_runs) {
      runs.push_back({{"fitness", r.fitness}, {"status", std::string(status_name(r.status))}});
    }
    entry["full_runs"] = runs;
    report["top_functions"].push_back(entry);
  }
  actevo::write_file(cfg.output_dir + "/report.json", report.dump(2) + "\n");

  std::cout << "evaluations: " << history.entries.size() << "\n";
  std::cout << "top functions (adjusted fitness):\n";
  for (const auto& rc : ranked) {
    std::printf("  %.4f  %s\n", rc.adjusted_fitness,
                actevo::print_expr(rc.candidate.graph).c_str());
  }
  std::cout << "outputs written to " << cfg.output_dir << "/\n";
}

int cmd_search(const std::string& config_path, const std::string& mode_override,
               bool no_params, std::int64_t seed_override, const std::string& out_override,
               const std::string& bind) {
  RunConfig cfg = load_config(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  if (seed_override >= 0) cfg.evolution.seed = static_cast<std::uint64_t>(seed_override);
  if (mode_override == "random-search") {
    cfg.evolution.population = 1;
    cfg.evolution.tournament = 1;
    cfg.evolution.threshold = 0.0;
  } else if (!mode_override.empty()) {
    throw ConfigError("unknown --mode: " + mode_override + " (expected random-search)");
  }
  if (no_params) cfg.evolution.parameterize = false;
  cfg.evolution.validate();

  // The search's granularity setting drives its fitness evaluations.
  cfg.train.granularity = cfg.evolution.granularity;
  const actevo::Trainer trainer(cfg.train, cfg.compression);
  actevo::SearchHistory history;
  if (cfg.evolution.mode == actevo::SearchMode::asynchronous) {
    const auto [host, port] = split_host_port(bind.empty() ? "0.0.0.0:7333" : bind);
    actevo::CoordinatorOptions opts;
    opts.task_timeout_seconds = cfg.task_timeout_seconds;
    actevo::Coordinator coordinator(cfg.evolution, opts, host, port);
    std::cout << "serving on port " << coordinator.port() << "; waiting for workers\n";
    history = coordinator.run();
  } else {
    history = evolve(cfg.evolution, trainer.compressed_fn());
  }
  const auto ranked = actevo::rerank(history, trainer.full_fn(), cfg.evolution.seed,
                                     cfg.rerank_top_n, cfg.rerank_runs, cfg.rerank_keep);
  write_search_outputs(cfg, history, ranked);
  return kExitOk;
}

std::vector<double> parse_param_values(const std::string& csv) {
  std::vector<double> out;
  if (csv.empty()) return out;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

int cmd_eval_fn(const std::string& expr, const std::vector<double>& points, bool grad,
                const std::string& params_csv) {
  const auto graph = actevo::parse_expr(expr, 10);
  std::vector<double> params = parse_param_values(params_csv);
  if (params.empty()) params = actevo::unit_params(graph);
  if (static_cast<int>(params.size()) != graph.param_count()) {
    throw ConfigError("expression has " + std::to_string(graph.param_count()) +
                      " parameters but " + std::to_string(params.size()) + " values given");
  }
  for (double x : points) {
    if (grad) {
      const auto r = actevo::eval_grad(graph, params, x);
      std::printf("x=%.17g value=%.17g d_dx=%.17g", x, r.value, r.d_input);
      for (std::size_t i = 0; i < r.d_params.size(); ++i) {
        std::printf(" d_p%zu=%.17g", i, r.d_params[i]);
      }
      std::printf("\n");
    } else {
      std::printf("%.17g\n", actevo::eval(graph, params, x));
    }
  }
  return kExitOk;
}

int cmd_train_fn(const std::string& expr, const std::string& config_path, bool compressed,
                 std::int64_t seed_override, const std::string& out_override) {
  RunConfig cfg;
  if (config_path.empty()) {
    cfg.train = default_train_spec();
  } else {
    cfg = load_config(config_path);
  }
  if (!out_override.empty()) cfg.output_dir = out_override;
  const auto graph = actevo::parse_expr(expr);
  const actevo::Trainer trainer(cfg.train, cfg.compression);
  const std::uint64_t seed =
      seed_override >= 0 ? static_cast<std::uint64_t>(seed_override) : cfg.train.seed;
  const auto rec = compressed ? trainer.fitness_compressed(graph, seed)
                              : trainer.fitness_full(graph, seed);

  fs::create_directories(cfg.output_dir);
  const std::string header = provenance_header(resolved_config_json(cfg));
  actevo::write_file(cfg.output_dir + "/curves.csv", actevo::curves_csv(rec.curves, header));
  actevo::write_file(cfg.output_dir + "/param_trajectory.csv",
                     actevo::param_trajectory_csv(rec.curves, header));
  std::printf("expr: %s\nstatus: %s\nfitness: %.6f\nruntime_seconds: %.3f\nepochs: %zu\n",
              expr.c_str(), std::string(status_name(rec.status)).c_str(), rec.fitness,
              rec.runtime_seconds, rec.curves.epochs());
  std::cout << "curves written to " << cfg.output_dir << "/\n";
  return rec.status == actevo::FitnessStatus::ok ? kExitOk : kExitFailure;
}

int cmd_cross_eval(const std::string& config_path, const std::string& out_path) {
  RunConfig cfg = load_config(config_path);
  if (!cfg.raw.contains("cross_eval")) {
    throw ConfigError("config needs a cross_eval section: {exprs, variants, runs}");
  }
  const json& ce = cfg.raw["cross_eval"];
  reject_unknown_keys(ce, {"exprs", "variants", "runs", "seed"}, "cross_eval");
  if (!ce.contains("exprs") || ce["exprs"].empty()) {
    throw ConfigError("cross_eval.exprs must list at least one expression");
  }
  std::vector<actevo::ActivationGraph> graphs;
  for (const auto& e : ce["exprs"]) graphs.push_back(actevo::parse_expr(e.get<std::string>()));
  std::vector<actevo::TrainSpec> specs = {cfg.train};
  if (ce.contains("variants")) {
    for (const auto& v : ce["variants"]) {
      json merged = cfg.raw.value("train", json::object());
      merged.update(v);
      specs.push_back(train_spec_from_json(merged));
    }
  }
  const int runs = ce.value("runs", 2);
  const std::uint64_t seed = ce.value("seed", cfg.evolution.seed);
  const auto result = actevo::cross_evaluate(graphs, specs, runs, seed);

  std::string csv = actevo::detail::comment_block(provenance_header(resolved_config_json(cfg)));
  csv += "expr";
  for (std::size_t j = 0; j < specs.size(); ++j) {
    csv += ",spec" + std::to_string(j) + ",spec" + std::to_string(j) + "_unstable";
  }
  csv += "\n";
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    csv += "\"" + actevo::print_expr(graphs[i]) + "\"";
    for (std::size_t j = 0; j < specs.size(); ++j) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), ",%.6f,%d", result.mean_fitness[i][j],
                    result.any_unstable[i][j] ? 1 : 0);
      csv += buf;
    }
    csv += "\n";
  }
  const std::string path = out_path.empty() ? "cross_eval.csv" : out_path;
  actevo::write_file(path, csv);
  std::cout << csv;
  std::cout << "matrix written to " << path << "\n";
  return kExitOk;
}

actevo::ArrangementTable arrangements_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open arrangements file: " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_array()) {
    throw ConfigError("arrangements file must be a JSON array of {binary, unary, arrangements}");
  }
  actevo::ArrangementTable table;
  for (const auto& row : j) {
    reject_unknown_keys(row, {"binary", "unary", "arrangements"}, "arrangements row");
    table[{row.at("binary").get<int>(), row.at("unary").get<int>()}] =
        row.at("arrangements").get<long long>();
  }
  return table;
}

int cmd_space_count(int max_nodes, const std::string& arrangements_file,
                    const std::string& json_path, bool uncapped, bool shapes) {
  const actevo::ArrangementTable table = arrangements_file.empty()
                                             ? actevo::default_arrangements()
                                             : arrangements_from_file(arrangements_file);
  const auto census = actevo::count_space(max_nodes, 27, 7, 3, table, uncapped);
  std::cout << actevo::census_text(census);
  if (shapes) {
    std::cout << "\narrangement check (enumeration vs table):\n"
              << actevo::shape_report_text(actevo::shape_census_report(max_nodes, table));
  }
  if (!json_path.empty()) {
    actevo::write_file(json_path, actevo::census_json(census).dump(2) + "\n");
    std::cout << "census written to " << json_path << "\n";
  }
  return kExitOk;
}

int cmd_enumerate_shapes(int binary, int unary) {
  const auto shapes = actevo::enumerate_shapes(binary, unary);
  for (const auto& s : shapes) std::cout << s << "\n";
  std::cout << "count: " << shapes.size() << "\n";
  return kExitOk;
}

int cmd_baselines(bool list, const std::string& name, const std::vector<double>& points) {
  if (list || name.empty()) {
    for (const auto& n : actevo::baseline_names()) {
      const auto def = actevo::baseline(n);
      std::printf("%-12s params=%d", n.c_str(), def.param_count);
      if (def.graph) std::printf("  graph: %s", actevo::print_expr(*def.graph).c_str());
      std::printf("\n");
    }
    return kExitOk;
  }
  const auto def = actevo::baseline(name);
  for (double x : points) {
    std::printf("%.17g\n", def.value(x, def.init));
  }
  return kExitOk;
}

actevo::PiecewiseSpec piecewise_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open piecewise spec: " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("piecewise spec is not valid JSON: " + path);
  reject_unknown_keys(j, {"breakpoints", "point_values", "pieces"}, "piecewise spec");
  actevo::PiecewiseSpec spec;
  if (j.contains("breakpoints")) spec.breakpoints = j["breakpoints"].get<std::vector<double>>();
  if (j.contains("point_values")) spec.point_values = j["point_values"].get<std::vector<double>>();
  for (const auto& pj : j.value("pieces", json::array())) {
    reject_unknown_keys(pj, {"center", "coeffs"}, "piecewise piece");
    actevo::PiecewiseSpec::Piece piece;
    piece.center = pj.value("center", 0.0);
    piece.coeffs = pj.at("coeffs").get<std::vector<double>>();
    spec.pieces.push_back(piece);
  }
  spec.validate();
  return spec;
}

void print_bound_graph(const actevo::BoundGraph& bound) {
  std::cout << actevo::print_expr(bound.graph) << "\n";
  if (!bound.values.empty()) {
    std::cout << "params:";
    for (std::size_t i = 0; i < bound.values.size(); ++i) {
      std::printf(" p%zu=%.17g", i, bound.values[i]);
    }
    std::cout << "\n";
  }
}

int cmd_compile_piecewise(const std::string& spec_path, const std::vector<double>& points) {
  const auto spec = piecewise_from_file(spec_path);
  const auto bound = actevo::compile_piecewise(spec);
  print_bound_graph(bound);
  for (double x : points) {
    std::printf("f(%.17g) = %.17g\n", x, bound(x));
  }
  return kExitOk;
}

int cmd_indicator(const std::string& kind_name, double a, double b,
                  const std::vector<double>& points) {
  actevo::IndicatorKind kind;
  if (kind_name == "left") {
    kind = actevo::IndicatorKind::left;
  } else if (kind_name == "right") {
    kind = actevo::IndicatorKind::right;
  } else if (kind_name == "open_interval") {
    kind = actevo::IndicatorKind::open_interval;
  } else if (kind_name == "point") {
    kind = actevo::IndicatorKind::point;
  } else {
    throw ConfigError("indicator kind must be left, right, open_interval, or point");
  }
  const auto bound = actevo::build_indicator(kind, a, b);
  if (points.empty()) {
    print_bound_graph(bound);
    return kExitOk;
  }
  std::string line;
  for (double x : points) {
    if (!line.empty()) line += " ";
    char buf[32];
    const double v = bound(x);
    std::snprintf(buf, sizeof(buf), "%g", v == 0.0 ? 0.0 : v);  // print -0 as 0
    line += buf;
  }
  std::cout << line << "\n";
  return kExitOk;
}

int cmd_serve(const std::string& config_path, const std::string& bind,
              const std::string& out_override) {
  RunConfig cfg = load_config(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  const auto [host, port] = split_host_port(bind);
  actevo::CoordinatorOptions opts;
  opts.task_timeout_seconds = cfg.task_timeout_seconds;
  actevo::Coordinator coordinator(cfg.evolution, opts, host, port);
  std::cout << "coordinator listening on " << host << ":" << coordinator.port() << "\n";
  const auto history = coordinator.run();

  const actevo::Trainer trainer(cfg.train, cfg.compression);
  const auto ranked = actevo::rerank(history, trainer.full_fn(), cfg.evolution.seed,
                                     cfg.rerank_top_n, cfg.rerank_runs, cfg.rerank_keep);
  write_search_outputs(cfg, history, ranked);
  return kExitOk;
}

int cmd_work(const std::string& coordinator_addr, const std::string& config_path,
             const std::string& fitness_kind, const std::string& worker_id,
             double heartbeat_seconds) {
  const auto [host, port] = split_host_port(coordinator_addr);
  actevo::WorkerOptions opts;
  opts.worker_id = worker_id;
  opts.heartbeat_seconds = heartbeat_seconds;

  actevo::FitnessFn fn;
  std::unique_ptr<actevo::Trainer> trainer;
  if (fitness_kind == "trainer") {
    RunConfig cfg;
    if (config_path.empty()) {
      cfg.train = default_train_spec();
    } else {
      cfg = load_config(config_path);
    }
    trainer = std::make_unique<actevo::Trainer>(cfg.train, cfg.compression);
    fn = trainer->compressed_fn();
  } else if (fitness_kind == "synthetic") {
    fn = actevo::make_synthetic_fitness();
  } else {
    throw ConfigError("--fitness must be trainer or synthetic");
  }
  const auto stats = actevo::run_worker(host, port, fn, opts);
  std::cout << "worker finished; tasks completed: " << stats.tasks_completed << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"activation function search over evolved computation graphs"};
  app.require_subcommand(1);

  // search
  auto* search = app.add_subcommand("search", "run the evolutionary search and rerank");
  std::string search_config, search_mode, search_out, search_bind;
  bool search_no_params = false;
  std::int64_t search_seed = -1;
  search->add_option("--config", search_config, "JSON run configuration")->required();
  search->add_option("--mode", search_mode, "override: random-search forces P=1, S=1, V=0");
  search->add_flag("--no-params", search_no_params, "nonparametric baseline (no parameterization)");
  search->add_option("--seed", search_seed, "override the search seed");
  search->add_option("--out", search_out, "output directory");
  search->add_option("--bind", search_bind, "addr:port for asynchronous mode");

  // eval-fn
  auto* eval_fn = app.add_subcommand("eval-fn", "evaluate an expression at points");
  std::string eval_expr, eval_params;
  std::vector<double> eval_points;
  bool eval_grad_flag = false;
  eval_fn->add_option("expr", eval_expr, "expression in the canonical grammar")->required();
  eval_fn->add_option("--at", eval_points, "evaluation points")->required()->expected(-1);
  eval_fn->add_flag("--grad", eval_grad_flag, "also print derivatives");
  eval_fn->add_option("--params", eval_params, "comma-separated parameter values (default all 1)");

  // train-fn
  auto* train_fn = app.add_subcommand("train-fn", "train one expression and emit curves");
  std::string trainfn_expr, trainfn_config, trainfn_out;
  bool trainfn_compressed = false;
  std::int64_t trainfn_seed = -1;
  train_fn->add_option("expr", trainfn_expr, "expression in the canonical grammar")->required();
  train_fn->add_option("--config", trainfn_config, "JSON run configuration");
  train_fn->add_flag("--compressed", trainfn_compressed, "use the compressed schedule");
  train_fn->add_option("--seed", trainfn_seed, "training seed override");
  train_fn->add_option("--out", trainfn_out, "output directory");

  // cross-eval
  auto* cross = app.add_subcommand("cross-eval", "fitness matrix of expressions x specs");
  std::string cross_config, cross_out;
  cross->add_option("--config", cross_config, "JSON run configuration with a cross_eval section")
      ->required();
  cross->add_option("--out", cross_out, "output CSV path (default cross_eval.csv)");

  // space-count
  auto* space = app.add_subcommand("space-count", "exact census of the search space");
  int space_max_nodes = 7;
  std::string space_arrfile, space_json;
  bool space_uncapped = false, space_shapes = false;
  space->add_option("--max-nodes", space_max_nodes, "census up to this node count");
  space->add_option("--arrangements-file", space_arrfile,
                    "JSON array overriding the arrangement counts");
  space->add_option("--json", space_json, "also write the census as JSON");
  space->add_flag("--uncapped", space_uncapped,
                  "use the uncapped binomial sum (does not reproduce the published table)");
  space->add_flag("--check-shapes", space_shapes,
                  "compare enumerated arrangements against the table");

  // enumerate-shapes
  auto* shapes_cmd = app.add_subcommand("enumerate-shapes", "list graph skeletons for (b, u)");
  int shapes_b = 0, shapes_u = 1;
  shapes_cmd->add_option("--binary", shapes_b, "binary node count")->required();
  shapes_cmd->add_option("--unary", shapes_u, "unary node count")->required();

  // baselines
  auto* base = app.add_subcommand("baselines", "list or evaluate the baseline zoo");
  bool base_list = false;
  std::string base_name;
  std::vector<double> base_points;
  base->add_flag("--list", base_list, "list names");
  base->add_option("--eval", base_name, "baseline to evaluate");
  base->add_option("--at", base_points, "evaluation points")->expected(-1);

  // compile-piecewise
  auto* pw = app.add_subcommand("compile-piecewise", "compile a piecewise spec to a graph");
  std::string pw_spec;
  std::vector<double> pw_points;
  pw->add_option("--spec", pw_spec, "piecewise spec JSON")->required();
  pw->add_option("--at", pw_points, "also evaluate at points")->expected(-1);

  // indicator
  auto* ind = app.add_subcommand("indicator", "emit or evaluate an indicator graph");
  std::string ind_kind;
  double ind_a = 0.0, ind_b = 0.0;
  std::vector<double> ind_points;
  ind->add_option("kind", ind_kind, "left | right | open_interval | point")->required();
  ind->add_option("--a", ind_a, "left endpoint / point location");
  ind->add_option("--b", ind_b, "right endpoint");
  ind->add_option("--at", ind_points, "evaluate at points")->expected(-1);

  // serve / work
  auto* serve_cmd = app.add_subcommand("serve", "run the evaluation coordinator");
  std::string serve_config, serve_bind = "0.0.0.0:7333", serve_out;
  serve_cmd->add_option("--config", serve_config, "JSON run configuration")->required();
  serve_cmd->add_option("--bind", serve_bind, "addr:port to listen on");
  serve_cmd->add_option("--out", serve_out, "output directory");

  auto* work_cmd = app.add_subcommand("work", "run an evaluation worker");
  std::string work_addr, work_config, work_fitness = "trainer", work_id = "worker";
  double work_heartbeat = 1.0;
  work_cmd->add_option("--coordinator", work_addr, "coordinator addr:port")->required();
  work_cmd->add_option("--config", work_config, "JSON run configuration (trainer fitness)");
  work_cmd->add_option("--fitness", work_fitness, "trainer | synthetic");
  work_cmd->add_option("--worker-id", work_id, "worker identifier");
  work_cmd->add_option("--heartbeat", work_heartbeat, "heartbeat interval in seconds");

  CLI11_PARSE(app, argc, argv);

  try {
    if (search->parsed()) {
      return cmd_search(search_config, search_mode, search_no_params, search_seed, search_out,
                        search_bind);
    }
    if (eval_fn->parsed()) return cmd_eval_fn(eval_expr, eval_points, eval_grad_flag, eval_params);
    if (train_fn->parsed()) {
      return cmd_train_fn(trainfn_expr, trainfn_config, trainfn_compressed, trainfn_seed,
                          trainfn_out);
    }
    if (cross->parsed()) return cmd_cross_eval(cross_config, cross_out);
    if (space->parsed()) {
      return cmd_space_count(space_max_nodes, space_arrfile, space_json, space_uncapped,
                             space_shapes);
    }
    if (shapes_cmd->parsed()) return cmd_enumerate_shapes(shapes_b, shapes_u);
    if (base->parsed()) return cmd_baselines(base_list, base_name, base_points);
    if (pw->parsed()) return cmd_compile_piecewise(pw_spec, pw_points);
    if (ind->parsed()) return cmd_indicator(ind_kind, ind_a, ind_b, ind_points);
    if (serve_cmd->parsed()) return cmd_serve(serve_config, serve_bind, serve_out);
    if (work_cmd->parsed()) {
      return cmd_work(work_addr, work_config, work_fitness, work_id, work_heartbeat);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const actevo::ParseError& e) {
    std::cerr << "expression error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    const std::string what = e.what();
    if (what.find("cannot") != std::string::npos || what.find("write") != std::string::npos) {
      std::cerr << "io error: " << what << "\n";
      return kExitIo;
    }
    std::cerr << "error: " << what << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
