#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "actevo/census.hpp"
#include "actevo/evolve.hpp"
#include "actevo/fitness.hpp"

namespace actevo {

namespace detail {

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// '#'-prefixed provenance block placed at the top of CSV outputs.
inline std::string comment_block(const std::string& header) {
  if (header.empty()) return {};
  std::string out;
  std::istringstream in(header);
  std::string line;
  while (std::getline(in, line)) out += "# " + line + "\n";
  return out;
}

}  // namespace detail

/// Graph JSON form: {nodes: [{id, op, children}], root, params: [{edge:
/// [consumer_id, slot], index}]} with slot -1 denoting the output edge.
inline nlohmann::json graph_to_json(const ActivationGraph& g) {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (int i = 0; i < node_count(g); ++i) {
    const auto& node = g.nodes[static_cast<std::size_t>(i)];
    nlohmann::json children = nlohmann::json::array();
    for (int s = 0; s < arity(node.op); ++s) {
      children.push_back(node.child[static_cast<std::size_t>(s)]);
    }
    j["nodes"].push_back(
        {{"id", i}, {"op", std::string(op_name(node.op))}, {"children", children}});
  }
  j["root"] = g.root;
  j["params"] = nlohmann::json::array();
  for (const ParamSite& s : g.param_sites) {
    j["params"].push_back(
        {{"edge", {s.edge.consumer, s.edge.slot}}, {"index", s.index}});
  }
  return j;
}

inline ActivationGraph graph_from_json(const nlohmann::json& j) {
  ActivationGraph g;
  g.nodes.resize(j.at("nodes").size());
  for (const auto& nj : j.at("nodes")) {
    const int id = nj.at("id").get<int>();
    if (id < 0 || id >= node_count(g)) throw std::invalid_argument("node id out of range");
    auto& node = g.nodes[static_cast<std::size_t>(id)];
    const auto op = op_from_name(nj.at("op").get<std::string>());
    if (!op) throw std::invalid_argument("unknown operator in graph JSON");
    node.op = *op;
    const auto& children = nj.at("children");
    if (static_cast<int>(children.size()) != arity(*op)) {
      throw std::invalid_argument("child count does not match operator arity");
    }
    for (std::size_t s = 0; s < children.size(); ++s) {
      node.child[s] = children[s].get<int>();
    }
  }
  g.root = j.at("root").get<int>();
  for (const auto& pj : j.value("params", nlohmann::json::array())) {
    ParamSite site;
    site.edge.consumer = pj.at("edge").at(0).get<int>();
    site.edge.slot = pj.at("edge").at(1).get<int>();
    site.index = pj.at("index").get<int>();
    g.param_sites.push_back(site);
  }
  validate_graph(g);
  return g;
}

/// One line-delimited JSON record per evaluation, in sequence order.
inline std::string history_jsonl(const SearchHistory& history) {
  std::string out;
  for (const Candidate& c : history.entries) {
    nlohmann::json j;
    j["seq"] = c.seq;
    j["expr"] = print_expr(c.graph);
    j["k"] = c.graph.param_count();
    j["fitness"] = c.fitness_value();
    j["status"] = c.fitness ? std::string(status_name(c.fitness->status)) : "ok";
    j["runtime_seconds"] = c.fitness ? c.fitness->runtime_seconds : 0.0;
    if (c.parent_seq) {
      j["parent_seq"] = *c.parent_seq;
    } else {
      j["parent_seq"] = nullptr;
    }
    j["mutation"] = c.mutation;
    out += j.dump();
    out += '\n';
  }
  return out;
}

/// (seq, cumulative_seconds, best_so_far, window_avg_last_P) per evaluation.
inline std::string progress_csv(const SearchHistory& history, const std::string& header = "") {
  std::string out = detail::comment_block(header);
  out += "seq,cumulative_seconds,best_so_far,window_avg_last_P\n";
  double cumulative = 0.0;
  for (std::size_t i = 0; i < history.entries.size(); ++i) {
    const Candidate& c = history.entries[i];
    cumulative += c.fitness ? c.fitness->runtime_seconds : 0.0;
    out += std::to_string(c.seq) + "," + detail::fmt_double(cumulative) + "," +
           detail::fmt_double(history.best_so_far[i]) + "," +
           detail::fmt_double(history.window_avg[i]) + "\n";
  }
  return out;
}

/// (epoch, lr, train_loss, train_acc, val_acc) per completed epoch.
inline std::string curves_csv(const TrainingCurves& curves, const std::string& header = "") {
  std::string out = detail::comment_block(header);
  out += "epoch,lr,train_loss,train_acc,val_acc\n";
  for (std::size_t e = 0; e < curves.epochs(); ++e) {
    out += std::to_string(e) + "," + detail::fmt_double(curves.lr[e]) + "," +
           detail::fmt_double(curves.train_loss[e]) + "," +
           detail::fmt_double(curves.train_acc[e]) + "," +
           detail::fmt_double(curves.val_acc[e]) + "\n";
  }
  return out;
}

/// (epoch, param_index, layer, mean_value) rows for trajectory analysis.
inline std::string param_trajectory_csv(const TrainingCurves& curves,
                                        const std::string& header = "") {
  std::string out = detail::comment_block(header);
  out += "epoch,param_index,layer,mean_value\n";
  for (std::size_t e = 0; e < curves.param_means.size(); ++e) {
    for (std::size_t layer = 0; layer < curves.param_means[e].size(); ++layer) {
      for (std::size_t j = 0; j < curves.param_means[e][layer].size(); ++j) {
        out += std::to_string(e) + "," + std::to_string(j) + "," + std::to_string(layer) +
               "," + detail::fmt_double(curves.param_means[e][layer][j]) + "\n";
      }
    }
  }
  return out;
}

inline std::string census_text(const SpaceCensus& census) {
  std::string out;
  out += "nodes  binary  unary  edges  arrangements  functions\n";
  char buf[160];
  for (const CensusRow& r : census.rows) {
    std::snprintf(buf, sizeof(buf), "%5d  %6d  %5d  %5d  %12lld  %llu\n", r.nodes, r.binary,
                  r.unary, r.edges, r.arrangements, r.functions);
    out += buf;
  }
  for (std::size_t j = 0; j < census.per_node_total.size(); ++j) {
    std::snprintf(buf, sizeof(buf), "G_%zu total: %llu\n", j + 1, census.per_node_total[j]);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "total: %llu\n", census.total);
  out += buf;
  return out;
}

inline nlohmann::json census_json(const SpaceCensus& census) {
  nlohmann::json j;
  j["max_nodes"] = census.max_nodes;
  j["unary_ops"] = census.unary_ops;
  j["binary_ops"] = census.binary_ops;
  j["max_params"] = census.max_params;
  j["rows"] = nlohmann::json::array();
  for (const CensusRow& r : census.rows) {
    j["rows"].push_back({{"nodes", r.nodes},
                         {"binary", r.binary},
                         {"unary", r.unary},
                         {"edges", r.edges},
                         {"arrangements", r.arrangements},
                         {"functions", r.functions}});
  }
  j["per_node_total"] = census.per_node_total;
  j["total"] = census.total;
  return j;
}

inline std::string shape_report_text(const ShapeReport& report) {
  std::string out = "binary  unary  table  enumerated  status\n";
  char buf[160];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof(buf), "%6d  %5d  %5lld  %10lld  %s\n", r.binary, r.unary,
                  r.table_count, r.enumerated, r.agrees ? "ok" : "DISCREPANCY");
    out += buf;
  }
  return out;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace actevo
