#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "actevo/ops.hpp"

namespace actevo {

/// An edge of the computation graph, identified by its consumer side.
/// slot is the consumer's input slot (0 or 1); slot == -1 with
/// consumer == root denotes the distinguished output edge.
struct Edge {
  int consumer = 0;
  int slot = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

inline constexpr int kOutputSlot = -1;

/// A multiplicative parameter site: the value flowing along `edge` is
/// multiplied by the parameter with the given index.  At most one site sits
/// on any edge, but several sites may share one index (they then multiply by
/// the same value), which is how the indicator constructions realize a
/// constant appearing in more than one place.
struct ParamSite {
  Edge edge;
  int index = 0;
};

/// An activation function represented as a rooted tree of operator nodes.
/// A child id of -1 means the slot reads the scalar input x.  Nodes are kept
/// in postorder (children precede their consumer), so a single forward sweep
/// over `nodes` evaluates the graph.
struct ActivationGraph {
  struct Node {
    OpKind op = OpKind::identity;
    std::array<int, 2> child = {-1, -1};
  };

  std::vector<Node> nodes;
  int root = 0;
  std::vector<ParamSite> param_sites;

  int param_count() const {
    int k = 0;
    for (const ParamSite& s : param_sites) k = std::max(k, s.index + 1);
    return k;
  }
};

inline int node_count(const ActivationGraph& g) {
  return static_cast<int>(g.nodes.size());
}

struct ShapeSignature {
  int binary = 0;
  int unary = 0;
  int edges = 0;

  friend bool operator==(const ShapeSignature&, const ShapeSignature&) = default;
};

/// (b_g, u_g, e_g) with e_g = u_g + 2*b_g + 1: all input edges plus the
/// output edge.  Parameter sites are edge decorations and do not count.
inline ShapeSignature shape_signature(const ActivationGraph& g) {
  ShapeSignature s;
  for (const auto& n : g.nodes) {
    if (is_binary(n.op)) {
      ++s.binary;
    } else {
      ++s.unary;
    }
  }
  s.edges = s.unary + 2 * s.binary + 1;
  return s;
}

/// All edges in canonical order: node input slots by (node id, slot), then
/// the output edge last.
inline std::vector<Edge> enumerate_edges(const ActivationGraph& g) {
  std::vector<Edge> edges;
  edges.reserve(g.nodes.size() * 2 + 1);
  for (int i = 0; i < static_cast<int>(g.nodes.size()); ++i) {
    for (int s = 0; s < arity(g.nodes[static_cast<std::size_t>(i)].op); ++s) {
      edges.push_back(Edge{i, s});
    }
  }
  edges.push_back(Edge{g.root, kOutputSlot});
  return edges;
}

/// Throws std::invalid_argument if the graph is not a well-formed tree with
/// dense parameter indices and at most one site per edge.
inline void validate_graph(const ActivationGraph& g) {
  const int n = node_count(g);
  if (n < 1) throw std::invalid_argument("graph has no nodes");
  if (g.root < 0 || g.root >= n) throw std::invalid_argument("root out of range");
  std::vector<int> consumers(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    const auto& node = g.nodes[static_cast<std::size_t>(i)];
    for (int s = 0; s < arity(node.op); ++s) {
      const int c = node.child[static_cast<std::size_t>(s)];
      if (c == -1) continue;
      if (c < 0 || c >= n) throw std::invalid_argument("child id out of range");
      ++consumers[static_cast<std::size_t>(c)];
    }
  }
  for (int i = 0; i < n; ++i) {
    const int expected = (i == g.root) ? 0 : 1;
    if (consumers[static_cast<std::size_t>(i)] != expected) {
      throw std::invalid_argument("graph edges do not form a tree");
    }
  }
  const int k = g.param_count();
  std::vector<bool> seen(static_cast<std::size_t>(std::max(k, 0)), false);
  for (std::size_t i = 0; i < g.param_sites.size(); ++i) {
    const ParamSite& s = g.param_sites[i];
    if (s.index < 0 || s.index >= k) throw std::invalid_argument("parameter index out of range");
    seen[static_cast<std::size_t>(s.index)] = true;
    if (s.edge.slot == kOutputSlot) {
      if (s.edge.consumer != g.root) throw std::invalid_argument("output site not on root");
    } else {
      if (s.edge.consumer < 0 || s.edge.consumer >= n ||
          s.edge.slot >= arity(g.nodes[static_cast<std::size_t>(s.edge.consumer)].op)) {
        throw std::invalid_argument("parameter site on a nonexistent edge");
      }
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (g.param_sites[j].edge == s.edge) {
        throw std::invalid_argument("multiple parameter sites on one edge");
      }
    }
  }
  for (bool b : seen) {
    if (!b) throw std::invalid_argument("parameter indices are not dense");
  }
}

/// Fresh parameter values for a graph: all exactly 1.
inline std::vector<double> unit_params(const ActivationGraph& g) {
  return std::vector<double>(static_cast<std::size_t>(g.param_count()), 1.0);
}

namespace detail {

// Parameter index decorating (consumer, slot), or -1.
inline int site_index(const ActivationGraph& g, int consumer, int slot) {
  for (const ParamSite& s : g.param_sites) {
    if (s.edge.consumer == consumer && s.edge.slot == slot) return s.index;
  }
  return -1;
}

inline double site_factor(const ActivationGraph& g, std::span<const double> params,
                          int consumer, int slot) {
  const int idx = site_index(g, consumer, slot);
  return idx < 0 ? 1.0 : params[static_cast<std::size_t>(idx)];
}

// Postorder of the tree: children before consumers.  Iterative so deep
// piecewise graphs do not overflow the stack.
inline void postorder_into(const ActivationGraph& g, std::vector<int>& order) {
  order.clear();
  order.reserve(g.nodes.size());
  std::vector<std::pair<int, int>> stack;  // (node, next child slot)
  stack.emplace_back(g.root, 0);
  while (!stack.empty()) {
    auto& [id, slot] = stack.back();
    const auto& node = g.nodes[static_cast<std::size_t>(id)];
    if (slot < arity(node.op)) {
      const int c = node.child[static_cast<std::size_t>(slot)];
      ++slot;
      if (c != -1) stack.emplace_back(c, 0);
    } else {
      order.push_back(id);
      stack.pop_back();
    }
  }
}

struct EvalWorkspace {
  std::vector<int> order;
  std::vector<double> value;    // raw node outputs, before the consumer-edge factor
  std::vector<double> adjoint;  // d output / d raw node value
};

inline EvalWorkspace& eval_workspace() {
  thread_local EvalWorkspace ws;
  return ws;
}

inline void forward_sweep(const ActivationGraph& g, std::span<const double> params,
                          double x, EvalWorkspace& ws) {
  postorder_into(g, ws.order);
  ws.value.assign(g.nodes.size(), 0.0);
  for (int id : ws.order) {
    const auto& node = g.nodes[static_cast<std::size_t>(id)];
    double in[2] = {0.0, 0.0};
    for (int s = 0; s < arity(node.op); ++s) {
      const int c = node.child[static_cast<std::size_t>(s)];
      const double raw = (c == -1) ? x : ws.value[static_cast<std::size_t>(c)];
      in[s] = raw * site_factor(g, params, id, s);
    }
    ws.value[static_cast<std::size_t>(id)] = op_forward(node.op, in[0], in[1]);
  }
}

}  // namespace detail

/// Value of the graph at x.  Each parameter site multiplies the value flowing
/// along its edge.  Pure; non-finite values propagate.
inline double eval(const ActivationGraph& g, std::span<const double> params, double x) {
  auto& ws = detail::eval_workspace();
  detail::forward_sweep(g, params, x, ws);
  return ws.value[static_cast<std::size_t>(g.root)] *
         detail::site_factor(g, params, g.root, kOutputSlot);
}

inline double eval(const ActivationGraph& g, double x) {
  return eval(g, unit_params(g), x);
}

/// Reverse-mode sweep.  Writes d/dx into d_input and d/dparam_i into
/// d_params (length param_count()); returns the value.  Gradients follow the
/// op_derivative tie-breaks.
inline double eval_grad_into(const ActivationGraph& g, std::span<const double> params,
                             double x, double& d_input, std::span<double> d_params) {
  auto& ws = detail::eval_workspace();
  detail::forward_sweep(g, params, x, ws);

  d_input = 0.0;
  for (double& d : d_params) d = 0.0;

  const double root_raw = ws.value[static_cast<std::size_t>(g.root)];
  const int out_idx = detail::site_index(g, g.root, kOutputSlot);
  const double out_factor =
      out_idx < 0 ? 1.0 : params[static_cast<std::size_t>(out_idx)];
  if (out_idx >= 0) d_params[static_cast<std::size_t>(out_idx)] += root_raw;

  ws.adjoint.assign(g.nodes.size(), 0.0);
  ws.adjoint[static_cast<std::size_t>(g.root)] = out_factor;

  for (auto it = ws.order.rbegin(); it != ws.order.rend(); ++it) {
    const int id = *it;
    const auto& node = g.nodes[static_cast<std::size_t>(id)];
    const double a_node = ws.adjoint[static_cast<std::size_t>(id)];
    double raw[2] = {0.0, 0.0};
    double factor[2] = {1.0, 1.0};
    int pidx[2] = {-1, -1};
    double in[2] = {0.0, 0.0};
    for (int s = 0; s < arity(node.op); ++s) {
      const int c = node.child[static_cast<std::size_t>(s)];
      raw[s] = (c == -1) ? x : ws.value[static_cast<std::size_t>(c)];
      pidx[s] = detail::site_index(g, id, s);
      factor[s] = pidx[s] < 0 ? 1.0 : params[static_cast<std::size_t>(pidx[s])];
      in[s] = raw[s] * factor[s];
    }
    double d0 = 0.0, d1 = 0.0;
    op_derivative(node.op, in[0], in[1], d0, d1);
    const double d_in[2] = {d0, d1};
    for (int s = 0; s < arity(node.op); ++s) {
      const double a_edge = a_node * d_in[s];  // adjoint of the multiplied input
      if (pidx[s] >= 0) d_params[static_cast<std::size_t>(pidx[s])] += a_edge * raw[s];
      const double a_raw = a_edge * factor[s];
      const int c = node.child[static_cast<std::size_t>(s)];
      if (c == -1) {
        d_input += a_raw;
      } else {
        ws.adjoint[static_cast<std::size_t>(c)] += a_raw;
      }
    }
  }
  return root_raw * out_factor;
}

struct EvalGrad {
  double value = 0.0;
  double d_input = 0.0;
  std::vector<double> d_params;
};

inline EvalGrad eval_grad(const ActivationGraph& g, std::span<const double> params, double x) {
  EvalGrad r;
  r.d_params.resize(static_cast<std::size_t>(g.param_count()));
  r.value = eval_grad_into(g, params, x, r.d_input, r.d_params);
  return r;
}

/// Copy of the graph with every parameter site removed.
inline ActivationGraph strip_params(ActivationGraph g) {
  g.param_sites.clear();
  return g;
}

namespace detail {

// Clones the subtree hanging off `source` (a node id, or -1 for the bare x
// input) into `dst`, returning the new source id.  Sites are not carried
// over; mutation re-parameterizes from scratch.  dst may alias src, so the
// node is copied by value before push_back can reallocate the vector.
inline int clone_subtree(const ActivationGraph& src, int source, ActivationGraph& dst) {
  if (source == -1) return -1;
  const ActivationGraph::Node node = src.nodes[static_cast<std::size_t>(source)];
  ActivationGraph::Node copy;
  copy.op = node.op;
  for (int s = 0; s < arity(node.op); ++s) {
    copy.child[static_cast<std::size_t>(s)] =
        clone_subtree(src, node.child[static_cast<std::size_t>(s)], dst);
  }
  dst.nodes.push_back(copy);
  return static_cast<int>(dst.nodes.size()) - 1;
}

// Number of nodes in the subtree hanging off `source` (-1 = bare x).
inline int subtree_size(const ActivationGraph& g, int source) {
  if (source == -1) return 0;
  const auto& node = g.nodes[static_cast<std::size_t>(source)];
  int n = 1;
  for (int s = 0; s < arity(node.op); ++s) {
    n += subtree_size(g, node.child[static_cast<std::size_t>(s)]);
  }
  return n;
}

}  // namespace detail

/// Rebuilds the graph with nodes renumbered in postorder and unreachable
/// nodes dropped.  Parameter sites on surviving edges are remapped.
inline ActivationGraph normalize(const ActivationGraph& g) {
  std::vector<int> order;
  detail::postorder_into(g, order);
  std::vector<int> remap(g.nodes.size(), -1);
  ActivationGraph out;
  out.nodes.reserve(order.size());
  for (int id : order) {
    const auto& node = g.nodes[static_cast<std::size_t>(id)];
    ActivationGraph::Node copy;
    copy.op = node.op;
    for (int s = 0; s < arity(node.op); ++s) {
      const int c = node.child[static_cast<std::size_t>(s)];
      copy.child[static_cast<std::size_t>(s)] = (c == -1) ? -1 : remap[static_cast<std::size_t>(c)];
    }
    remap[static_cast<std::size_t>(id)] = static_cast<int>(out.nodes.size());
    out.nodes.push_back(copy);
  }
  out.root = remap[static_cast<std::size_t>(g.root)];
  for (const ParamSite& s : g.param_sites) {
    const int mapped = remap[static_cast<std::size_t>(s.edge.consumer)];
    if (mapped == -1) continue;  // site on a discarded subtree
    out.param_sites.push_back(ParamSite{Edge{mapped, s.edge.slot}, s.index});
  }
  return out;
}

}  // namespace actevo
