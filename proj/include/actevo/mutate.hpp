#pragma once

#include <string_view>

#include "actevo/expr.hpp"
#include "actevo/graph.hpp"
#include "actevo/rng.hpp"

namespace actevo {

inline constexpr int kMaxNodes = 8;

enum class MutationKind { insert, remove, change, regenerate };

inline constexpr std::string_view mutation_name(MutationKind m) {
  switch (m) {
    case MutationKind::insert: return "insert";
    case MutationKind::remove: return "remove";
    case MutationKind::change: return "change";
    case MutationKind::regenerate: return "regenerate";
  }
  return "?";
}

inline OpKind random_unary(Rng& rng) {
  return static_cast<OpKind>(rng.index(kUnaryCount));
}

inline OpKind random_binary(Rng& rng) {
  return static_cast<OpKind>(kUnaryCount + rng.index(kBinaryCount));
}

inline OpKind random_op(Rng& rng) {
  return static_cast<OpKind>(rng.index(kOpCount));
}

/// Random starting graph: unary1(unary2(x)) or binary(unary1(x), unary2(x)),
/// each form with probability 1/2, operators uniform within their class.
inline ActivationGraph init_random(Rng& rng) {
  ActivationGraph g;
  if (rng.coin()) {
    // binary(unary1(x), unary2(x))
    const OpKind b = random_binary(rng);
    const OpKind u1 = random_unary(rng);
    const OpKind u2 = random_unary(rng);
    g.nodes.push_back({u1, {-1, -1}});
    g.nodes.push_back({u2, {-1, -1}});
    g.nodes.push_back({b, {0, 1}});
    g.root = 2;
  } else {
    // unary1(unary2(x))
    const OpKind u1 = random_unary(rng);
    const OpKind u2 = random_unary(rng);
    g.nodes.push_back({u2, {-1, -1}});
    g.nodes.push_back({u1, {0, -1}});
    g.root = 1;
  }
  return g;
}

namespace detail {

// Source feeding an edge: node id or -1 for x.  Output edge reads the root.
inline int edge_source(const ActivationGraph& g, const Edge& e) {
  if (e.slot == kOutputSlot) return g.root;
  return g.nodes[static_cast<std::size_t>(e.consumer)].child[static_cast<std::size_t>(e.slot)];
}

inline void set_edge_source(ActivationGraph& g, const Edge& e, int source) {
  if (e.slot == kOutputSlot) {
    g.root = source;
  } else {
    g.nodes[static_cast<std::size_t>(e.consumer)].child[static_cast<std::size_t>(e.slot)] = source;
  }
}

// Nodes the result of insert_at would have.  Binary inserts other than
// max/min also add a constant operand node; max/min duplicate the source
// subtree.
inline int insert_result_nodes(const ActivationGraph& g, OpKind op, const Edge& e) {
  const int n = node_count(g);
  if (is_unary(op)) return n + 1;
  if (op == OpKind::max || op == OpKind::min) {
    return n + 1 + subtree_size(g, edge_source(g, e));
  }
  return n + 2;
}

}  // namespace detail

/// Deterministic core of the insert mutation: places `op` on edge `e`.
/// A unary operator splices in line.  A binary operator takes the incoming
/// value as x1; x2 is the neutral element: const0(x) for add/sub, const1(x)
/// for mul/safe_div/pow, and a deep copy of the x1 subtree for max/min, so
/// the computed function is unchanged at insertion time.  Parameter sites
/// are stripped (mutation always precedes a fresh parameterization).
inline ActivationGraph insert_at(const ActivationGraph& parent, OpKind op, const Edge& e) {
  ActivationGraph g = strip_params(parent);
  const int source = detail::edge_source(g, e);
  ActivationGraph::Node node;
  node.op = op;
  node.child[0] = source;
  if (is_binary(op)) {
    if (op == OpKind::add || op == OpKind::sub) {
      g.nodes.push_back({OpKind::const0, {-1, -1}});
      node.child[1] = static_cast<int>(g.nodes.size()) - 1;
    } else if (op == OpKind::mul || op == OpKind::safe_div || op == OpKind::pow) {
      g.nodes.push_back({OpKind::const1, {-1, -1}});
      node.child[1] = static_cast<int>(g.nodes.size()) - 1;
    } else {
      node.child[1] = detail::clone_subtree(g, source, g);
    }
  }
  g.nodes.push_back(node);
  detail::set_edge_source(g, e, static_cast<int>(g.nodes.size()) - 1);
  return normalize(g);
}

/// Insert mutation.  The (operator, edge) pair is drawn uniformly and
/// redrawn while the result would exceed the 8-node cap; unary inserts are
/// always legal, so the draw terminates.
inline ActivationGraph mutate_insert(const ActivationGraph& parent, Rng& rng) {
  const auto edges = enumerate_edges(parent);
  for (;;) {
    const OpKind op = random_op(rng);
    const Edge e = edges[rng.index(edges.size())];
    if (detail::insert_result_nodes(parent, op, e) <= kMaxNodes) {
      return insert_at(parent, op, e);
    }
  }
}

/// Deterministic core of the remove mutation.  A unary node's input rewires
/// to its consumer; a binary node keeps the input in `keep_slot` and
/// discards the other subtree.  If the result would be the bare input x
/// (root binary removed keeping an x input), a single identity node stands
/// in so the graph stays well formed.
inline ActivationGraph remove_node(const ActivationGraph& parent, int node_id, int keep_slot) {
  ActivationGraph g = strip_params(parent);
  const auto& node = g.nodes[static_cast<std::size_t>(node_id)];
  const int kept = node.child[static_cast<std::size_t>(is_binary(node.op) ? keep_slot : 0)];
  if (node_id == g.root) {
    if (kept == -1) {
      ActivationGraph id_graph;
      id_graph.nodes.push_back({OpKind::identity, {-1, -1}});
      id_graph.root = 0;
      return id_graph;
    }
    g.root = kept;
    return normalize(g);
  }
  for (auto& n : g.nodes) {
    for (int s = 0; s < arity(n.op); ++s) {
      if (n.child[static_cast<std::size_t>(s)] == node_id) {
        n.child[static_cast<std::size_t>(s)] = kept;
      }
    }
  }
  return normalize(g);
}

/// Remove mutation: node uniform, kept input of a binary node uniform.
inline ActivationGraph mutate_remove(const ActivationGraph& parent, Rng& rng) {
  const int id = static_cast<int>(rng.index(parent.nodes.size()));
  const int keep =
      is_binary(parent.nodes[static_cast<std::size_t>(id)].op) ? static_cast<int>(rng.index(2)) : 0;
  return remove_node(parent, id, keep);
}

/// Deterministic core of the change mutation.
inline ActivationGraph change_node(const ActivationGraph& parent, int node_id, OpKind new_op) {
  ActivationGraph g = strip_params(parent);
  g.nodes[static_cast<std::size_t>(node_id)].op = new_op;
  return g;
}

/// Change mutation: node uniform; the replacement is uniform over the
/// same-arity class excluding the incumbent, so a change always changes
/// something.
inline ActivationGraph mutate_change(const ActivationGraph& parent, Rng& rng) {
  const int id = static_cast<int>(rng.index(parent.nodes.size()));
  const OpKind current = parent.nodes[static_cast<std::size_t>(id)].op;
  OpKind replacement;
  if (is_unary(current)) {
    int pick = static_cast<int>(rng.index(kUnaryCount - 1));
    if (pick >= static_cast<int>(current)) ++pick;
    replacement = static_cast<OpKind>(pick);
  } else {
    const int cur = static_cast<int>(current) - kUnaryCount;
    int pick = static_cast<int>(rng.index(kBinaryCount - 1));
    if (pick >= cur) ++pick;
    replacement = static_cast<OpKind>(kUnaryCount + pick);
  }
  return change_node(parent, id, replacement);
}

/// Regenerate mutation: every node independently resampled within its arity
/// class (repeats allowed); the graph structure is untouched.  Nodes are
/// resampled in id order.
inline ActivationGraph mutate_regenerate(const ActivationGraph& parent, Rng& rng) {
  ActivationGraph g = strip_params(parent);
  for (auto& n : g.nodes) {
    n.op = is_unary(n.op) ? random_unary(rng) : random_binary(rng);
  }
  return g;
}

/// One mutation step: uniform among insert/remove/change/regenerate with two
/// overrides.  A graph with more than 7 nodes always receives a remove; a
/// remove drawn for a 1-node graph becomes a change.
inline std::pair<ActivationGraph, MutationKind> mutate(const ActivationGraph& parent, Rng& rng) {
  if (node_count(parent) > 7) {
    return {mutate_remove(parent, rng), MutationKind::remove};
  }
  MutationKind kind = static_cast<MutationKind>(rng.index(4));
  if (kind == MutationKind::remove && node_count(parent) == 1) {
    kind = MutationKind::change;
  }
  switch (kind) {
    case MutationKind::insert: return {mutate_insert(parent, rng), kind};
    case MutationKind::remove: return {mutate_remove(parent, rng), kind};
    case MutationKind::change: return {mutate_change(parent, rng), kind};
    case MutationKind::regenerate: return {mutate_regenerate(parent, rng), kind};
  }
  return {parent, kind};  // unreachable
}

/// Deterministic core of parameterization: installs sites with indices
/// 0..k-1 on the given edges, in canonical edge order.
inline ActivationGraph parameterize_at(const ActivationGraph& parent, std::vector<Edge> edges) {
  ActivationGraph g = strip_params(parent);
  const auto all = enumerate_edges(g);
  // Sort the chosen edges by canonical position so index assignment is stable.
  std::sort(edges.begin(), edges.end(), [&](const Edge& a, const Edge& b) {
    const auto pos = [&](const Edge& e) {
      for (std::size_t i = 0; i < all.size(); ++i) {
        if (all[i] == e) return i;
      }
      throw std::invalid_argument("edge not in graph");
    };
    return pos(a) < pos(b);
  });
  int index = 0;
  for (const Edge& e : edges) {
    g.param_sites.push_back(ParamSite{e, index++});
  }
  return g;
}

/// Parameterization: k uniform over {0, 1, 2, 3} (clamped to the number of
/// edges), then k distinct edges uniformly without replacement from all e_g
/// edges including the output edge.  With fresh values of 1 the function is
/// unchanged.
inline ActivationGraph parameterize(const ActivationGraph& parent, Rng& rng) {
  auto edges = enumerate_edges(parent);
  std::size_t k = rng.index(4);
  if (k > edges.size()) k = edges.size();
  std::vector<Edge> chosen;
  chosen.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t pick = rng.index(edges.size());
    chosen.push_back(edges[pick]);
    edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return parameterize_at(parent, std::move(chosen));
}

/// Random functions drawn by the sampling protocol: random initialization,
/// exactly three mutation steps, then parameterization.
inline std::vector<ActivationGraph> sample_random_functions(int n, Rng& rng) {
  std::vector<ActivationGraph> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    ActivationGraph g = init_random(rng);
    for (int m = 0; m < 3; ++m) {
      g = mutate(g, rng).first;
    }
    out.push_back(parameterize(g, rng));
  }
  return out;
}

}  // namespace actevo
