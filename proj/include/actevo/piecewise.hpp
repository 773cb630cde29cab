#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "actevo/graph.hpp"

namespace actevo {

/// A graph together with fixed values for its parameter sites; the analysis
/// constructions realize real constants this way.
struct BoundGraph {
  ActivationGraph graph;
  std::vector<double> values;

  double operator()(double x) const { return eval(graph, values, x); }
};

enum class IndicatorKind { left, right, open_interval, point };

namespace detail {

/// Assembles graphs bottom-up.  Constants 0 and 1 become const0/const1
/// nodes; any other constant becomes const1(x) scaled by a parameter site
/// whose fixed value is the constant.  Repeated constants share an index.
class GraphBuilder {
 public:
  struct Wire {
    int node = -1;   // -1: the bare input x
    int pidx = -1;   // parameter index decorating the edge into the consumer
  };

  Wire x() const { return {}; }

  Wire constant(double c) {
    if (c == 0.0) return unary(OpKind::const0, x());
    if (c == 1.0) return unary(OpKind::const1, x());
    Wire w = unary(OpKind::const1, x());
    const auto it = const_index_.find(c);
    if (it != const_index_.end()) {
      w.pidx = it->second;
    } else {
      w.pidx = static_cast<int>(values_.size());
      values_.push_back(c);
      const_index_.emplace(c, w.pidx);
    }
    return w;
  }

  Wire unary(OpKind op, Wire in) {
    ActivationGraph::Node node;
    node.op = op;
    node.child[0] = in.node;
    g_.nodes.push_back(node);
    const int id = static_cast<int>(g_.nodes.size()) - 1;
    attach(id, 0, in);
    return {id, -1};
  }

  Wire binary(OpKind op, Wire a, Wire b) {
    ActivationGraph::Node node;
    node.op = op;
    node.child[0] = a.node;
    node.child[1] = b.node;
    g_.nodes.push_back(node);
    const int id = static_cast<int>(g_.nodes.size()) - 1;
    attach(id, 0, a);
    attach(id, 1, b);
    return {id, -1};
  }

  BoundGraph finish(Wire root) {
    if (root.node == -1) {
      root = unary(OpKind::identity, root);
    }
    g_.root = root.node;
    if (root.pidx != -1) {
      g_.param_sites.push_back(ParamSite{Edge{g_.root, kOutputSlot}, root.pidx});
    }
    BoundGraph out{normalize(g_), values_};
    validate_graph(out.graph);
    return out;
  }

 private:
  void attach(int consumer, int slot, const Wire& w) {
    if (w.pidx != -1) {
      g_.param_sites.push_back(ParamSite{Edge{consumer, slot}, w.pidx});
    }
  }

  ActivationGraph g_;
  std::map<double, int> const_index_;
  std::vector<double> values_;
};

// max{b - x, 0} / (b - x): 1 for x < b, else 0 (safe division masks x = b).
inline GraphBuilder::Wire left_indicator(GraphBuilder& gb, double b) {
  const auto num = gb.unary(OpKind::relu, gb.binary(OpKind::sub, gb.constant(b), gb.x()));
  const auto den = gb.binary(OpKind::sub, gb.constant(b), gb.x());
  return gb.binary(OpKind::safe_div, num, den);
}

// min{a - x, 0} / (a - x): 1 for x > a, else 0.
inline GraphBuilder::Wire right_indicator(GraphBuilder& gb, double a) {
  const auto num = gb.binary(OpKind::min, gb.binary(OpKind::sub, gb.constant(a), gb.x()),
                             gb.constant(0.0));
  const auto den = gb.binary(OpKind::sub, gb.constant(a), gb.x());
  return gb.binary(OpKind::safe_div, num, den);
}

inline GraphBuilder::Wire interval_indicator(GraphBuilder& gb, double a, double b) {
  return gb.binary(OpKind::mul, left_indicator(gb, b), right_indicator(gb, a));
}

// (1 - 1_{(-inf,a)}) * (1 - 1_{(a,inf)}): 1 exactly at x = a.
inline GraphBuilder::Wire point_indicator(GraphBuilder& gb, double a) {
  const auto l = gb.binary(OpKind::sub, gb.constant(1.0), left_indicator(gb, a));
  const auto r = gb.binary(OpKind::sub, gb.constant(1.0), right_indicator(gb, a));
  return gb.binary(OpKind::mul, l, r);
}

}  // namespace detail

/// Indicator functions over the operator vocabulary, using the safe-division
/// convention.  `a` is used by right/open_interval/point, `b` by
/// left/open_interval.
inline BoundGraph build_indicator(IndicatorKind kind, double a, double b) {
  detail::GraphBuilder gb;
  switch (kind) {
    case IndicatorKind::left:
      return gb.finish(detail::left_indicator(gb, b));
    case IndicatorKind::right:
      return gb.finish(detail::right_indicator(gb, a));
    case IndicatorKind::open_interval:
      if (!(a < b)) throw std::invalid_argument("open interval requires a < b");
      return gb.finish(detail::interval_indicator(gb, a, b));
    case IndicatorKind::point:
      return gb.finish(detail::point_indicator(gb, a));
  }
  throw std::invalid_argument("unknown indicator kind");
}

/// A piecewise description: n breakpoints, n point values, and n + 1 pieces,
/// each a truncated power series around its own center.
struct PiecewiseSpec {
  struct Piece {
    double center = 0.0;
    std::vector<double> coeffs;  // a_0 + a_1 t + ... with t = x - center
  };

  std::vector<double> breakpoints;   // strictly increasing
  std::vector<double> point_values;  // value exactly at each breakpoint
  std::vector<Piece> pieces;         // one more than breakpoints

  void validate() const {
    if (pieces.size() != breakpoints.size() + 1) {
      throw std::invalid_argument("need one piece more than breakpoints");
    }
    if (point_values.size() != breakpoints.size()) {
      throw std::invalid_argument("need one point value per breakpoint");
    }
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
      if (!(breakpoints[i - 1] < breakpoints[i])) {
        throw std::invalid_argument("breakpoints must be strictly increasing");
      }
    }
    for (const Piece& p : pieces) {
      if (p.coeffs.empty()) throw std::invalid_argument("every piece needs a coefficient");
    }
  }

  /// Direct evaluation (Horner), the reference the compiled graph is checked
  /// against.
  double eval_direct(double x) const {
    std::size_t seg = 0;
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
      if (x == breakpoints[i]) return point_values[i];
      if (x > breakpoints[i]) seg = i + 1;
    }
    const Piece& p = pieces[seg];
    const double t = x - p.center;
    double v = p.coeffs.back();
    for (std::size_t j = p.coeffs.size() - 1; j-- > 0;) {
      v = p.coeffs[j] + t * v;
    }
    return v;
  }
};

namespace detail {

inline GraphBuilder::Wire piece_graph(GraphBuilder& gb, const PiecewiseSpec::Piece& p) {
  // Horner form; each use of t = x - center builds a fresh subtree (the
  // graph is a tree), with the center constant sharing one parameter index.
  auto t = [&]() { return gb.binary(OpKind::sub, gb.x(), gb.constant(p.center)); };
  GraphBuilder::Wire v = gb.constant(p.coeffs.back());
  for (std::size_t j = p.coeffs.size() - 1; j-- > 0;) {
    v = gb.binary(OpKind::add, gb.constant(p.coeffs[j]), gb.binary(OpKind::mul, t(), v));
  }
  return v;
}

}  // namespace detail

/// Compiles the indicator-weighted sum of the pieces and point values into a
/// single graph.  Node-count and parameter-count limits do not apply here:
/// this is a demonstration artifact, not an evolvable genotype.
inline BoundGraph compile_piecewise(const PiecewiseSpec& spec) {
  spec.validate();
  detail::GraphBuilder gb;
  const std::size_t n = spec.breakpoints.size();
  if (n == 0) {
    return gb.finish(detail::piece_graph(gb, spec.pieces[0]));
  }
  auto term = [&](detail::GraphBuilder::Wire ind, detail::GraphBuilder::Wire val) {
    return gb.binary(OpKind::mul, ind, val);
  };
  auto sum = term(detail::left_indicator(gb, spec.breakpoints[0]),
                  detail::piece_graph(gb, spec.pieces[0]));
  for (std::size_t i = 0; i < n; ++i) {
    sum = gb.binary(OpKind::add, sum,
                    term(detail::point_indicator(gb, spec.breakpoints[i]),
                         gb.constant(spec.point_values[i])));
    detail::GraphBuilder::Wire ind =
        (i + 1 < n)
            ? detail::interval_indicator(gb, spec.breakpoints[i], spec.breakpoints[i + 1])
            : detail::right_indicator(gb, spec.breakpoints[i]);
    sum = gb.binary(OpKind::add, sum, term(ind, detail::piece_graph(gb, spec.pieces[i + 1])));
  }
  return gb.finish(sum);
}

}  // namespace actevo
