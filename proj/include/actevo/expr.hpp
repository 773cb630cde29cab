#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include "actevo/graph.hpp"

namespace actevo {

/// Error with the byte offset of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& reason, std::size_t offset)
      : std::runtime_error(reason + " at offset " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

inline constexpr int kMaxEvolvedParams = 3;

namespace detail {

struct Parser {
  std::string_view text;
  std::size_t pos = 0;
  int max_params;
  ActivationGraph graph;

  explicit Parser(std::string_view t, int max_p) : text(t), max_params(max_p) {}

  char peek() const { return pos < text.size() ? text[pos] : '\0'; }

  void expect(char c) {
    if (peek() != c) {
      throw ParseError(std::string("expected '") + c + "'", pos);
    }
    ++pos;
  }

  void skip_spaces() {
    while (pos < text.size() && text[pos] == ' ') ++pos;
  }

  // Parses one expression; returns (source id, param index on this edge).
  // source -1 means the bare input x.
  std::pair<int, int> parse_expr() {
    skip_spaces();
    const std::size_t start = pos;
    if (peek() == 'x') {
      const char next = pos + 1 < text.size() ? text[pos + 1] : '\0';
      if (!std::isalnum(static_cast<unsigned char>(next)) && next != '_') {
        ++pos;
        return {-1, -1};
      }
    }
    // p<digit>( ... )
    if (peek() == 'p' && pos + 1 < text.size() &&
        std::isdigit(static_cast<unsigned char>(text[pos + 1]))) {
      const int index = text[pos + 1] - '0';
      if (index >= max_params) {
        throw ParseError("too many parameters (limit " + std::to_string(max_params) + ")",
                         start);
      }
      pos += 2;
      expect('(');
      auto [src, inner_idx] = parse_expr();
      if (inner_idx != -1) {
        throw ParseError("multiple parameters on one edge", start);
      }
      skip_spaces();
      expect(')');
      return {src, index};
    }
    // operator name
    std::size_t end = pos;
    while (end < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[end])) || text[end] == '_')) {
      ++end;
    }
    const std::string_view name = text.substr(pos, end - pos);
    const auto op = op_from_name(name);
    if (!op) {
      throw ParseError("unknown operator", start);
    }
    pos = end;
    expect('(');
    ActivationGraph::Node node;
    node.op = *op;
    std::pair<int, int> args[2];
    int nargs = 0;
    args[nargs++] = parse_expr();
    skip_spaces();
    while (peek() == ',') {
      ++pos;
      if (nargs >= 2) throw ParseError("arity mismatch", start);
      args[nargs++] = parse_expr();
      skip_spaces();
    }
    expect(')');
    if (nargs != arity(*op)) {
      throw ParseError("arity mismatch", start);
    }
    for (int s = 0; s < nargs; ++s) {
      node.child[static_cast<std::size_t>(s)] = args[s].first;
    }
    graph.nodes.push_back(node);
    const int id = static_cast<int>(graph.nodes.size()) - 1;
    for (int s = 0; s < nargs; ++s) {
      if (args[s].second != -1) {
        graph.param_sites.push_back(ParamSite{Edge{id, s}, args[s].second});
      }
    }
    return {id, -1};
  }
};

inline void print_subexpr(const ActivationGraph& g, int source, int consumer, int slot,
                          std::string& out) {
  const int pidx = site_index(g, consumer, slot);
  if (pidx >= 0) {
    out += 'p';
    out += static_cast<char>('0' + pidx);
    out += '(';
  }
  if (source == -1) {
    out += 'x';
  } else {
    const auto& node = g.nodes[static_cast<std::size_t>(source)];
    out += op_name(node.op);
    out += '(';
    for (int s = 0; s < arity(node.op); ++s) {
      if (s > 0) out += ", ";
      print_subexpr(g, node.child[static_cast<std::size_t>(s)], source, s, out);
    }
    out += ')';
  }
  if (pidx >= 0) out += ')';
}

}  // namespace detail

/// Canonical text form: no whitespace except one space after commas,
/// parameter sites as p0(...), p1(...), ... wrappers.
inline std::string print_expr(const ActivationGraph& g) {
  std::string out;
  detail::print_subexpr(g, g.root, g.root, kOutputSlot, out);
  return out;
}

/// Parses the canonical grammar.  `max_params` caps the number of parameter
/// indices; evolved graphs use the default of 3, analysis tooling passes up
/// to 10 for the piecewise constructions.
inline ActivationGraph parse_expr(std::string_view text, int max_params = kMaxEvolvedParams) {
  detail::Parser p(text, max_params);
  auto [src, pidx] = p.parse_expr();
  p.skip_spaces();
  if (p.pos != text.size()) {
    throw ParseError("unexpected trailing characters", p.pos);
  }
  if (src == -1) {
    throw ParseError("expression must contain at least one operator", 0);
  }
  p.graph.root = src;
  if (pidx != -1) {
    p.graph.param_sites.push_back(ParamSite{Edge{src, kOutputSlot}, pidx});
  }
  // Dense index check: every index below the max used must appear.
  const int k = p.graph.param_count();
  std::vector<bool> seen(static_cast<std::size_t>(k), false);
  for (const ParamSite& s : p.graph.param_sites) {
    seen[static_cast<std::size_t>(s.index)] = true;
  }
  for (int i = 0; i < k; ++i) {
    if (!seen[static_cast<std::size_t>(i)]) {
      throw ParseError("parameter indices are not contiguous", 0);
    }
  }
  validate_graph(p.graph);
  return p.graph;
}

}  // namespace actevo
