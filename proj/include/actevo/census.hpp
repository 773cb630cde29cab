#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace actevo {

/// Arrangement counts per (binary, unary) node pair.  The default table is
/// the published one for up to seven nodes; note that its (3, 4) entry is 1
/// while exhaustive enumeration under the documented structural rule gives
/// 5 -- see enumerate_shapes and shape_census_report.
using ArrangementTable = std::map<std::pair<int, int>, long long>;

inline ArrangementTable default_arrangements() {
  return {
      {{0, 1}, 1},  {{0, 2}, 1},  {{0, 3}, 1}, {{1, 2}, 1},
      {{0, 4}, 1},  {{1, 3}, 3},  {{0, 5}, 1}, {{1, 4}, 6},
      {{2, 3}, 2},  {{0, 6}, 1},  {{1, 5}, 10}, {{2, 4}, 10},
      {{0, 7}, 1},  {{1, 6}, 15}, {{2, 5}, 30}, {{3, 4}, 1},
  };
}

struct CensusRow {
  int nodes = 0;
  int binary = 0;
  int unary = 0;
  int edges = 0;
  long long arrangements = 0;
  unsigned long long functions = 0;  // arrangements * U^u * B^b * capped binomial sum
};

struct SpaceCensus {
  int max_nodes = 7;
  int unary_ops = 27;
  int binary_ops = 7;
  int max_params = 3;
  std::vector<CensusRow> rows;
  std::vector<unsigned long long> per_node_total;  // index j-1 for G_j
  unsigned long long total = 0;
};

namespace detail {

inline unsigned long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  unsigned long long r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned long long>(n - k + i) / static_cast<unsigned long long>(i);
  }
  return r;
}

inline unsigned long long ipow(int base, int exp) {
  unsigned long long r = 1;
  for (int i = 0; i < exp; ++i) r *= static_cast<unsigned long long>(base);
  return r;
}

}  // namespace detail

/// Sum_{i=0}^{cap} C(edges, i): the number of ways to place up to `cap`
/// parameters on distinct edges.
inline unsigned long long parameter_placements(int edges, int cap) {
  unsigned long long sum = 0;
  const int top = cap < edges ? cap : edges;
  for (int i = 0; i <= top; ++i) sum += detail::binomial(edges, i);
  return sum;
}

/// Exact census of the search space in integers.  Per (b, u) row the count is
///   arrangements * U^u * B^b * Sum_{i=0}^{min(e, E)} C(e, i)
/// with e = u + 2b + 1.  The binomial sum is capped at E; the uncapped sum
/// printed in some derivations does not reproduce the published per-size
/// totals (see uncapped parameter of this function).
inline SpaceCensus count_space(int max_nodes = 7, int unary_ops = 27, int binary_ops = 7,
                               int max_params = 3,
                               const ArrangementTable& arrangements = default_arrangements(),
                               bool uncapped = false) {
  if (max_nodes < 1 || max_nodes > 13) {
    // 27^13 still fits in 64 bits with room for the other factors; beyond
    // that the per-row products overflow.
    throw std::invalid_argument("count_space supports 1 to 13 nodes");
  }
  SpaceCensus census;
  census.max_nodes = max_nodes;
  census.unary_ops = unary_ops;
  census.binary_ops = binary_ops;
  census.max_params = max_params;
  census.per_node_total.assign(static_cast<std::size_t>(max_nodes), 0);
  for (int j = 1; j <= max_nodes; ++j) {
    for (int b = 0; b <= j - 1; ++b) {
      const int u = j - b;
      if (u < 1) continue;
      if (b > 0 && u < b + 1) continue;  // each binary leaf input needs a unary chain
      const auto it = arrangements.find({b, u});
      if (it == arrangements.end()) {
        throw std::invalid_argument("no arrangement count for (b=" + std::to_string(b) +
                                    ", u=" + std::to_string(u) + ")");
      }
      CensusRow row;
      row.nodes = j;
      row.binary = b;
      row.unary = u;
      row.edges = u + 2 * b + 1;
      row.arrangements = it->second;
      const unsigned long long placements =
          parameter_placements(row.edges, uncapped ? row.edges : max_params);
      row.functions = static_cast<unsigned long long>(row.arrangements) *
                      detail::ipow(unary_ops, u) * detail::ipow(binary_ops, b) * placements;
      census.per_node_total[static_cast<std::size_t>(j - 1)] += row.functions;
      census.rows.push_back(row);
    }
  }
  for (auto v : census.per_node_total) census.total += v;
  return census;
}

/// Exhaustive enumeration of graph skeletons with the given number of binary
/// and unary nodes, under the structural rule read off the published
/// arrangement counts: every binary input is headed by a chain of at least
/// one unary node or by another binary node (with an optional unary chain in
/// between), unary chains may sit above the root, and mirror images count as
/// distinct.  Skeletons print in the canonical grammar with u/b placeholders.
inline std::vector<std::string> enumerate_shapes(int binary, int unary) {
  if (unary < 1 || binary < 0) return {};

  // Returns the shapes of a subtree rooted at a binary node, given b >= 1
  // binaries and u unaries to spend.
  struct Enumerator {
    std::vector<std::string> binary_rooted(int b, int u) {
      std::vector<std::string> out;
      for (int bl = 0; bl <= b - 1; ++bl) {
        const int br = b - 1 - bl;
        for (int ul = 0; ul <= u; ++ul) {
          const int ur = u - ul;
          for (const auto& left : input(bl, ul)) {
            for (const auto& right : input(br, ur)) {
              out.push_back("b(" + left + ", " + right + ")");
            }
          }
        }
      }
      return out;
    }

    // A binary input: either a unary chain of length >= 1 ending in x, or a
    // binary subtree with an optional unary chain above it.
    std::vector<std::string> input(int b, int u) {
      std::vector<std::string> out;
      if (b == 0) {
        if (u >= 1) out.push_back(chain(u, "x"));
        return out;
      }
      for (int above = 0; above <= u; ++above) {
        for (const auto& sub : binary_rooted(b, u - above)) {
          out.push_back(chain(above, sub));
        }
      }
      return out;
    }

    static std::string chain(int length, const std::string& inner) {
      std::string s = inner;
      for (int i = 0; i < length; ++i) s = "u(" + s + ")";
      return s;
    }
  };

  Enumerator e;
  if (binary == 0) {
    return {Enumerator::chain(unary, "x")};
  }
  std::vector<std::string> out;
  for (int above = 0; above <= unary; ++above) {
    for (const auto& sub : e.binary_rooted(binary, unary - above)) {
      out.push_back(Enumerator::chain(above, sub));
    }
  }
  return out;
}

/// Comparison of the enumeration against an arrangement table; rows that
/// disagree are reported rather than silently reconciled.
struct ShapeReport {
  struct Row {
    int binary = 0;
    int unary = 0;
    long long table_count = 0;
    long long enumerated = 0;
    bool agrees = false;
  };
  std::vector<Row> rows;
  bool all_agree = true;
};

inline ShapeReport shape_census_report(int max_nodes = 7,
                                       const ArrangementTable& table = default_arrangements()) {
  ShapeReport report;
  for (int j = 1; j <= max_nodes; ++j) {
    for (int b = 0; b <= j - 1; ++b) {
      const int u = j - b;
      if (b > 0 && u < b + 1) continue;
      const auto it = table.find({b, u});
      if (it == table.end()) continue;
      ShapeReport::Row row;
      row.binary = b;
      row.unary = u;
      row.table_count = it->second;
      row.enumerated = static_cast<long long>(enumerate_shapes(b, u).size());
      row.agrees = row.table_count == row.enumerated;
      if (!row.agrees) report.all_agree = false;
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace actevo
