#include <doctest.h>

#include <algorithm>
#include <set>

#include "actevo/census.hpp"
#include "actevo/io.hpp"

using namespace actevo;

TEST_CASE("census reproduces the published per-size counts exactly") {
  const auto census = count_space();
  REQUIRE(census.per_node_total.size() == 7);
  CHECK(census.per_node_total[0] == 108ULL);
  CHECK(census.per_node_total[1] == 5832ULL);
  CHECK(census.per_node_total[2] == 427923ULL);
  CHECK(census.per_node_total[3] == 31177872ULL);
  CHECK(census.per_node_total[4] == 2210558364ULL);
  CHECK(census.per_node_total[5] == 152059087566ULL);
  CHECK(census.per_node_total[6] == 10015741690785ULL);
  CHECK(census.total == 10170042948450ULL);
}

TEST_CASE("three-node breakdown matches the closed form") {
  const auto census = count_space(3);
  // 27^3 * 15 + 27^2 * 7 * 26
  CHECK(census.per_node_total[2] == 19683ULL * 15 + 729ULL * 7 * 26);
  CHECK(census.total == 108ULL + 5832ULL + 427923ULL);
}

TEST_CASE("the binomial cap is load-bearing: the uncapped sum diverges from size 3 on") {
  const auto capped = count_space();
  const auto uncapped = count_space(7, 27, 7, 3, default_arrangements(), /*uncapped=*/true);
  CHECK(uncapped.per_node_total[0] == capped.per_node_total[0]);  // e = 2 <= 3
  CHECK(uncapped.per_node_total[1] == capped.per_node_total[1]);  // e = 3 <= 3
  for (int j = 3; j <= 7; ++j) {
    CHECK(uncapped.per_node_total[static_cast<std::size_t>(j - 1)] !=
          capped.per_node_total[static_cast<std::size_t>(j - 1)]);
  }
}

TEST_CASE("a custom arrangements table flows through the row counts") {
  ArrangementTable table = default_arrangements();
  table[{3, 4}] = 5;  // what exhaustive enumeration finds
  const auto census = count_space(7, 27, 7, 3, table);
  CHECK(census.total != 10170042948450ULL);
  const auto base = count_space();
  // Only the (3,4) row changed: the delta is 4 extra arrangements' worth.
  unsigned long long row_one = 0;
  for (const auto& r : base.rows) {
    if (r.binary == 3 && r.unary == 4) row_one = r.functions;
  }
  CHECK(census.total == base.total + 4 * row_one);
}

TEST_CASE("missing arrangement rows are reported") {
  ArrangementTable table = default_arrangements();
  table.erase({3, 4});
  CHECK_THROWS_AS(count_space(7, 27, 7, 3, table), std::invalid_argument);
}

TEST_CASE("shape enumeration matches the table row by row") {
  CHECK(enumerate_shapes(0, 1).size() == 1);
  CHECK(enumerate_shapes(0, 7).size() == 1);
  CHECK(enumerate_shapes(1, 2).size() == 1);
  CHECK(enumerate_shapes(1, 3).size() == 3);
  CHECK(enumerate_shapes(1, 4).size() == 6);
  CHECK(enumerate_shapes(1, 5).size() == 10);
  CHECK(enumerate_shapes(1, 6).size() == 15);
  CHECK(enumerate_shapes(2, 3).size() == 2);
  CHECK(enumerate_shapes(2, 4).size() == 10);
  CHECK(enumerate_shapes(2, 5).size() == 30);
  // Structurally impossible rows are empty.
  CHECK(enumerate_shapes(2, 2).empty());
  CHECK(enumerate_shapes(1, 1).empty());
  CHECK(enumerate_shapes(0, 0).empty());
}

TEST_CASE("the two five-node skeletons with two binaries are the mirror pair") {
  const auto shapes = enumerate_shapes(2, 3);
  const std::set<std::string> got(shapes.begin(), shapes.end());
  const std::set<std::string> expected = {
      "b(b(u(x), u(x)), u(x))",
      "b(u(x), b(u(x), u(x)))",
  };
  CHECK(got == expected);
}

TEST_CASE("enumeration output stays within the grammar skeleton alphabet") {
  for (const auto& s : enumerate_shapes(2, 4)) {
    CHECK(s.find_first_not_of("bux(), ") == std::string::npos);
  }
  // Mirrors are distinct: every enumerated skeleton is unique.
  const auto shapes = enumerate_shapes(2, 5);
  const std::set<std::string> unique(shapes.begin(), shapes.end());
  CHECK(unique.size() == shapes.size());
}

TEST_CASE("the (3,4) discrepancy is surfaced, not silently reconciled") {
  CHECK(enumerate_shapes(3, 4).size() == 5);
  const auto report = shape_census_report();
  CHECK(!report.all_agree);
  int disagreements = 0;
  for (const auto& row : report.rows) {
    if (!row.agrees) {
      ++disagreements;
      CHECK(row.binary == 3);
      CHECK(row.unary == 4);
      CHECK(row.table_count == 1);
      CHECK(row.enumerated == 5);
    }
  }
  CHECK(disagreements == 1);
  CHECK(shape_report_text(report).find("DISCREPANCY") != std::string::npos);
}
