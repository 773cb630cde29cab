#include <doctest.h>

#include <cmath>
#include <set>

#include "actevo/expr.hpp"
#include "actevo/mutate.hpp"
#include "actevo/rng.hpp"

using namespace actevo;

namespace {

ActivationGraph random_walk_graph(Rng& rng, int max_steps = 5) {
  ActivationGraph g = init_random(rng);
  const int steps = static_cast<int>(rng.index(static_cast<std::size_t>(max_steps + 1)));
  for (int m = 0; m < steps; ++m) g = mutate(g, rng).first;
  return g;
}

bool same_eval(const ActivationGraph& a, const ActivationGraph& b, Rng& rng, int points) {
  for (int i = 0; i < points; ++i) {
    const double x = rng.uniform(-8.0, 8.0);
    const double va = eval(a, unit_params(a), x);
    const double vb = eval(b, unit_params(b), x);
    if (std::isnan(va) && std::isnan(vb)) continue;
    if (va != vb) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("init_random produces the two starting forms with equal odds") {
  Rng rng(42);
  int two = 0, three = 0;
  for (int i = 0; i < 10000; ++i) {
    const ActivationGraph g = init_random(rng);
    const int n = node_count(g);
    REQUIRE((n == 2 || n == 3));
    (n == 2 ? two : three)++;
    const auto sig = shape_signature(g);
    if (n == 2) {
      CHECK(sig == ShapeSignature{0, 2, 3});
    } else {
      CHECK(sig == ShapeSignature{1, 2, 5});
    }
  }
  // Binomial(10000, 1/2): 3 sigma is 150.
  CHECK(std::abs(two - 5000) < 150);
  CHECK(std::abs(three - 5000) < 150);

  Rng a(7), b(7);
  CHECK(print_expr(init_random(a)) == print_expr(init_random(b)));
}

TEST_CASE("figure-style mutation examples via the deterministic cores") {
  const auto parent = parse_expr("square(add(tanh(x), abs(erf(x))))");
  // Postorder ids: tanh=0, erf=1, abs=2, add=3, square=4.

  SUBCASE("insert swish on the tanh->add edge") {
    const auto child = insert_at(parent, OpKind::swish, Edge{3, 0});
    CHECK(print_expr(child) == "square(add(swish(tanh(x)), abs(erf(x))))");
  }
  SUBCASE("remove the addition, keeping the erf branch") {
    const auto child = remove_node(parent, 3, 1);
    CHECK(print_expr(child) == "square(abs(erf(x)))");
    CHECK(node_count(child) == 3);
  }
  SUBCASE("change addition to multiplication") {
    const auto child = change_node(parent, 3, OpKind::mul);
    CHECK(print_expr(child) == "square(mul(tanh(x), abs(erf(x))))");
  }
  SUBCASE("binary inserts are neutral: add uses a zero operand") {
    Rng rng(3);
    const auto child = insert_at(parent, OpKind::add, Edge{3, 0});
    CHECK(node_count(child) == node_count(parent) + 2);
    CHECK(same_eval(parent, child, rng, 100));
  }
  SUBCASE("binary inserts are neutral: max duplicates its input") {
    Rng rng(4);
    const auto child = insert_at(parent, OpKind::max, Edge{4, 0});
    // add subtree has 4 nodes, plus the max itself.
    CHECK(node_count(child) == node_count(parent) + 5);
    CHECK(same_eval(parent, child, rng, 100));
  }
  SUBCASE("unary insert on the output edge") {
    const auto child = insert_at(parent, OpKind::negate, Edge{4, kOutputSlot});
    CHECK(print_expr(child) == "negate(square(add(tanh(x), abs(erf(x)))))");
  }
}

TEST_CASE("binary insert neutrality holds for every binary operator and edge") {
  Rng rng(1001);
  for (int trial = 0; trial < 40; ++trial) {
    const ActivationGraph g = random_walk_graph(rng);
    const auto edges = enumerate_edges(g);
    for (int b = 0; b < kBinaryCount; ++b) {
      const auto op = static_cast<OpKind>(kUnaryCount + b);
      for (const Edge& e : edges) {
        const auto child = insert_at(g, op, e);
        CHECK(same_eval(g, child, rng, 10));
      }
    }
  }
}

TEST_CASE("mutation dispatch overrides") {
  SUBCASE("one-node graphs never receive a remove") {
    Rng rng(55);
    const auto g = parse_expr("tanh(x)");
    int change = 0, insert = 0, regen = 0;
    for (int i = 0; i < 10000; ++i) {
      const auto [child, kind] = mutate(g, rng);
      REQUIRE(kind != MutationKind::remove);
      if (kind == MutationKind::change) ++change;
      if (kind == MutationKind::insert) ++insert;
      if (kind == MutationKind::regenerate) ++regen;
      if (kind == MutationKind::change) {
        CHECK(node_count(child) == 1);
        CHECK(child.nodes[0].op != OpKind::tanh);
      }
    }
    // remove draws fold into change: expect about 1/2 change, 1/4 each other.
    CHECK(std::abs(change - 5000) < 160);
    CHECK(std::abs(insert - 2500) < 140);
    CHECK(std::abs(regen - 2500) < 140);
  }

  SUBCASE("graphs above seven nodes always receive a remove") {
    Rng rng(66);
    // Build an 8-node chain.
    ActivationGraph g = parse_expr(
        "tanh(tanh(tanh(tanh(tanh(tanh(tanh(tanh(x))))))))");
    REQUIRE(node_count(g) == 8);
    for (int i = 0; i < 2000; ++i) {
      const auto [child, kind] = mutate(g, rng);
      CHECK(kind == MutationKind::remove);
      CHECK(node_count(child) == 7);
    }
  }
}

TEST_CASE("mutation node-count arithmetic and the 8-node cap") {
  Rng rng(77);
  for (int i = 0; i < 4000; ++i) {
    const ActivationGraph parent = random_walk_graph(rng);
    const int before = node_count(parent);
    REQUIRE(before <= 8);
    const auto [child, kind] = mutate(parent, rng);
    const int after = node_count(child);
    CHECK(after <= 8);
    CHECK(after >= 1);
    switch (kind) {
      case MutationKind::insert:
        CHECK(after > before);
        break;
      case MutationKind::remove:
        CHECK(after < before);
        break;
      case MutationKind::change: {
        CHECK(after == before);
        CHECK(shape_signature(child) == shape_signature(parent));
        int diffs = 0;
        for (std::size_t n = 0; n < parent.nodes.size(); ++n) {
          if (parent.nodes[n].op != child.nodes[n].op) {
            ++diffs;
            CHECK(arity(parent.nodes[n].op) == arity(child.nodes[n].op));
          }
        }
        CHECK(diffs == 1);
        break;
      }
      case MutationKind::regenerate:
        CHECK(shape_signature(child) == shape_signature(parent));
        for (std::size_t n = 0; n < parent.nodes.size(); ++n) {
          CHECK(arity(parent.nodes[n].op) == arity(child.nodes[n].op));
        }
        break;
    }
  }
}

TEST_CASE("remove of a root binary keeping a bare x input yields identity") {
  const auto g = parse_expr("max(tanh(x), x)");
  const auto child = remove_node(g, 1, 1);  // ids: tanh=0, max=1; keep slot 1 (x)
  CHECK(print_expr(child) == "identity(x)");
}

TEST_CASE("binary remove discards one subtree entirely") {
  // add with subtrees of sizes 3 and 1 under a square: removing add drops
  // 1 + (3 or 1) nodes.
  const auto g = parse_expr("square(add(tanh(erf(abs(x))), selu(x)))");
  REQUIRE(node_count(g) == 6);
  const auto keep_first = remove_node(g, 4, 0);  // postorder: abs=0,erf=1,tanh=2,selu=3,add=4
  CHECK(node_count(keep_first) == 4);
  CHECK(print_expr(keep_first) == "square(tanh(erf(abs(x))))");
  const auto keep_second = remove_node(g, 4, 1);
  CHECK(node_count(keep_second) == 2);
  CHECK(print_expr(keep_second) == "square(selu(x))");
}

TEST_CASE("parameterize draws up to three distinct edges") {
  Rng rng(88);
  int histogram[4] = {0, 0, 0, 0};
  for (int i = 0; i < 4000; ++i) {
    const ActivationGraph g = random_walk_graph(rng);
    const ActivationGraph pg = parameterize(g, rng);
    const int k = pg.param_count();
    REQUIRE(k <= 3);
    REQUIRE(static_cast<std::size_t>(k) == pg.param_sites.size());
    ++histogram[k];
    std::set<std::pair<int, int>> edges;
    std::set<int> indices;
    for (const auto& s : pg.param_sites) {
      edges.insert({s.edge.consumer, s.edge.slot});
      indices.insert(s.index);
    }
    CHECK(edges.size() == pg.param_sites.size());
    CHECK(indices.size() == pg.param_sites.size());
    validate_graph(pg);
  }
  // k uniform over {0,1,2,3} (clamping is rare: graphs here have >= 2 edges
  // and only 1-node graphs have fewer than 3).
  for (int k = 0; k < 4; ++k) CHECK(histogram[k] > 700);
}

TEST_CASE("parameterize can reproduce the three-parameter decoration") {
  // sigma(|x| - arctan(x)) -> alpha sigma(beta |x| - arctan(gamma x))
  const auto g = parse_expr("sigmoid(sub(abs(x), arctan(x)))");
  // Postorder ids: abs=0, arctan=1, sub=2, sigmoid=3.
  const auto pg = parameterize_at(
      g, {Edge{3, kOutputSlot}, Edge{2, 0}, Edge{1, 0}});
  // Indices follow canonical edge order: x->arctan, abs->sub, output.
  CHECK(print_expr(pg) == "p2(sigmoid(sub(p1(abs(x)), arctan(p0(x)))))");
  CHECK(pg.param_count() == 3);
}

TEST_CASE("parameterize on a one-node graph clamps k to the edge count") {
  Rng rng(9);
  const auto g = parse_expr("tanh(x)");
  for (int i = 0; i < 500; ++i) {
    const auto pg = parameterize(g, rng);
    CHECK(pg.param_count() <= 2);
    validate_graph(pg);
  }
}

TEST_CASE("sampled random functions stay within the node cap") {
  Rng rng(314);
  const auto fns = sample_random_functions(500, rng);
  CHECK(fns.size() == 500);
  for (const auto& g : fns) {
    CHECK(node_count(g) <= 8);
    CHECK(g.param_count() <= 3);
    validate_graph(g);
  }
  Rng a(217), b(217);
  const auto fa = sample_random_functions(50, a);
  const auto fb = sample_random_functions(50, b);
  for (std::size_t i = 0; i < fa.size(); ++i) {
    CHECK(print_expr(fa[i]) == print_expr(fb[i]));
  }
}

TEST_CASE("mutation is deterministic given the seed") {
  Rng seeds(999);
  for (int i = 0; i < 200; ++i) {
    const std::uint64_t seed = seeds.next_u64();
    Rng a(seed), b(seed);
    const ActivationGraph ga = random_walk_graph(a);
    const ActivationGraph gb = random_walk_graph(b);
    CHECK(print_expr(ga) == print_expr(gb));
    const auto ca = mutate(ga, a);
    const auto cb = mutate(gb, b);
    CHECK(print_expr(ca.first) == print_expr(cb.first));
    CHECK(ca.second == cb.second);
  }
}
