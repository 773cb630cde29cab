#include <doctest.h>

#include <atomic>
#include <cmath>
#include <thread>

#include "actevo/expr.hpp"
#include "actevo/graph.hpp"
#include "actevo/mutate.hpp"
#include "actevo/rng.hpp"
#include "oracles.hpp"

using namespace actevo;

TEST_CASE("eval of basic expressions") {
  const auto g = parse_expr("mul(log_sigmoid(x), arcsinh(x))");
  CHECK(eval(g, 0.0) == 0.0);  // arcsinh(0) = 0

  // sigma(|x| - arctan(x)) decorated on three edges: value at 0 is sigma(0).
  const auto fig3 = parse_expr("p0(sigmoid(sub(p1(abs(x)), arctan(p2(x)))))");
  CHECK(fig3.param_count() == 3);
  CHECK(eval(fig3, unit_params(fig3), 0.0) == 0.5);

  const auto relu_g = parse_expr("relu(x)");
  CHECK(eval(relu_g, -2.0) == 0.0);
  CHECK(eval(relu_g, 3.5) == 3.5);
}

TEST_CASE("unit parameters are neutral") {
  Rng rng(11);
  for (int i = 0; i < 60; ++i) {
    ActivationGraph g = init_random(rng);
    for (int m = 0; m < 3; ++m) g = mutate(g, rng).first;
    const ActivationGraph pg = parameterize(g, rng);
    const ActivationGraph bare = strip_params(pg);
    const auto params = unit_params(pg);
    for (int j = 0; j < 20; ++j) {
      const double x = rng.uniform(-6.0, 6.0);
      const double a = eval(pg, params, x);
      const double b = eval(bare, x);
      if (std::isnan(a)) {
        CHECK(std::isnan(b));
      } else {
        CHECK(a == b);
      }
    }
  }
}

TEST_CASE("safe division mask zeroes value and both partials") {
  const auto g = parse_expr("safe_div(p0(x), sub(x, x))");
  auto params = unit_params(g);
  for (double x : {-3.0, 0.0, 1.25, 9.0}) {
    const auto r = eval_grad(g, params, x);
    CHECK(r.value == 0.0);
    CHECK(r.d_input == 0.0);
    CHECK(r.d_params[0] == 0.0);
  }
}

TEST_CASE("eval_grad pinned examples") {
  const auto ax = parse_expr("p0(identity(x))");  // alpha * x
  auto r = eval_grad(ax, unit_params(ax), 3.0);
  CHECK(r.value == 3.0);
  CHECK(r.d_input == 1.0);
  REQUIRE(r.d_params.size() == 1);
  CHECK(r.d_params[0] == 3.0);

  const auto relu_g = parse_expr("relu(x)");
  r = eval_grad(relu_g, {}, -1.0);
  CHECK(r.value == 0.0);
  CHECK(r.d_input == 0.0);
  CHECK(r.d_params.empty());
}

TEST_CASE("shared parameter index multiplies on every decorated edge") {
  // p0 on both inputs of mul: f(x) = (a x)(a x) = a^2 x^2.
  const auto g = parse_expr("mul(p0(x), p0(x))", 3);
  std::vector<double> params = {3.0};
  CHECK(eval(g, params, 2.0) == 36.0);
  const auto r = eval_grad(g, params, 2.0);
  CHECK(r.d_input == doctest::Approx(2.0 * 9.0 * 2.0));  // d/dx a^2 x^2
  CHECK(r.d_params[0] == doctest::Approx(2.0 * 3.0 * 4.0));  // d/da a^2 x^2
}

TEST_CASE("node_count and shape_signature") {
  auto g = parse_expr("relu(x)");
  CHECK(node_count(g) == 1);
  CHECK(shape_signature(g) == ShapeSignature{0, 1, 2});

  g = parse_expr("add(tanh(x), erf(x))");
  CHECK(node_count(g) == 3);
  CHECK(shape_signature(g) == ShapeSignature{1, 2, 5});

  g = parse_expr("tanh(tanh(x))");
  CHECK(node_count(g) == 2);
  CHECK(shape_signature(g) == ShapeSignature{0, 2, 3});

  // Parameter sites are decorations, not nodes.
  g = parse_expr("p0(tanh(p1(tanh(x))))");
  CHECK(node_count(g) == 2);
  CHECK(shape_signature(g) == ShapeSignature{0, 2, 3});
}

TEST_CASE("edge enumeration counts input edges plus the output edge") {
  const auto g = parse_expr("square(add(tanh(x), abs(erf(x))))");
  const auto sig = shape_signature(g);
  const auto edges = enumerate_edges(g);
  CHECK(static_cast<int>(edges.size()) == sig.edges);
  CHECK(edges.back().slot == kOutputSlot);
}

namespace {

// Walks the graph and reports the smallest distance to any operator kink
// encountered during evaluation, so gradient checks can stay on smooth
// ground.  Mirrors the forward recursion but is independent of the reverse
// sweep being tested.
double min_kink_margin(const ActivationGraph& g, std::span<const double> params, double x) {
  struct Walker {
    const ActivationGraph& g;
    std::span<const double> params;
    double x;
    double margin = 1e18;

    double factor(int consumer, int slot) {
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
        const double raw = c == -1 ? x : visit(c);
        in[s] = raw * factor(id, s);
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
          // Real pow is only smooth for positive bases; require headroom.
          m = in[0] - 1e-2 > 0.0 ? in[0] : 0.0;
          break;
        default:
          break;
      }
      margin = std::min(margin, m);
      return op_forward(node.op, in[0], in[1]);
    }
  };
  Walker w{g, params, x};
  w.visit(w.g.root);
  return w.margin;
}

}  // namespace

TEST_CASE("eval_grad matches finite differences on random graphs") {
  Rng rng(20200713);
  int checked = 0;
  while (checked < 200) {
    ActivationGraph g = init_random(rng);
    const int steps = static_cast<int>(rng.index(4));
    for (int m = 0; m < steps; ++m) g = mutate(g, rng).first;
    g = parameterize(g, rng);
    std::vector<double> params(static_cast<std::size_t>(g.param_count()));
    for (auto& p : params) p = rng.uniform(0.5, 1.5);

    const double x = rng.uniform(-3.0, 3.0);
    if (min_kink_margin(g, params, x) < 1e-3) continue;

    const auto r = eval_grad(g, params, x);
    if (!std::isfinite(r.value) || !std::isfinite(r.d_input)) continue;

    const double fd_x = oracles::central_diff(
        [&](double t) { return eval(g, params, t); }, x);
    if (!std::isfinite(fd_x)) continue;
    CHECK(oracles::rel_err(r.d_input, fd_x) <= 1e-4);

    bool ok = true;
    for (std::size_t j = 0; j < params.size(); ++j) {
      auto perturbed = params;
      const double fd_p = oracles::central_diff(
          [&](double t) {
            perturbed[j] = t;
            return eval(g, perturbed, x);
          },
          params[j]);
      if (!std::isfinite(fd_p)) {
        ok = false;
        break;
      }
      CHECK(oracles::rel_err(r.d_params[j], fd_p) <= 1e-4);
    }
    if (!ok) continue;
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("eval and eval_grad are safe under concurrent use") {
  // Graphs are immutable after construction; many evaluators may share one.
  const auto g = parse_expr("p0(sigmoid(sub(p1(abs(x)), arctan(p2(x)))))");
  const std::vector<double> params = {1.2, 0.8, 1.5};
  std::vector<double> expected;
  for (int i = 0; i < 200; ++i) {
    expected.push_back(eval(g, params, -4.0 + 0.04 * i));
  }
  std::vector<std::thread> threads;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&] {
      std::vector<double> dp(3);
      for (int pass = 0; pass < 50; ++pass) {
        for (int i = 0; i < 200; ++i) {
          const double x = -4.0 + 0.04 * i;
          if (eval(g, params, x) != expected[static_cast<std::size_t>(i)]) ++mismatches;
          double dx = 0.0;
          const double v = eval_grad_into(g, params, x, dx, dp);
          if (v != expected[static_cast<std::size_t>(i)]) ++mismatches;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  CHECK(mismatches.load() == 0);
}

TEST_CASE("eval is deterministic") {
  Rng rng(5);
  const auto graphs = sample_random_functions(20, rng);
  for (const auto& g : graphs) {
    const auto params = unit_params(g);
    for (double x : {-2.0, -0.5, 0.0, 1.0, 4.0}) {
      const double a = eval(g, params, x);
      const double b = eval(g, params, x);
      if (std::isnan(a)) {
        CHECK(std::isnan(b));
      } else {
        CHECK(a == b);
      }
    }
  }
}
