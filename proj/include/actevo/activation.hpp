#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "actevo/expr.hpp"
#include "actevo/graph.hpp"

namespace actevo {

/// A scalar activation function with (possibly zero) learnable parameters,
/// pluggable into the trainer.  Candidate graphs, the baseline zoo, and the
/// trivially-scaled wrappers all present themselves through this interface.
struct ActivationDef {
  std::string name;
  int param_count = 0;
  std::vector<double> init;  // initial parameter values, size param_count

  /// f(x, params)
  std::function<double(double, std::span<const double>)> value;
  /// Returns f(x, params); writes df/dx into d_input and df/dparam_i into
  /// d_params (length param_count).
  std::function<double(double, std::span<const double>, double&, std::span<double>)> grad;

  /// Canonical-grammar form, where the function is expressible as a graph.
  std::optional<ActivationGraph> graph;
};

/// Wraps a candidate graph; parameters are the graph's alpha/beta/gamma,
/// initialized to 1.
inline ActivationDef graph_activation(const ActivationGraph& g) {
  ActivationDef def;
  def.name = print_expr(g);
  def.param_count = g.param_count();
  def.init.assign(static_cast<std::size_t>(def.param_count), 1.0);
  def.graph = g;
  ActivationGraph shared = g;
  def.value = [shared](double x, std::span<const double> p) { return eval(shared, p, x); };
  def.grad = [shared](double x, std::span<const double> p, double& dx,
                      std::span<double> dp) {
    return eval_grad_into(shared, p, x, dx, dp);
  };
  return def;
}

/// The trivial parameterization alpha * f(beta * x): two fresh parameters
/// initialized to 1, with any parameters of the wrapped function kept
/// trainable after them.
inline ActivationDef wrap_scaled(const ActivationDef& fn) {
  ActivationDef def;
  def.name = "scaled(" + fn.name + ")";
  def.param_count = 2 + fn.param_count;
  def.init = {1.0, 1.0};
  def.init.insert(def.init.end(), fn.init.begin(), fn.init.end());
  auto inner_value = fn.value;
  auto inner_grad = fn.grad;
  def.value = [inner_value](double x, std::span<const double> p) {
    return p[0] * inner_value(p[1] * x, p.subspan(2));
  };
  def.grad = [inner_grad](double x, std::span<const double> p, double& dx,
                          std::span<double> dp) {
    double d_inner = 0.0;
    const double v = inner_grad(p[1] * x, p.subspan(2), d_inner, dp.subspan(2));
    dp[0] = v;
    dp[1] = p[0] * d_inner * x;
    dx = p[0] * d_inner * p[1];
    for (std::size_t i = 2; i < dp.size(); ++i) dp[i] *= p[0];
    return p[0] * v;
  };
  return def;
}

}  // namespace actevo
