#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "actevo/activation.hpp"
#include "actevo/expr.hpp"

namespace actevo {

inline constexpr std::array<double, 6> kPauNumeratorInit = {
    0.02979246, 0.61837738, 2.32335207, 3.05202660, 1.48548002, 0.25103717};
inline constexpr std::array<double, 4> kPauDenominatorInit = {
    1.14201226, 4.39322834, 0.87154450, 0.34720652};
inline constexpr std::array<double, 4> kSplashBreakpoints = {0.0, 1.0, 2.0, 2.5};
inline constexpr double kPreluInitAlpha = 0.25;
inline constexpr double kLeakyReluSlope = 0.01;

namespace detail {

inline ActivationDef fixed_activation(std::string name, double (*value)(double),
                                      double (*deriv)(double), const char* graph_text) {
  ActivationDef def;
  def.name = std::move(name);
  def.param_count = 0;
  def.value = [value](double x, std::span<const double>) { return value(x); };
  def.grad = [value, deriv](double x, std::span<const double>, double& dx,
                            std::span<double>) {
    dx = deriv(x);
    return value(x);
  };
  if (graph_text != nullptr) def.graph = parse_expr(graph_text);
  return def;
}

inline double sigma(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double sp(double x) { return std::fmax(x, 0.0) + std::log1p(std::exp(-std::fabs(x))); }

inline double relu_v(double x) { return x > 0.0 ? x : 0.0; }
inline double relu_d(double x) { return x > 0.0 ? 1.0 : 0.0; }

inline double elish_v(double x) { return x >= 0.0 ? x * sigma(x) : std::expm1(x) * sigma(x); }
inline double elish_d(double x) {
  const double s = sigma(x);
  if (x >= 0.0) return s + x * s * (1.0 - s);
  const double e = std::exp(x);
  return e * s + (e - 1.0) * s * (1.0 - s);
}

inline double elu_v(double x) { return x >= 0.0 ? x : std::expm1(x); }
inline double elu_d(double x) { return x >= 0.0 ? 1.0 : std::exp(x); }

// tanh approximation of the Gaussian CDF form.
inline double gelu_v(double x) {
  const double c = 0.7978845608028653558798921198687;  // sqrt(2/pi)
  return 0.5 * x * (1.0 + std::tanh(c * (x + 0.044715 * x * x * x)));
}
inline double gelu_d(double x) {
  const double c = 0.7978845608028653558798921198687;
  const double t = std::tanh(c * (x + 0.044715 * x * x * x));
  return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * c * (1.0 + 3.0 * 0.044715 * x * x);
}

inline double hard_sigmoid_v(double x) {
  const double t = 0.2 * x + 0.5;
  return t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
}
inline double hard_sigmoid_d(double x) { return (x > -2.5 && x < 2.5) ? 0.2 : 0.0; }

inline double leaky_v(double x) { return x >= 0.0 ? x : kLeakyReluSlope * x; }
inline double leaky_d(double x) { return x >= 0.0 ? 1.0 : kLeakyReluSlope; }

inline double mish_v(double x) { return x * std::tanh(sp(x)); }
inline double mish_d(double x) {
  const double t = std::tanh(sp(x));
  return t + x * (1.0 - t * t) * sigma(x);
}

inline double selu_v(double x) {
  return x >= 0.0 ? kSeluLambda * x : kSeluLambda * kSeluAlpha * std::expm1(x);
}
inline double selu_d(double x) {
  return x >= 0.0 ? kSeluLambda : kSeluLambda * kSeluAlpha * std::exp(x);
}

inline double sigmoid_d(double x) {
  const double s = sigma(x);
  return s * (1.0 - s);
}

inline double softsign_v(double x) { return x / (1.0 + std::fabs(x)); }
inline double softsign_d(double x) {
  const double d = 1.0 + std::fabs(x);
  return 1.0 / (d * d);
}

inline double swish_v(double x) { return x * sigma(x); }
inline double swish_d(double x) {
  const double s = sigma(x);
  return s + x * s * (1.0 - s);
}

inline double tanh_d(double x) {
  const double t = std::tanh(x);
  return 1.0 - t * t;
}

}  // namespace detail

inline std::vector<std::string> baseline_names() {
  return {"relu",    "elish",    "elu",     "gelu",   "hard_sigmoid", "leaky_relu",
          "mish",    "selu",     "sigmoid", "softplus", "softsign",   "swish",
          "tanh",    "prelu",    "pswish",  "apl",    "pau",          "splash"};
}

/// The baseline activation zoo: fixed functions, the two parametric ones
/// (PReLU, PSwish), and the three learnable families (APL, PAU, SPLASH),
/// each pluggable into the trainer under any granularity.
inline ActivationDef baseline(const std::string& name) {
  using namespace detail;
  if (name == "relu") return fixed_activation("relu", relu_v, relu_d, "relu(x)");
  if (name == "elish") return fixed_activation("elish", elish_v, elish_d, nullptr);
  if (name == "elu") return fixed_activation("elu", elu_v, elu_d, "elu(x)");
  if (name == "gelu") return fixed_activation("gelu", gelu_v, gelu_d, nullptr);
  if (name == "hard_sigmoid") {
    return fixed_activation("hard_sigmoid", hard_sigmoid_v, hard_sigmoid_d, "hard_sigmoid(x)");
  }
  if (name == "leaky_relu") return fixed_activation("leaky_relu", leaky_v, leaky_d, nullptr);
  if (name == "mish") return fixed_activation("mish", mish_v, mish_d, "mul(x, tanh(softplus(x)))");
  if (name == "selu") return fixed_activation("selu", selu_v, selu_d, "selu(x)");
  if (name == "sigmoid") {
    return fixed_activation("sigmoid", [](double x) { return sigma(x); }, sigmoid_d, "sigmoid(x)");
  }
  if (name == "softplus") {
    return fixed_activation("softplus", [](double x) { return sp(x); },
                            [](double x) { return sigma(x); }, "softplus(x)");
  }
  if (name == "softsign") {
    return fixed_activation("softsign", softsign_v, softsign_d, "softsign(x)");
  }
  if (name == "swish") return fixed_activation("swish", swish_v, swish_d, "swish(x)");
  if (name == "tanh") {
    return fixed_activation("tanh", [](double x) { return std::tanh(x); }, tanh_d, "tanh(x)");
  }

  if (name == "prelu") {
    ActivationDef def;
    def.name = "prelu";
    def.param_count = 1;
    def.init = {kPreluInitAlpha};
    def.value = [](double x, std::span<const double> p) { return x >= 0.0 ? x : p[0] * x; };
    def.grad = [](double x, std::span<const double> p, double& dx, std::span<double> dp) {
      dx = x >= 0.0 ? 1.0 : p[0];
      dp[0] = x >= 0.0 ? 0.0 : x;
      return x >= 0.0 ? x : p[0] * x;
    };
    return def;
  }
  if (name == "pswish") {
    ActivationDef def;
    def.name = "pswish";
    def.param_count = 1;
    def.init = {1.0};
    def.value = [](double x, std::span<const double> p) { return x * sigma(p[0] * x); };
    def.grad = [](double x, std::span<const double> p, double& dx, std::span<double> dp) {
      const double s = sigma(p[0] * x);
      const double ds = s * (1.0 - s);
      dx = s + x * p[0] * ds;
      dp[0] = x * x * ds;
      return x * s;
    };
    return def;
  }
  if (name == "apl") {
    // max{0,x} + sum_s a_s max{0, -x + b_s}, S = 7; a and b both learn.
    ActivationDef def;
    def.name = "apl";
    def.param_count = 14;  // a_1..a_7 then b_1..b_7
    def.init.assign(14, 0.0);
    def.value = [](double x, std::span<const double> p) {
      double v = relu_v(x);
      for (int s = 0; s < 7; ++s) {
        v += p[static_cast<std::size_t>(s)] * relu_v(-x + p[static_cast<std::size_t>(7 + s)]);
      }
      return v;
    };
    def.grad = [](double x, std::span<const double> p, double& dx, std::span<double> dp) {
      double v = relu_v(x);
      dx = relu_d(x);
      for (int s = 0; s < 7; ++s) {
        const double a = p[static_cast<std::size_t>(s)];
        const double hinge = -x + p[static_cast<std::size_t>(7 + s)];
        const bool active = hinge > 0.0;
        v += a * (active ? hinge : 0.0);
        dx += active ? -a : 0.0;
        dp[static_cast<std::size_t>(s)] = active ? hinge : 0.0;
        dp[static_cast<std::size_t>(7 + s)] = active ? a : 0.0;
      }
      return v;
    };
    return def;
  }
  if (name == "pau") {
    // Rational of degree (5, 4) initialized to approximate Leaky ReLU (0.01).
    ActivationDef def;
    def.name = "pau";
    def.param_count = 10;  // a_0..a_5 then b_1..b_4
    def.init.assign(kPauNumeratorInit.begin(), kPauNumeratorInit.end());
    def.init.insert(def.init.end(), kPauDenominatorInit.begin(), kPauDenominatorInit.end());
    def.value = [](double x, std::span<const double> p) {
      double num = 0.0, xi = 1.0;
      for (int j = 0; j <= 5; ++j) {
        num += p[static_cast<std::size_t>(j)] * xi;
        xi *= x;
      }
      double s = 0.0;
      xi = x;
      for (int k = 1; k <= 4; ++k) {
        s += p[static_cast<std::size_t>(5 + k)] * xi;
        xi *= x;
      }
      return num / (1.0 + std::fabs(s));
    };
    def.grad = [](double x, std::span<const double> p, double& dx, std::span<double> dp) {
      double num = 0.0, dnum = 0.0, xi = 1.0;
      for (int j = 0; j <= 5; ++j) {
        num += p[static_cast<std::size_t>(j)] * xi;
        if (j < 5) dnum += (j + 1) * p[static_cast<std::size_t>(j + 1)] * xi;
        xi *= x;
      }
      double s = 0.0, ds = 0.0;
      xi = 1.0;
      for (int k = 1; k <= 4; ++k) {
        ds += k * p[static_cast<std::size_t>(5 + k)] * xi;
        xi *= x;
        s += p[static_cast<std::size_t>(5 + k)] * xi;
      }
      const double sign_s = s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0);
      const double den = 1.0 + std::fabs(s);
      dx = (dnum * den - num * sign_s * ds) / (den * den);
      xi = 1.0;
      for (int j = 0; j <= 5; ++j) {
        dp[static_cast<std::size_t>(j)] = xi / den;
        xi *= x;
      }
      xi = x;
      for (int k = 1; k <= 4; ++k) {
        dp[static_cast<std::size_t>(5 + k)] = -num * sign_s * xi / (den * den);
        xi *= x;
      }
      return num / den;
    };
    return def;
  }
  if (name == "splash") {
    // sum_s a+_s max{0, x - b_s} + a-_s max{0, -x - b_s}, b = [0, 1, 2, 2.5]
    // fixed, initialized to max{0, x} via a+_1 = 1.
    ActivationDef def;
    def.name = "splash";
    def.param_count = 8;  // a+_1..a+_4 then a-_1..a-_4
    def.init = {1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    def.value = [](double x, std::span<const double> p) {
      double v = 0.0;
      for (int s = 0; s < 4; ++s) {
        v += p[static_cast<std::size_t>(s)] * relu_v(x - kSplashBreakpoints[static_cast<std::size_t>(s)]);
        v += p[static_cast<std::size_t>(4 + s)] *
             relu_v(-x - kSplashBreakpoints[static_cast<std::size_t>(s)]);
      }
      return v;
    };
    def.grad = [](double x, std::span<const double> p, double& dx, std::span<double> dp) {
      double v = 0.0;
      dx = 0.0;
      for (int s = 0; s < 4; ++s) {
        const double hp = x - kSplashBreakpoints[static_cast<std::size_t>(s)];
        const double hm = -x - kSplashBreakpoints[static_cast<std::size_t>(s)];
        v += p[static_cast<std::size_t>(s)] * relu_v(hp) +
             p[static_cast<std::size_t>(4 + s)] * relu_v(hm);
        dx += (hp > 0.0 ? p[static_cast<std::size_t>(s)] : 0.0) -
              (hm > 0.0 ? p[static_cast<std::size_t>(4 + s)] : 0.0);
        dp[static_cast<std::size_t>(s)] = relu_v(hp);
        dp[static_cast<std::size_t>(4 + s)] = relu_v(hm);
      }
      return v;
    };
    return def;
  }

  std::string valid;
  for (const auto& n : baseline_names()) {
    if (!valid.empty()) valid += ", ";
    valid += n;
  }
  throw std::invalid_argument("unknown baseline '" + name + "'; valid names: " + valid);
}

}  // namespace actevo
