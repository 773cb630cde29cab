#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>

#include "actevo/bessel.hpp"

namespace actevo {

/// The fixed operator vocabulary: 27 unary kinds followed by 7 binary kinds.
/// Every operator is total on the reals; non-finite outputs are legal values
/// and are detected downstream (training marks such candidates unstable).
enum class OpKind : std::uint8_t {
  // unary
  const0,
  const1,
  identity,
  negate,
  abs,
  safe_reciprocal,
  square,
  exp,
  expm1,
  erf,
  erfc,
  sinh,
  cosh,
  tanh,
  sigmoid,
  log_sigmoid,
  arcsinh,
  arctan,
  bessel_i0e,
  bessel_i1e,
  relu,
  elu,
  selu,
  swish,
  softplus,
  softsign,
  hard_sigmoid,
  // binary
  add,
  sub,
  mul,
  safe_div,
  pow,
  max,
  min,
};

inline constexpr int kUnaryCount = 27;
inline constexpr int kBinaryCount = 7;
inline constexpr int kOpCount = kUnaryCount + kBinaryCount;

inline constexpr double kSeluLambda = 1.05070098;
inline constexpr double kSeluAlpha = 1.67326324;

inline constexpr std::array<std::string_view, kOpCount> kOpNames = {
    "const0",      "const1",     "identity",   "negate",     "abs",
    "safe_reciprocal", "square", "exp",        "expm1",      "erf",
    "erfc",        "sinh",       "cosh",       "tanh",       "sigmoid",
    "log_sigmoid", "arcsinh",    "arctan",     "bessel_i0e", "bessel_i1e",
    "relu",        "elu",        "selu",       "swish",      "softplus",
    "softsign",    "hard_sigmoid",
    "add",         "sub",        "mul",        "safe_div",   "pow",
    "max",         "min",
};

constexpr int arity(OpKind k) {
  return static_cast<int>(k) < kUnaryCount ? 1 : 2;
}

constexpr bool is_unary(OpKind k) { return arity(k) == 1; }
constexpr bool is_binary(OpKind k) { return arity(k) == 2; }

constexpr std::string_view op_name(OpKind k) {
  return kOpNames[static_cast<std::size_t>(k)];
}

inline std::optional<OpKind> op_from_name(std::string_view name) {
  for (int i = 0; i < kOpCount; ++i) {
    if (kOpNames[static_cast<std::size_t>(i)] == name) {
      return static_cast<OpKind>(i);
    }
  }
  return std::nullopt;
}

namespace detail {

inline double sigmoid_fn(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log(1 + e^x) without overflow for large |x|.
inline double softplus_fn(double x) {
  return std::fmax(x, 0.0) + std::log1p(std::exp(-std::fabs(x)));
}

}  // namespace detail

/// Value of one operator.  Unary operators ignore `b`.
/// Conventions: safe_div(a, 0) = 0 and safe_reciprocal(0) = 0 exactly; pow is
/// real-valued std::pow and may return non-finite values.
inline double op_forward(OpKind k, double a, double b = 0.0) {
  switch (k) {
    case OpKind::const0: return 0.0;
    case OpKind::const1: return 1.0;
    case OpKind::identity: return a;
    case OpKind::negate: return -a;
    case OpKind::abs: return std::fabs(a);
    case OpKind::safe_reciprocal: return a == 0.0 ? 0.0 : 1.0 / a;
    case OpKind::square: return a * a;
    case OpKind::exp: return std::exp(a);
    case OpKind::expm1: return std::expm1(a);
    case OpKind::erf: return std::erf(a);
    case OpKind::erfc: return std::erfc(a);
    case OpKind::sinh: return std::sinh(a);
    case OpKind::cosh: return std::cosh(a);
    case OpKind::tanh: return std::tanh(a);
    case OpKind::sigmoid: return detail::sigmoid_fn(a);
    case OpKind::log_sigmoid: return -detail::softplus_fn(-a);
    case OpKind::arcsinh: return std::asinh(a);
    case OpKind::arctan: return std::atan(a);
    case OpKind::bessel_i0e: return bessel_i0e(a);
    case OpKind::bessel_i1e: return bessel_i1e(a);
    case OpKind::relu: return a > 0.0 ? a : 0.0;
    case OpKind::elu: return a >= 0.0 ? a : std::expm1(a);
    case OpKind::selu:
      return a >= 0.0 ? kSeluLambda * a : kSeluLambda * kSeluAlpha * std::expm1(a);
    case OpKind::swish: return a * detail::sigmoid_fn(a);
    case OpKind::softplus: return detail::softplus_fn(a);
    case OpKind::softsign: return a / (1.0 + std::fabs(a));
    case OpKind::hard_sigmoid: {
      const double t = 0.2 * a + 0.5;
      return t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
    }
    case OpKind::add: return a + b;
    case OpKind::sub: return a - b;
    case OpKind::mul: return a * b;
    case OpKind::safe_div: return b == 0.0 ? 0.0 : a / b;
    case OpKind::pow: return std::pow(a, b);
    case OpKind::max: return a >= b ? a : b;
    case OpKind::min: return a <= b ? a : b;
  }
  return 0.0;  // unreachable
}

/// Partial derivatives of one operator with respect to its inputs.
///
/// Tie-break conventions at kinks (fixed so gradient tests are reproducible):
///   relu'(0) = 0, abs'(0) = 0, hard_sigmoid' = 0 at the corners |x| = 2.5,
///   max/min ties attribute the full gradient to the first input,
///   safe_div and safe_reciprocal report zero partials at the masked
///   singularity, bessel_i0e'(0) = 0 (sign(0) = 0 in the reflection term).
inline void op_derivative(OpKind k, double a, double b, double& da, double& db) {
  db = 0.0;
  switch (k) {
    case OpKind::const0:
    case OpKind::const1: da = 0.0; return;
    case OpKind::identity: da = 1.0; return;
    case OpKind::negate: da = -1.0; return;
    case OpKind::abs: da = a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0); return;
    case OpKind::safe_reciprocal: da = a == 0.0 ? 0.0 : -1.0 / (a * a); return;
    case OpKind::square: da = 2.0 * a; return;
    case OpKind::exp: da = std::exp(a); return;
    case OpKind::expm1: da = std::exp(a); return;
    case OpKind::erf:
      da = 1.1283791670955125738961589031 * std::exp(-a * a);  // 2/sqrt(pi)
      return;
    case OpKind::erfc:
      da = -1.1283791670955125738961589031 * std::exp(-a * a);
      return;
    case OpKind::sinh: da = std::cosh(a); return;
    case OpKind::cosh: da = std::sinh(a); return;
    case OpKind::tanh: {
      const double t = std::tanh(a);
      da = 1.0 - t * t;
      return;
    }
    case OpKind::sigmoid: {
      const double s = detail::sigmoid_fn(a);
      da = s * (1.0 - s);
      return;
    }
    case OpKind::log_sigmoid: da = detail::sigmoid_fn(-a); return;
    case OpKind::arcsinh: da = 1.0 / std::sqrt(1.0 + a * a); return;
    case OpKind::arctan: da = 1.0 / (1.0 + a * a); return;
    case OpKind::bessel_i0e: {
      const double s = a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
      da = bessel_i1e(a) - s * bessel_i0e(a);
      return;
    }
    case OpKind::bessel_i1e: da = bessel_i1e_derivative(a); return;
    case OpKind::relu: da = a > 0.0 ? 1.0 : 0.0; return;
    case OpKind::elu: da = a >= 0.0 ? 1.0 : std::exp(a); return;
    case OpKind::selu:
      da = a >= 0.0 ? kSeluLambda : kSeluLambda * kSeluAlpha * std::exp(a);
      return;
    case OpKind::swish: {
      const double s = detail::sigmoid_fn(a);
      da = s + a * s * (1.0 - s);
      return;
    }
    case OpKind::softplus: da = detail::sigmoid_fn(a); return;
    case OpKind::softsign: {
      const double d = 1.0 + std::fabs(a);
      da = 1.0 / (d * d);
      return;
    }
    case OpKind::hard_sigmoid: da = (a > -2.5 && a < 2.5) ? 0.2 : 0.0; return;
    case OpKind::add: da = 1.0; db = 1.0; return;
    case OpKind::sub: da = 1.0; db = -1.0; return;
    case OpKind::mul: da = b; db = a; return;
    case OpKind::safe_div:
      if (b == 0.0) {
        da = 0.0;
        db = 0.0;
      } else {
        da = 1.0 / b;
        db = -a / (b * b);
      }
      return;
    case OpKind::pow:
      da = b * std::pow(a, b - 1.0);
      db = std::pow(a, b) * std::log(a);
      return;
    case OpKind::max:
      da = a >= b ? 1.0 : 0.0;
      db = a >= b ? 0.0 : 1.0;
      return;
    case OpKind::min:
      da = a <= b ? 1.0 : 0.0;
      db = a <= b ? 0.0 : 1.0;
      return;
  }
}

}  // namespace actevo
