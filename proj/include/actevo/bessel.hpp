#pragma once

#include <cmath>

namespace actevo {

namespace detail {

// Ascending series for I0(x), all terms positive, used for |x| <= 25 where
// I0 stays far from overflow.  A&S 9.6.12.
inline double bessel_i0_series(double ax) {
  const double q = 0.25 * ax * ax;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 80; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (term < sum * 1e-18) break;
  }
  return sum;
}

// Ascending series for I1(x)/x * 2, i.e. I1(ax) = (ax/2) * this.  A&S 9.6.10.
inline double bessel_i1_series_factor(double ax) {
  const double q = 0.25 * ax * ax;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 80; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k + 1));
    sum += term;
    if (term < sum * 1e-18) break;
  }
  return sum;
}

// Asymptotic expansion of e^{-z} I_nu(z) for large z > 0.  A&S 9.7.1.
inline double bessel_ie_asymptotic(double mu4, double z) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 30; ++k) {
    const double m = 2.0 * k - 1.0;
    const double ratio = -(mu4 - m * m) / (8.0 * k * z);
    const double next = term * ratio;
    if (std::fabs(next) >= std::fabs(term)) break;  // past optimal truncation
    term = next;
    sum += term;
    if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
  }
  return sum / std::sqrt(6.283185307179586476925286766559 * z);
}

inline constexpr double kBesselSeriesCutoff = 25.0;

}  // namespace detail

/// Exponentially scaled modified Bessel function of order 0:
/// i0e(x) = e^{-|x|} I0(x).  Even in x.
inline double bessel_i0e(double x) {
  const double ax = std::fabs(x);
  if (!(ax == ax)) return x;  // NaN propagates
  if (ax <= detail::kBesselSeriesCutoff) {
    return std::exp(-ax) * detail::bessel_i0_series(ax);
  }
  if (std::isinf(ax)) return 0.0;
  return detail::bessel_ie_asymptotic(0.0, ax);
}

/// Exponentially scaled modified Bessel function of order 1:
/// i1e(x) = e^{-|x|} I1(x).  Odd in x.
inline double bessel_i1e(double x) {
  const double ax = std::fabs(x);
  if (!(ax == ax)) return x;
  double v;
  if (ax <= detail::kBesselSeriesCutoff) {
    v = std::exp(-ax) * 0.5 * ax * detail::bessel_i1_series_factor(ax);
  } else if (std::isinf(ax)) {
    v = 0.0;
  } else {
    v = detail::bessel_ie_asymptotic(4.0, ax);
  }
  return x < 0.0 ? -v : v;
}

/// d/dx i1e(x) = i0e(x) - i1e(x) * (sign(x) + 1/x), with the Taylor form
/// 1/2 - |x| near 0 where the direct formula is 0/0.
inline double bessel_i1e_derivative(double x) {
  const double ax = std::fabs(x);
  if (ax < 1e-6) return 0.5 - ax;
  const double s = x > 0.0 ? 1.0 : -1.0;
  return bessel_i0e(x) - bessel_i1e(x) * (s + 1.0 / x);
}

}  // namespace actevo
