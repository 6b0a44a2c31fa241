#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "kboot/error.hpp"

namespace kboot {

// Shape parameters of a beta distribution.
struct BetaParams {
  double a = 1.0;
  double b = 1.0;

  bool valid() const { return a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b); }
};

namespace detail {

// Continued fraction for I_x(a,b), evaluated with the modified Lentz method.
// Converges quickly for x < (a+1)/(a+b+2).
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  const int max_iter = 200 + static_cast<int>(20.0 * std::sqrt(std::max(a, b)));

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const double m2 = 2.0 * m;
    // even step
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    // odd step
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw DomainError("reg_inc_beta: continued fraction did not converge (a=" + std::to_string(a) +
                    ", b=" + std::to_string(b) + ", x=" + std::to_string(x) + ")");
}

}  // namespace detail

// Regularized incomplete beta function I_x(a, b).
inline double reg_inc_beta(BetaParams params, double x) {
  if (!params.valid()) throw DomainError("reg_inc_beta: shapes must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("reg_inc_beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;

  const double a = params.a;
  const double b = params.b;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  double result;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    result = front * detail::beta_continued_fraction(a, b, x) / a;
  } else {
    result = 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
  }
  return std::clamp(result, 0.0, 1.0);
}

// Linear-interpolation sample quantile (Hyndman-Fan type 7) of already sorted data.
inline double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw DomainError("sorted_quantile: empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double sample_stddev(std::span<const double> values) {
  const auto n = values.size();
  if (n < 2) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

// Silverman's rule of thumb, 0.9 * min(sd, IQR/1.34) * n^(-1/5), bounded below by `floor`.
inline double silverman_bandwidth(std::span<const double> values, double floor = 1e-6) {
  if (values.empty()) throw DomainError("silverman_bandwidth: empty sample");
  if (!(floor > 0.0)) throw DomainError("silverman_bandwidth: floor must be positive");
  if (values.size() == 1) return floor;

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = sorted_quantile(sorted, 0.75) - sorted_quantile(sorted, 0.25);
  const double spread = std::min(sample_stddev(sorted), iqr / 1.34);
  const double h = 0.9 * spread * std::pow(static_cast<double>(sorted.size()), -0.2);
  return std::max(floor, h);
}

}  // namespace kboot
