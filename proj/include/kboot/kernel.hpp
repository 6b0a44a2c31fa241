#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "kboot/error.hpp"
#include "kboot/mathfn.hpp"

namespace kboot {

enum class KernelFamily { gaussian };

struct KernelSpec {
  double bandwidth = 1.0;
  KernelFamily family = KernelFamily::gaussian;
};

struct KernelPoint {
  double distance = 0.0;
  double reward = 0.0;
};

inline double kernel_weight(const KernelSpec& spec, double distance) {
  const double u = distance / spec.bandwidth;
  return std::exp(-0.5 * u * u);
}

// Bandwidth for a neighbor set: Silverman's rule over the signed offsets {+d_i, -d_i}, the
// neighbors seen as a one-dimensional sample centered on the query.
inline double neighbor_bandwidth(std::span<const double> distances, double floor = 1e-6) {
  std::vector<double> offsets;
  offsets.reserve(2 * distances.size());
  for (double d : distances) {
    offsets.push_back(d);
    offsets.push_back(-d);
  }
  return silverman_bandwidth(offsets, floor);
}

// Nadaraya-Watson weighted mean of neighbor rewards.
//
// Weights are evaluated relative to the closest neighbor, exp(-(d_i^2 - d_min^2) / 2h^2), which
// leaves every weight ratio unchanged but keeps the nearest weight at 1 so a tiny bandwidth cannot
// underflow the denominator to zero.
inline double nw_estimate(const KernelSpec& spec, std::span<const KernelPoint> neighbors) {
  if (neighbors.empty()) throw DomainError("nw_estimate: empty neighbor set");
  if (!(spec.bandwidth > 0.0)) throw DomainError("nw_estimate: bandwidth must be positive");

  double d_min = neighbors.front().distance;
  double r_min = neighbors.front().reward;
  double r_max = r_min;
  for (const auto& p : neighbors) {
    d_min = std::min(d_min, p.distance);
    r_min = std::min(r_min, p.reward);
    r_max = std::max(r_max, p.reward);
  }
  const double inv_h2 = 1.0 / (spec.bandwidth * spec.bandwidth);
  double num = 0.0;
  double den = 0.0;
  for (const auto& p : neighbors) {
    const double w = std::exp(-0.5 * (p.distance - d_min) * (p.distance + d_min) * inv_h2);
    num += w * p.reward;
    den += w;
  }
  return std::clamp(num / den, r_min, r_max);
}

}  // namespace kboot
