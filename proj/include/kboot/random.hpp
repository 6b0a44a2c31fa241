#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "kboot/error.hpp"

namespace kboot {

// Every stochastic component takes a URBG by reference; runs use this engine.
using Rng = std::mt19937_64;

// Independent stream for (seed, stream id), so adding a stream never shifts another.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

template <class URBG>
double uniform01(URBG& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

template <class URBG>
std::size_t uniform_index(URBG& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// Index of the largest value among entries with mask[i] set (all entries when mask is empty);
// exact ties are broken uniformly at random. Draws from `rng` only when there is a tie.
template <class URBG>
std::size_t argmax_random_tie(std::span<const double> values, URBG& rng,
                              const std::vector<bool>& mask = {}) {
  std::vector<std::size_t> best;
  double best_value = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!mask.empty() && !mask[i]) continue;
    if (best.empty() || values[i] > best_value) {
      best.assign(1, i);
      best_value = values[i];
    } else if (values[i] == best_value) {
      best.push_back(i);
    }
  }
  if (best.empty()) throw DomainError("argmax: no candidates");
  if (best.size() == 1) return best.front();
  return best[uniform_index(rng, best.size())];
}

}  // namespace kboot
