#pragma once

#include <concepts>
#include <cstddef>
#include <span>
#include <vector>

#include "kboot/random.hpp"

namespace kboot {

// A bandit with one independent reward model per arm. `estimate` returns the value the policy
// maximizes (a Thompson draw for K-Boot, an upper confidence bound for LinUCB).
template <class B>
concept ArmIndependentBandit = requires(B& b, const B& cb, std::size_t arm, std::span<const double> x,
                                        Rng& rng, double r) {
  { cb.arm_count() } -> std::convertible_to<std::size_t>;
  { cb.estimate(arm, x, rng) } -> std::convertible_to<double>;
  b.update(arm, x, r);
};

// Scores the arms allowed by `mask` (all arms when empty) in index order and returns the argmax,
// ties uniform. `context_of(arm)` yields the context the arm's model sees.
template <ArmIndependentBandit Bandit, class ContextOf, class URBG>
std::size_t choose_arm(const Bandit& bandit, ContextOf&& context_of, const std::vector<bool>& mask,
                       URBG& rng) {
  const std::size_t M = bandit.arm_count();
  std::vector<double> values(M, 0.0);
  for (std::size_t m = 0; m < M; ++m) {
    if (!mask.empty() && !mask[m]) continue;
    values[m] = bandit.estimate(m, context_of(m), rng);
  }
  return argmax_random_tie(std::span<const double>(values), rng, mask);
}

}  // namespace kboot
