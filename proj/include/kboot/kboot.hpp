#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kboot/error.hpp"
#include "kboot/kernel.hpp"
#include "kboot/mathfn.hpp"
#include "kboot/neighbors.hpp"
#include "kboot/random.hpp"

namespace kboot {

struct KBootConfig {
  std::size_t K = 100;     // nearest neighbors used by the reward estimate
  double epsilon = 0.01;   // tolerated probability of missing an influential sample
  std::uint64_t seed = 0;  // seeds the run's policy stream
  double bandwidth_floor = 1e-6;

  void validate() const {
    if (K < 1) throw DomainError("KBootConfig: K must be at least 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("KBootConfig: epsilon must be in (0,1)");
  }
};

struct RewardEstimate {
  std::size_t arm = 0;
  double value = 0.0;
};

// Probability that all K nearest neighbors of a size-N bootstrap resample of the pool come from
// the pool's own top-k' neighbors: P(Binomial(N, k'/N) >= K) = I_{k'/N}(K, N-K+1).
inline double influential_coverage(std::size_t pool_size, std::size_t K, std::size_t k_prime) {
  const double N = static_cast<double>(pool_size);
  const double x = std::min(1.0, static_cast<double>(k_prime) / N);
  return reg_inc_beta({static_cast<double>(K), N - static_cast<double>(K) + 1.0}, x);
}

// Smallest k' in [K, N] whose coverage exceeds 1 - epsilon.
inline std::size_t influential_size(std::size_t pool_size, std::size_t K, double epsilon) {
  if (K < 1 || pool_size <= K) throw DomainError("influential_size: requires N > K >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("influential_size: epsilon must be in (0,1)");

  // coverage is nondecreasing in k' and equals 1 at k' = N
  std::size_t lo = K;
  std::size_t hi = pool_size;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (influential_coverage(pool_size, K, mid) > 1.0 - epsilon) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

// Arm with the largest estimate; exact ties are broken uniformly at random.
template <class URBG>
std::size_t select_arm(std::span<const RewardEstimate> estimates, URBG& rng) {
  if (estimates.empty()) throw DomainError("select_arm: no estimates");
  std::vector<double> values;
  values.reserve(estimates.size());
  for (const auto& e : estimates) values.push_back(e.value);
  return estimates[argmax_random_tie(std::span<const double>(values), rng)].arm;
}

// Nonparametric contextual bandit: per-arm k-NN Nadaraya-Watson reward model explored by
// bootstrap Thompson sampling over an influential neighborhood of the query.
//
// Draw order for one arm: the pseudo-sample anchor, then the bootstrap indices in order (or a
// single uniform draw when the arm has no history). Arms are scored in index order.
template <NeighborSearch Search = ExactSearch>
class KBoot {
 public:
  KBoot(std::size_t arms, KBootConfig config, Search search = {})
      : config_(config), search_(std::move(search)), pools_(arms), influential_(arms, 0) {
    config_.validate();
  }

  std::size_t arm_count() const { return pools_.size(); }
  const KBootConfig& config() const { return config_; }
  const ArmPool& pool(std::size_t arm) const { return pools_.at(arm); }

  // Influential neighborhood size currently used for `arm` (0 while N_m <= K).
  std::size_t influential_count(std::size_t arm) const { return influential_.at(arm); }

  template <class URBG>
  RewardEstimate sample_arm_reward(std::size_t arm, std::span<const double> query, URBG& rng) const {
    const ArmPool& pool = pools_.at(arm);
    if (pool.empty()) return {arm, uniform01(rng)};

    std::vector<KernelPoint> local;
    if (pool.size() > config_.K) {
      for (const auto& n : search_(pool, query, influential_[arm])) {
        local.push_back({n.distance, pool[n.index].reward});
      }
    } else {
      local.reserve(pool.size() + 2);
      for (const auto& s : pool.samples()) {
        local.push_back({euclidean_distance(s.context, query), s.reward});
      }
    }

    // pseudo-samples share the anchor's context, hence its distance
    const double anchor_distance = local[uniform_index(rng, local.size())].distance;
    local.push_back({anchor_distance, 0.0});
    local.push_back({anchor_distance, 1.0});

    std::vector<KernelPoint> resample;
    resample.reserve(local.size());
    for (std::size_t i = 0; i < local.size(); ++i) {
      resample.push_back(local[uniform_index(rng, local.size())]);
    }
    const std::size_t take = std::min(config_.K, resample.size());
    std::stable_sort(resample.begin(), resample.end(),
                     [](const KernelPoint& a, const KernelPoint& b) { return a.distance < b.distance; });
    resample.resize(take);

    std::vector<double> distances;
    distances.reserve(take);
    for (const auto& p : resample) distances.push_back(p.distance);
    const KernelSpec kernel{neighbor_bandwidth(distances, config_.bandwidth_floor)};
    return {arm, nw_estimate(kernel, resample)};
  }

  template <class URBG>
  double estimate(std::size_t arm, std::span<const double> query, URBG& rng) const {
    return sample_arm_reward(arm, query, rng).value;
  }

  // One full round without eligibility filtering: score every arm, return the argmax.
  template <class URBG>
  std::size_t choose(std::span<const double> query, URBG& rng) const {
    std::vector<RewardEstimate> estimates;
    estimates.reserve(pools_.size());
    for (std::size_t m = 0; m < pools_.size(); ++m) estimates.push_back(sample_arm_reward(m, query, rng));
    return select_arm(std::span<const RewardEstimate>(estimates), rng);
  }

  void update(std::size_t arm, std::span<const double> query, double reward) {
    ArmPool& pool = pools_.at(arm);
    pool.append({ContextVector(query.begin(), query.end()), reward});
    influential_[arm] =
        pool.size() > config_.K ? influential_size(pool.size(), config_.K, config_.epsilon) : 0;
  }

  std::size_t add_arm() {
    pools_.emplace_back();
    influential_.push_back(0);
    return pools_.size() - 1;
  }

  void remove_arm(std::size_t arm) {
    if (arm >= pools_.size()) throw DomainError("remove_arm: index out of range");
    pools_.erase(pools_.begin() + static_cast<std::ptrdiff_t>(arm));
    influential_.erase(influential_.begin() + static_cast<std::ptrdiff_t>(arm));
  }

 private:
  KBootConfig config_;
  Search search_;
  std::vector<ArmPool> pools_;
  std::vector<std::size_t> influential_;
};

}  // namespace kboot
