#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "kboot/kboot.hpp"

using namespace kboot;

namespace {

ContextVector random_context(Rng& rng, std::size_t d) {
  std::normal_distribution<double> normal;
  ContextVector x(d);
  for (auto& v : x) v = normal(rng);
  return x;
}

}  // namespace

TEST(InfluentialSize, AtLeastK) {
  for (std::size_t N : {11u, 50u, 300u, 5000u}) {
    for (std::size_t K : {1u, 5u, 10u}) {
      for (double eps : {0.5, 0.1, 0.01, 1e-6}) EXPECT_GE(influential_size(N, K, eps), K);
    }
  }
}

TEST(InfluentialSize, BoundedByTwiceK) {
  for (std::size_t N : {1000u, 10000u}) {
    for (std::size_t K : {20u, 50u, 100u}) EXPECT_LE(influential_size(N, K, 0.01), 2 * K) << N << " " << K;
  }
}

TEST(InfluentialSize, SmallestSatisfying) {
  for (std::size_t N : {30u, 200u, 2000u}) {
    for (std::size_t K : {1u, 3u, 20u}) {
      const auto kp = influential_size(N, K, 0.01);
      EXPECT_GT(influential_coverage(N, K, kp), 0.99);
      if (kp > K) {
        EXPECT_LE(influential_coverage(N, K, kp - 1), 0.99);
      }
    }
  }
}

TEST(InfluentialSize, MonotoneInEpsilonAndK) {
  for (std::size_t N : {120u, 1000u}) {
    std::size_t prev_k = 0;
    for (std::size_t K = 1; K < 100; K += 7) {
      const auto kp = influential_size(N, K, 0.05);
      EXPECT_GE(kp, prev_k);
      prev_k = kp;
      std::size_t prev_e = N;
      for (double eps : {1e-4, 1e-3, 0.01, 0.1, 0.3, 0.9}) {
        const auto v = influential_size(N, K, eps);
        EXPECT_LE(v, prev_e);
        prev_e = v;
      }
    }
  }
}

TEST(InfluentialSize, FullPoolAlwaysSuffices) {
  for (double eps : {1e-9, 0.01, 0.5}) EXPECT_GE(influential_coverage(400, 30, 400), 1.0 - eps);
}

TEST(InfluentialSize, Preconditions) {
  EXPECT_THROW(influential_size(10, 10, 0.01), DomainError);
  EXPECT_THROW(influential_size(10, 0, 0.01), DomainError);
  EXPECT_THROW(influential_size(10, 3, 0.0), DomainError);
  EXPECT_THROW(influential_size(10, 3, 1.0), DomainError);
}

TEST(InfluentialSize, BootstrapMembershipOracle) {
  // Resample the ranks 0..N-1 with replacement; the K nearest members of the resample lie in the
  // original top-k' iff their largest rank is below k'.
  const std::size_t N = 50, K = 5;
  const double eps = 0.01;
  const int reps = 100000;
  Rng rng = make_rng(77);
  std::vector<int> need(N + 1, 0);
  std::vector<std::size_t> draw(N);
  for (int r = 0; r < reps; ++r) {
    for (auto& v : draw) v = uniform_index(rng, N);
    std::nth_element(draw.begin(), draw.begin() + (K - 1), draw.end());
    ++need[draw[K - 1] + 1];
  }
  std::size_t mc = 0;
  int covered = 0;
  for (std::size_t k = 1; k <= N; ++k) {
    covered += need[k];
    if (covered > (1.0 - eps) * reps) {
      mc = k;
      break;
    }
  }
  const auto kp = influential_size(N, K, eps);
  EXPECT_LE(std::abs(static_cast<long>(kp) - static_cast<long>(mc)), 1) << "formula " << kp << " mc " << mc;
}

TEST(SampleArmReward, ColdStartUniform) {
  KBoot<> kb(1, {});
  Rng rng = make_rng(3);
  const ContextVector q{0.0, 1.0};
  std::vector<double> v;
  for (int i = 0; i < 10000; ++i) v.push_back(kb.sample_arm_reward(0, q, rng).value);
  std::sort(v.begin(), v.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    ks = std::max({ks, std::abs(v[i] - double(i) / v.size()), std::abs(v[i] - double(i + 1) / v.size())});
  }
  EXPECT_LT(ks, 1.63 / std::sqrt(double(v.size())));
  EXPECT_GE(v.front(), 0.0);
  EXPECT_LE(v.back(), 1.0);
}

TEST(SampleArmReward, ConstantRewardPool) {
  KBoot<> kb(1, {});
  Rng data = make_rng(11);
  for (int i = 0; i < 500; ++i) kb.update(0, random_context(data, 3), 0.5);
  Rng rng = make_rng(12);
  double sum = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const auto q = random_context(data, 3);
    const double v = kb.sample_arm_reward(0, q, rng).value;
    ASSERT_GE(v, 0.0);
    ASSERT_LE(v, 1.0);
    sum += v;
  }
  EXPECT_NEAR(sum / draws, 0.5, 0.05);
}

TEST(SampleArmReward, Deterministic) {
  KBoot<> kb(2, {.K = 10});
  Rng data = make_rng(1);
  for (int i = 0; i < 60; ++i) kb.update(i % 2, random_context(data, 4), std::sin(i));
  const auto q = random_context(data, 4);
  Rng a = make_rng(9), b = make_rng(9);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(kb.sample_arm_reward(i % 2, q, a).value, kb.sample_arm_reward(i % 2, q, b).value);
  }
}

TEST(SampleArmReward, UsesInfluentialSetAboveK) {
  KBoot<> kb(1, {.K = 10});
  Rng data = make_rng(2);
  for (int i = 0; i < 10; ++i) kb.update(0, random_context(data, 2), 1.0);
  EXPECT_EQ(kb.influential_count(0), 0u);
  kb.update(0, random_context(data, 2), 1.0);
  EXPECT_EQ(kb.influential_count(0), influential_size(11, 10, 0.01));
}

TEST(SelectArm, Examples) {
  Rng rng = make_rng(0);
  const std::vector<RewardEstimate> e{{0, 0.1}, {1, 0.9}, {2, 0.3}};
  EXPECT_EQ(select_arm(std::span<const RewardEstimate>(e), rng), 1u);
  EXPECT_THROW(select_arm(std::span<const RewardEstimate>{}, rng), DomainError);
}

TEST(SelectArm, AllEqualUniform) {
  Rng rng = make_rng(1);
  const std::size_t M = 5;
  std::vector<RewardEstimate> e;
  for (std::size_t m = 0; m < M; ++m) e.push_back({m, 0.4});
  std::vector<int> count(M, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++count[select_arm(std::span<const RewardEstimate>(e), rng)];
  const double p = 1.0 / M, sigma = std::sqrt(n * p * (1 - p));
  for (int c : count) EXPECT_NEAR(c, n * p, 3 * sigma);
}

TEST(SelectArm, TwoTiedMaxima) {
  Rng rng = make_rng(2);
  const std::vector<RewardEstimate> e{{0, 0.2}, {1, 0.7}, {2, 0.1}, {3, 0.7}};
  std::map<std::size_t, int> count;
  const int n = 10000;
  for (int i = 0; i < n; ++i) ++count[select_arm(std::span<const RewardEstimate>(e), rng)];
  EXPECT_EQ(count.size(), 2u);
  EXPECT_NEAR(count[1], n / 2, 3 * std::sqrt(n * 0.25));
}

TEST(Update, PoolCounts) {
  KBoot<> kb(4, {});
  Rng rng = make_rng(4);
  kb.update(2, random_context(rng, 3), 0.1);
  EXPECT_EQ(kb.pool(2).size(), 1u);
  EXPECT_EQ(kb.pool(0).size() + kb.pool(1).size() + kb.pool(3).size(), 0u);

  std::vector<std::size_t> tally(4, 0);
  tally[2] = 1;
  for (int t = 0; t < 777; ++t) {
    const std::size_t arm = uniform_index(rng, 4);
    ++tally[arm];
    kb.update(arm, random_context(rng, 3), 0.0);
  }
  for (std::size_t m = 0; m < 4; ++m) EXPECT_EQ(kb.pool(m).size(), tally[m]);
}

TEST(Update, ArmSetChanges) {
  KBoot<> kb(2, {});
  Rng rng = make_rng(6);
  kb.update(1, random_context(rng, 2), 1.0);
  EXPECT_EQ(kb.add_arm(), 2u);
  EXPECT_EQ(kb.arm_count(), 3u);
  kb.remove_arm(0);
  EXPECT_EQ(kb.arm_count(), 2u);
  EXPECT_EQ(kb.pool(0).size(), 1u);
  EXPECT_TRUE(kb.pool(1).empty());
  EXPECT_THROW(kb.remove_arm(5), DomainError);
}

TEST(KBootConfig, Validation) {
  EXPECT_THROW(KBoot<>(2, {.K = 0}), DomainError);
  EXPECT_THROW(KBoot<>(2, {.epsilon = 1.0}), DomainError);
}

TEST(Choose, PrefersBetterArm) {
  KBoot<> kb(2, {.K = 20});
  Rng data = make_rng(8);
  for (int i = 0; i < 300; ++i) {
    kb.update(0, random_context(data, 2), 0.1);
    kb.update(1, random_context(data, 2), 0.9);
  }
  Rng rng = make_rng(9);
  int wins = 0;
  for (int i = 0; i < 200; ++i) wins += kb.choose(random_context(data, 2), rng) == 1;
  EXPECT_GT(wins, 190);
}
