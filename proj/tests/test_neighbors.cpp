#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "kboot/neighbors.hpp"
#include "kboot/random.hpp"

using namespace kboot;

namespace {

ArmPool line_pool(int n) {
  ArmPool pool;
  for (int i = 0; i < n; ++i) pool.append({{double(i)}, 0.0});
  return pool;
}

ArmPool random_pool(std::size_t n, std::size_t d, std::uint64_t seed, bool duplicates = false) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal;
  ArmPool pool;
  for (std::size_t i = 0; i < n; ++i) {
    ContextVector x(d);
    for (auto& v : x) v = duplicates ? std::round(normal(rng)) : normal(rng);
    pool.append({x, 0.0});
  }
  return pool;
}

}  // namespace

TEST(QueryTop, LineExample) {
  const auto pool = line_pool(10);
  const ContextVector q{2.4};
  const auto top = query_top(pool, q, 3);
  ASSERT_EQ(top.size(), 3u);
  EXPECT_EQ(top[0].index, 2u);
  EXPECT_EQ(top[1].index, 3u);
  EXPECT_EQ(top[2].index, 1u);
  EXPECT_NEAR(top[0].distance, 0.4, 1e-12);
}

TEST(QueryTop, SingleSample) {
  const auto pool = line_pool(1);
  const auto top = query_top(pool, ContextVector{7.0}, 5);
  ASSERT_EQ(top.size(), 1u);
  EXPECT_EQ(top[0].index, 0u);
}

TEST(QueryTop, ExactMatchFirst) {
  const auto pool = random_pool(50, 4, 1);
  const auto top = query_top(pool, pool[17].context, 3);
  EXPECT_EQ(top[0].index, 17u);
  EXPECT_EQ(top[0].distance, 0.0);
}

TEST(QueryTop, Errors) {
  ArmPool empty;
  EXPECT_THROW(query_top(empty, ContextVector{0.0}, 1), DomainError);
  EXPECT_THROW(query_top(line_pool(3), ContextVector{0.0}, 0), DomainError);
}

TEST(QueryTop, TiesByInsertionIndex) {
  ArmPool pool;
  for (int i = 0; i < 6; ++i) pool.append({{i % 2 == 0 ? 1.0 : -1.0}, 0.0});
  const auto top = query_top(pool, ContextVector{0.0}, 4);
  for (std::size_t i = 0; i < top.size(); ++i) EXPECT_EQ(top[i].index, i);
}

TEST(QueryTop, MatchesNaiveSort) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto pool = random_pool(1000, 3, seed, seed % 2 == 1);
    const auto q = random_pool(1, 3, 1000 + seed, seed % 2 == 1)[0].context;
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> dist(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      double s = 0;
      for (std::size_t j = 0; j < q.size(); ++j) s += (pool[i].context[j] - q[j]) * (pool[i].context[j] - q[j]);
      dist[i] = s;
    }
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return dist[a] != dist[b] ? dist[a] < dist[b] : a < b; });
    for (std::size_t k : {1u, 7u, 100u, 1000u}) {
      const auto top = query_top(pool, q, k);
      ASSERT_EQ(top.size(), k);
      for (std::size_t i = 0; i < k; ++i) ASSERT_EQ(top[i].index, order[i]) << "seed " << seed << " k " << k;
    }
  }
}

TEST(QueryTop, PrefixAndSortedProperty) {
  const auto pool = random_pool(300, 5, 42, true);
  const auto q = random_pool(1, 5, 43)[0].context;
  auto prev = query_top(pool, q, 1);
  for (std::size_t k = 2; k <= 60; ++k) {
    const auto cur = query_top(pool, q, k);
    for (std::size_t i = 0; i < prev.size(); ++i) EXPECT_EQ(cur[i].index, prev[i].index);
    for (std::size_t i = 1; i < cur.size(); ++i) EXPECT_LE(cur[i - 1].distance, cur[i].distance);
    prev = cur;
  }
}

TEST(Distances, Examples) {
  ArmPool pool;
  pool.append({{1, 0}, 0});
  pool.append({{0, 1}, 0});
  const std::vector<std::size_t> idx{0, 1};
  const auto d = distances_to(pool, ContextVector{1, 0}, idx);
  EXPECT_EQ(d[0], 0.0);
  EXPECT_NEAR(d[1], std::sqrt(2.0), 1e-15);
  const std::vector<std::size_t> bad{2};
  EXPECT_THROW(distances_to(pool, ContextVector{1, 0}, bad), DomainError);
}

TEST(Distances, RandomPair) {
  const auto pool = random_pool(2, 5, 9);
  double s = 0;
  for (int j = 0; j < 5; ++j) s += std::pow(pool[0].context[j] - pool[1].context[j], 2);
  EXPECT_NEAR(euclidean_distance(pool[0].context, pool[1].context), std::sqrt(s), 1e-14);
}

TEST(ArmPool, DimensionChecked) {
  ArmPool pool;
  pool.append({{1, 2}, 0});
  EXPECT_THROW(pool.append({{1, 2, 3}, 0}), DomainError);
}
