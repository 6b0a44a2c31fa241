#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "kboot/error.hpp"

namespace kboot {

using ContextVector = std::vector<double>;

struct SampleRecord {
  ContextVector context;
  double reward = 0.0;
};

// Append-only history of one arm.
class ArmPool {
 public:
  ArmPool() = default;

  void append(SampleRecord record) {
    if (!samples_.empty() && record.context.size() != samples_.front().context.size()) {
      throw DomainError("ArmPool: context dimension mismatch");
    }
    samples_.push_back(std::move(record));
  }

  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const SampleRecord& operator[](std::size_t i) const { return samples_[i]; }
  std::span<const SampleRecord> samples() const { return samples_; }

 private:
  std::vector<SampleRecord> samples_;
};

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("distance: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

// The min(k, N) samples closest to `query`, ascending by distance, ties by insertion index.
inline std::vector<Neighbor> query_top(const ArmPool& pool, std::span<const double> query,
                                       std::size_t k) {
  if (pool.empty()) throw DomainError("query_top: empty pool");
  if (k == 0) throw DomainError("query_top: k must be positive");

  using Entry = std::pair<double, std::size_t>;  // (squared distance, index); max-heap on both
  std::priority_queue<Entry> heap;
  const auto samples = pool.samples();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    Entry e{squared_distance(samples[i].context, query), i};
    if (heap.size() < k) {
      heap.push(e);
    } else if (e < heap.top()) {
      heap.pop();
      heap.push(e);
    }
  }
  std::vector<Neighbor> out(heap.size());
  for (auto it = out.rbegin(); it != out.rend(); ++it) {
    *it = Neighbor{heap.top().second, std::sqrt(heap.top().first)};
    heap.pop();
  }
  return out;
}

inline std::vector<double> distances_to(const ArmPool& pool, std::span<const double> query,
                                        std::span<const std::size_t> indices) {
  std::vector<double> out;
  out.reserve(indices.size());
  for (auto i : indices) {
    if (i >= pool.size()) {
      throw DomainError("distances_to: index " + std::to_string(i) + " out of range");
    }
    out.push_back(euclidean_distance(pool[i].context, query));
  }
  return out;
}

// Retrieval contract used by K-Boot, so an approximate backend can replace exact search.
template <class S>
concept NeighborSearch = requires(const S& s, const ArmPool& pool, std::span<const double> q,
                                  std::size_t k) {
  { s(pool, q, k) } -> std::same_as<std::vector<Neighbor>>;
};

struct ExactSearch {
  std::vector<Neighbor> operator()(const ArmPool& pool, std::span<const double> query,
                                   std::size_t k) const {
    return query_top(pool, query, k);
  }
};

}  // namespace kboot
