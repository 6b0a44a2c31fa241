#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

#include "kboot/bandit.hpp"
#include "kboot/error.hpp"
#include "kboot/format.hpp"
#include "kboot/parallel.hpp"
#include "kboot/random.hpp"

namespace kboot {

// ---------------------------------------------------------------------------------------------
// Eligibility interfaces

struct EligibilityInput {
  std::vector<double> scores;  // one per arm, each in [0,1]

  void validate(std::size_t arms) const {
    if (scores.size() != arms) throw DomainError("EligibilityInput: expected one score per arm");
    for (double e : scores) {
      if (!(e >= 0.0 && e <= 1.0)) throw DomainError("EligibilityInput: score outside [0,1]");
    }
  }
};

// Binary per-arm claims over L system states plus the observed distribution over those states.
struct StateClaims {
  std::vector<std::vector<std::uint8_t>> claims;  // M rows of length L
  std::vector<double> state_dist;                  // length L, sums to 1
};

inline EligibilityInput state_to_scores(const StateClaims& sc) {
  const std::size_t L = sc.state_dist.size();
  double total = 0.0;
  for (double p : sc.state_dist) {
    if (p < 0.0) throw DomainError("state_to_scores: negative state probability");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-9) throw DomainError("state_to_scores: probabilities must sum to 1");

  EligibilityInput out;
  out.scores.reserve(sc.claims.size());
  for (const auto& row : sc.claims) {
    if (row.size() != L) throw DomainError("state_to_scores: claim row length differs from state count");
    double e = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
      if (row[l] > 1) throw DomainError("state_to_scores: claims must be 0 or 1");
      e += row[l] * sc.state_dist[l];
    }
    out.scores.push_back(std::clamp(e, 0.0, 1.0));
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Rank correlation

// 1-based ranks; tied values share the average of the ranks they span.
inline std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

struct SpearmanResult {
  double rho = 0.0;
  bool degenerate = false;  // one coordinate constant; rho reported as 0
};

inline SpearmanResult spearman_rho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("spearman_rho: length mismatch");
  if (x.size() < 3) throw DomainError("spearman_rho: needs at least 3 pairs");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;  // average ranks always sum to n(n+1)/2
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return {0.0, true};
  return {std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0), false};
}

// Observed (reward, score-of-pulled-arm) pairs.
struct CorrelationPool {
  std::vector<double> rewards;
  std::vector<double> scores;

  void append(double reward, double score) {
    rewards.push_back(reward);
    scores.push_back(score);
  }
  std::size_t size() const { return rewards.size(); }
};

inline SpearmanResult spearman_rho(const CorrelationPool& pool) {
  return spearman_rho(pool.rewards, pool.scores);
}

// ---------------------------------------------------------------------------------------------
// Leak simulation under the neighbor-inversion rank-noise model

// Applies `swaps` adjacent transpositions, each at a uniformly drawn position, to (1, ..., n).
template <class URBG>
std::vector<int> neighbor_inversion_perturb(std::size_t n, std::uint64_t swaps, URBG& rng) {
  if (n < 2) throw DomainError("neighbor_inversion_perturb: sequence length must be >= 2");
  std::vector<int> seq(n);
  std::iota(seq.begin(), seq.end(), 1);
  std::uniform_int_distribution<std::size_t> pos(0, n - 2);
  for (std::uint64_t s = 0; s < swaps; ++s) {
    const std::size_t j = pos(rng);
    std::swap(seq[j], seq[j + 1]);
  }
  return seq;
}

struct LeakRow {
  std::uint64_t p = 0;            // adjacent swaps per replicate
  double mean_rho = 0.0;          // replicate-averaged Spearman rho vs. the identity
  std::vector<double> leak_freq;  // leak_freq[k-1] = P(position of element 1 > k)
};

struct LeakTable {
  std::size_t seq_len = 0;
  std::uint64_t replications = 0;
  std::uint64_t seed = 0;
  std::vector<LeakRow> rows;  // ascending p
};

// One row of the leak table. Each row draws from its own stream keyed by p.
inline LeakRow simulate_leak_row(std::size_t n, std::uint64_t p, std::uint64_t replications,
                                 std::uint64_t seed) {
  if (n < 2) throw DomainError("simulate_leak_table: sequence length must be >= 2");
  if (replications == 0) throw DomainError("simulate_leak_table: replications must be positive");
  Rng rng = make_rng(seed, p);
  std::uniform_int_distribution<std::size_t> pos(0, n - 2);
  std::vector<int> seq(n);
  std::vector<std::uint64_t> position_count(n, 0);
  const double nd = static_cast<double>(n);
  const double denom = nd * (nd * nd - 1.0);
  double rho_sum = 0.0;
  for (std::uint64_t r = 0; r < replications; ++r) {
    std::iota(seq.begin(), seq.end(), 1);
    for (std::uint64_t s = 0; s < p; ++s) {
      const std::size_t j = pos(rng);
      std::swap(seq[j], seq[j + 1]);
    }
    double d2 = 0.0;
    std::size_t where = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = static_cast<double>(seq[i]) - static_cast<double>(i + 1);
      d2 += d * d;
      if (seq[i] == 1) where = i;
    }
    rho_sum += 1.0 - 6.0 * d2 / denom;
    ++position_count[where];
  }
  LeakRow row;
  row.p = p;
  row.mean_rho = rho_sum / static_cast<double>(replications);
  row.leak_freq.assign(n, 0.0);
  // leak at threshold k: element 1 sits at 1-based position > k
  std::uint64_t beyond = replications;
  for (std::size_t k = 1; k <= n; ++k) {
    beyond -= position_count[k - 1];
    row.leak_freq[k - 1] = static_cast<double>(beyond) / static_cast<double>(replications);
  }
  return row;
}

inline LeakTable simulate_leak_table(std::size_t n, std::span<const std::uint64_t> p_grid,
                                     std::uint64_t replications, std::uint64_t seed,
                                     std::size_t jobs = 0) {
  std::vector<std::uint64_t> grid(p_grid.begin(), p_grid.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  LeakTable table{n, replications, seed, std::vector<LeakRow>(grid.size())};
  parallel_for(grid.size(), jobs, [&](std::size_t i) {
    table.rows[i] = simulate_leak_row(n, grid[i], replications, seed);
  });
  return table;
}

// 0 followed by a geometric ladder up to n^3, rounded to distinct integers.
inline std::vector<std::uint64_t> default_p_grid(std::size_t n, std::size_t points = 24) {
  const double top = std::pow(static_cast<double>(n), 3.0);
  std::set<std::uint64_t> grid{0, 1};
  for (std::size_t i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(points - 1);
    grid.insert(static_cast<std::uint64_t>(std::llround(std::pow(top, t))));
  }
  return {grid.begin(), grid.end()};
}

// Largest |delta mean_rho| between consecutive rows that a denser p-grid could still split.
// Gaps between p and p+1 are the model's own resolution and are not counted.
inline double max_refinable_gap(const LeakTable& table) {
  double worst = 0.0;
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    if (table.rows[i].p - table.rows[i - 1].p <= 1) continue;
    worst = std::max(worst, std::fabs(table.rows[i].mean_rho - table.rows[i - 1].mean_rho));
  }
  return worst;
}

// Simulates the default grid, then bisects p-intervals until consecutive mean rho values differ
// by less than `max_gap` (or the interval is a single swap).
inline LeakTable generate_leak_table(std::size_t n, std::uint64_t replications, std::uint64_t seed,
                                     std::size_t jobs = 0, double max_gap = 0.04) {
  const auto initial = default_p_grid(n);
  LeakTable table = simulate_leak_table(n, initial, replications, seed, jobs);
  for (int pass = 0; pass < 64; ++pass) {
    std::vector<std::uint64_t> extra;
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
      const auto& a = table.rows[i - 1];
      const auto& b = table.rows[i];
      if (b.p - a.p > 1 && std::fabs(b.mean_rho - a.mean_rho) >= max_gap) {
        extra.push_back(a.p + (b.p - a.p) / 2);
      }
    }
    if (extra.empty()) break;
    LeakTable more = simulate_leak_table(n, extra, replications, seed, jobs);
    table.rows.insert(table.rows.end(), more.rows.begin(), more.rows.end());
    std::sort(table.rows.begin(), table.rows.end(),
              [](const LeakRow& a, const LeakRow& b) { return a.p < b.p; });
  }
  return table;
}

// ---------------------------------------------------------------------------------------------
// Offline dictionary G: (alpha, rho) -> k for one sequence length

struct LeakDictionary {
  static constexpr int kVersion = 1;

  std::size_t seq_len = 0;
  std::vector<double> alpha_grid;               // ascending
  std::vector<double> rho_grid;                 // ascending grid points on [0,1]
  std::vector<std::vector<std::size_t>> k;      // k[alpha index][rho index]
  std::vector<std::uint64_t> source_p;          // p-row used for each rho grid point
  std::vector<std::uint64_t> p_grid;
  std::vector<double> p_mean_rho;
  std::uint64_t replications = 0;
  std::uint64_t seed = 0;
};

inline std::vector<double> rho_grid_points(double step = 0.05) {
  std::vector<double> grid;
  const auto count = static_cast<std::size_t>(std::llround(1.0 / step));
  for (std::size_t i = 0; i <= count; ++i) grid.push_back(static_cast<double>(i) / static_cast<double>(count));
  return grid;
}

inline LeakDictionary build_dictionary(const LeakTable& table, std::span<const double> alpha_grid,
                                       double rho_step = 0.05) {
  if (table.rows.empty()) throw DomainError("build_dictionary: empty leak table");
  if (alpha_grid.empty()) throw DomainError("build_dictionary: empty alpha grid");
  for (double a : alpha_grid) {
    if (!(a >= 0.0 && a <= 1.0)) throw DomainError("build_dictionary: alpha outside [0,1]");
  }
  const double gap = max_refinable_gap(table);
  if (gap >= rho_step) {
    throw DomainError("build_dictionary: insufficient p-grid, consecutive mean rho values differ by " +
                      format_double(gap));
  }
  double lowest = table.rows.front().mean_rho;
  for (const auto& r : table.rows) lowest = std::min(lowest, r.mean_rho);
  if (lowest >= rho_step) {
    throw DomainError("build_dictionary: insufficient p-grid, lowest mean rho is " + format_double(lowest));
  }

  LeakDictionary dict;
  dict.seq_len = table.seq_len;
  dict.alpha_grid.assign(alpha_grid.begin(), alpha_grid.end());
  std::sort(dict.alpha_grid.begin(), dict.alpha_grid.end());
  dict.alpha_grid.erase(std::unique(dict.alpha_grid.begin(), dict.alpha_grid.end()), dict.alpha_grid.end());
  dict.rho_grid = rho_grid_points(rho_step);
  dict.replications = table.replications;
  dict.seed = table.seed;
  for (const auto& r : table.rows) {
    dict.p_grid.push_back(r.p);
    dict.p_mean_rho.push_back(r.mean_rho);
  }

  std::vector<const LeakRow*> source;
  for (double rho : dict.rho_grid) {
    const LeakRow* best = &table.rows.front();
    for (const auto& r : table.rows) {
      if (std::fabs(r.mean_rho - rho) < std::fabs(best->mean_rho - rho)) best = &r;
    }
    source.push_back(best);
    dict.source_p.push_back(best->p);
  }

  const std::size_t n = table.seq_len;
  for (double alpha : dict.alpha_grid) {
    std::vector<std::size_t> ks;
    for (const LeakRow* row : source) {
      std::size_t k = n;
      for (std::size_t t = 1; t <= n; ++t) {
        if (row->leak_freq[t - 1] <= alpha) {
          k = t;
          break;
        }
      }
      ks.push_back(k);
    }
    // nonincreasing in rho: a lower correlation never gets a tighter threshold
    for (std::size_t j = ks.size() - 1; j-- > 0;) ks[j] = std::max(ks[j], ks[j + 1]);
    dict.k.push_back(std::move(ks));
  }
  return dict;
}

namespace detail {

inline std::size_t nearest_index(std::span<const double> grid, double value) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (std::fabs(grid[i] - value) < std::fabs(grid[best] - value)) best = i;
  }
  return best;
}

}  // namespace detail

struct ThresholdLookup {
  std::size_t k = 0;         // threshold after the fallback rule
  std::size_t looked_up = 0; // raw dictionary value
  bool fallback = false;     // reset to M because looked_up >= (1 - alpha) M
};

inline ThresholdLookup lookup_k(const LeakDictionary& dict, double alpha, double rho_hat, std::size_t M) {
  if (dict.seq_len != M) {
    throw DomainError("query_k: dictionary built for " + std::to_string(dict.seq_len) + " arms, bandit has " +
                      std::to_string(M));
  }
  const std::size_t ai = detail::nearest_index(dict.alpha_grid, alpha);
  const std::size_t ri = rho_hat <= 0.0 ? 0 : detail::nearest_index(dict.rho_grid, std::min(rho_hat, 1.0));
  ThresholdLookup out;
  out.looked_up = dict.k[ai][ri];
  out.fallback = static_cast<double>(out.looked_up) >= (1.0 - alpha) * static_cast<double>(M);
  out.k = out.fallback ? M : out.looked_up;
  return out;
}

inline std::size_t query_k(const LeakDictionary& dict, double alpha, double rho_hat, std::size_t M) {
  return lookup_k(dict, alpha, rho_hat, M).k;
}

// Dictionary text format (version 1):
//   header lines "key value..." for version, seq_len, replications, seed, alpha_grid, rho_grid,
//   p_grid, p_mean_rho; then "table alpha rho k source_p" followed by one row per cell.
inline void write_dictionary(std::ostream& os, const LeakDictionary& d) {
  auto list = [&](const char* key, const auto& values) {
    os << key;
    for (const auto& v : values) {
      if constexpr (std::is_floating_point_v<std::decay_t<decltype(v)>>) {
        os << ' ' << format_double(v);
      } else {
        os << ' ' << v;
      }
    }
    os << '\n';
  };
  os << "# kboot leak dictionary\n";
  os << "version " << LeakDictionary::kVersion << '\n';
  os << "seq_len " << d.seq_len << '\n';
  os << "replications " << d.replications << '\n';
  os << "seed " << d.seed << '\n';
  list("alpha_grid", d.alpha_grid);
  list("rho_grid", d.rho_grid);
  list("p_grid", d.p_grid);
  list("p_mean_rho", d.p_mean_rho);
  os << "table alpha rho k source_p\n";
  for (std::size_t a = 0; a < d.alpha_grid.size(); ++a) {
    for (std::size_t r = 0; r < d.rho_grid.size(); ++r) {
      os << format_double(d.alpha_grid[a]) << ' ' << format_double(d.rho_grid[r]) << ' ' << d.k[a][r] << ' '
         << d.source_p[r] << '\n';
    }
  }
}

inline void save_dictionary(const std::string& path, const LeakDictionary& d) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_dictionary(out, d);
  if (!out) throw IoError("write failed: " + path);
}

inline LeakDictionary read_dictionary(std::istream& is) {
  LeakDictionary d;
  std::string line;
  std::size_t line_no = 0;
  bool in_table = false;
  int version = -1;
  auto fail = [&](const std::string& what) -> ParseError {
    return ParseError("dictionary line " + std::to_string(line_no) + ": " + what);
  };
  auto doubles = [&](std::istringstream& ss) {
    std::vector<double> v;
    std::string tok;
    while (ss >> tok) {
      double x;
      if (!parse_double(tok, x)) throw fail("bad number '" + tok + "'");
      v.push_back(x);
    }
    return v;
  };
  std::vector<std::tuple<double, double, std::size_t, std::uint64_t>> cells;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    if (in_table) {
      double a, r;
      std::size_t k;
      std::uint64_t p;
      std::string ta, tr;
      if (!(ss >> ta >> tr >> k >> p) || !parse_double(ta, a) || !parse_double(tr, r)) throw fail("bad table row");
      cells.emplace_back(a, r, k, p);
      continue;
    }
    std::string key;
    ss >> key;
    if (key == "version") {
      ss >> version;
      if (version != LeakDictionary::kVersion) throw fail("unsupported version " + std::to_string(version));
    } else if (key == "seq_len") {
      ss >> d.seq_len;
    } else if (key == "replications") {
      ss >> d.replications;
    } else if (key == "seed") {
      ss >> d.seed;
    } else if (key == "alpha_grid") {
      d.alpha_grid = doubles(ss);
    } else if (key == "rho_grid") {
      d.rho_grid = doubles(ss);
    } else if (key == "p_grid") {
      std::uint64_t p;
      while (ss >> p) d.p_grid.push_back(p);
    } else if (key == "p_mean_rho") {
      d.p_mean_rho = doubles(ss);
    } else if (key == "table") {
      in_table = true;
    } else {
      throw fail("unknown key '" + key + "'");
    }
  }
  if (version < 0) throw ParseError("dictionary: missing version line");
  if (d.seq_len < 2 || d.alpha_grid.empty() || d.rho_grid.empty()) throw ParseError("dictionary: incomplete header");
  if (cells.size() != d.alpha_grid.size() * d.rho_grid.size()) throw ParseError("dictionary: table size mismatch");
  d.k.assign(d.alpha_grid.size(), std::vector<std::size_t>(d.rho_grid.size(), 0));
  d.source_p.assign(d.rho_grid.size(), 0);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto [a, r, k, p] = cells[i];
    const std::size_t ai = i / d.rho_grid.size();
    const std::size_t ri = i % d.rho_grid.size();
    if (a != d.alpha_grid[ai] || r != d.rho_grid[ri]) throw ParseError("dictionary: table rows out of grid order");
    if (k < 1 || k > d.seq_len) throw ParseError("dictionary: k outside [1, seq_len]");
    d.k[ai][ri] = k;
    d.source_p[ri] = p;
  }
  return d;
}

inline LeakDictionary load_dictionary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dictionary " + path);
  return read_dictionary(in);
}

// ---------------------------------------------------------------------------------------------
// Online eligibility control

// Arms whose score is at least the k-th largest score. Ties at the threshold all pass.
inline std::vector<bool> ec_filter(const EligibilityInput& input, std::size_t k) {
  const auto& e = input.scores;
  if (k < 1 || k > e.size()) throw DomainError("ec_filter: k must be in [1, M]");
  std::vector<double> sorted(e);
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1), sorted.end(),
                   std::greater<>());
  const double threshold = sorted[k - 1];
  std::vector<bool> mask(e.size());
  for (std::size_t m = 0; m < e.size(); ++m) mask[m] = e[m] >= threshold;
  return mask;
}

struct ECConfig {
  double alpha = 0.5;               // tolerated leak risk
  std::size_t k0 = 0;               // initial threshold; 0 means M
  std::size_t update_period = 50;   // rounds between rho refreshes
  std::optional<std::size_t> pinned_k;  // fixes k and disables refreshes

  void validate(std::size_t M) const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("ECConfig: alpha must be in [0,1]");
    if (k0 > M) throw DomainError("ECConfig: k0 must be in [1, M]");
    if (update_period < 1) throw DomainError("ECConfig: update_period must be positive");
    if (pinned_k && (*pinned_k < 1 || *pinned_k > M)) throw DomainError("ECConfig: pinned k must be in [1, M]");
  }
};

class EligibilityController {
 public:
  EligibilityController(std::size_t arms, ECConfig config, std::shared_ptr<const LeakDictionary> dict)
      : arms_(arms), config_(config), dict_(std::move(dict)) {
    config_.validate(arms_);
    if (!config_.pinned_k && !dict_) throw DomainError("EligibilityController: dictionary required");
    if (dict_ && dict_->seq_len != arms_) {
      throw DomainError("EligibilityController: dictionary sequence length differs from arm count");
    }
    k_ = config_.pinned_k ? *config_.pinned_k : (config_.k0 == 0 ? arms_ : config_.k0);
  }

  std::size_t k() const { return k_; }
  std::size_t arm_count() const { return arms_; }
  const CorrelationPool& pool() const { return pool_; }
  std::optional<double> last_rho() const { return last_rho_; }
  std::size_t fallback_count() const { return fallback_count_; }
  // Whether the most recent refresh reset k to M.
  bool last_refresh_fell_back() const { return last_fallback_; }

  std::vector<bool> mask(const EligibilityInput& scores) const {
    scores.validate(arms_);
    return ec_filter(scores, k_);
  }

  // Records the pulled arm's (reward, score); refreshes k every update_period observations.
  void record(double reward, double score) {
    pool_.append(reward, score);
    if (config_.pinned_k) return;
    if (pool_.size() % config_.update_period != 0 || pool_.size() < 3) return;
    const auto sr = spearman_rho(pool_);
    last_rho_ = sr.rho;
    const auto lk = lookup_k(*dict_, config_.alpha, sr.rho, arms_);
    k_ = lk.k;
    last_fallback_ = lk.fallback;
    if (lk.fallback) ++fallback_count_;
  }

 private:
  std::size_t arms_;
  ECConfig config_;
  std::shared_ptr<const LeakDictionary> dict_;
  std::size_t k_ = 0;
  CorrelationPool pool_;
  std::optional<double> last_rho_;
  bool last_fallback_ = false;
  std::size_t fallback_count_ = 0;
};

struct ECStepResult {
  std::size_t arm = 0;
  double reward = 0.0;
  std::size_t k_used = 0;
};

// One eligibility-controlled round: filter by score, score the surviving arms, pull the argmax,
// observe its reward through `reward_of(arm)`, then update both the bandit and the controller.
template <ArmIndependentBandit Bandit, class ContextOf, class RewardOf, class URBG>
ECStepResult ec_step(EligibilityController& ec, Bandit& bandit, ContextOf&& context_of,
                     const EligibilityInput& scores, RewardOf&& reward_of, URBG& rng) {
  const std::size_t k_used = ec.k();
  const auto mask = ec.mask(scores);
  const std::size_t arm = choose_arm(bandit, context_of, mask, rng);
  const double reward = reward_of(arm);
  bandit.update(arm, context_of(arm), reward);
  ec.record(reward, scores.scores[arm]);
  return {arm, reward, k_used};
}

}  // namespace kboot
