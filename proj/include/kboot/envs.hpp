#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "kboot/eligibility.hpp"
#include "kboot/error.hpp"
#include "kboot/format.hpp"
#include "kboot/neighbors.hpp"
#include "kboot/random.hpp"

namespace kboot {

// ---------------------------------------------------------------------------------------------
// Synthetic reward functions

enum class RewardFamily { linear, quadratic, inner_product, cosine };

inline std::string_view to_string(RewardFamily f) {
  switch (f) {
    case RewardFamily::linear: return "linear";
    case RewardFamily::quadratic: return "quadratic";
    case RewardFamily::inner_product: return "inner_product";
    case RewardFamily::cosine: return "cosine";
  }
  return "?";
}

inline RewardFamily parse_reward_family(std::string_view s) {
  if (s == "linear") return RewardFamily::linear;
  if (s == "quadratic") return RewardFamily::quadratic;
  if (s == "inner_product") return RewardFamily::inner_product;
  if (s == "cosine") return RewardFamily::cosine;
  throw DomainError("unknown reward family '" + std::string(s) + "'");
}

struct SyntheticEnvSpec {
  std::size_t arms = 10;
  std::size_t dim = 20;
  RewardFamily family = RewardFamily::linear;
  std::uint64_t seed = 0;  // arm parameters are drawn from this seed
};

struct SynthRound {
  ContextVector x;
  std::vector<double> mean_rewards;
  std::vector<double> noisy_rewards;
};

// Per-arm parameters are drawn once at construction (a, A ~ N(0,1) entries, sigma_r ~ U(0.01,0.5))
// and never redrawn.
class SyntheticEnv {
 public:
  explicit SyntheticEnv(SyntheticEnvSpec spec) : spec_(spec) {
    if (spec_.arms < 1 || spec_.dim < 1) throw DomainError("SyntheticEnv: arms and dim must be positive");
    Rng rng = make_rng(spec_.seed, 0x5eed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> noise_sd(0.01, 0.5);
    const auto d = static_cast<Eigen::Index>(spec_.dim);
    for (std::size_t m = 0; m < spec_.arms; ++m) {
      Eigen::VectorXd a(d);
      for (Eigen::Index i = 0; i < d; ++i) a[i] = normal(rng);
      Eigen::MatrixXd A(d, d);
      if (spec_.family == RewardFamily::inner_product) {
        for (Eigen::Index i = 0; i < d; ++i)
          for (Eigen::Index j = 0; j < d; ++j) A(i, j) = normal(rng);
      }
      a_.push_back(std::move(a));
      A_.push_back(std::move(A));
      sigma_r_.push_back(noise_sd(rng));
    }
  }

  const SyntheticEnvSpec& spec() const { return spec_; }
  std::size_t arms() const { return spec_.arms; }
  std::size_t dim() const { return spec_.dim; }
  const Eigen::VectorXd& a(std::size_t arm) const { return a_.at(arm); }
  const Eigen::MatrixXd& A(std::size_t arm) const { return A_.at(arm); }
  double sigma_r(std::size_t arm) const { return sigma_r_.at(arm); }

  double mean_reward(std::size_t arm, std::span<const double> x) const {
    const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
    switch (spec_.family) {
      case RewardFamily::linear: return 0.1 * v.dot(a_[arm]);
      case RewardFamily::quadratic: {
        const double t = v.dot(a_[arm]);
        return 0.05 * t * t;
      }
      case RewardFamily::inner_product: return 0.002 * (A_[arm] * v).squaredNorm();
      case RewardFamily::cosine: return std::cos(3.0 * v.dot(a_[arm]));
    }
    return 0.0;
  }

  // Draw order: d context coordinates, then one noise draw per arm.
  template <class URBG>
  SynthRound round(URBG& rng) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    SynthRound out;
    out.x.resize(spec_.dim);
    for (auto& v : out.x) v = normal(rng);
    out.mean_rewards = mean_rewards(out.x);
    out.noisy_rewards.resize(spec_.arms);
    for (std::size_t m = 0; m < spec_.arms; ++m) {
      out.noisy_rewards[m] = out.mean_rewards[m] + sigma_r_[m] * normal(rng);
    }
    return out;
  }

  std::vector<double> mean_rewards(std::span<const double> x) const {
    std::vector<double> out(spec_.arms);
    for (std::size_t m = 0; m < spec_.arms; ++m) out[m] = mean_reward(m, x);
    return out;
  }

 private:
  SyntheticEnvSpec spec_;
  std::vector<Eigen::VectorXd> a_;
  std::vector<Eigen::MatrixXd> A_;
  std::vector<double> sigma_r_;
};

template <class URBG>
SynthRound synth_round(const SyntheticEnv& env, URBG& rng) {
  return env.round(rng);
}

// ---------------------------------------------------------------------------------------------
// Simulated eligibility scores: e = squash(w r + N(0, sigma_e^2))

struct EligibilitySimSpec {
  std::vector<double> w;  // per-arm scaling, U(-0.1, 1)
  double sigma_e = 0.0;
  double target_rho = 1.0;
};

template <class URBG>
EligibilitySimSpec draw_eligibility_spec(std::size_t arms, URBG& rng) {
  std::uniform_real_distribution<double> w(-0.1, 1.0);
  EligibilitySimSpec spec;
  spec.w.resize(arms);
  for (auto& v : spec.w) v = w(rng);
  return spec;
}

// Monotone map of raw scores into [0,1]; keeps every rank, within and across rounds.
inline double squash_score(double raw) { return 1.0 / (1.0 + std::exp(-raw)); }

template <class URBG>
EligibilityInput sim_scores(const EligibilitySimSpec& spec, std::span<const double> rewards, URBG& rng) {
  if (rewards.size() != spec.w.size()) throw DomainError("sim_scores: one reward per arm expected");
  std::normal_distribution<double> normal(0.0, 1.0);
  EligibilityInput out;
  out.scores.resize(rewards.size());
  for (std::size_t m = 0; m < rewards.size(); ++m) {
    const double noise = normal(rng);
    out.scores[m] = squash_score(spec.w[m] * rewards[m] + spec.sigma_e * noise);
  }
  return out;
}

class NonBracketingError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Pooled Spearman rho between counterfactual rewards and scores over pre-drawn rounds, for a given
// noise scale. The same standard-normal draws are reused for every sigma_e.
struct CalibrationSample {
  std::vector<double> rewards;  // pooled over rounds and arms
  std::vector<double> signal;   // w * r
  std::vector<double> noise;    // standard normal

  double rho(double sigma_e) const {
    std::vector<double> e(signal.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = signal[i] + sigma_e * noise[i];
    return spearman_rho(rewards, e).rho;
  }
};

template <class URBG>
CalibrationSample draw_calibration_sample(const EligibilitySimSpec& spec, const SyntheticEnv& env,
                                          std::size_t rounds, URBG& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CalibrationSample s;
  for (std::size_t t = 0; t < rounds; ++t) {
    const auto round = env.round(rng);
    for (std::size_t m = 0; m < env.arms(); ++m) {
      s.rewards.push_back(round.noisy_rewards[m]);
      s.signal.push_back(spec.w[m] * round.noisy_rewards[m]);
      s.noise.push_back(normal(rng));
    }
  }
  return s;
}

// Bisection on sigma_e so the pooled rho(r, e) hits `target_rho` within `tolerance`.
template <class URBG>
double calibrate_sigma_e(const EligibilitySimSpec& spec, const SyntheticEnv& env, double target_rho, URBG& rng,
                         std::size_t rounds = 10000, double tolerance = 0.005) {
  if (!(target_rho > 0.0 && target_rho < 1.0)) throw DomainError("calibrate_sigma_e: target must be in (0,1)");
  const auto sample = draw_calibration_sample(spec, env, rounds, rng);
  const double ceiling = sample.rho(0.0);
  if (ceiling < target_rho) {
    throw NonBracketingError("calibrate_sigma_e: target rho " + format_double(target_rho) +
                             " exceeds the noiseless correlation " + format_double(ceiling));
  }
  if (ceiling - target_rho < tolerance) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (sample.rho(hi) > target_rho) {
    hi *= 2.0;
    if (hi > 1e9) throw NonBracketingError("calibrate_sigma_e: cannot push rho below target");
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    mid = 0.5 * (lo + hi);
    const double r = sample.rho(mid);
    if (std::fabs(r - target_rho) < tolerance) break;
    if (r > target_rho) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return mid;
}

// ---------------------------------------------------------------------------------------------
// Classification datasets as bandits

struct DatasetSchema {
  char delimiter = ',';
  bool header = false;
  long label_column = -1;  // negative counts from the end
};

struct ClassificationDataset {
  std::vector<ContextVector> features;
  std::vector<std::size_t> labels;  // dense, in order of first appearance
  std::vector<std::string> label_names;
  std::size_t n_classes = 0;
  std::size_t dim = 0;
  std::string source;

  std::size_t rows() const { return labels.size(); }
};

namespace detail {

inline std::vector<std::string_view> split_line(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

inline ClassificationDataset parse_dataset(std::istream& in, const DatasetSchema& schema,
                                           const std::string& source = "<stream>") {
  ClassificationDataset ds;
  ds.source = source;
  std::map<std::string, std::size_t, std::less<>> label_index;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (schema.header && line_no == 1) continue;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_line(line, schema.delimiter);
    if (width == 0) {
      width = cells.size();
      if (width < 2) throw ParseError(source + ": line " + std::to_string(line_no) + ": need a label and a feature");
    } else if (cells.size() != width) {
      throw ParseError(source + ": line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                       " columns, found " + std::to_string(cells.size()));
    }
    const long w = static_cast<long>(width);
    const long lc = schema.label_column < 0 ? w + schema.label_column : schema.label_column;
    if (lc < 0 || lc >= w) throw ParseError(source + ": label column out of range");

    ContextVector x;
    x.reserve(width - 1);
    for (std::size_t c = 0; c < width; ++c) {
      const auto cell = detail::trim(cells[c]);
      const std::string where = source + ": line " + std::to_string(line_no) + ", column " + std::to_string(c + 1);
      if (cell.empty() || cell == "?" || cell == "NA" || cell == "nan") {
        throw ParseError(where + ": missing value");
      }
      if (static_cast<long>(c) == lc) {
        auto [it, inserted] = label_index.try_emplace(std::string(cell), label_index.size());
        if (inserted) ds.label_names.emplace_back(cell);
        ds.labels.push_back(it->second);
        continue;
      }
      double v;
      if (!parse_double(cell, v) || !std::isfinite(v)) {
        throw ParseError(where + ": non-numeric feature '" + std::string(cell) + "'");
      }
      x.push_back(v);
    }
    ds.features.push_back(std::move(x));
  }
  if (ds.labels.empty()) throw ParseError(source + ": no data rows");
  ds.dim = width - 1;
  ds.n_classes = label_index.size();
  return ds;
}

inline ClassificationDataset load_dataset(const std::string& path, const DatasetSchema& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path);
  return parse_dataset(in, schema, path);
}

// Per-feature z-scoring; constant features are centered only.
inline void standardize(ClassificationDataset& ds) {
  const std::size_t n = ds.rows();
  for (std::size_t j = 0; j < ds.dim; ++j) {
    double mean = 0.0;
    for (const auto& x : ds.features) mean += x[j];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const auto& x : ds.features) ss += (x[j] - mean) * (x[j] - mean);
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    for (auto& x : ds.features) x[j] = sd > 0.0 ? (x[j] - mean) / sd : x[j] - mean;
  }
}

// Row-index streams for `n_runs` runs of `run_size` rounds each. Rows come from a seeded shuffle
// cut into consecutive disjoint chunks; when the dataset is too short and resampling is allowed,
// further independent shuffles are appended before cutting.
inline std::vector<std::vector<std::size_t>> dataset_to_runs(const ClassificationDataset& ds, std::size_t run_size,
                                                             std::size_t n_runs, std::uint64_t seed,
                                                             bool resample_if_short) {
  const std::size_t need = run_size * n_runs;
  if (need > ds.rows() && !resample_if_short) {
    throw DomainError("dataset_to_runs: " + std::to_string(need) + " rows needed, dataset has " +
                      std::to_string(ds.rows()));
  }
  Rng rng = make_rng(seed, 0xda7a);
  std::vector<std::size_t> order;
  while (order.size() < need) {
    std::vector<std::size_t> perm(ds.rows());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    order.insert(order.end(), perm.begin(), perm.end());
  }
  std::vector<std::vector<std::size_t>> runs(n_runs);
  for (std::size_t r = 0; r < n_runs; ++r) {
    runs[r].assign(order.begin() + static_cast<std::ptrdiff_t>(r * run_size),
                   order.begin() + static_cast<std::ptrdiff_t>((r + 1) * run_size));
  }
  return runs;
}

// Canonical dataset form: features then dense label, comma separated, no header.
inline void write_canonical_dataset(std::ostream& os, const ClassificationDataset& ds) {
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    for (double v : ds.features[i]) os << format_double(v) << ',';
    os << ds.labels[i] << '\n';
  }
}

}  // namespace kboot
