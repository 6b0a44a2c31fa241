#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "kboot/baselines.hpp"
#include "kboot/config.hpp"
#include "kboot/eligibility.hpp"
#include "kboot/envs.hpp"
#include "kboot/format.hpp"
#include "kboot/kboot.hpp"
#include "kboot/mathfn.hpp"
#include "kboot/parallel.hpp"
#include "kboot/random.hpp"

namespace kboot {

inline constexpr const char* kRegretDefinition =
    "per-round regret = max_m E[r|x,m] - E[r|x,chosen], using noiseless mean rewards";

struct RoundRecord {
  std::size_t round = 0;  // 1-based
  std::size_t arm = 0;
  double reward = 0.0;
  double regret = 0.0;
  double cumulative_regret = 0.0;
  std::size_t active_k = 0;   // EC threshold in force this round (arm count without EC)
  bool ec_fallback = false;   // this round's refresh reset k to M

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct RunResult {
  std::size_t run_index = 0;
  std::uint64_t seed = 0;
  std::size_t arms = 0;
  bool classification = false;
  std::optional<double> sigma_e;      // calibrated score noise, eligibility envs only
  std::size_t ec_fallbacks = 0;
  std::vector<RoundRecord> records;

  double cumulative_regret() const { return records.empty() ? 0.0 : records.back().cumulative_regret; }
  // Mean reward over the run; classification accuracy for classification environments.
  double mean_reward() const {
    double s = 0.0;
    for (const auto& r : records) s += r.reward;
    return records.empty() ? 0.0 : s / static_cast<double>(records.size());
  }
};

// Resources shared by every run of one experiment, resolved before any run starts.
struct PreparedExperiment {
  ExperimentConfig config;
  std::shared_ptr<const LeakDictionary> dictionary;
  std::shared_ptr<const ClassificationDataset> dataset;
  std::vector<std::vector<std::size_t>> run_rows;

  std::size_t arms() const { return dataset ? dataset->n_classes : config.env.arms; }
  std::size_t dim() const { return dataset ? dataset->dim : config.env.dim; }
};

inline std::vector<double> default_alpha_grid() {
  return {0.0, 0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 1.0};
}

inline LeakDictionary generate_dictionary(std::size_t arms, std::vector<double> alpha_grid, std::uint64_t replications,
                                          std::uint64_t seed, std::size_t jobs = 0) {
  if (arms < 2) throw DomainError("generate_dictionary: needs at least 2 arms");
  const auto table = generate_leak_table(arms, replications, seed, jobs);
  return build_dictionary(table, alpha_grid);
}

namespace detail {

inline std::string resolve_path(const std::string& base, const std::string& path) {
  if (path.empty() || path.front() == '/' || base.empty()) return path;
  return base + "/" + path;
}

// Generated dictionaries are shared across sweep cells and experiments in one process.
inline std::shared_ptr<const LeakDictionary> cached_dictionary(std::size_t arms, double alpha,
                                                               std::uint64_t replications, std::uint64_t seed,
                                                               std::size_t jobs) {
  static std::mutex mutex;
  static std::map<std::tuple<std::size_t, std::uint64_t, std::uint64_t>, std::shared_ptr<const LeakDictionary>>
      cache;
  auto grid = default_alpha_grid();
  const bool listed = std::find(grid.begin(), grid.end(), alpha) != grid.end();
  std::lock_guard lock(mutex);
  const auto key = std::make_tuple(arms, replications, seed);
  auto it = cache.find(key);
  if (it != cache.end()) {
    const auto& g = it->second->alpha_grid;
    if (listed || std::find(g.begin(), g.end(), alpha) != g.end()) return it->second;
  }
  if (!listed) grid.push_back(alpha);
  if (it != cache.end()) {
    for (double a : it->second->alpha_grid) grid.push_back(a);
  }
  auto dict = std::make_shared<const LeakDictionary>(generate_dictionary(arms, grid, replications, seed, jobs));
  cache[key] = dict;
  return dict;
}

}  // namespace detail

inline PreparedExperiment prepare(const ExperimentConfig& config) {
  PreparedExperiment prep;
  prep.config = config;
  if (config.env.kind == EnvKind::classification) {
    const auto path = detail::resolve_path(config.base_dir, config.env.dataset_path);
    auto ds = load_dataset(path, config.env.schema);
    if (config.env.standardize) standardize(ds);
    prep.run_rows = dataset_to_runs(ds, config.rounds, config.runs, config.seed, config.env.resample_if_short);
    prep.dataset = std::make_shared<const ClassificationDataset>(std::move(ds));
  }
  if (config.policy.ec && !config.policy.ec->pinned_k) {
    const auto& ec = *config.policy.ec;
    if (!ec.dictionary.empty()) {
      auto dict = load_dictionary(detail::resolve_path(config.base_dir, ec.dictionary));
      if (dict.seq_len != prep.arms()) {
        throw ConfigError("key 'policy.ec.dictionary': built for " + std::to_string(dict.seq_len) +
                          " arms, environment has " + std::to_string(prep.arms()));
      }
      prep.dictionary = std::make_shared<const LeakDictionary>(std::move(dict));
    } else {
      prep.dictionary = detail::cached_dictionary(prep.arms(), ec.alpha, ec.replications, ec.dictionary_seed,
                                                  config.jobs);
    }
  }
  return prep;
}

namespace detail {

// Per-run random streams, all derived from the run seed.
enum Stream : std::uint64_t { kEnvStream = 1, kPolicyStream = 2, kCalibrationStream = 3, kScoreSpecStream = 4 };

inline EligibilitySimSpec calibrated_score_spec(const SyntheticEnv& env, const EligibilityEnvSpec& es,
                                                std::uint64_t seed) {
  Rng spec_rng = make_rng(seed, kScoreSpecStream);
  Rng cal_rng = make_rng(seed, kCalibrationStream);
  // w is redrawn when its draw cannot reach the target correlation even without score noise
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto spec = draw_eligibility_spec(env.arms(), spec_rng);
    spec.target_rho = es.target_rho;
    try {
      spec.sigma_e = calibrate_sigma_e(spec, env, es.target_rho, cal_rng, es.calibration_rounds);
      return spec;
    } catch (const NonBracketingError&) {
    }
  }
  throw DomainError("eligibility calibration: target rho " + format_double(es.target_rho) +
                    " unreachable after 100 draws of w");
}

}  // namespace detail

inline RunResult run_one(const PreparedExperiment& prep, std::size_t run_index) {
  const auto& cfg = prep.config;
  const std::uint64_t seed = cfg.seed + run_index;
  const std::size_t M = prep.arms();
  const std::size_t d = prep.dim();
  const bool with_scores = cfg.env.eligibility.has_value();
  const bool scores_in_context = with_scores && cfg.policy.scores_in_context;
  const std::size_t model_dim = d + (scores_in_context ? 1 : 0);

  RunResult result;
  result.run_index = run_index;
  result.seed = seed;
  result.arms = M;
  result.classification = prep.dataset != nullptr;
  result.records.reserve(cfg.rounds);

  Rng env_rng = make_rng(seed, detail::kEnvStream);
  Rng policy_rng = make_rng(seed, detail::kPolicyStream);

  std::optional<SyntheticEnv> env;
  EligibilitySimSpec score_spec;
  if (!prep.dataset) {
    env.emplace(SyntheticEnvSpec{M, d, cfg.env.family, seed});
    if (with_scores) {
      score_spec = detail::calibrated_score_spec(*env, *cfg.env.eligibility, seed);
      result.sigma_e = score_spec.sigma_e;
    }
  }

  std::optional<KBoot<>> kb;
  std::optional<LinUCB> lin;
  if (cfg.policy.kind == PolicyKind::kboot) {
    kb.emplace(M, KBootConfig{cfg.policy.K, cfg.policy.epsilon, seed});
  } else if (cfg.policy.kind == PolicyKind::linucb) {
    lin.emplace(M, model_dim, cfg.policy.alpha_ucb);
  }
  std::optional<EligibilityController> ec;
  if (cfg.policy.ec) {
    const auto& e = *cfg.policy.ec;
    ec.emplace(M, ECConfig{e.alpha, e.k0, e.update_period, e.pinned_k}, prep.dictionary);
  }

  std::vector<ContextVector> arm_context(scores_in_context ? M : 1);
  double cumulative = 0.0;
  for (std::size_t t = 0; t < cfg.rounds; ++t) {
    ContextVector x;
    std::vector<double> means;
    std::vector<double> rewards;
    EligibilityInput scores;
    std::size_t label = 0;
    if (env) {
      auto round = env->round(env_rng);
      x = std::move(round.x);
      means = std::move(round.mean_rewards);
      rewards = std::move(round.noisy_rewards);
      if (with_scores) scores = sim_scores(score_spec, rewards, env_rng);
    } else {
      const std::size_t row = prep.run_rows[run_index][t];
      x = prep.dataset->features[row];
      label = prep.dataset->labels[row];
      means.assign(M, 0.0);
      means[label] = 1.0;
      rewards = means;
    }
    if (scores_in_context) {
      for (std::size_t m = 0; m < M; ++m) {
        arm_context[m] = x;
        arm_context[m].push_back(scores.scores[m]);
      }
    } else {
      arm_context[0] = x;
    }
    auto context_of = [&](std::size_t m) -> std::span<const double> {
      return arm_context[scores_in_context ? m : 0];
    };
    auto reward_of = [&](std::size_t m) { return rewards[m]; };

    RoundRecord rec;
    rec.round = t + 1;
    rec.active_k = ec ? ec->k() : M;
    const std::size_t fallbacks_before = ec ? ec->fallback_count() : 0;
    switch (cfg.policy.kind) {
      case PolicyKind::uniform: rec.arm = uniform_policy(M, policy_rng); break;
      case PolicyKind::top1: rec.arm = top1_policy(scores, policy_rng); break;
      case PolicyKind::kboot:
        if (ec) {
          rec.arm = ec_step(*ec, *kb, context_of, scores, reward_of, policy_rng).arm;
        } else {
          rec.arm = choose_arm(*kb, context_of, {}, policy_rng);
          kb->update(rec.arm, context_of(rec.arm), rewards[rec.arm]);
        }
        break;
      case PolicyKind::linucb:
        if (ec) {
          rec.arm = ec_step(*ec, *lin, context_of, scores, reward_of, policy_rng).arm;
        } else {
          rec.arm = choose_arm(*lin, context_of, {}, policy_rng);
          lin->update(rec.arm, context_of(rec.arm), rewards[rec.arm]);
        }
        break;
    }
    rec.reward = rewards[rec.arm];
    rec.regret = std::max(0.0, *std::max_element(means.begin(), means.end()) - means[rec.arm]);
    cumulative += rec.regret;
    rec.cumulative_regret = cumulative;
    rec.ec_fallback = ec && ec->fallback_count() > fallbacks_before;
    result.records.push_back(rec);
  }
  result.ec_fallbacks = ec ? ec->fallback_count() : 0;
  return result;
}

inline std::vector<RunResult> run_all(const PreparedExperiment& prep) {
  std::vector<RunResult> results(prep.config.runs);
  parallel_for(prep.config.runs, prep.config.jobs, [&](std::size_t r) {
    try {
      results[r] = run_one(prep, r);
    } catch (const DomainError& e) {
      throw DomainError("run " + std::to_string(r) + " (seed " + std::to_string(prep.config.seed + r) +
                        "): " + e.what());
    }
  });
  return results;
}

// ---------------------------------------------------------------------------------------------
// Aggregation

enum class Metric { cumulative_regret, accuracy };

inline std::string_view to_string(Metric m) {
  return m == Metric::cumulative_regret ? "cumulative_regret" : "accuracy";
}

// Per-round curve of one run. Accuracy is the running mean reward (fraction correct).
inline std::vector<double> metric_curve(const RunResult& r, Metric metric) {
  std::vector<double> out;
  out.reserve(r.records.size());
  double reward_sum = 0.0;
  for (const auto& rec : r.records) {
    reward_sum += rec.reward;
    out.push_back(metric == Metric::cumulative_regret ? rec.cumulative_regret
                                                      : reward_sum / static_cast<double>(rec.round));
  }
  return out;
}

struct Summary {
  Metric metric = Metric::cumulative_regret;
  std::vector<double> mean, p10, p90;
  std::vector<std::vector<double>> per_run;  // [run][round]

  std::size_t rounds() const { return mean.size(); }
};

inline Summary aggregate_curves(std::vector<std::vector<double>> curves, Metric metric) {
  if (curves.empty()) throw DomainError("aggregate: no runs");
  const std::size_t N = curves.front().size();
  for (const auto& c : curves) {
    if (c.size() != N) throw DomainError("aggregate: runs have different lengths");
  }
  Summary s;
  s.metric = metric;
  s.mean.resize(N);
  s.p10.resize(N);
  s.p90.resize(N);
  std::vector<double> column(curves.size());
  for (std::size_t t = 0; t < N; ++t) {
    for (std::size_t r = 0; r < curves.size(); ++r) column[r] = curves[r][t];
    std::sort(column.begin(), column.end());
    double sum = 0.0;
    for (double v : column) sum += v;  // sorted order keeps the mean independent of run order
    s.mean[t] = sum / static_cast<double>(column.size());
    s.p10[t] = sorted_quantile(column, 0.1);
    s.p90[t] = sorted_quantile(column, 0.9);
  }
  s.per_run = std::move(curves);
  return s;
}

inline Summary aggregate(const std::vector<RunResult>& results, Metric metric = Metric::cumulative_regret) {
  std::vector<std::vector<double>> curves;
  curves.reserve(results.size());
  for (const auto& r : results) curves.push_back(metric_curve(r, metric));
  return aggregate_curves(std::move(curves), metric);
}

// ---------------------------------------------------------------------------------------------
// Export

inline void write_summary_csv(std::ostream& os, const Summary& s, bool per_run_columns) {
  os << "round,mean,p10,p90";
  if (per_run_columns) {
    for (std::size_t r = 0; r < s.per_run.size(); ++r) os << ",run_" << r;
  }
  os << '\n';
  for (std::size_t t = 0; t < s.rounds(); ++t) {
    os << (t + 1) << ',' << format_double(s.mean[t]) << ',' << format_double(s.p10[t]) << ','
       << format_double(s.p90[t]);
    if (per_run_columns) {
      for (const auto& run : s.per_run) os << ',' << format_double(run[t]);
    }
    os << '\n';
  }
}

inline nlohmann::json summary_to_json(const Summary& s) {
  return {{"metric", std::string(to_string(s.metric))}, {"mean", s.mean}, {"p10", s.p10}, {"p90", s.p90}};
}

inline Summary summary_from_json(const nlohmann::json& j) {
  Summary s;
  s.metric = j.at("metric").get<std::string>() == "accuracy" ? Metric::accuracy : Metric::cumulative_regret;
  s.mean = j.at("mean").get<std::vector<double>>();
  s.p10 = j.at("p10").get<std::vector<double>>();
  s.p90 = j.at("p90").get<std::vector<double>>();
  return s;
}

inline nlohmann::json results_to_json(const ExperimentConfig& config, const std::vector<RunResult>& results,
                                      const std::vector<Summary>& summaries) {
  nlohmann::json j;
  j["format"] = "kboot-results/1";
  j["config"] = config_to_json(config);
  j["regret_definition"] = kRegretDefinition;
  j["summaries"] = nlohmann::json::array();
  for (const auto& s : summaries) j["summaries"].push_back(summary_to_json(s));
  j["runs"] = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json jr;
    jr["run_index"] = r.run_index;
    jr["seed"] = r.seed;
    jr["arms"] = r.arms;
    jr["cumulative_regret"] = r.cumulative_regret();
    if (r.classification) jr["accuracy"] = r.mean_reward();
    if (r.sigma_e) jr["sigma_e"] = *r.sigma_e;
    jr["ec_fallbacks"] = r.ec_fallbacks;
    std::vector<std::size_t> arm, k;
    std::vector<double> reward, regret;
    std::vector<int> fallback;
    for (const auto& rec : r.records) {
      arm.push_back(rec.arm);
      k.push_back(rec.active_k);
      reward.push_back(rec.reward);
      regret.push_back(rec.regret);
      fallback.push_back(rec.ec_fallback ? 1 : 0);
    }
    jr["arm"] = arm;
    jr["reward"] = reward;
    jr["regret"] = regret;
    jr["active_k"] = k;
    jr["ec_fallback"] = fallback;
    j["runs"].push_back(std::move(jr));
  }
  return j;
}

// Static line chart: mean curve with the P10-P90 band shaded.
inline std::string summary_to_svg(const Summary& s, const std::string& title) {
  const double W = 640, H = 400, L = 70, R = 20, T = 40, B = 50;
  const std::size_t N = s.rounds();
  double lo = 0.0, hi = 0.0;
  for (std::size_t t = 0; t < N; ++t) {
    lo = std::min(lo, s.p10[t]);
    hi = std::max(hi, s.p90[t]);
  }
  if (hi <= lo) hi = lo + 1.0;
  auto px = [&](std::size_t t) { return L + (W - L - R) * (N > 1 ? static_cast<double>(t) / (N - 1) : 0.0); };
  auto py = [&](double v) { return H - B - (H - T - B) * (v - lo) / (hi - lo); };
  auto num = [](double v) {
    std::ostringstream ss;
    ss.setf(std::ios::fixed);
    ss.precision(2);
    ss << v;
    return ss.str();
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
     << title << "</text>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
     << "font-size=\"12\">round</text>\n";
  os << "<text x=\"" << L - 8 << "\" y=\"" << py(hi) + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
     << "font-size=\"11\">" << num(hi) << "</text>\n";
  os << "<text x=\"" << L - 8 << "\" y=\"" << py(lo) + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
     << "font-size=\"11\">" << num(lo) << "</text>\n";
  os << "<text x=\"" << W - R << "\" y=\"" << H - B + 16 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
     << "font-size=\"11\">" << N << "</text>\n";
  // thin the polyline to at most ~800 points
  const std::size_t stride = std::max<std::size_t>(1, N / 800);
  os << "<polygon fill=\"steelblue\" fill-opacity=\"0.25\" stroke=\"none\" points=\"";
  for (std::size_t t = 0; t < N; t += stride) os << num(px(t)) << ',' << num(py(s.p90[t])) << ' ';
  for (std::size_t t = N; t-- > 0;) {
    if (t % stride == 0) os << num(px(t)) << ',' << num(py(s.p10[t])) << ' ';
  }
  os << "\"/>\n<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (std::size_t t = 0; t < N; t += stride) os << num(px(t)) << ',' << num(py(s.mean[t])) << ' ';
  os << "\"/>\n</svg>\n";
  return os.str();
}

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace detail

enum class ExportFormat { csv, json, svg_chart };

// Writes one artifact. csv/svg_chart take the first summary; json writes everything.
inline void export_results(const ExperimentConfig& config, const std::vector<Summary>& summaries,
                           const std::vector<RunResult>& results, ExportFormat format,
                           const std::filesystem::path& path, bool per_run_columns = false) {
  std::ostringstream os;
  switch (format) {
    case ExportFormat::csv: write_summary_csv(os, summaries.at(0), per_run_columns); break;
    case ExportFormat::json: os << results_to_json(config, results, summaries).dump(1) << '\n'; break;
    case ExportFormat::svg_chart:
      os << summary_to_svg(summaries.at(0), config.name + " (" + std::string(to_string(summaries.at(0).metric)) +
                                                 ", mean and P10-P90)");
      break;
  }
  detail::write_text(path, os.str());
}

struct ExperimentOutput {
  std::vector<RunResult> results;
  std::vector<Summary> summaries;  // cumulative regret, then accuracy for classification
};

// Runs every seed of an experiment and writes the configured artifacts into `out_dir`.
inline ExperimentOutput run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  const auto prep = prepare(config);
  ExperimentOutput out;
  out.results = run_all(prep);
  out.summaries.push_back(aggregate(out.results, Metric::cumulative_regret));
  if (prep.dataset) out.summaries.push_back(aggregate(out.results, Metric::accuracy));

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    if (config.output.csv) {
      export_results(config, out.summaries, out.results, ExportFormat::csv, out_dir / "summary.csv",
                     config.output.per_run_columns);
      if (out.summaries.size() > 1) {
        std::ostringstream os;
        write_summary_csv(os, out.summaries[1], config.output.per_run_columns);
        detail::write_text(out_dir / "accuracy.csv", os.str());
      }
    }
    if (config.output.json) {
      export_results(config, out.summaries, out.results, ExportFormat::json, out_dir / "results.json");
    }
    if (config.output.svg) {
      export_results(config, out.summaries, out.results, ExportFormat::svg_chart, out_dir / "chart.svg");
    }
  }
  return out;
}

// Expands a sweep into one config per (target_rho, alpha) cell, in row-major order.
struct SweepCell {
  std::string id;
  ExperimentConfig config;
};

inline std::vector<SweepCell> expand_sweep(const ExperimentConfig& base) {
  if (!base.sweep) return {{"", base}};
  std::vector<std::optional<double>> rhos, alphas;
  for (double r : base.sweep->target_rho) rhos.emplace_back(r);
  for (double a : base.sweep->alpha) alphas.emplace_back(a);
  if (rhos.empty()) rhos.emplace_back();
  if (alphas.empty()) alphas.emplace_back();
  std::vector<SweepCell> cells;
  for (const auto& r : rhos) {
    for (const auto& a : alphas) {
      SweepCell cell{"", base};
      cell.config.sweep.reset();
      if (r) {
        cell.config.env.eligibility->target_rho = *r;
        cell.id += "rho_" + format_double(*r);
      }
      if (a) {
        cell.config.policy.ec->alpha = *a;
        cell.id += std::string(cell.id.empty() ? "" : "_") + "alpha_" + format_double(*a);
      }
      cell.config.name = base.name + "/" + cell.id;
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

}  // namespace kboot
