// kboot: command-line driver for dictionary generation, experiments, benchmarks and dataset
// conversion. Exit codes: 0 success, 2 configuration/usage error, 3 runtime error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kboot/config.hpp"
#include "kboot/eligibility.hpp"
#include "kboot/envs.hpp"
#include "kboot/format.hpp"
#include "kboot/harness.hpp"

namespace fs = std::filesystem;
using namespace kboot;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int cmd_gen_dict(std::size_t arms, std::vector<double> alpha_grid, std::uint64_t replications, std::uint64_t seed,
                 const std::string& out, std::size_t jobs) {
  if (arms < 2) throw ConfigError("--arms must be at least 2");
  if (alpha_grid.empty()) alpha_grid = default_alpha_grid();
  for (double a : alpha_grid) {
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("--alpha-grid values must be in [0,1]");
  }
  if (replications == 0) throw ConfigError("--replications must be positive");
  const auto table = generate_leak_table(arms, replications, seed, jobs);
  LeakDictionary dict;
  try {
    dict = build_dictionary(table, alpha_grid);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  save_dictionary(out, dict);

  double lowest = table.rows.front().mean_rho;
  for (const auto& r : table.rows) lowest = std::min(lowest, r.mean_rho);
  std::cout << "wrote " << out << "\n"
            << "  arms " << arms << ", replications " << replications << ", seed " << seed << "\n"
            << "  p-grid rows " << table.rows.size() << " (p = 0.." << table.rows.back().p << ")\n"
            << "  mean rho range [" << format_double(lowest) << ", 1], largest refinable gap "
            << format_double(max_refinable_gap(table)) << "\n"
            << "  alpha grid " << dict.alpha_grid.size() << " values x rho grid " << dict.rho_grid.size()
            << " points\n";
  return kExitOk;
}

ExperimentOutput run_cell(const ExperimentConfig& cfg, const fs::path& dir) {
  auto out = run_experiment(cfg, dir);
  const auto& s = out.summaries.front();
  std::cout << cfg.name << ": " << cfg.runs << " runs x " << cfg.rounds << " rounds, mean cumulative regret "
            << format_double(s.mean.back()) << " (P10 " << format_double(s.p10.back()) << ", P90 "
            << format_double(s.p90.back()) << ")";
  if (out.summaries.size() > 1) std::cout << ", mean accuracy " << format_double(out.summaries[1].mean.back());
  std::cout << "\n";
  return out;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out_dir,
            std::optional<std::size_t> jobs) {
  auto cfg = load_config(config_path);
  if (seed) cfg.seed = *seed;
  if (jobs) cfg.jobs = *jobs;
  const fs::path out = out_dir.empty() ? fs::path("results") / cfg.name : fs::path(out_dir);
  const auto cells = expand_sweep(cfg);
  for (const auto& cell : cells) {
    run_cell(cell.config, cell.id.empty() ? out : out / cell.id);
  }
  if (cells.size() > 1) std::cout << cells.size() << " sweep cells written under " << out.string() << "\n";
  return kExitOk;
}

int cmd_validate(const std::string& config_path) {
  const auto cfg = load_config(config_path);
  std::cout << config_path << ": ok (" << cfg.policy.label() << ", " << cfg.runs << " runs x " << cfg.rounds
            << " rounds";
  if (cfg.sweep) std::cout << ", " << expand_sweep(cfg).size() << " sweep cells";
  std::cout << ")\n";
  return kExitOk;
}

struct BenchOptions {
  std::string suite;
  std::string out;
  std::size_t rounds = 5000;
  std::size_t runs = 10;
  std::uint64_t seed = 0;
  std::size_t jobs = 0;
  std::string data_dir = "data";
  bool standardize = false;
};

struct BenchModel {
  std::string id;
  PolicySpec policy;
  std::string family;  // "kboot" or "linucb"
};

std::vector<BenchModel> bench_grid() {
  std::vector<BenchModel> models;
  for (std::size_t K : {20, 50, 100}) {
    PolicySpec p;
    p.kind = PolicyKind::kboot;
    p.K = K;
    models.push_back({"kboot_K" + std::to_string(K), p, "kboot"});
  }
  for (double a : {0.1, 1.0, 10.0}) {
    PolicySpec p;
    p.kind = PolicyKind::linucb;
    p.alpha_ucb = a;
    models.push_back({"linucb_alpha" + format_double(a), p, "linucb"});
  }
  return models;
}

int cmd_bench_synthetic(const BenchOptions& o) {
  const fs::path root(o.out);
  const auto models = bench_grid();
  const RewardFamily families[] = {RewardFamily::linear, RewardFamily::quadratic, RewardFamily::inner_product,
                                   RewardFamily::cosine};
  std::map<std::string, double> average;  // model id -> mean final regret averaged over families
  nlohmann::json report;
  report["suite"] = "synthetic";
  report["rounds"] = o.rounds;
  report["runs"] = o.runs;
  report["regret_definition"] = kRegretDefinition;
  std::size_t cells = 0;
  for (auto fam : families) {
    for (const auto& m : models) {
      ExperimentConfig c;
      c.name = std::string(to_string(fam)) + "/" + m.id;
      c.rounds = o.rounds;
      c.runs = o.runs;
      c.seed = o.seed;
      c.jobs = o.jobs;
      c.policy = m.policy;
      c.env.kind = EnvKind::synthetic;
      c.env.family = fam;
      c.output.svg = true;
      const auto out = run_cell(c, root / std::string(to_string(fam)) / m.id);
      const double final_regret = out.summaries.front().mean.back();
      report["cells"][std::string(to_string(fam))][m.id] = final_regret;
      average[m.id] += final_regret / 4.0;
      ++cells;
    }
  }
  for (const std::string fam : {"kboot", "linucb"}) {
    std::string best;
    for (const auto& m : models) {
      if (m.family != fam) continue;
      if (best.empty() || average[m.id] < average[best]) best = m.id;
    }
    report["selected"][fam] = best;
  }
  report["average_final_regret"] = average;
  report["cell_count"] = cells;
  std::ofstream(root / "report.json") << report.dump(2) << "\n";

  std::ostringstream txt;
  txt << "hyperparameter selection (lowest mean cumulative regret averaged over 4 reward families)\n";
  for (const auto& m : models) txt << "  " << m.id << ": " << format_double(average[m.id]) << "\n";
  txt << "selected kboot: " << report["selected"]["kboot"].get<std::string>() << "\n";
  txt << "selected linucb: " << report["selected"]["linucb"].get<std::string>() << "\n";
  std::ofstream(root / "report.txt") << txt.str();
  std::cout << txt.str();
  return kExitOk;
}

int cmd_bench_uci(const BenchOptions& o) {
  const std::vector<std::string> names = {"covertype", "magic", "statlog", "mnist"};
  std::vector<std::string> missing;
  for (const auto& n : names) {
    const auto p = fs::path(o.data_dir) / (n + ".csv");
    if (!fs::exists(p)) missing.push_back(p.string());
  }
  if (!missing.empty()) {
    std::string msg = "missing datasets (canonical CSV from convert-dataset expected):";
    for (const auto& m : missing) msg += "\n  " + m;
    throw ConfigError(msg);
  }
  const fs::path root(o.out);
  nlohmann::json report;
  report["suite"] = "uci";
  std::vector<std::pair<std::string, PolicySpec>> models;
  {
    PolicySpec kb;
    kb.kind = PolicyKind::kboot;
    kb.K = 100;
    PolicySpec lin;
    lin.kind = PolicyKind::linucb;
    lin.alpha_ucb = 10.0;
    PolicySpec uni;
    uni.kind = PolicyKind::uniform;
    models = {{"kboot_K100", kb}, {"linucb_alpha10", lin}, {"uniform", uni}};
  }
  for (const auto& n : names) {
    for (const auto& [id, policy] : models) {
      ExperimentConfig c;
      c.name = n + "/" + id;
      c.rounds = o.rounds;
      c.runs = o.runs;
      c.seed = o.seed;
      c.jobs = o.jobs;
      c.policy = policy;
      c.env.kind = EnvKind::classification;
      c.env.dataset_path = (fs::path(o.data_dir) / (n + ".csv")).string();
      c.env.resample_if_short = true;
      c.env.standardize = o.standardize;
      c.output.svg = true;
      const auto out = run_cell(c, root / n / id);
      report["cells"][n][id] = {{"cumulative_regret", out.summaries[0].mean.back()},
                                {"accuracy", out.summaries[1].mean.back()}};
    }
  }
  std::ofstream(root / "report.json") << report.dump(2) << "\n";
  return kExitOk;
}

int cmd_convert(const std::string& in, const std::string& out, const DatasetSchema& schema) {
  const auto ds = load_dataset(in, schema);
  {
    std::ofstream os(out, std::ios::binary);
    if (!os) throw IoError("cannot open " + out + " for writing");
    write_canonical_dataset(os, ds);
  }
  nlohmann::json meta;
  meta["source"] = in;
  meta["rows"] = ds.rows();
  meta["d"] = ds.dim;
  meta["n_classes"] = ds.n_classes;
  meta["labels"] = ds.label_names;  // index = dense label
  std::ofstream(out + ".meta.json", std::ios::binary) << meta.dump(2) << "\n";
  std::cout << "wrote " << out << ": " << ds.rows() << " rows, d = " << ds.dim << ", " << ds.n_classes
            << " classes\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"K-Boot contextual bandit with eligibility control"};
  app.require_subcommand(1);

  std::size_t jobs = 0;

  auto* gen = app.add_subcommand("gen-dict", "Simulate the leak table and write a leak dictionary");
  std::size_t arms = 0;
  std::vector<double> alpha_grid;
  std::uint64_t replications = 100000;
  std::uint64_t dict_seed = 2022;
  std::string dict_out;
  gen->add_option("--arms", arms, "Number of arms (rank-sequence length)")->required();
  gen->add_option("--alpha-grid", alpha_grid, "Risk levels, comma separated")->delimiter(',');
  gen->add_option("--replications", replications, "Replicates per p-grid row");
  gen->add_option("--seed", dict_seed, "Simulation seed");
  gen->add_option("--out", dict_out, "Output dictionary path")->required();
  gen->add_option("--jobs", jobs, "Worker threads (0 = all cores)");

  auto* run = app.add_subcommand("run", "Run an experiment config");
  std::string config_path;
  std::optional<std::uint64_t> run_seed;
  std::optional<std::size_t> run_jobs;
  std::string run_out;
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--seed", run_seed, "Override the base seed");
  run->add_option("--out", run_out, "Output directory (default results/<name>)");
  run->add_option("--jobs", run_jobs, "Worker threads (0 = all cores)");

  auto* bench = app.add_subcommand("bench", "Run a preset benchmark suite");
  BenchOptions bo;
  bench->add_option("--suite", bo.suite, "synthetic or uci")->required()->check(CLI::IsMember({"synthetic", "uci"}));
  bench->add_option("--out", bo.out, "Output directory")->required();
  bench->add_option("--rounds", bo.rounds, "Rounds per run");
  bench->add_option("--runs", bo.runs, "Runs per cell");
  bench->add_option("--seed", bo.seed, "Base seed");
  bench->add_option("--jobs", bo.jobs, "Worker threads (0 = all cores)");
  bench->add_option("--data-dir", bo.data_dir, "Directory holding covertype/magic/statlog/mnist .csv (uci suite)");
  bench->add_flag("--standardize", bo.standardize, "z-score dataset features (uci suite)");

  auto* conv = app.add_subcommand("convert-dataset", "Normalize a delimited classification dataset");
  std::string conv_in, conv_out, delimiter = ",";
  DatasetSchema schema;
  conv->add_option("--in", conv_in, "Input file")->required();
  conv->add_option("--out", conv_out, "Output canonical CSV")->required();
  conv->add_option("--delimiter", delimiter, "Field delimiter (single character, or \\t)");
  conv->add_flag("--header", schema.header, "Skip the first line");
  conv->add_option("--label-column", schema.label_column, "0-based label column; negative counts from the end");

  auto* val = app.add_subcommand("validate-config", "Check an experiment config against the schema");
  std::string val_path;
  val->add_option("--config", val_path, "Experiment config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*gen) return cmd_gen_dict(arms, alpha_grid, replications, dict_seed, dict_out, jobs);
    if (*run) return cmd_run(config_path, run_seed, run_out, run_jobs);
    if (*bench) {
      return bo.suite == "synthetic" ? cmd_bench_synthetic(bo) : cmd_bench_uci(bo);
    }
    if (*conv) {
      if (delimiter == "\\t") {
        schema.delimiter = '\t';
      } else if (delimiter.size() == 1) {
        schema.delimiter = delimiter[0];
      } else {
        throw ConfigError("--delimiter must be a single character");
      }
      return cmd_convert(conv_in, conv_out, schema);
    }
    if (*val) return cmd_validate(val_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
