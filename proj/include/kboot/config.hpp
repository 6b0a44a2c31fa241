#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "kboot/eligibility.hpp"
#include "kboot/envs.hpp"
#include "kboot/error.hpp"

namespace kboot {

// Experiment configuration (JSON). Schema, with defaults:
//
//   name            string   "experiment"
//   rounds          int>0    required
//   runs            int>0    1
//   seed            int>=0   0          run r uses seed + r
//   jobs            int>=0   0          worker threads, 0 = all cores
//   policy {
//     type          "kboot" | "linucb" | "top1" | "uniform"      required
//     K             int>0    100        kboot neighbors
//     epsilon       (0,1)    0.01       kboot influential-set tolerance
//     alpha_ucb     >=0      10         linucb exploration weight
//     scores_in_context bool  false for kboot, true for linucb
//     ec {                              optional; enables eligibility control
//       alpha           [0,1]  0.5
//       k0              int    0 (= arms)
//       update_period   int>0  50
//       pinned_k        int    absent
//       dictionary      path   absent -> generated in memory
//       replications    int>0  100000   for generated dictionaries
//       dictionary_seed int    2022
//     }
//   }
//   environment {
//     type          "synthetic" | "classification"              required
//     family        "linear" | "quadratic" | "inner_product" | "cosine"   (synthetic) "linear"
//     arms          int>0    10         (synthetic)
//     dim           int>0    20         (synthetic)
//     eligibility { target_rho (0,1) required; calibration_rounds int 10000 }   (synthetic, optional)
//     dataset { path required; delimiter ","; header false; label_column -1 }  (classification)
//     resample_if_short bool false      (classification)
//     standardize   bool     false      (classification)
//   }
//   output { csv true; json true; svg false; per_run_columns false }
//   sweep { target_rho [..]; alpha [..] }      optional grid over eligibility rho x EC alpha

enum class PolicyKind { kboot, linucb, top1, uniform };

inline std::string_view to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::kboot: return "kboot";
    case PolicyKind::linucb: return "linucb";
    case PolicyKind::top1: return "top1";
    case PolicyKind::uniform: return "uniform";
  }
  return "?";
}

struct ECSpec {
  double alpha = 0.5;
  std::size_t k0 = 0;
  std::size_t update_period = 50;
  std::optional<std::size_t> pinned_k;
  std::string dictionary;
  std::uint64_t replications = 100000;
  std::uint64_t dictionary_seed = 2022;
};

struct PolicySpec {
  PolicyKind kind = PolicyKind::kboot;
  std::size_t K = 100;
  double epsilon = 0.01;
  double alpha_ucb = 10.0;
  bool scores_in_context = false;
  std::optional<ECSpec> ec;

  std::string label() const {
    std::string s(to_string(kind));
    if (ec) s += "+ec";
    return s;
  }
};

struct EligibilityEnvSpec {
  double target_rho = 0.5;
  std::size_t calibration_rounds = 10000;
};

enum class EnvKind { synthetic, classification };

struct EnvSpec {
  EnvKind kind = EnvKind::synthetic;
  RewardFamily family = RewardFamily::linear;
  std::size_t arms = 10;
  std::size_t dim = 20;
  std::optional<EligibilityEnvSpec> eligibility;
  std::string dataset_path;
  DatasetSchema schema;
  bool resample_if_short = false;
  bool standardize = false;
};

struct OutputSpec {
  bool csv = true;
  bool json = true;
  bool svg = false;
  bool per_run_columns = false;
};

struct SweepSpec {
  std::vector<double> target_rho;
  std::vector<double> alpha;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::size_t rounds = 0;
  std::size_t runs = 1;
  std::uint64_t seed = 0;
  std::size_t jobs = 0;
  PolicySpec policy;
  EnvSpec env;
  OutputSpec output;
  std::optional<SweepSpec> sweep;
  std::string base_dir;  // directory relative paths resolve against
};

namespace detail {

using nlohmann::json;

inline void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!ok.count(it.key())) throw ConfigError("unknown key '" + where + "." + it.key() + "'");
  }
}

inline std::string join(const std::string& where, const char* key) {
  return where.empty() ? std::string(key) : where + "." + key;
}

template <class T>
T get_number(const json& obj, const std::string& where, const char* key, T fallback, bool required = false) {
  const auto name = join(where, key);
  if (!obj.contains(key)) {
    if (required) throw ConfigError("missing required key '" + name + "'");
    return fallback;
  }
  const auto& v = obj.at(key);
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw ConfigError("key '" + name + "' must be an integer");
    if (v.get<long long>() < 0) throw ConfigError("key '" + name + "' must be nonnegative");
  } else {
    if (!v.is_number()) throw ConfigError("key '" + name + "' must be a number");
  }
  return v.get<T>();
}

inline bool get_bool(const json& obj, const std::string& where, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) throw ConfigError("key '" + join(where, key) + "' must be a boolean");
  return obj.at(key).get<bool>();
}

inline std::string get_string(const json& obj, const std::string& where, const char* key, std::string fallback,
                              bool required = false) {
  if (!obj.contains(key)) {
    if (required) throw ConfigError("missing required key '" + join(where, key) + "'");
    return fallback;
  }
  if (!obj.at(key).is_string()) throw ConfigError("key '" + join(where, key) + "' must be a string");
  return obj.at(key).get<std::string>();
}

inline std::vector<double> get_number_list(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) return {};
  const auto& v = obj.at(key);
  if (!v.is_array() || v.empty()) throw ConfigError("key '" + join(where, key) + "' must be a nonempty array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError("key '" + join(where, key) + "' must contain numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

inline void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("key '" + key + "' " + what);
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j, const std::string& base_dir = "") {
  using namespace detail;
  check_keys(j, "config", {"name", "rounds", "runs", "seed", "jobs", "policy", "environment", "output", "sweep"});
  ExperimentConfig c;
  c.base_dir = base_dir;
  c.name = get_string(j, "", "name", "experiment");
  c.rounds = get_number<std::size_t>(j, "", "rounds", 0, true);
  require(c.rounds > 0, "rounds", "must be positive");
  c.runs = get_number<std::size_t>(j, "", "runs", 1);
  require(c.runs > 0, "runs", "must be positive");
  c.seed = get_number<std::uint64_t>(j, "", "seed", 0);
  c.jobs = get_number<std::size_t>(j, "", "jobs", 0);

  if (!j.contains("policy")) throw ConfigError("missing required key 'policy'");
  const auto& p = j.at("policy");
  check_keys(p, "policy", {"type", "K", "epsilon", "alpha_ucb", "scores_in_context", "ec"});
  const auto type = get_string(p, "policy", "type", "", true);
  if (type == "kboot") {
    c.policy.kind = PolicyKind::kboot;
  } else if (type == "linucb") {
    c.policy.kind = PolicyKind::linucb;
  } else if (type == "top1") {
    c.policy.kind = PolicyKind::top1;
  } else if (type == "uniform") {
    c.policy.kind = PolicyKind::uniform;
  } else {
    throw ConfigError("key 'policy.type' has unknown value '" + type + "'");
  }
  c.policy.K = get_number<std::size_t>(p, "policy", "K", 100);
  require(c.policy.K >= 1, "policy.K", "must be at least 1");
  c.policy.epsilon = get_number<double>(p, "policy", "epsilon", 0.01);
  require(c.policy.epsilon > 0.0 && c.policy.epsilon < 1.0, "policy.epsilon", "must be in (0,1)");
  c.policy.alpha_ucb = get_number<double>(p, "policy", "alpha_ucb", 10.0);
  require(c.policy.alpha_ucb >= 0.0, "policy.alpha_ucb", "must be nonnegative");
  c.policy.scores_in_context =
      get_bool(p, "policy", "scores_in_context", c.policy.kind == PolicyKind::linucb);
  if (p.contains("ec")) {
    const auto& e = p.at("ec");
    check_keys(e, "policy.ec",
               {"alpha", "k0", "update_period", "pinned_k", "dictionary", "replications", "dictionary_seed"});
    ECSpec ec;
    ec.alpha = get_number<double>(e, "policy.ec", "alpha", 0.5);
    require(ec.alpha >= 0.0 && ec.alpha <= 1.0, "policy.ec.alpha", "must be in [0,1]");
    ec.k0 = get_number<std::size_t>(e, "policy.ec", "k0", 0);
    ec.update_period = get_number<std::size_t>(e, "policy.ec", "update_period", 50);
    require(ec.update_period >= 1, "policy.ec.update_period", "must be positive");
    if (e.contains("pinned_k")) ec.pinned_k = get_number<std::size_t>(e, "policy.ec", "pinned_k", 0);
    ec.dictionary = get_string(e, "policy.ec", "dictionary", "");
    ec.replications = get_number<std::uint64_t>(e, "policy.ec", "replications", 100000);
    require(ec.replications >= 1, "policy.ec.replications", "must be positive");
    ec.dictionary_seed = get_number<std::uint64_t>(e, "policy.ec", "dictionary_seed", 2022);
    require(c.policy.kind == PolicyKind::kboot || c.policy.kind == PolicyKind::linucb, "policy.ec",
            "applies only to kboot or linucb");
    c.policy.ec = ec;
  }

  if (!j.contains("environment")) throw ConfigError("missing required key 'environment'");
  const auto& en = j.at("environment");
  check_keys(en, "environment",
             {"type", "family", "arms", "dim", "eligibility", "dataset", "resample_if_short", "standardize"});
  const auto etype = get_string(en, "environment", "type", "", true);
  if (etype == "synthetic") {
    c.env.kind = EnvKind::synthetic;
    const auto fam = get_string(en, "environment", "family", "linear");
    try {
      c.env.family = parse_reward_family(fam);
    } catch (const DomainError&) {
      throw ConfigError("key 'environment.family' has unknown value '" + fam + "'");
    }
    c.env.arms = get_number<std::size_t>(en, "environment", "arms", 10);
    require(c.env.arms >= 1, "environment.arms", "must be positive");
    c.env.dim = get_number<std::size_t>(en, "environment", "dim", 20);
    require(c.env.dim >= 1, "environment.dim", "must be positive");
    if (en.contains("eligibility")) {
      const auto& el = en.at("eligibility");
      check_keys(el, "environment.eligibility", {"target_rho", "calibration_rounds"});
      EligibilityEnvSpec es;
      es.target_rho = get_number<double>(el, "environment.eligibility", "target_rho", 0.5, true);
      require(es.target_rho > 0.0 && es.target_rho < 1.0, "environment.eligibility.target_rho", "must be in (0,1)");
      es.calibration_rounds = get_number<std::size_t>(el, "environment.eligibility", "calibration_rounds", 10000);
      require(es.calibration_rounds >= 10, "environment.eligibility.calibration_rounds", "must be at least 10");
      c.env.eligibility = es;
    }
    require(!en.contains("dataset"), "environment.dataset", "is only valid for classification environments");
  } else if (etype == "classification") {
    c.env.kind = EnvKind::classification;
    if (!en.contains("dataset")) throw ConfigError("missing required key 'environment.dataset'");
    const auto& ds = en.at("dataset");
    check_keys(ds, "environment.dataset", {"path", "delimiter", "header", "label_column"});
    c.env.dataset_path = get_string(ds, "environment.dataset", "path", "", true);
    const auto delim = get_string(ds, "environment.dataset", "delimiter", ",");
    require(delim.size() == 1 || delim == "\\t", "environment.dataset.delimiter", "must be a single character");
    c.env.schema.delimiter = delim == "\\t" ? '\t' : delim[0];
    c.env.schema.header = get_bool(ds, "environment.dataset", "header", false);
    if (ds.contains("label_column")) {
      require(ds.at("label_column").is_number_integer(), "environment.dataset.label_column", "must be an integer");
      c.env.schema.label_column = ds.at("label_column").get<long>();
    }
    c.env.resample_if_short = get_bool(en, "environment", "resample_if_short", false);
    c.env.standardize = get_bool(en, "environment", "standardize", false);
    require(!en.contains("eligibility"), "environment.eligibility", "is only valid for synthetic environments");
  } else {
    throw ConfigError("key 'environment.type' has unknown value '" + etype + "'");
  }

  const bool needs_scores = c.policy.ec.has_value() || c.policy.kind == PolicyKind::top1;
  if (needs_scores && !c.env.eligibility) {
    throw ConfigError("key 'environment.eligibility' is required by policy '" + c.policy.label() + "'");
  }
  if (c.policy.ec) {
    const auto& ec = *c.policy.ec;
    const std::size_t M = c.env.arms;
    require(ec.k0 <= M, "policy.ec.k0", "must not exceed the arm count");
    if (ec.pinned_k) require(*ec.pinned_k >= 1 && *ec.pinned_k <= M, "policy.ec.pinned_k", "must be in [1, arms]");
  }

  if (j.contains("output")) {
    const auto& o = j.at("output");
    check_keys(o, "output", {"csv", "json", "svg", "per_run_columns"});
    c.output.csv = get_bool(o, "output", "csv", true);
    c.output.json = get_bool(o, "output", "json", true);
    c.output.svg = get_bool(o, "output", "svg", false);
    c.output.per_run_columns = get_bool(o, "output", "per_run_columns", false);
  }

  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    check_keys(s, "sweep", {"target_rho", "alpha"});
    SweepSpec sw;
    sw.target_rho = get_number_list(s, "sweep", "target_rho");
    sw.alpha = get_number_list(s, "sweep", "alpha");
    for (double r : sw.target_rho) require(r > 0.0 && r < 1.0, "sweep.target_rho", "values must be in (0,1)");
    for (double a : sw.alpha) require(a >= 0.0 && a <= 1.0, "sweep.alpha", "values must be in [0,1]");
    require(sw.target_rho.empty() || c.env.eligibility.has_value(), "sweep.target_rho",
            "needs environment.eligibility");
    require(sw.alpha.empty() || c.policy.ec.has_value(), "sweep.alpha", "needs policy.ec");
    require(!sw.target_rho.empty() || !sw.alpha.empty(), "sweep", "must list target_rho or alpha");
    c.sweep = sw;
  }
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  const auto slash = path.find_last_of('/');
  return parse_config(j, slash == std::string::npos ? "" : path.substr(0, slash));
}

// Echo of the effective configuration, as stored in result files.
inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["name"] = c.name;
  j["rounds"] = c.rounds;
  j["runs"] = c.runs;
  j["seed"] = c.seed;
  nlohmann::json p;
  p["type"] = std::string(to_string(c.policy.kind));
  p["K"] = c.policy.K;
  p["epsilon"] = c.policy.epsilon;
  p["alpha_ucb"] = c.policy.alpha_ucb;
  p["scores_in_context"] = c.policy.scores_in_context;
  if (c.policy.ec) {
    const auto& e = *c.policy.ec;
    nlohmann::json ej{{"alpha", e.alpha}, {"k0", e.k0}, {"update_period", e.update_period},
                      {"replications", e.replications}, {"dictionary_seed", e.dictionary_seed}};
    if (e.pinned_k) ej["pinned_k"] = *e.pinned_k;
    if (!e.dictionary.empty()) ej["dictionary"] = e.dictionary;
    p["ec"] = ej;
  }
  j["policy"] = p;
  nlohmann::json en;
  if (c.env.kind == EnvKind::synthetic) {
    en["type"] = "synthetic";
    en["family"] = std::string(to_string(c.env.family));
    en["arms"] = c.env.arms;
    en["dim"] = c.env.dim;
    if (c.env.eligibility) {
      en["eligibility"] = {{"target_rho", c.env.eligibility->target_rho},
                           {"calibration_rounds", c.env.eligibility->calibration_rounds}};
    }
  } else {
    en["type"] = "classification";
    en["dataset"] = {{"path", c.env.dataset_path},
                     {"delimiter", std::string(1, c.env.schema.delimiter)},
                     {"header", c.env.schema.header},
                     {"label_column", c.env.schema.label_column}};
    en["resample_if_short"] = c.env.resample_if_short;
    en["standardize"] = c.env.standardize;
  }
  j["environment"] = en;
  return j;
}

}  // namespace kboot
