#include "lmdp_cli/experiment.hpp"

#include <fstream>
#include <set>

namespace lmdp::cli {
namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown key \"" + key + "\" in " + where);
}

template <class T>
void read(const json& j, const char* key, T& target, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    target = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

void derive_environments(ExperimentConfig& c) {
  if (!c.env_seed_explicit) c.curriculum.final_env.seed = derive_seed(c.seed, "env");
  c.curriculum.train.seed = c.seed;
  if (c.curriculum.final_env.n > 1 && c.warmup_n < c.curriculum.final_env.n)
    c.curriculum.warmup_env =
        generate_curriculum(c.curriculum.final_env, c.warmup_n, c.seed, c.target_ratio);
  else
    c.curriculum.warmup_env = c.curriculum.final_env;
}

bool needs_warmup(const std::vector<TrainingScheme>& schemes) {
  for (auto s : schemes)
    if (scheme_recipe(s).warmup) return true;
  return false;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (needs_warmup(schemes) && !(warmup_n >= 1 && warmup_n < curriculum.final_env.n))
    throw ConfigError("curriculum.warmup_n must lie in [1, env.n) for curriculum schemes");
  curriculum.validate();
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

ExperimentConfig parse_experiment(const json& j) {
  check_keys(j, "config",
             {"seed", "output_dir", "env", "schemes", "features", "train", "curriculum",
              "diagnostics", "reference", "wall_clock"});
  ExperimentConfig c;
  c.raw = j;
  read(j, "seed", c.seed, "config");
  read(j, "output_dir", c.output_dir, "config");
  read(j, "wall_clock", c.wall_clock, "config");

  if (!j.contains("env")) throw ConfigError("config.env is required");
  try {
    c.curriculum.final_env = j.at("env").get<EnvConfig>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config.env: ") + e.what());
  }
  c.env_seed_explicit = j.at("env").contains("seed");

  if (j.contains("schemes")) {
    if (!j.at("schemes").is_array()) throw ConfigError("config.schemes must be an array");
    for (const auto& s : j.at("schemes")) {
      if (!s.is_string()) throw ConfigError("config.schemes entries must be strings");
      auto parsed = parse_scheme(s.get<std::string>());
      if (!parsed) throw ConfigError("unknown scheme \"" + s.get<std::string>() + "\"");
      c.schemes.push_back(*parsed);
    }
  }
  if (j.contains("features")) c.curriculum.features = j.at("features");

  auto& t = c.curriculum.train;
  if (j.contains("train")) {
    const auto& tj = j.at("train");
    check_keys(tj, "train",
               {"eta", "episodes", "batch", "clip", "ball_radius", "solver", "workers",
                "eval_episodes", "eval_every", "checkpoint_every", "solver_tol", "solver_max_iters"});
    read(tj, "eta", t.eta, "train");
    read(tj, "episodes", t.episodes, "train");
    read(tj, "batch", t.batch, "train");
    read(tj, "clip", t.clip, "train");
    read(tj, "ball_radius", t.ball_radius, "train");
    read(tj, "workers", t.workers, "train");
    read(tj, "eval_episodes", t.eval_episodes, "train");
    read(tj, "eval_every", t.eval_every, "train");
    read(tj, "checkpoint_every", t.checkpoint_every, "train");
    read(tj, "solver_tol", t.solver.tol, "train");
    read(tj, "solver_max_iters", t.solver.max_iters, "train");
    if (tj.contains("solver")) {
      const auto s = tj.at("solver").get<std::string>();
      if (s == "trust_region")
        t.solver.method = QuadraticMethod::kTrustRegion;
      else if (s == "pgd")
        t.solver.method = QuadraticMethod::kProjectedGradient;
      else
        throw ConfigError("train.solver must be \"trust_region\" or \"pgd\"");
    }
  }

  if (j.contains("curriculum")) {
    const auto& cj = j.at("curriculum");
    check_keys(cj, "curriculum",
               {"warmup_n", "target_ratio", "warmup_episodes", "warmup_batch", "warmup_eta",
                "reg_lambda"});
    read(cj, "warmup_n", c.warmup_n, "curriculum");
    read(cj, "target_ratio", c.target_ratio, "curriculum");
    read(cj, "reg_lambda", c.curriculum.reg_lambda, "curriculum");
    if (cj.contains("warmup_episodes")) c.curriculum.warmup_episodes = cj.at("warmup_episodes").get<int>();
    if (cj.contains("warmup_batch")) c.curriculum.warmup_batch = cj.at("warmup_batch").get<int>();
    if (cj.contains("warmup_eta")) c.curriculum.warmup_eta = cj.at("warmup_eta").get<double>();
  }

  auto& d = c.curriculum.diagnostics;
  if (j.contains("diagnostics")) {
    const auto& dj = j.at("diagnostics");
    check_keys(dj, "diagnostics", {"enabled", "every", "err_episodes", "mc_kappa", "kappa_episodes", "state_cap"});
    read(dj, "enabled", d.enabled, "diagnostics");
    read(dj, "every", d.every, "diagnostics");
    read(dj, "err_episodes", d.err_episodes, "diagnostics");
    read(dj, "mc_kappa", d.mc_kappa, "diagnostics");
    read(dj, "kappa_episodes", d.kappa_episodes, "diagnostics");
    read(dj, "state_cap", d.state_cap, "diagnostics");
  }
  if (j.contains("reference")) {
    const auto& rj = j.at("reference");
    check_keys(rj, "reference", {"okd_search_episodes", "okd_search_iterations"});
    read(rj, "okd_search_episodes", c.curriculum.reference.okd_search_episodes, "reference");
    read(rj, "okd_search_iterations", c.curriculum.reference.okd_search_iterations, "reference");
  }

  derive_environments(c);
  c.validate();
  return c;
}

ExperimentConfig load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  return parse_experiment(j);
}

void apply_overrides(ExperimentConfig& config, const Overrides& o) {
  if (o.seed) config.seed = *o.seed;
  if (o.output_dir) config.output_dir = *o.output_dir;
  if (o.workers) config.curriculum.train.workers = *o.workers;
  if (o.scheme) {
    auto parsed = parse_scheme(*o.scheme);
    if (!parsed) throw ConfigError("unknown scheme \"" + *o.scheme + "\"");
    config.schemes = {*parsed};
  }
  derive_environments(config);
  config.validate();
}

json resolved_json(const ExperimentConfig& c) {
  const auto& cur = c.curriculum;
  const auto& t = cur.train;
  json schemes = json::array();
  for (auto s : c.schemes) schemes.push_back(scheme_name(s));
  json j;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["env"] = cur.final_env;
  j["warmup_env"] = cur.warmup_env;
  j["schemes"] = schemes;
  j["features"] = cur.features.is_null() ? default_feature_spec(cur.final_env) : cur.features;
  j["train"] = {{"eta", t.eta},
                {"episodes", t.episodes},
                {"batch", t.batch},
                {"clip", t.clip},
                {"ball_radius", t.ball_radius},
                {"solver", t.solver.method == QuadraticMethod::kTrustRegion ? "trust_region" : "pgd"},
                {"solver_tol", t.solver.tol},
                {"solver_max_iters", t.solver.max_iters},
                {"eval_episodes", t.eval_episodes},
                {"eval_every", t.eval_every},
                {"checkpoint_every", t.checkpoint_every}};
  json cj = {{"warmup_n", c.warmup_n}, {"target_ratio", c.target_ratio}, {"reg_lambda", cur.reg_lambda}};
  if (cur.warmup_episodes) cj["warmup_episodes"] = *cur.warmup_episodes;
  if (cur.warmup_batch) cj["warmup_batch"] = *cur.warmup_batch;
  if (cur.warmup_eta) cj["warmup_eta"] = *cur.warmup_eta;
  j["curriculum"] = cj;
  const auto& d = cur.diagnostics;
  j["diagnostics"] = {{"enabled", d.enabled},         {"every", d.every},
                      {"err_episodes", d.err_episodes}, {"mc_kappa", d.mc_kappa},
                      {"kappa_episodes", d.kappa_episodes}, {"state_cap", d.state_cap}};
  j["reference"] = {{"okd_search_episodes", cur.reference.okd_search_episodes},
                    {"okd_search_iterations", cur.reference.okd_search_iterations}};
  return j;
}

}  // namespace lmdp::cli
