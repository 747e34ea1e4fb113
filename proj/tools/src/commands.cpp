#include "lmdp_cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lmdp/checkpoint.hpp"
#include "lmdp/exact.hpp"
#include "lmdp/kappa.hpp"
#include "lmdp/reference.hpp"
#include "lmdp/train_log.hpp"
#include "lmdp_cli/svg_plot.hpp"

namespace lmdp::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return nullptr;
  return x;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string theta_csv(const std::vector<Eigen::VectorXd>& trace) {
  std::ostringstream s;
  write_theta_trace_csv(s, trace);
  return s.str();
}

std::string sp_policy_description(const SpDpSolution& dp, int n) {
  int accepts = 0;
  for (bool a : dp.accept) accepts += a ? 1 : 0;
  if (accepts == 1 && dp.accept.back()) return "accept at n";
  if (dp.threshold_index)
    return "reject the first " + std::to_string(*dp.threshold_index) +
           " candidates, then accept the first best-so-far";
  std::string s = "accept best-so-far at i in {";
  bool first = true;
  for (int i = 1; i <= n; ++i)
    if (dp.accept[static_cast<std::size_t>(i - 1)]) {
      s += (first ? "" : ",") + std::to_string(i);
      first = false;
    }
  return s + "}";
}

json closed_form_json(const std::vector<double>& series, double p, double q) {
  const auto k = kappa_closed_form_sp(series, p, q);
  return {{"p", p}, {"q", q}, {"kp", k.kp}, {"kq", k.kq}, {"k_curl", number(k.k_curl)},
          {"k_naive", number(k.k_naive)}};
}

// Threshold p of the DP policy when it has threshold form.
std::optional<double> optimal_p(const std::vector<double>& series) {
  const auto thr = optimal_threshold_from_series(series);
  return thr.p;
}

std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

EnvConfig load_env_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path + " is not valid JSON: " + e.what());
  }
  if (j.contains("env") && j.at("env").is_object()) {
    // Experiment file: the env block, with the seed derived as in `run` when absent.
    auto config = parse_experiment(j);
    return config.curriculum.final_env;
  }
  return j.get<EnvConfig>();
}

int cmd_run(const std::string& config_path, const Overrides& overrides, std::ostream& out,
            std::ostream& err) {
  ExperimentConfig config;
  try {
    config = load_experiment(config_path);
    apply_overrides(config, overrides);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (config.schemes.empty()) {
    err << "warning: no schemes listed in " << config_path << "; nothing to run\n";
    return kExitOk;
  }

  const fs::path root(config.output_dir);
  json manifest;
  manifest["config"] = resolved_json(config);
  manifest["seed"] = config.seed;
  manifest["schemes"] = json::array();
  std::vector<PlotSeries> series;
  int status = kExitOk;

  try {
    fs::create_directories(root);
    const EnvConfig final_env = config.curriculum.final_env;
    const EnvConfig warm_env = config.curriculum.warmup_env;
    const std::uint64_t seed = config.seed;
    RunHooks hooks;
    hooks.on_checkpoint = [&](TrainingScheme s, const std::string& phase, int iteration,
                              const LogLinearPolicy& policy) {
      const fs::path dir = root / scheme_name(s) / "checkpoints";
      fs::create_directories(dir);
      const auto& env = phase == "warmup" ? warm_env : final_env;
      save_checkpoint((dir / (phase + "_" + std::to_string(iteration) + ".json")).string(),
                      checkpoint_to_json(policy, env, seed, iteration));
    };
    CurriculumRunner runner(config.curriculum, hooks);

    for (auto scheme : config.schemes) {
      const std::string name = scheme_name(scheme);
      out << "running " << name << '\n' << std::flush;
      const SchemeResult result = runner.run(scheme);
      const fs::path dir = root / name;
      fs::create_directories(dir);

      json files = json::array();
      std::ostringstream csv;
      write_train_log_csv(csv, result.rows, config.wall_clock);
      write_text(dir / "log.csv", csv.str());
      files.push_back(name + "/log.csv");
      if (result.warmup) {
        write_text(dir / "theta_warmup.csv", theta_csv(result.warmup->theta_trace));
        files.push_back(name + "/theta_warmup.csv");
      }
      if (result.final_phase) {
        write_text(dir / "theta_final.csv", theta_csv(result.final_phase->theta_trace));
        files.push_back(name + "/theta_final.csv");
      }
      if (result.trained) {
        const int iters = result.final_phase ? static_cast<int>(result.final_phase->rows.size()) : 0;
        save_checkpoint((dir / "final.json").string(),
                        checkpoint_to_json(*result.trained, final_env, seed, iters));
        files.push_back(name + "/final.json");
      }
      json entry = {{"scheme", name}, {"files", files}, {"reference", result.reference_description},
                    {"dashed", series_dashed(name)}};
      if (!result.rows.empty()) {
        entry["final_reward_mean"] = number(result.rows.back().reward_mean);
        entry["samples"] = result.rows.back().samples_cumulative;
      }
      manifest["schemes"].push_back(entry);
      series.push_back({name, result.rows, series_dashed(name)});
      if (!result.rows.empty())
        out << "  " << name << ": reward " << format_double(result.rows.back().reward_mean) << " after "
            << result.rows.back().samples_cumulative << " samples\n";
    }
    json streams = json::array();
    for (const auto& label : runner.stream_labels()) streams.push_back(label);
    for (const char* label : {"env", "warmup-env", "reward-eval", "eval", "diagnostics", "fitting-error",
                              "sp-series", "okd-values", "okd-sizes", "okd-bins", "okd-crn"})
      streams.push_back(label);
    manifest["streams"] = streams;
    manifest["status"] = "complete";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    manifest["status"] = "failed";
    manifest["error"] = e.what();
    status = kExitFailure;
  }

  try {
    fs::create_directories(root);
    write_text(root / "manifest.json", manifest.dump(2) + "\n");
    if (!series.empty()) write_text(root / "plot.svg", render_svg(series));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return status;
}

int cmd_plot(const std::vector<std::string>& csv_paths, const std::string& out_svg, std::ostream& err) {
  std::vector<PlotSeries> series;
  for (const auto& path : csv_paths) {
    std::ifstream in(path);
    if (!in) {
      err << "error: cannot read " << path << '\n';
      return kExitFailure;
    }
    try {
      auto rows = read_train_log_csv(in);
      const std::string name = series_name(rows, fs::path(path).parent_path().filename().string());
      series.push_back({name, std::move(rows), series_dashed(name)});
    } catch (const std::exception& e) {
      err << "error: " << path << ": " << e.what() << '\n';
      return kExitConfig;
    }
  }
  try {
    write_text(out_svg, render_svg(series));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err) {
  if (o.what != "kappa") {
    err << "error: unknown analysis \"" << o.what << "\" (expected kappa)\n";
    return kExitConfig;
  }
  if (o.mode != "closed" && o.mode != "empirical") {
    err << "error: --mode must be closed or empirical\n";
    return kExitConfig;
  }
  if (o.sampler != "threshold" && o.sampler != "naive" && o.sampler != "on_policy") {
    err << "error: --sampler must be threshold, naive or on_policy\n";
    return kExitConfig;
  }
  try {
    std::optional<Checkpoint> ckpt;
    if (!o.checkpoint_path.empty()) ckpt = load_checkpoint(o.checkpoint_path);
    EnvConfig env;
    if (!o.env_path.empty())
      env = load_env_config(o.env_path);
    else if (ckpt)
      env = ckpt->env;
    else
      throw ConfigError("analyze kappa needs --env or --checkpoint");

    KappaReport report;
    report.kappa_empirical = std::numeric_limits<double>::quiet_NaN();
    report.reference_relative = env.is_okd();
    report.sampler = o.sampler == "threshold" ? "threshold(q=" + short_number(o.q) + ")" : o.sampler;

    if (env.is_sp() && o.sampler != "on_policy") {
      const auto series = make_sp_config(env).p_series;
      if (auto p = optimal_p(series)) {
        const auto k = kappa_closed_form_sp(series, *p, o.q);
        const double lower = o.sampler == "naive" ? k.k_naive : k.k_curl;
        report.kappa_lower = lower;
        report.kappa_upper = 2.0 * lower;
      }
    } else if (o.mode == "closed") {
      throw ConfigError("closed-form kappa is defined for sp with threshold or naive samplers");
    }

    if (o.mode == "empirical") {
      if (!ckpt) throw ConfigError("empirical kappa needs --checkpoint");
      const auto environment = make_environment(env);
      const auto ref = make_reference(env, o.seed);
      SamplerSpec sampler;
      if (o.sampler == "naive") {
        sampler.kind = SamplerKind::kNaiveRandom;
      } else if (o.sampler == "threshold") {
        if (!env.is_sp()) throw ConfigError("threshold sampler is only defined for sp");
        sampler.kind = SamplerKind::kFixed;
        sampler.policy = std::make_shared<SpThresholdPolicy>(o.q);
      }
      report.at_theta = ckpt->policy.theta();
      try {
        const auto lmdp = environment->exact_model(kDefaultStateCap);
        report.kappa_empirical = kappa_empirical(lmdp, *ref.policy, sampler, ckpt->policy);
      } catch (const InstanceTooLarge&) {
        report.kappa_empirical =
            kappa_empirical_mc(*environment, *ref.policy, sampler, ckpt->policy, o.episodes, o.seed);
      }
    }
    auto j = report.to_json();
    j["mode"] = o.mode;
    j["env"] = env;
    out << j.dump(2) << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

int cmd_oracle(const OracleOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const EnvConfig env = load_env_config(o.env_path);
    const auto environment = make_environment(env);
    const auto lmdp = environment->exact_model(kDefaultStateCap);
    json j;
    j["env"] = env;
    if (env.is_sp()) {
      const SpConfig sp = make_sp_config(env);
      const auto dp = sp_optimal_policy_dp(sp);
      j["optimal_value"] = evaluate_value_exact(lmdp, dp.policy(), 0.0);
      j["dp_value"] = dp.value;
      j["policy"] = sp_policy_description(dp, sp.n);
      j["threshold_index"] = dp.threshold_index ? json(*dp.threshold_index) : json(nullptr);
      j["accept"] = dp.accept;
      if (o.q) {
        if (auto p = optimal_p(sp.p_series))
          j["kappa"] = closed_form_json(sp.p_series, *p, *o.q);
        else
          j["kappa"] = nullptr;
      }
    } else {
      const auto ref = make_reference(env, env.seed);
      j["optimal_value"] = nullptr;
      j["policy"] = ref.description;
      j["reference_value"] = evaluate_value_exact(lmdp, *ref.policy, 0.0);
      j["reference_relative"] = true;
    }
    out << j.dump(2) << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace lmdp::cli
