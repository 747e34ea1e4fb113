#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lmdp_cli/experiment.hpp"

namespace lmdp::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

// Writes <out>/<scheme>/log.csv, theta_<phase>.csv, checkpoints/, <out>/manifest.json and
// <out>/plot.svg. Schemes finished before an error keep their files.
int cmd_run(const std::string& config_path, const Overrides& overrides, std::ostream& out,
            std::ostream& err);

int cmd_plot(const std::vector<std::string>& csv_paths, const std::string& out_svg,
             std::ostream& err);

struct AnalyzeOptions {
  std::string what = "kappa";
  std::string env_path;
  std::string checkpoint_path;
  std::string mode = "closed";     // closed | empirical
  std::string sampler = "threshold";  // threshold | naive | on_policy
  double q = 0.2;
  std::uint64_t seed = 0;
  std::uint64_t episodes = 0;  // Monte Carlo episodes when the instance is not enumerable
};
int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err);

struct OracleOptions {
  std::string env_path;
  std::optional<double> q;
};
int cmd_oracle(const OracleOptions& options, std::ostream& out, std::ostream& err);

// Reads an env block from a file holding either an EnvConfig or an experiment config.
EnvConfig load_env_config(const std::string& path);

}  // namespace lmdp::cli
