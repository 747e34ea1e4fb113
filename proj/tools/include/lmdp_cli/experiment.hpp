#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lmdp/curriculum.hpp"

namespace lmdp::cli {

// One experiment file:
// {
//   "seed": 0, "output_dir": "out",
//   "env": {"env": "sp", "n": 40, ...},
//   "schemes": ["direct", "curl", ...],
//   "features": {"kind": "sp_poly", "d0": 4},
//   "train": {"eta", "episodes", "batch", "clip", "ball_radius", "solver", "workers",
//             "eval_episodes", "eval_every", "checkpoint_every"},
//   "curriculum": {"warmup_n", "target_ratio", "warmup_episodes", "warmup_batch",
//                  "warmup_eta", "reg_lambda"},
//   "diagnostics": {"enabled", "every", "err_episodes", "mc_kappa", "kappa_episodes"},
//   "reference": {"okd_search_episodes", "okd_search_iterations"},
//   "wall_clock": true
// }
struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  std::vector<TrainingScheme> schemes;
  int warmup_n = 10;
  double target_ratio = 0.8;
  bool wall_clock = true;
  CurriculumConfig curriculum;
  bool env_seed_explicit = false;
  // Input as read, for the manifest.
  nlohmann::json raw;

  void validate() const;
};

// Throws ConfigError with the offending key in the message.
ExperimentConfig parse_experiment(const nlohmann::json& j);
ExperimentConfig load_experiment(const std::string& path);

// Applies command-line overrides and re-derives the seeded parts of the config.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<std::string> scheme;
  std::optional<int> workers;
};
void apply_overrides(ExperimentConfig& config, const Overrides& overrides);

nlohmann::json resolved_json(const ExperimentConfig& config);

}  // namespace lmdp::cli
