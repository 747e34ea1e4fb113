#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "lmdp/diagnostics.hpp"
#include "lmdp/env_config.hpp"
#include "lmdp/npg.hpp"
#include "lmdp/reference.hpp"

namespace lmdp {

enum class TrainingScheme {
  kFixSampCurl,
  kFixSampCurlReg,
  kDirect,
  kDirectReg,
  kNaiveSamp,
  kNaiveSampReg,
  kCurl,
  kCurlReg,
  kReference,
};

inline constexpr std::array<TrainingScheme, 9> kAllSchemes = {
    TrainingScheme::kFixSampCurl, TrainingScheme::kFixSampCurlReg, TrainingScheme::kDirect,
    TrainingScheme::kDirectReg,   TrainingScheme::kNaiveSamp,      TrainingScheme::kNaiveSampReg,
    TrainingScheme::kCurl,        TrainingScheme::kCurlReg,        TrainingScheme::kReference};

std::string scheme_name(TrainingScheme scheme);
std::optional<TrainingScheme> parse_scheme(std::string_view name);

struct SchemeRecipe {
  bool warmup = false;
  // Final phase sampler; kFixed uses the warm-up policy.
  SamplerKind final_sampler = SamplerKind::kOnPolicy;
  bool init_from_warmup = false;
  bool regularized = false;
  bool reference = false;
};

SchemeRecipe scheme_recipe(TrainingScheme scheme);

struct CurriculumConfig {
  EnvConfig final_env;
  EnvConfig warmup_env;
  nlohmann::json features;  // empty: environment default
  TrainConfig train;
  std::optional<int> warmup_episodes;
  std::optional<int> warmup_batch;
  std::optional<double> warmup_eta;
  double reg_lambda = 0.01;
  DiagnosticsConfig diagnostics;
  ReferenceOptions reference;

  void validate() const;
};

// SP: fresh series of length warmup_n (classical when the final one is).
// OKD: n' = warmup_n, B' = B n'/n, V' = V (n'/n) target_ratio, so V'/B' < V/B when ratio < 1.
EnvConfig generate_curriculum(const EnvConfig& final_env, int warmup_n, std::uint64_t seed,
                              double target_ratio = 0.8);

struct SchemeResult {
  TrainingScheme scheme = TrainingScheme::kDirect;
  // Warm-up rows (if any) followed by final-phase rows.
  std::vector<TrainLogRow> rows;
  std::optional<TrainLog> warmup;
  std::optional<TrainLog> final_phase;
  std::shared_ptr<const Policy> policy;
  std::optional<LogLinearPolicy> trained;
  std::string reference_description;
};

// Hooks for checkpoint output: phase is "warmup" or "final".
struct RunHooks {
  std::function<void(TrainingScheme, const std::string& phase, int iteration,
                     const LogLinearPolicy&)>
      on_checkpoint;
};

// Runs schemes sharing environments, reference and warm-up phases.
class CurriculumRunner {
 public:
  explicit CurriculumRunner(CurriculumConfig config, RunHooks hooks = {});

  SchemeResult run(TrainingScheme scheme);

  const CurriculumConfig& config() const { return config_; }
  const ReferenceModel& final_reference();
  std::shared_ptr<const FeatureMap> features() const { return features_; }
  // Stream labels used so far, for the run manifest.
  const std::vector<std::string>& stream_labels() const { return labels_; }

 private:
  const TrainResult& warmup(bool regularized);
  TrainConfig phase_config(bool warmup, bool regularized) const;

  CurriculumConfig config_;
  RunHooks hooks_;
  std::shared_ptr<const FeatureMap> features_;
  std::unique_ptr<Environment> final_env_;
  std::unique_ptr<Environment> warmup_env_;
  std::optional<ReferenceModel> final_reference_;
  std::optional<ReferenceModel> warmup_reference_;
  std::map<bool, TrainResult> warmups_;
  std::vector<std::string> labels_;
};

SchemeResult run_scheme(TrainingScheme scheme, const CurriculumConfig& config);

}  // namespace lmdp
