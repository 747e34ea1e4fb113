#include "lmdp/curriculum.hpp"

#include <algorithm>

#include "lmdp/monte_carlo.hpp"
#include "lmdp/parallel.hpp"

namespace lmdp {

std::string scheme_name(TrainingScheme scheme) {
  switch (scheme) {
    case TrainingScheme::kFixSampCurl:
      return "fix_samp_curl";
    case TrainingScheme::kFixSampCurlReg:
      return "fix_samp_curl_reg";
    case TrainingScheme::kDirect:
      return "direct";
    case TrainingScheme::kDirectReg:
      return "direct_reg";
    case TrainingScheme::kNaiveSamp:
      return "naive_samp";
    case TrainingScheme::kNaiveSampReg:
      return "naive_samp_reg";
    case TrainingScheme::kCurl:
      return "curl";
    case TrainingScheme::kCurlReg:
      return "curl_reg";
    case TrainingScheme::kReference:
      return "reference";
  }
  return "unknown";
}

std::optional<TrainingScheme> parse_scheme(std::string_view name) {
  for (auto s : kAllSchemes)
    if (scheme_name(s) == name) return s;
  return std::nullopt;
}

SchemeRecipe scheme_recipe(TrainingScheme scheme) {
  SchemeRecipe r;
  switch (scheme) {
    case TrainingScheme::kFixSampCurlReg:
      r.regularized = true;
      [[fallthrough]];
    case TrainingScheme::kFixSampCurl:
      r.warmup = true;
      r.final_sampler = SamplerKind::kFixed;
      break;
    case TrainingScheme::kDirectReg:
      r.regularized = true;
      [[fallthrough]];
    case TrainingScheme::kDirect:
      break;
    case TrainingScheme::kNaiveSampReg:
      r.regularized = true;
      [[fallthrough]];
    case TrainingScheme::kNaiveSamp:
      r.final_sampler = SamplerKind::kNaiveRandom;
      break;
    case TrainingScheme::kCurlReg:
      r.regularized = true;
      [[fallthrough]];
    case TrainingScheme::kCurl:
      r.warmup = true;
      r.init_from_warmup = true;
      break;
    case TrainingScheme::kReference:
      r.reference = true;
      break;
  }
  return r;
}

void CurriculumConfig::validate() const {
  final_env.validate();
  warmup_env.validate();
  if (final_env.env != warmup_env.env) throw ConfigError("warm-up and final environments differ in kind");
  train.validate();
  if (warmup_episodes && *warmup_episodes < 0) throw ConfigError("warmup episodes must be >= 0");
  if (warmup_batch && *warmup_batch < 1) throw ConfigError("warmup batch must be >= 1");
  if (warmup_eta && *warmup_eta < 0.0) throw ConfigError("warmup eta must be >= 0");
  if (!(reg_lambda > 0.0)) throw ConfigError("reg_lambda must be > 0");
}

EnvConfig generate_curriculum(const EnvConfig& final_env, int warmup_n, std::uint64_t seed,
                              double target_ratio) {
  final_env.validate();
  if (warmup_n < 1 || warmup_n >= final_env.n)
    throw ConfigError("warm-up n must lie in [1, final n)");
  EnvConfig w = final_env;
  w.n = warmup_n;
  w.seed = derive_seed(seed, "warmup-env");
  if (final_env.is_okd()) {
    if (!(target_ratio > 0.0 && target_ratio < 1.0)) throw ConfigError("target_ratio must be in (0, 1)");
    const double scale = static_cast<double>(warmup_n) / static_cast<double>(final_env.n);
    w.budget = final_env.budget * scale;
    w.target = final_env.target * scale * target_ratio;
  }
  return w;
}

CurriculumRunner::CurriculumRunner(CurriculumConfig config, RunHooks hooks)
    : config_(std::move(config)), hooks_(std::move(hooks)) {
  config_.validate();
  if (config_.features.is_null() || config_.features.empty())
    config_.features = default_feature_spec(config_.final_env);
  features_ = make_feature_map(config_.features);
  if (config_.features.contains("n")) {
    const int fn = config_.features.at("n").get<int>();
    if (fn != config_.final_env.n || fn != config_.warmup_env.n)
      throw ConfigError("feature-dimension mismatch between phases (per-state features need equal n)");
  }
  final_env_ = make_environment(config_.final_env);
  warmup_env_ = make_environment(config_.warmup_env);
}

const ReferenceModel& CurriculumRunner::final_reference() {
  if (!final_reference_) {
    final_reference_ = make_reference(config_.final_env, config_.train.seed, config_.reference);
    if (config_.final_env.is_okd()) labels_.push_back("bang-per-buck");
  }
  return *final_reference_;
}

TrainConfig CurriculumRunner::phase_config(bool warmup, bool regularized) const {
  TrainConfig c = config_.train;
  c.lambda = regularized ? config_.reg_lambda : 0.0;
  c.sampler = SamplerSpec{};
  c.checkpoint_every = 0;
  if (warmup) {
    c.episodes = config_.warmup_episodes.value_or(c.episodes);
    c.batch = config_.warmup_batch.value_or(c.batch);
    c.eta = config_.warmup_eta.value_or(c.eta);
    c.stream_label = regularized ? "warmup-reg" : "warmup";
  } else {
    c.stream_label = regularized ? "final-reg" : "final";
  }
  return c;
}

const TrainResult& CurriculumRunner::warmup(bool regularized) {
  auto it = warmups_.find(regularized);
  if (it != warmups_.end()) return it->second;
  if (!warmup_reference_)
    warmup_reference_ = make_reference(config_.warmup_env, derive_seed(config_.train.seed, "warmup"),
                                       config_.reference);
  const TrainConfig c = phase_config(true, regularized);
  TheoryDiagnostics diag(*warmup_env_, warmup_reference_->policy, c.sampler, c.eta, c.lambda, c.clip,
                         derive_seed(c.seed, "diagnostics", {0, regularized ? 1u : 0u}),
                         config_.diagnostics, resolve_workers(c.workers));
  labels_.push_back(c.stream_label);
  auto result = npg_train(*warmup_env_, LogLinearPolicy(features_), c, PhaseInfo{"warmup", 0, {}}, &diag);
  return warmups_.emplace(regularized, std::move(result)).first->second;
}

SchemeResult CurriculumRunner::run(TrainingScheme scheme) {
  const auto recipe = scheme_recipe(scheme);
  const std::string name = scheme_name(scheme);
  SchemeResult out;
  out.scheme = scheme;
  const auto& ref = final_reference();
  out.reference_description = ref.description;

  if (recipe.reference) {
    out.policy = ref.policy;
    TrainLogRow row;
    row.mode = name + "/final";
    if (config_.train.eval_episodes > 0) {
      const auto est = evaluate_value_mc(*final_env_, *ref.policy, 0.0, config_.train.eval_episodes,
                                         derive_seed(config_.train.seed, "reward-eval", {0}),
                                         resolve_workers(config_.train.workers));
      row.reward_mean = est.mean;
      row.reward_ci95 = est.ci95_halfwidth;
    }
    out.rows.push_back(row);
    return out;
  }

  const TrainResult* warm = recipe.warmup ? &warmup(recipe.regularized) : nullptr;
  int iteration_offset = 0;
  std::uint64_t samples_offset = 0;
  if (warm) {
    out.warmup = warm->log;
    for (auto row : warm->log.rows) {
      row.mode = name + "/warmup";
      out.rows.push_back(std::move(row));
    }
    iteration_offset = static_cast<int>(warm->log.rows.size());
    if (!warm->log.rows.empty()) samples_offset = warm->log.rows.back().samples_cumulative;
    if (hooks_.on_checkpoint && config_.train.checkpoint_every > 0) {
      const auto& trace = warm->log.theta_trace;
      for (std::size_t t = static_cast<std::size_t>(config_.train.checkpoint_every); t < trace.size();
           t += static_cast<std::size_t>(config_.train.checkpoint_every))
        hooks_.on_checkpoint(scheme, "warmup", static_cast<int>(t), warm->policy.with_theta(trace[t]));
    }
  }

  TrainConfig c = phase_config(false, recipe.regularized);
  c.sampler.kind = recipe.final_sampler;
  if (recipe.final_sampler == SamplerKind::kFixed)
    c.sampler.policy = std::make_shared<LogLinearPolicy>(warm->policy);
  const LogLinearPolicy policy0 = recipe.init_from_warmup ? warm->policy : LogLinearPolicy(features_);

  TheoryDiagnostics diag(*final_env_, ref.policy, c.sampler, c.eta, c.lambda, c.clip,
                         derive_seed(c.seed, "diagnostics", {1, recipe.regularized ? 1u : 0u}),
                         config_.diagnostics, resolve_workers(c.workers));
  if (std::find(labels_.begin(), labels_.end(), c.stream_label) == labels_.end())
    labels_.push_back(c.stream_label);
  auto result = npg_train(*final_env_, policy0, c, PhaseInfo{name + "/final", samples_offset, {}}, &diag);
  for (auto row : result.log.rows) {
    row.iteration += iteration_offset;
    out.rows.push_back(std::move(row));
  }
  if (hooks_.on_checkpoint && config_.train.checkpoint_every > 0) {
    const auto& trace = result.log.theta_trace;
    for (std::size_t t = static_cast<std::size_t>(config_.train.checkpoint_every); t < trace.size();
         t += static_cast<std::size_t>(config_.train.checkpoint_every))
      hooks_.on_checkpoint(scheme, "final", static_cast<int>(t), result.policy.with_theta(trace[t]));
  }
  out.final_phase = std::move(result.log);
  out.trained = result.policy;
  out.policy = std::make_shared<LogLinearPolicy>(result.policy);
  return out;
}

SchemeResult run_scheme(TrainingScheme scheme, const CurriculumConfig& config) {
  CurriculumRunner runner(config);
  return runner.run(scheme);
}

}  // namespace lmdp
