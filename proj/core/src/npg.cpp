#include "lmdp/npg.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <sstream>

#include "lmdp/fisher.hpp"
#include "lmdp/monte_carlo.hpp"
#include "lmdp/parallel.hpp"

namespace lmdp {

std::string SamplerSpec::describe() const {
  switch (kind) {
    case SamplerKind::kOnPolicy:
      return "on_policy";
    case SamplerKind::kFixed:
      return "fixed_grafted";
    case SamplerKind::kNaiveRandom:
      return "naive_random";
  }
  return "unknown";
}

void TrainConfig::validate() const {
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw ConfigError("train.eta must be >= 0");
  if (episodes < 0) throw ConfigError("train.episodes must be >= 0");
  if (batch < 1) throw ConfigError("train.batch must be >= 1");
  if (!(lambda >= 0.0)) throw ConfigError("train.lambda must be >= 0");
  if (lambda > 0.0 && clip < std::log(2.0) - 1.0) throw ConfigError("train.clip must be >= ln 2 - 1");
  if (!(ball_radius > 0.0)) throw ConfigError("train.ball_radius must be > 0");
  if (sampler.kind == SamplerKind::kFixed && !sampler.policy)
    throw ConfigError("fixed sampler requires a policy");
  if (eval_every < 1) throw ConfigError("train.eval_every must be >= 1");
  if (checkpoint_every < 0) throw ConfigError("train.checkpoint_every must be >= 0");
  if (eta * lambda >= 1.0) throw ConfigError("eta * lambda must be < 1");
}

std::vector<AdvantageSample> collect_samples(const Environment& env, const Policy& pi_t,
                                             const TrainConfig& config, int t) {
  static const NaiveRandomPolicy kNaive;
  const int H = env.horizon();
  const Policy* samp = &pi_t;
  bool uniform = false;
  if (config.sampler.kind == SamplerKind::kFixed) {
    samp = config.sampler.policy.get();
    uniform = true;
  } else if (config.sampler.kind == SamplerKind::kNaiveRandom) {
    samp = &kNaive;
    uniform = true;
  }
  const double bound = advantage_bound(config.lambda, config.clip, H) * (1.0 + 1e-12);
  const std::size_t total = static_cast<std::size_t>(config.batch) * static_cast<std::size_t>(H);
  std::vector<AdvantageSample> samples(total);
  parallel_for(total, resolve_workers(config.workers), [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const auto n = k / static_cast<std::size_t>(H);
      const auto h = static_cast<int>(k % static_cast<std::size_t>(H));
      RandomStream rng(derive_seed(config.seed, config.stream_label,
                                   {static_cast<std::uint64_t>(t), n, static_cast<std::uint64_t>(h)}));
      samples[k] = sample_advantage(env, *samp, uniform, pi_t, h, config.lambda, config.clip, rng);
      if (std::abs(samples[k].a_hat) > bound)
        throw std::logic_error("advantage sample exceeds its bound");
    }
  });
  return samples;
}

TrainResult npg_train(const Environment& env, const LogLinearPolicy& policy0,
                      const TrainConfig& config, const PhaseInfo& phase, TrainObserver* observer) {
  config.validate();
  using clock = std::chrono::steady_clock;
  const int H = env.horizon();
  const int workers = resolve_workers(config.workers);
  TrainResult result{TrainLog{}, policy0};
  Eigen::VectorXd theta = policy0.theta();
  result.log.theta_trace.push_back(theta);
  const std::uint64_t per_iter = static_cast<std::uint64_t>(config.batch) * static_cast<std::uint64_t>(H);

  for (int t = 0; t < config.episodes; ++t) {
    const auto start = clock::now();
    const LogLinearPolicy pi_t = policy0.with_theta(theta);
    const auto samples = collect_samples(env, pi_t, config, t);

    Eigen::VectorXd g = Eigen::VectorXd::Zero(theta.size());
    const auto est = estimate_fisher_and_gradient(samples, pi_t);
    if (est.samples > 0)
      g = solve_constrained_quadratic(est.f_hat, est.nabla_hat, config.ball_radius, config.solver).g;
    if (g.norm() > config.ball_radius * (1.0 + 1e-9))
      throw std::logic_error("update direction left the ball");

    IterationDiagnostics diag;
    if (observer) diag = observer->on_iteration(t, pi_t, g);

    theta += config.eta * g;
    if (!theta.allFinite()) {
      std::ostringstream os;
      os << "non-finite theta after iteration " << t << " (|g| = " << g.norm() << ")";
      throw NonFiniteParameters(os.str());
    }
    result.log.theta_trace.push_back(theta);

    TrainLogRow row;
    row.iteration = t;
    row.samples_cumulative = phase.samples_offset + per_iter * static_cast<std::uint64_t>(t + 1);
    row.mode = phase.mode;
    row.lambda = config.lambda;
    row.ln_kappa = diag.ln_kappa;
    row.avg_err = diag.avg_err;
    if ((t + 1) % config.eval_every == 0 || t + 1 == config.episodes) {
      if (config.eval_episodes > 0) {
        const auto est_reward = evaluate_value_mc(
            env, policy0.with_theta(theta), 0.0, config.eval_episodes,
            derive_seed(config.seed, "reward-eval", {static_cast<std::uint64_t>(t)}), workers);
        row.reward_mean = est_reward.mean;
        row.reward_ci95 = est_reward.ci95_halfwidth;
      }
    }
    row.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    result.log.rows.push_back(std::move(row));

    if (config.checkpoint_every > 0 && (t + 1) % config.checkpoint_every == 0 && phase.on_checkpoint)
      phase.on_checkpoint(t + 1, policy0.with_theta(theta));
  }
  result.policy = policy0.with_theta(theta);
  return result;
}

}  // namespace lmdp
