#include "lmdp/diagnostics.hpp"

#include <cmath>
#include <limits>

namespace lmdp {

TheoryDiagnostics::TheoryDiagnostics(const Environment& env, std::shared_ptr<const Policy> reference,
                                     SamplerSpec sampler, double eta, double lambda, double clip,
                                     std::uint64_t seed, DiagnosticsConfig config, int workers)
    : env_(env),
      reference_(std::move(reference)),
      sampler_(std::move(sampler)),
      lambda_(lambda),
      clip_(clip),
      seed_(seed),
      config_(config),
      workers_(workers),
      average_(eta, lambda) {
  if (!reference_) throw ConfigError("diagnostics need a reference policy");
  if (!config_.enabled) return;
  try {
    exact_ = env_.exact_model(config_.state_cap);
  } catch (const InstanceTooLarge&) {
    return;
  }
  reference_occupancy_ = state_occupancy(*exact_, *reference_);
  static const NaiveRandomPolicy kNaive;
  if (sampler_.kind == SamplerKind::kFixed)
    fixed_occupancy_ = state_occupancy(*exact_, *sampler_.policy);
  else if (sampler_.kind == SamplerKind::kNaiveRandom)
    fixed_occupancy_ = state_occupancy(*exact_, kNaive);
}

IterationDiagnostics TheoryDiagnostics::on_iteration(int t, const LogLinearPolicy& pi_t,
                                                     const Eigen::VectorXd& g_t) {
  IterationDiagnostics out;
  if (!config_.enabled || t % std::max(1, config_.every) != 0) return out;
  double kappa = std::numeric_limits<double>::quiet_NaN();
  double err;
  if (exact_) {
    if (fixed_occupancy_)
      kappa = kappa_from_occupancy(*reference_occupancy_, *reference_, *fixed_occupancy_, nullptr, pi_t);
    else
      kappa = kappa_from_occupancy(*reference_occupancy_, *reference_, state_occupancy(*exact_, pi_t),
                                   &pi_t, pi_t);
    err = fitting_error_exact(*exact_, *reference_, pi_t, g_t, lambda_);
  } else {
    const auto t64 = static_cast<std::uint64_t>(t);
    if (config_.mc_kappa)
      kappa = kappa_empirical_mc(env_, *reference_, sampler_, pi_t, config_.kappa_episodes,
                                 derive_seed(seed_, "diag-kappa", {t64}));
    err = fitting_error_mc(env_, *reference_, pi_t, g_t, lambda_, clip_, config_.err_episodes,
                           derive_seed(seed_, "diag-err", {t64}), workers_)
              .mean;
  }
  errors_.push_back(err);
  out.ln_kappa = std::log(kappa);
  out.avg_err = average_.push(err);
  return out;
}

}  // namespace lmdp
