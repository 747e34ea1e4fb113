#include "lmdp/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace lmdp {

double stable_sigmoid(double logit) {
  if (!std::isfinite(logit)) throw ParameterOverflow();
  const double z = std::clamp(logit, -kLogitClamp, kLogitClamp);
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

LogLinearPolicy::LogLinearPolicy(std::shared_ptr<const FeatureMap> features, Eigen::VectorXd theta)
    : features_(std::move(features)), theta_(std::move(theta)) {
  if (!features_) throw ConfigError("log-linear policy without a feature map");
  if (theta_.size() != features_->dimension())
    throw ConfigError("theta dimension " + std::to_string(theta_.size()) +
                      " != feature dimension " + std::to_string(features_->dimension()));
}

LogLinearPolicy::LogLinearPolicy(std::shared_ptr<const FeatureMap> features)
    : LogLinearPolicy(features, Eigen::VectorXd::Zero(features ? features->dimension() : 0)) {}

double LogLinearPolicy::logit(const Observation& obs) const {
  const auto d = static_cast<std::size_t>(theta_.size());
  double buf[256];
  std::vector<double> heap;
  double* phi = buf;
  if (d > 256) {
    heap.resize(d);
    phi = heap.data();
  }
  features_->map(obs, {phi, d});
  double z = 0.0;
  for (std::size_t k = 0; k < d; ++k) z += theta_[static_cast<Eigen::Index>(k)] * phi[k];
  return z;
}

double LogLinearPolicy::accept_probability(const Observation& obs) const {
  if (obs.terminal) return 0.0;
  return stable_sigmoid(logit(obs));
}

double LogLinearPolicy::features_and_probability(const Observation& obs, std::span<double> out) const {
  features_->map(obs, out);
  double z = 0.0;
  for (std::size_t k = 0; k < out.size(); ++k) z += theta_[static_cast<Eigen::Index>(k)] * out[k];
  return stable_sigmoid(z);
}

Eigen::VectorXd LogLinearPolicy::grad_log_prob(const Observation& obs, Action a) const {
  Eigen::VectorXd phi(theta_.size());
  const double p = features_and_probability(obs, {phi.data(), static_cast<std::size_t>(phi.size())});
  return a == Action::kAccept ? ((1.0 - p) * phi).eval() : (-p * phi).eval();
}

}  // namespace lmdp

namespace lmdp {

FeatureNormReport feature_norm_bound(const FeatureMap& features, const Environment& env,
                                     std::uint64_t episodes, std::uint64_t seed) {
  if (episodes < 1) throw std::invalid_argument("feature_norm_bound needs >= 1 sample");
  FeatureNormReport report;
  report.analytic = features.norm_bound();
  NaiveRandomPolicy explore;
  Eigen::VectorXd phi(features.dimension());
  for (std::uint64_t k = 0; k < episodes; ++k) {
    RandomStream rng(derive_seed(seed, "feature-norm", {k}));
    auto traj = rollout(env, explore, rng);
    for (const auto& step : traj.steps) {
      features.map(step.observation, {phi.data(), static_cast<std::size_t>(phi.size())});
      report.empirical = std::max(report.empirical, phi.norm());
    }
  }
  return report;
}

}  // namespace lmdp
