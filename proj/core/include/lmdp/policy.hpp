#pragma once

#include <array>
#include <memory>
#include <span>
#include <stdexcept>

#include <Eigen/Core>

#include "lmdp/features.hpp"
#include "lmdp/lmdp.hpp"

namespace lmdp {

inline constexpr double kLogitClamp = 40.0;

class ParameterOverflow : public std::overflow_error {
 public:
  ParameterOverflow() : std::overflow_error("parameter overflow") {}
};

// Numerically stable logistic function with the logit clamped to +-40.
double stable_sigmoid(double logit);

// pi(accept|s) = exp(theta^T phi(s)) / (exp(theta^T phi(s)) + 1).
class LogLinearPolicy final : public Policy {
 public:
  LogLinearPolicy(std::shared_ptr<const FeatureMap> features, Eigen::VectorXd theta);
  // Zero parameters.
  explicit LogLinearPolicy(std::shared_ptr<const FeatureMap> features);

  double accept_probability(const Observation& obs) const override;

  double logit(const Observation& obs) const;
  // Writes phi(s) into out and returns pi(accept|s).
  double features_and_probability(const Observation& obs, std::span<double> out) const;
  // (1 - pi) phi(s) for accept, -pi phi(s) for reject.
  Eigen::VectorXd grad_log_prob(const Observation& obs, Action a) const;

  const Eigen::VectorXd& theta() const { return theta_; }
  const std::shared_ptr<const FeatureMap>& features() const { return features_; }
  int dimension() const { return static_cast<int>(theta_.size()); }
  LogLinearPolicy with_theta(Eigen::VectorXd theta) const { return {features_, std::move(theta)}; }

 private:
  std::shared_ptr<const FeatureMap> features_;
  Eigen::VectorXd theta_;
};

// Accepts or rejects with probability 1/2 everywhere.
class NaiveRandomPolicy final : public Policy {
 public:
  double accept_probability(const Observation&) const override { return 0.5; }
};

class ConstantPolicy final : public Policy {
 public:
  explicit ConstantPolicy(double p_accept) : p_(p_accept) {}
  double accept_probability(const Observation& obs) const override {
    return obs.terminal ? 0.0 : p_;
  }

 private:
  double p_;
};

// Largest ||phi(s)|| over sampled reachable states, alongside the analytic bound.
struct FeatureNormReport {
  double empirical = 0.0;
  double analytic = 0.0;
};
class Environment;
FeatureNormReport feature_norm_bound(const FeatureMap& features, const Environment& env,
                                     std::uint64_t episodes, std::uint64_t seed);

}  // namespace lmdp
