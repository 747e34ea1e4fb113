#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "lmdp/exact.hpp"
#include "lmdp/lmdp.hpp"
#include "lmdp/policy.hpp"

namespace lmdp {

// err_t = sum_m w_m sum_h E_{d*}[A^{t,lambda} - g^T grad ln pi_t], exact.
double fitting_error_exact(const LatentMdp& lmdp, const Policy& reference,
                           const LogLinearPolicy& pi_t, const Eigen::VectorXd& g, double lambda);

// Monte Carlo: roll the reference for h steps, take its action, and estimate the advantage
// with the sampler estimator. Unbiased for lambda = 0.
McEstimate fitting_error_mc(const Environment& env, const Policy& reference,
                            const LogLinearPolicy& pi_t, const Eigen::VectorXd& g, double lambda,
                            double clip, std::uint64_t episodes, std::uint64_t seed,
                            int workers = 1);

// avg_t = sum_i (1 - eta lambda)^{t-i} err_i / sum_i (1 - eta lambda)^{t-i}.
class DecayedAverage {
 public:
  DecayedAverage(double eta, double lambda);
  double push(double err);
  double value() const;

 private:
  double decay_;
  double numerator_ = 0.0;
  double denominator_ = 0.0;
};

std::vector<double> decayed_average(std::span<const double> errors, double eta, double lambda);

}  // namespace lmdp
