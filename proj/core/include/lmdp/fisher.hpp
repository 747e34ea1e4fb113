#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Core>

#include "lmdp/policy.hpp"
#include "lmdp/sampler.hpp"

namespace lmdp {

// Unnormalized sums: F = sum g g^T, nabla = sum A_hat g over valid samples, in index order.
struct FisherAndGradientEstimate {
  Eigen::MatrixXd f_hat;
  Eigen::VectorXd nabla_hat;
  std::size_t samples = 0;
};

FisherAndGradientEstimate estimate_fisher_and_gradient(std::span<const AdvantageSample> samples,
                                                       const LogLinearPolicy& pi_t);

}  // namespace lmdp
