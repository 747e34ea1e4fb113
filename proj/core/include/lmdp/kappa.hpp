#pragma once

#include <optional>
#include <span>
#include <string>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "lmdp/exact.hpp"
#include "lmdp/npg.hpp"

namespace lmdp {

struct KappaClosedForm {
  double k_curl = 1.0;
  double k_naive = 1.0;
  int kp = 0;  // floor(n p)
  int kq = 0;  // floor(n q)
};

// p-threshold optimum, q-threshold sampler (k_curl) and the naive sampler (k_naive).
KappaClosedForm kappa_closed_form_sp(std::span<const double> p_series, double p, double q);

struct KappaOptions {
  double ridge = 0.0;
  double rank_tol = 1e-9;
};

// Largest generalized eigenvalue of (sampler + ridge I)^{-1} reference, +inf when the
// reference has mass outside the sampler's range. Eigenvalue-based rank test.
double relative_condition_number(const Eigen::MatrixXd& reference, const Eigen::MatrixXd& sampler,
                                 const KappaOptions& options = {});

// Fisher matrix sum_s mass(s) E_a[score score^T] at theta.
// action_policy == nullptr means uniform actions.
Eigen::MatrixXd fisher_from_occupancy(const WeightedStates& occupancy, const LogLinearPolicy& at,
                                      const Policy* action_policy);

// Same generalized eigenvalue, with the rank test done on the spans of the feature vectors of
// states carrying positive weight (SVD tolerance rank_tol), which is exact for finite state sets.
double kappa_from_occupancy(const WeightedStates& reference, const Policy& reference_policy,
                            const WeightedStates& sampler, const Policy* sampler_actions,
                            const LogLinearPolicy& at, const KappaOptions& options = {});

// Occupancy and action law of the training distribution for a sampler spec at theta.
struct SamplerDistribution {
  WeightedStates occupancy;
  const Policy* actions = nullptr;  // nullptr: uniform
};

// Exact kappa(theta) on an enumerated instance.
double kappa_empirical(const LatentMdp& lmdp, const Policy& reference, const SamplerSpec& sampler,
                       const LogLinearPolicy& at, const KappaOptions& options = {});

// Monte Carlo estimate of both Fisher matrices from rolled-out states, then the matrix form.
// Uses at least ceil(10 d^2 / H) episodes per matrix.
double kappa_empirical_mc(const Environment& env, const Policy& reference,
                          const SamplerSpec& sampler, const LogLinearPolicy& at,
                          std::uint64_t episodes, std::uint64_t seed,
                          const KappaOptions& options = {});

struct KappaReport {
  std::optional<double> kappa_lower;
  std::optional<double> kappa_upper;
  double kappa_empirical = 0.0;
  Eigen::VectorXd at_theta;
  std::string sampler;
  bool reference_relative = false;

  nlohmann::json to_json() const;
};

struct OptimalThreshold {
  // k such that candidates 1..k are rejected; p = (k + 1/2) / n.
  std::optional<int> index;
  std::optional<double> p;
  bool closed_form = false;
  int dp_index = -1;
};

// Scans k for sum_{i=k+2}^n P_i/(1-P_i) <= 1 < sum_{i=k+1}^n P_i/(1-P_i); DP fallback when some
// P_i = 1 for i >= 2.
OptimalThreshold optimal_threshold_from_series(std::span<const double> p_series);

}  // namespace lmdp
