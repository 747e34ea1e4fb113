#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lmdp/lmdp.hpp"

namespace lmdp {

// p_series[i - 1] = P_i, the probability that candidate i is the best so far.
struct SpConfig {
  int n = 0;
  std::vector<double> p_series;
  std::uint64_t seed = 0;
  bool classical = false;

  void validate() const;
};

// P_1 = 1, P_i = i^{-(2 u_i + 0.25)} with u_i ~ Unif[0,1]; P_i = 1/i in classical mode.
SpConfig sp_generate_distribution(int n, std::uint64_t seed, bool classical = false);

// P_i = 1 for all i: the best candidate is always the last one.
SpConfig sp_best_last(int n);

// Observation (i/n, x_i); terminal g = (0, 0).
Observation sp_observation(int i, int n, bool x);
// Candidate index i recovered from an observation of an n-candidate instance.
int sp_position(const Observation& obs, int n);

// Latent state per episode: x_i ~ Bernoulli(P_i) independently, x_1 = 1.
// Accepting i with x_i = 1 pays 1 iff no later x_j = 1.
class SecretaryEnvironment final : public Environment {
 public:
  explicit SecretaryEnvironment(SpConfig config);

  int horizon() const override { return config_.n; }
  std::string name() const override { return "sp"; }
  std::unique_ptr<Episode> start_episode(RandomStream& rng) const override;

  // One component over states (i, x) + g; accepting at (i, 1) pays prod_{j>i}(1 - P_j) in
  // expectation. Same visitation and advantages as the literal instance mixture.
  LatentMdp exact_model(std::size_t cap) const override;
  // One deterministic component per x-vector, weight prod P_i^{x_i}(1 - P_i)^{1 - x_i}.
  LatentMdp literal_model(std::size_t cap) const;

  const SpConfig& config() const { return config_; }
  // prod_{j > i} (1 - P_j), the chance that i is the last best-so-far.
  double accept_value(int i) const { return tail_[static_cast<std::size_t>(i)]; }

 private:
  SpConfig config_;
  std::vector<double> tail_;
};

// Accepts iff f > p and x = 1.
class SpThresholdPolicy final : public Policy {
 public:
  explicit SpThresholdPolicy(double p) : p_(p) {}
  double accept_probability(const Observation& obs) const override;
  double threshold() const { return p_; }

 private:
  double p_;
};

// Number of positions i in 1..n with i/n <= p, i.e. the rejected prefix of the p-threshold policy.
int threshold_index(int n, double p);
// A threshold p whose rejected prefix is exactly the first k positions.
double threshold_for_index(int n, int k);

// Accepts at (i, 1) iff accept[i - 1].
class SpTablePolicy final : public Policy {
 public:
  SpTablePolicy(int n, std::vector<bool> accept);
  double accept_probability(const Observation& obs) const override;
  const std::vector<bool>& accept() const { return accept_; }

 private:
  int n_;
  std::vector<bool> accept_;
};

struct SpDpSolution {
  std::vector<bool> accept;            // accept[i - 1] at (i, x = 1)
  std::vector<double> accept_value;    // A(i)
  std::vector<double> continue_value;  // U(i)
  double value = 0.0;
  // k such that the policy accepts exactly at i > k, when it has that form.
  std::optional<int> threshold_index;
  // Index from the summation characterization; empty when some P_i = 1 (i >= 2).
  std::optional<int> closed_form_index;
  bool closed_form_agrees = false;

  SpTablePolicy policy() const;
};

// Backward DP over (i, x); ties accept.
SpDpSolution sp_optimal_policy_dp(const SpConfig& config);

}  // namespace lmdp
