#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lmdp/lmdp.hpp"

namespace lmdp {

// Bin weights for the two-stage sampler: i ~ Multinomial(p), x = (i - 1 + U) / gran.
struct GranularDistribution {
  int gran = 1;
  std::vector<double> bin_weights;

  double cdf(double x) const;
};

GranularDistribution okd_sample_distribution(int gran, std::uint64_t seed);

// Item value/size law: Unif[0,1], granular, or a finite set of atoms.
class ItemDistribution {
 public:
  static ItemDistribution uniform();
  static ItemDistribution granular(GranularDistribution g);
  static ItemDistribution discrete(std::vector<double> support, std::vector<double> probs);

  double sample(RandomStream& rng) const;
  double cdf(double x) const;
  double max_value() const;
  double min_value() const;
  bool is_discrete() const { return kind_ == Kind::kDiscrete; }
  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& probabilities() const { return probs_; }
  std::string describe() const;

 private:
  enum class Kind { kUniform, kGranular, kDiscrete };
  Kind kind_ = Kind::kUniform;
  GranularDistribution granular_;
  std::vector<double> support_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

struct OkdConfig {
  int n = 0;
  double budget = 0.0;
  double target = 0.0;
  ItemDistribution value_dist = ItemDistribution::uniform();
  ItemDistribution size_dist = ItemDistribution::uniform();
  std::uint64_t seed = 0;

  void validate() const;
};

// Observation (i/n, s_i, v_i, used/B, collected/V); terminal g = 0.
// An accept without enough remaining budget leaves the knapsack unchanged.
// Reward 1 the first time the collected value reaches the target, then g.
class KnapsackEnvironment final : public Environment {
 public:
  explicit KnapsackEnvironment(OkdConfig config);

  int horizon() const override { return config_.n; }
  std::string name() const override { return "okd"; }
  std::unique_ptr<Episode> start_episode(RandomStream& rng) const override;
  // Only for discrete item laws. Single component, stochastic item arrivals.
  LatentMdp exact_model(std::size_t cap) const override;

  const OkdConfig& config() const { return config_; }

  struct Item {
    double value;
    double size;
  };
  // Items drawn for one episode from its stream; sizes and values from separate draws.
  std::vector<Item> draw_items(RandomStream& rng) const;

 private:
  OkdConfig config_;
};

// Accepts iff v/s >= r.
class BangPerBuckPolicy final : public Policy {
 public:
  explicit BangPerBuckPolicy(double r) : r_(r) {}
  double accept_probability(const Observation& obs) const override;
  double ratio_threshold() const { return r_; }

 private:
  double r_;
};

// Total accepted value of the classical (sum-of-values) online knapsack under `policy`,
// averaged over episodes drawn from streams (seed, "okd-crn", k).
McEstimate okd_knapsack_objective(const KnapsackEnvironment& env, const Policy& policy,
                                  std::uint64_t episodes, std::uint64_t seed);

struct BangPerBuckSearch {
  double ratio = 0.0;
  double objective = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int iterations = 0;
  bool degenerate = false;
  std::string warning;
};

// Ternary search over r on [0, max v/s seen in the common-random-number sample].
BangPerBuckSearch okd_bang_per_buck_reference(const KnapsackEnvironment& env,
                                              std::uint64_t mc_episodes, std::uint64_t seed,
                                              int iterations = 64);

}  // namespace lmdp
