#include "lmdp/monte_carlo.hpp"

#include <stdexcept>
#include <vector>

#include "lmdp/parallel.hpp"

namespace lmdp {

McEstimate evaluate_value_mc(const Environment& env, const Policy& policy, double lambda,
                             std::uint64_t episodes, std::uint64_t seed, int workers) {
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  std::vector<double> returns(episodes, 0.0);
  parallel_for(episodes, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      RandomStream rng(derive_seed(seed, "eval", {k}));
      auto episode = env.start_episode(rng);
      double total = 0.0;
      for (int t = 0; t < env.horizon() && !episode->terminal(); ++t) {
        const Observation& obs = episode->observation();
        double p = policy.accept_probability(obs);
        if (lambda > 0.0) total += lambda * binary_entropy(p);
        total += episode->step(rng.uniform() < p ? Action::kAccept : Action::kReject);
      }
      returns[k] = total;
    }
  });
  RunningStats stats;
  for (double r : returns) stats.push(r);
  return stats.estimate();
}

}  // namespace lmdp
