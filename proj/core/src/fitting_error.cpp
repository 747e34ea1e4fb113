#include "lmdp/fitting_error.hpp"

#include <stdexcept>

#include "lmdp/parallel.hpp"
#include "lmdp/sampler.hpp"

namespace lmdp {

double fitting_error_exact(const LatentMdp& lmdp, const Policy& reference,
                           const LogLinearPolicy& pi_t, const Eigen::VectorXd& g, double lambda) {
  const auto tables = value_tables(lmdp, pi_t, lambda);
  const auto d = visitation_table(lmdp, reference);
  double err = 0.0;
  for (std::size_t m = 0; m < lmdp.components.size(); ++m) {
    const auto& states = lmdp.components[m].states;
    for (int t = 0; t < lmdp.horizon; ++t) {
      for (std::size_t s = 0; s < states.size(); ++s) {
        const double mass = lmdp.weights[m] * d[m][static_cast<std::size_t>(t)][s];
        if (mass == 0.0 || states[s].terminal()) continue;
        const auto& obs = states[s].observation;
        for (Action a : kActions) {
          const double pa = reference.probability(obs, a);
          if (pa == 0.0) continue;
          const double adv = tables.advantage(static_cast<int>(m), lmdp.horizon - t, static_cast<int>(s), a);
          err += mass * pa * (adv - g.dot(pi_t.grad_log_prob(obs, a)));
        }
      }
    }
  }
  return err;
}

McEstimate fitting_error_mc(const Environment& env, const Policy& reference,
                            const LogLinearPolicy& pi_t, const Eigen::VectorXd& g, double lambda,
                            double clip, std::uint64_t episodes, std::uint64_t seed, int workers) {
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  const int H = env.horizon();
  std::vector<double> totals(episodes, 0.0);
  parallel_for(episodes, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      double total = 0.0;
      for (int h = 0; h < H; ++h) {
        RandomStream rng(derive_seed(seed, "fitting-error", {k, static_cast<std::uint64_t>(h)}));
        const auto s = sample_advantage(env, reference, false, pi_t, h, lambda, clip, rng);
        if (!s.valid) continue;
        total += s.a_hat - g.dot(pi_t.grad_log_prob(s.state, s.action));
      }
      totals[k] = total;
    }
  });
  RunningStats stats;
  for (double x : totals) stats.push(x);
  return stats.estimate();
}

DecayedAverage::DecayedAverage(double eta, double lambda) : decay_(1.0 - eta * lambda) {
  if (!(eta * lambda >= 0.0 && eta * lambda < 1.0))
    throw std::invalid_argument("decayed average needs eta * lambda in [0, 1)");
}

double DecayedAverage::push(double err) {
  numerator_ = decay_ * numerator_ + err;
  denominator_ = decay_ * denominator_ + 1.0;
  return value();
}

double DecayedAverage::value() const {
  return denominator_ > 0.0 ? numerator_ / denominator_ : 0.0;
}

std::vector<double> decayed_average(std::span<const double> errors, double eta, double lambda) {
  DecayedAverage avg(eta, lambda);
  std::vector<double> out;
  out.reserve(errors.size());
  for (double e : errors) out.push_back(avg.push(e));
  return out;
}

}  // namespace lmdp
