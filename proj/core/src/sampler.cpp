#include "lmdp/sampler.hpp"

#include <cmath>

namespace lmdp {

double advantage_bound(double lambda, double clip, int horizon) {
  return 2.0 * (1.0 + lambda * clip + horizon * (1.0 + lambda * std::log(2.0)));
}

AdvantageSample sample_advantage_from(Episode& episode, const Policy& pi_samp,
                                      bool uniform_actions, const Policy& pi_t, int h,
                                      int horizon, double lambda, double clip,
                                      RandomStream& rng) {
  AdvantageSample out;
  out.h = h;
  if (episode.terminal()) {
    out.state = episode.observation();
    return out;
  }
  out.state = episode.observation();
  out.valid = true;
  out.action = uniform_actions ? (rng.uniform() < 0.5 ? Action::kAccept : Action::kReject)
                               : pi_samp.sample(out.state, rng);

  const double p_t = pi_t.accept_probability(out.state);
  double c;
  double r;
  if (rng.uniform() < 0.5) {
    c = -2.0;
    Action redraw = rng.uniform() < p_t ? Action::kAccept : Action::kReject;
    r = episode.step(redraw);
    if (lambda > 0.0) r += lambda * binary_entropy(p_t);
  } else {
    c = 2.0;
    r = episode.step(out.action);
    if (lambda > 0.0) {
      const double pa = out.action == Action::kAccept ? p_t : 1.0 - p_t;
      r += lambda * std::min(neg_log(pa), clip);
    }
  }
  for (int t = h + 1; t < horizon && !episode.terminal(); ++t) {
    const double p = pi_t.accept_probability(episode.observation());
    if (lambda > 0.0) r += lambda * binary_entropy(p);
    r += episode.step(rng.uniform() < p ? Action::kAccept : Action::kReject);
  }
  out.a_hat = c * r;
  return out;
}

AdvantageSample sample_advantage(const Environment& env, const Policy& pi_samp,
                                 bool uniform_actions, const Policy& pi_t, int h, double lambda,
                                 double clip, RandomStream& rng) {
  auto episode = env.start_episode(rng);
  for (int t = 0; t < h && !episode->terminal(); ++t)
    episode->step(pi_samp.sample(episode->observation(), rng));
  return sample_advantage_from(*episode, pi_samp, uniform_actions, pi_t, h, env.horizon(), lambda,
                               clip, rng);
}

}  // namespace lmdp
