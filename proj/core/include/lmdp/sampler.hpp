#pragma once

#include "lmdp/lmdp.hpp"

namespace lmdp {

struct AdvantageSample {
  Observation state;
  Action action = Action::kReject;
  double a_hat = 0.0;
  int h = 0;
  // False when the roll-in hit the terminal state before step h; such samples carry no score.
  bool valid = false;
};

// 2 [1 + lambda U + H (1 + lambda ln 2)]
double advantage_bound(double lambda, double clip, int horizon);

// Rolls pi_samp for h steps, draws a_h (uniform if `uniform_actions`, else from pi_samp), then
// forms C R with C = -2 (re-drawn a ~ pi_t, entropy seed) or C = +2 (clipped ln(1/pi_t) seed)
// with probability 1/2 each, and rolls pi_t to the end of the horizon.
AdvantageSample sample_advantage(const Environment& env, const Policy& pi_samp,
                                 bool uniform_actions, const Policy& pi_t, int h, double lambda,
                                 double clip, RandomStream& rng);

// Same estimator starting from an episode already positioned at step h.
AdvantageSample sample_advantage_from(Episode& episode, const Policy& pi_samp,
                                      bool uniform_actions, const Policy& pi_t, int h,
                                      int horizon, double lambda, double clip,
                                      RandomStream& rng);

}  // namespace lmdp
