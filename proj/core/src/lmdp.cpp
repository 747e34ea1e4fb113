#include "lmdp/lmdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace lmdp {

std::size_t ObservationHash::operator()(const Observation& o) const noexcept {
  std::uint64_t h = 0x9ae16a3b2f90404fULL ^ o.size ^ (o.terminal ? 0x100u : 0u);
  for (int i = 0; i < o.size; ++i) {
    double v = o.values[static_cast<std::size_t>(i)];
    if (v == 0.0) v = 0.0;  // fold -0
    std::uint64_t bits;
    static_assert(sizeof bits == sizeof v);
    std::memcpy(&bits, &v, sizeof v);
    h = mix64(h ^ bits);
  }
  return static_cast<std::size_t>(h);
}

void RunningStats::merge(const RunningStats& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  double n = static_cast<double>(n_ + other.n_);
  double delta = other.mean_ - mean_;
  mean_ += delta * static_cast<double>(other.n_) / n;
  m2_ += other.m2_ + delta * delta * static_cast<double>(n_) * static_cast<double>(other.n_) / n;
  n_ += other.n_;
}

McEstimate RunningStats::estimate() const {
  McEstimate e;
  e.mean = mean_;
  e.count = n_;
  e.std_error = n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  e.ci95_halfwidth = 1.959963984540054 * e.std_error;
  return e;
}

double neg_log(double p) {
  return p > 0.0 ? -std::log(p) : std::numeric_limits<double>::infinity();
}

double binary_entropy(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log1p(-p);
  return h;
}

double clipped_binary_entropy(double p, double clip) {
  double h = 0.0;
  if (p > 0.0) h += p * std::min(-std::log(p), clip);
  if (p < 1.0) h += (1.0 - p) * std::min(-std::log1p(-p), clip);
  return h;
}

double Trajectory::total_reward() const {
  double total = 0.0;
  for (const auto& s : steps) total += s.reward;
  return total;
}

std::size_t LatentMdp::total_states() const {
  std::size_t n = 0;
  for (const auto& c : components) n += c.states.size();
  return n;
}

void LatentMdp::validate() const {
  constexpr double kTol = 1e-12;
  if (horizon < 0) throw ConfigError("negative horizon");
  if (weights.size() != components.size()) throw ConfigError("weights/components size mismatch");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw ConfigError("component weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > kTol) throw ConfigError("component weights must sum to 1");
  for (const auto& c : components) {
    double init = 0.0;
    for (const auto& [s, p] : c.initial) {
      if (s < 0 || static_cast<std::size_t>(s) >= c.states.size())
        throw ConfigError("initial state out of range");
      init += p;
    }
    if (std::abs(init - 1.0) > kTol) throw ConfigError("initial distribution must sum to 1");
    for (const auto& st : c.states) {
      if (st.terminal()) continue;
      for (const auto& out : st.transitions) {
        double mass = 0.0;
        for (const auto& tr : out) {
          if (tr.reward < 0.0 || tr.reward > 1.0) throw ConfigError("reward outside [0,1]");
          mass += tr.probability;
        }
        if (std::abs(mass - 1.0) > kTol) throw ConfigError("transition mass must sum to 1");
      }
    }
  }
}

LatentMdp Environment::exact_model(std::size_t) const {
  throw InstanceTooLarge(name() + " has no enumerable form");
}

Trajectory rollout(const Environment& env, const Policy& policy, RandomStream& rng) {
  Trajectory traj;
  auto episode = env.start_episode(rng);
  traj.component_index = episode->component_index();
  for (int t = 0; t < env.horizon() && !episode->terminal(); ++t) {
    Step step;
    step.observation = episode->observation();
    step.action = policy.sample(step.observation, rng);
    step.reward = episode->step(step.action);
    traj.steps.push_back(step);
  }
  return traj;
}

}  // namespace lmdp
