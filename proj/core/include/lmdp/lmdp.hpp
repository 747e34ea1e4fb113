#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lmdp/random.hpp"
#include "lmdp/types.hpp"

namespace lmdp {

// History-independent binary-action policy.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual double accept_probability(const Observation& obs) const = 0;

  // {pi(reject|s), pi(accept|s)}
  std::array<double, 2> probabilities(const Observation& obs) const {
    double p = accept_probability(obs);
    return {1.0 - p, p};
  }
  double probability(const Observation& obs, Action a) const {
    return probabilities(obs)[static_cast<std::size_t>(index_of(a))];
  }
  Action sample(const Observation& obs, RandomStream& rng) const {
    return rng.uniform() < accept_probability(obs) ? Action::kAccept : Action::kReject;
  }
};

// Entropy of a binary distribution, in nats.
double binary_entropy(double p_accept);

// sum_a pi(a) * min(ln(1/pi(a)), clip)
double clipped_binary_entropy(double p_accept, double clip);

// ln(1/p) with ln(1/0) = +inf.
double neg_log(double p);

struct Step {
  Observation observation;
  Action action = Action::kReject;
  double reward = 0.0;
};

struct Trajectory {
  std::vector<Step> steps;
  std::int64_t component_index = -1;

  double total_reward() const;
};

// One episode of one sampled component. Rewards lie in [0, 1].
class Episode {
 public:
  virtual ~Episode() = default;
  virtual const Observation& observation() const = 0;
  virtual bool terminal() const = 0;
  virtual double step(Action a) = 0;
  // Identifier of the drawn component when it has a compact encoding, else -1.
  virtual std::int64_t component_index() const { return -1; }
};

// ---------------------------------------------------------------------------
// Explicit (enumerated) latent MDPs.

struct Transition {
  int next = 0;
  double probability = 0.0;
  double reward = 0.0;
};

struct TabularState {
  Observation observation;
  // Indexed by action. Empty for terminal states.
  std::array<std::vector<Transition>, 2> transitions;

  bool terminal() const { return observation.terminal; }
};

struct TabularMdp {
  std::vector<TabularState> states;
  std::vector<std::pair<int, double>> initial;
};

struct LatentMdp {
  int horizon = 0;
  std::vector<double> weights;
  std::vector<TabularMdp> components;

  std::size_t component_count() const { return components.size(); }
  std::size_t total_states() const;
  // Throws ConfigError on broken weights, probabilities or rewards.
  void validate() const;
};

class Environment {
 public:
  virtual ~Environment() = default;
  virtual int horizon() const = 0;
  virtual std::string name() const = 0;
  // Draws a component (instance) from the stream and starts at its initial state.
  virtual std::unique_ptr<Episode> start_episode(RandomStream& rng) const = 0;
  // Enumerated equivalent; throws InstanceTooLarge when states * horizon > cap.
  virtual LatentMdp exact_model(std::size_t cap) const;
};

inline constexpr std::size_t kDefaultStateCap = 1'000'000;

Trajectory rollout(const Environment& env, const Policy& policy, RandomStream& rng);

// Breadth-first enumeration of the reachable states of one component.
// expand(key, action) -> vector<tuple<Key, probability, reward>>; observe(key) -> Observation.
template <class Key, class KeyHash, class Expand, class Observe>
TabularMdp enumerate_component(const std::vector<std::pair<Key, double>>& initial,
                               Expand&& expand, Observe&& observe, std::size_t max_states) {
  TabularMdp mdp;
  std::unordered_map<Key, int, KeyHash> index;
  std::vector<Key> keys;
  auto intern = [&](const Key& key) {
    auto [it, inserted] = index.emplace(key, static_cast<int>(keys.size()));
    if (inserted) {
      if (keys.size() >= max_states)
        throw InstanceTooLarge(std::to_string(keys.size() + 1) + " states");
      keys.push_back(key);
      TabularState st;
      st.observation = observe(key);
      mdp.states.push_back(std::move(st));
    }
    return it->second;
  };
  for (const auto& [key, prob] : initial) mdp.initial.emplace_back(intern(key), prob);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (mdp.states[i].terminal()) continue;
    for (Action a : kActions) {
      std::vector<Transition> out;
      for (const auto& [next, prob, reward] : expand(Key(keys[i]), a)) {
        if (prob <= 0.0) continue;
        out.push_back({intern(next), prob, reward});
      }
      mdp.states[i].transitions[static_cast<std::size_t>(index_of(a))] = std::move(out);
    }
  }
  return mdp;
}

}  // namespace lmdp
