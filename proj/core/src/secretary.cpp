#include "lmdp/secretary.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lmdp {

void SpConfig::validate() const {
  if (n < 1) throw ConfigError("sp: n must be >= 1");
  if (p_series.size() != static_cast<std::size_t>(n)) throw ConfigError("sp: p_series length != n");
  if (p_series[0] != 1.0) throw ConfigError("sp: P_1 must equal 1");
  for (std::size_t i = 1; i < p_series.size(); ++i)
    if (!(p_series[i] > 0.0 && p_series[i] <= 1.0))
      throw ConfigError("sp: P_" + std::to_string(i + 1) + " outside (0,1]");
}

SpConfig sp_generate_distribution(int n, std::uint64_t seed, bool classical) {
  if (n < 1) throw ConfigError("sp: n must be >= 1");
  SpConfig c;
  c.n = n;
  c.seed = seed;
  c.classical = classical;
  c.p_series.resize(static_cast<std::size_t>(n));
  c.p_series[0] = 1.0;
  RandomStream rng(derive_seed(seed, "sp-series"));
  for (int i = 2; i <= n; ++i) {
    double u = rng.uniform();
    c.p_series[static_cast<std::size_t>(i - 1)] =
        classical ? 1.0 / static_cast<double>(i) : std::pow(static_cast<double>(i), -(2.0 * u + 0.25));
  }
  return c;
}

SpConfig sp_best_last(int n) {
  if (n < 1) throw ConfigError("sp: n must be >= 1");
  SpConfig c;
  c.n = n;
  c.p_series.assign(static_cast<std::size_t>(n), 1.0);
  return c;
}

Observation sp_observation(int i, int n, bool x) {
  Observation o;
  o.size = 2;
  if (i <= 0) {
    o.terminal = true;
    return o;
  }
  o.values[0] = static_cast<double>(i) / static_cast<double>(n);
  o.values[1] = x ? 1.0 : 0.0;
  return o;
}

int sp_position(const Observation& obs, int n) {
  if (obs.terminal) return 0;
  return static_cast<int>(std::lround(obs[0] * static_cast<double>(n)));
}

namespace {

class SecretaryEpisode final : public Episode {
 public:
  SecretaryEpisode(const SpConfig& config, RandomStream& rng) : n_(config.n) {
    x_.assign(static_cast<std::size_t>(n_) + 1, false);
    x_[1] = true;
    last_ = 1;
    for (int i = 2; i <= n_; ++i) {
      x_[static_cast<std::size_t>(i)] = rng.uniform() < config.p_series[static_cast<std::size_t>(i - 1)];
      if (x_[static_cast<std::size_t>(i)]) last_ = i;
    }
    i_ = 1;
    obs_ = sp_observation(1, n_, true);
  }

  const Observation& observation() const override { return obs_; }
  bool terminal() const override { return obs_.terminal; }

  double step(Action a) override {
    if (obs_.terminal) return 0.0;
    double reward = 0.0;
    if (a == Action::kAccept) {
      if (x_[static_cast<std::size_t>(i_)] && i_ == last_) reward = 1.0;
      i_ = 0;
    } else {
      i_ = i_ < n_ ? i_ + 1 : 0;
    }
    obs_ = sp_observation(i_, n_, i_ > 0 && x_[static_cast<std::size_t>(i_)]);
    return reward;
  }

  std::int64_t component_index() const override {
    if (n_ > 63) return -1;
    std::int64_t code = 0;
    for (int i = 2; i <= n_; ++i)
      if (x_[static_cast<std::size_t>(i)]) code |= std::int64_t{1} << (i - 2);
    return code;
  }

 private:
  int n_;
  std::vector<bool> x_;
  int last_ = 1;
  int i_ = 1;
  Observation obs_;
};

struct SpKey {
  int i;
  bool x;
  bool operator==(const SpKey&) const = default;
};
struct SpKeyHash {
  std::size_t operator()(const SpKey& k) const noexcept {
    return static_cast<std::size_t>(k.i) * 2 + (k.x ? 1 : 0);
  }
};

}  // namespace

SecretaryEnvironment::SecretaryEnvironment(SpConfig config) : config_(std::move(config)) {
  config_.validate();
  const int n = config_.n;
  tail_.assign(static_cast<std::size_t>(n) + 1, 1.0);
  for (int i = n - 1; i >= 1; --i)
    tail_[static_cast<std::size_t>(i)] =
        tail_[static_cast<std::size_t>(i) + 1] * (1.0 - config_.p_series[static_cast<std::size_t>(i)]);
  tail_[0] = 0.0;
}

std::unique_ptr<Episode> SecretaryEnvironment::start_episode(RandomStream& rng) const {
  return std::make_unique<SecretaryEpisode>(config_, rng);
}

LatentMdp SecretaryEnvironment::exact_model(std::size_t cap) const {
  const int n = config_.n;
  std::size_t per_step = cap / static_cast<std::size_t>(n);
  auto expand = [&](const SpKey& k, Action a) {
    std::vector<std::tuple<SpKey, double, double>> out;
    const SpKey g{0, false};
    if (a == Action::kAccept) {
      double win = k.x ? accept_value(k.i) : 0.0;
      out.emplace_back(g, win, 1.0);
      out.emplace_back(g, 1.0 - win, 0.0);
    } else if (k.i == n) {
      out.emplace_back(g, 1.0, 0.0);
    } else {
      double p = config_.p_series[static_cast<std::size_t>(k.i)];
      out.emplace_back(SpKey{k.i + 1, true}, p, 0.0);
      out.emplace_back(SpKey{k.i + 1, false}, 1.0 - p, 0.0);
    }
    return out;
  };
  auto observe = [&](const SpKey& k) { return sp_observation(k.i, n, k.x); };
  LatentMdp lmdp;
  lmdp.horizon = n;
  lmdp.weights = {1.0};
  lmdp.components.push_back(enumerate_component<SpKey, SpKeyHash>(
      {{SpKey{1, true}, 1.0}}, expand, observe, per_step));
  return lmdp;
}

LatentMdp SecretaryEnvironment::literal_model(std::size_t cap) const {
  const int n = config_.n;
  std::vector<int> free;
  for (int i = 2; i <= n; ++i)
    if (config_.p_series[static_cast<std::size_t>(i - 1)] < 1.0) free.push_back(i);
  if (free.size() > 40) throw InstanceTooLarge("2^" + std::to_string(free.size()) + " instances");
  const std::size_t count = std::size_t{1} << free.size();
  const std::size_t states = static_cast<std::size_t>(n) + 1;
  if (count * states * static_cast<std::size_t>(n) > cap)
    throw InstanceTooLarge(std::to_string(count * states) + " states x horizon " + std::to_string(n));

  LatentMdp lmdp;
  lmdp.horizon = n;
  for (std::size_t code = 0; code < count; ++code) {
    std::vector<bool> x(static_cast<std::size_t>(n) + 1, true);
    double weight = 1.0;
    for (std::size_t b = 0; b < free.size(); ++b) {
      const int i = free[b];
      const double p = config_.p_series[static_cast<std::size_t>(i - 1)];
      const bool bit = (code >> b) & 1U;
      x[static_cast<std::size_t>(i)] = bit;
      weight *= bit ? p : 1.0 - p;
    }
    int last = 1;
    for (int i = 1; i <= n; ++i)
      if (x[static_cast<std::size_t>(i)]) last = i;

    TabularMdp comp;
    comp.states.resize(states);
    const int g = n;  // index of the terminal state
    comp.states[static_cast<std::size_t>(g)].observation = sp_observation(0, n, false);
    for (int i = 1; i <= n; ++i) {
      auto& st = comp.states[static_cast<std::size_t>(i - 1)];
      const bool xi = x[static_cast<std::size_t>(i)];
      st.observation = sp_observation(i, n, xi);
      st.transitions[index_of(Action::kAccept)] = {{g, 1.0, (xi && i == last) ? 1.0 : 0.0}};
      st.transitions[index_of(Action::kReject)] = {{i < n ? i : g, 1.0, 0.0}};
    }
    comp.initial = {{0, 1.0}};
    lmdp.weights.push_back(weight);
    lmdp.components.push_back(std::move(comp));
  }
  return lmdp;
}

double SpThresholdPolicy::accept_probability(const Observation& obs) const {
  if (obs.terminal) return 0.0;
  return (obs[1] > 0.5 && obs[0] > p_) ? 1.0 : 0.0;
}

int threshold_index(int n, double p) {
  int k = 0;
  for (int i = 1; i <= n; ++i)
    if (static_cast<double>(i) / static_cast<double>(n) <= p) k = i;
  return k;
}

double threshold_for_index(int n, int k) {
  return (static_cast<double>(k) + 0.5) / static_cast<double>(n);
}

SpTablePolicy::SpTablePolicy(int n, std::vector<bool> accept) : n_(n), accept_(std::move(accept)) {
  if (accept_.size() != static_cast<std::size_t>(n_)) throw ConfigError("sp table policy: size != n");
}

double SpTablePolicy::accept_probability(const Observation& obs) const {
  if (obs.terminal || obs[1] < 0.5) return 0.0;
  int i = sp_position(obs, n_);
  if (i < 1 || i > n_) return 0.0;
  return accept_[static_cast<std::size_t>(i - 1)] ? 1.0 : 0.0;
}

SpTablePolicy SpDpSolution::policy() const {
  return SpTablePolicy(static_cast<int>(accept.size()), accept);
}

SpDpSolution sp_optimal_policy_dp(const SpConfig& config) {
  config.validate();
  const int n = config.n;
  const auto& P = config.p_series;
  SpDpSolution sol;
  sol.accept_value.assign(static_cast<std::size_t>(n), 0.0);
  sol.continue_value.assign(static_cast<std::size_t>(n), 0.0);
  sol.accept.assign(static_cast<std::size_t>(n), false);

  double tail = 1.0;
  for (int i = n; i >= 1; --i) {
    sol.accept_value[static_cast<std::size_t>(i - 1)] = tail;
    tail *= 1.0 - P[static_cast<std::size_t>(i - 1)];
  }
  double u = 0.0;
  for (int i = n; i >= 1; --i) {
    if (i < n) {
      const double p = P[static_cast<std::size_t>(i)];
      const double a_next = sol.accept_value[static_cast<std::size_t>(i)];
      const double u_next = sol.continue_value[static_cast<std::size_t>(i)];
      u = p * std::max(a_next, u_next) + (1.0 - p) * u_next;
    }
    sol.continue_value[static_cast<std::size_t>(i - 1)] = u;
    sol.accept[static_cast<std::size_t>(i - 1)] = sol.accept_value[static_cast<std::size_t>(i - 1)] >= u;
  }
  sol.value = std::max(sol.accept_value[0], sol.continue_value[0]);

  int k = 0;
  while (k < n && !sol.accept[static_cast<std::size_t>(k)]) ++k;
  bool threshold_form = true;
  for (int i = k; i < n; ++i) threshold_form = threshold_form && sol.accept[static_cast<std::size_t>(i)];
  if (threshold_form) sol.threshold_index = k;

  bool formula_applies = true;
  for (int i = 2; i <= n; ++i) formula_applies = formula_applies && P[static_cast<std::size_t>(i - 1)] < 1.0;
  if (formula_applies) {
    // S_k = sum_{i=k+1}^n P_i/(1-P_i), with the P_1 term infinite; k = largest with S_k > 1.
    double s = 0.0;
    int found = 0;
    for (int j = n - 1; j >= 1; --j) {
      s += P[static_cast<std::size_t>(j)] / (1.0 - P[static_cast<std::size_t>(j)]);
      if (s > 1.0) {
        found = j;
        break;
      }
    }
    sol.closed_form_index = found;
    sol.closed_form_agrees = sol.threshold_index && *sol.threshold_index == found;
  }
  return sol;
}

}  // namespace lmdp
