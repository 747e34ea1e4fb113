#include "lmdp/knapsack.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace lmdp {
namespace {

bool ratio_accepts(double v, double s, double r) {
  if (s <= 0.0) return v > 0.0 || r <= 0.0;
  return v / s >= r;
}

Observation okd_observation(int i, int n, double s, double v, double used_frac,
                            double collected_frac) {
  Observation o;
  o.size = 5;
  if (i <= 0) {
    o.terminal = true;
    return o;
  }
  o.values = {static_cast<double>(i) / static_cast<double>(n), s, v, used_frac, collected_frac};
  return o;
}

}  // namespace

double GranularDistribution::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (gran == 1) return x;
  const double total = std::accumulate(bin_weights.begin(), bin_weights.end(), 0.0);
  const double scaled = x * gran;
  const int b = std::min(static_cast<int>(scaled), gran - 1);
  double mass = 0.0;
  for (int j = 0; j < b; ++j) mass += bin_weights[static_cast<std::size_t>(j)];
  mass += bin_weights[static_cast<std::size_t>(b)] * (scaled - b);
  return mass / total;
}

GranularDistribution okd_sample_distribution(int gran, std::uint64_t seed) {
  if (gran < 1) throw ConfigError("okd: gran must be >= 1");
  GranularDistribution g;
  g.gran = gran;
  RandomStream rng(derive_seed(seed, "okd-bins"));
  g.bin_weights.resize(static_cast<std::size_t>(gran));
  // Open interval (0, 1) so every bin keeps positive weight.
  for (auto& w : g.bin_weights) w = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
  return g;
}

ItemDistribution ItemDistribution::uniform() { return ItemDistribution{}; }

ItemDistribution ItemDistribution::granular(GranularDistribution g) {
  if (g.gran < 1 || g.bin_weights.size() != static_cast<std::size_t>(g.gran))
    throw ConfigError("okd: malformed granular distribution");
  for (double w : g.bin_weights)
    if (!(w > 0.0)) throw ConfigError("okd: bin weights must be positive");
  ItemDistribution d;
  d.kind_ = Kind::kGranular;
  d.cumulative_.resize(g.bin_weights.size());
  std::partial_sum(g.bin_weights.begin(), g.bin_weights.end(), d.cumulative_.begin());
  d.granular_ = std::move(g);
  return d;
}

ItemDistribution ItemDistribution::discrete(std::vector<double> support, std::vector<double> probs) {
  if (support.empty() || support.size() != probs.size())
    throw ConfigError("okd: malformed discrete distribution");
  double total = 0.0;
  for (double p : probs) {
    if (!(p > 0.0)) throw ConfigError("okd: discrete probabilities must be positive");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("okd: discrete probabilities must sum to 1");
  for (double x : support)
    if (x < 0.0) throw ConfigError("okd: item quantities must be non-negative");
  ItemDistribution d;
  d.kind_ = Kind::kDiscrete;
  d.support_ = std::move(support);
  d.probs_ = std::move(probs);
  d.cumulative_.resize(d.probs_.size());
  std::partial_sum(d.probs_.begin(), d.probs_.end(), d.cumulative_.begin());
  return d;
}

double ItemDistribution::sample(RandomStream& rng) const {
  switch (kind_) {
    case Kind::kUniform:
      return rng.uniform();
    case Kind::kGranular: {
      if (granular_.gran == 1) return rng.uniform();
      double u = rng.uniform() * cumulative_.back();
      auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
      auto i = std::min<std::ptrdiff_t>(it - cumulative_.begin(),
                                        static_cast<std::ptrdiff_t>(cumulative_.size()) - 1);
      return (static_cast<double>(i) + rng.uniform()) / granular_.gran;
    }
    case Kind::kDiscrete: {
      double u = rng.uniform();
      auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
      auto i = std::min<std::ptrdiff_t>(it - cumulative_.begin(),
                                        static_cast<std::ptrdiff_t>(cumulative_.size()) - 1);
      return support_[static_cast<std::size_t>(i)];
    }
  }
  return 0.0;
}

double ItemDistribution::cdf(double x) const {
  switch (kind_) {
    case Kind::kUniform:
      return std::clamp(x, 0.0, 1.0);
    case Kind::kGranular:
      return granular_.cdf(x);
    case Kind::kDiscrete: {
      double c = 0.0;
      for (std::size_t i = 0; i < support_.size(); ++i)
        if (support_[i] <= x) c += probs_[i];
      return c;
    }
  }
  return 0.0;
}

double ItemDistribution::max_value() const {
  return kind_ == Kind::kDiscrete ? *std::max_element(support_.begin(), support_.end()) : 1.0;
}

double ItemDistribution::min_value() const {
  return kind_ == Kind::kDiscrete ? *std::min_element(support_.begin(), support_.end()) : 0.0;
}

std::string ItemDistribution::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::kUniform:
      os << "uniform[0,1]";
      break;
    case Kind::kGranular:
      os << "granular(" << granular_.gran << ")";
      break;
    case Kind::kDiscrete:
      os << "discrete(" << support_.size() << " atoms)";
      break;
  }
  return os.str();
}

void OkdConfig::validate() const {
  if (n < 1) throw ConfigError("okd: n must be >= 1");
  if (!(budget > 0.0)) throw ConfigError("okd: budget must be > 0");
  if (!(target > 0.0)) throw ConfigError("okd: target must be > 0");
}

namespace {

class KnapsackEpisode final : public Episode {
 public:
  KnapsackEpisode(const KnapsackEnvironment& env, RandomStream& rng)
      : config_(env.config()), items_(env.draw_items(rng)) {
    observe();
  }

  const Observation& observation() const override { return obs_; }
  bool terminal() const override { return obs_.terminal; }

  double step(Action a) override {
    if (obs_.terminal) return 0.0;
    const auto& item = items_[static_cast<std::size_t>(i_ - 1)];
    double reward = 0.0;
    if (a == Action::kAccept && used_ + item.size <= config_.budget) {
      used_ += item.size;
      collected_ += item.value;
      if (collected_ >= config_.target) {
        reward = 1.0;
        i_ = 0;
      }
    }
    if (i_ > 0) i_ = i_ < config_.n ? i_ + 1 : 0;
    observe();
    return reward;
  }

 private:
  void observe() {
    if (i_ <= 0) {
      obs_ = okd_observation(0, config_.n, 0, 0, 0, 0);
      return;
    }
    const auto& item = items_[static_cast<std::size_t>(i_ - 1)];
    obs_ = okd_observation(i_, config_.n, item.size, item.value, used_ / config_.budget,
                           collected_ / config_.target);
  }

  const OkdConfig& config_;
  std::vector<KnapsackEnvironment::Item> items_;
  int i_ = 1;
  double used_ = 0.0;
  double collected_ = 0.0;
  Observation obs_;
};

struct OkdKey {
  int i;
  double size;
  double value;
  double used;
  double collected;
  bool operator==(const OkdKey& o) const {
    return i == o.i && size == o.size && value == o.value && used == o.used &&
           collected == o.collected;
  }
};

struct OkdKeyHash {
  std::size_t operator()(const OkdKey& k) const noexcept {
    std::uint64_t h = mix64(static_cast<std::uint64_t>(k.i));
    for (double d : {k.size, k.value, k.used, k.collected}) {
      std::uint64_t bits;
      std::memcpy(&bits, &d, sizeof d);
      h = mix64(h ^ bits);
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

KnapsackEnvironment::KnapsackEnvironment(OkdConfig config) : config_(std::move(config)) {
  config_.validate();
}

std::vector<KnapsackEnvironment::Item> KnapsackEnvironment::draw_items(RandomStream& rng) const {
  std::vector<Item> items(static_cast<std::size_t>(config_.n));
  for (auto& it : items) {
    it.value = config_.value_dist.sample(rng);
    it.size = config_.size_dist.sample(rng);
  }
  return items;
}

std::unique_ptr<Episode> KnapsackEnvironment::start_episode(RandomStream& rng) const {
  return std::make_unique<KnapsackEpisode>(*this, rng);
}

LatentMdp KnapsackEnvironment::exact_model(std::size_t cap) const {
  if (!config_.value_dist.is_discrete() || !config_.size_dist.is_discrete())
    throw InstanceTooLarge("okd with continuous item distributions");
  const int n = config_.n;
  const auto& vs = config_.value_dist.support();
  const auto& vp = config_.value_dist.probabilities();
  const auto& ss = config_.size_dist.support();
  const auto& sp = config_.size_dist.probabilities();

  auto arrivals = [&](int i, double used, double collected) {
    std::vector<std::pair<OkdKey, double>> out;
    for (std::size_t a = 0; a < vs.size(); ++a)
      for (std::size_t b = 0; b < ss.size(); ++b)
        out.push_back({OkdKey{i, ss[b], vs[a], used, collected}, vp[a] * sp[b]});
    return out;
  };
  auto expand = [&](const OkdKey& k, Action a) {
    std::vector<std::tuple<OkdKey, double, double>> out;
    const OkdKey g{0, 0, 0, 0, 0};
    double used = k.used;
    double collected = k.collected;
    if (a == Action::kAccept && used + k.size <= config_.budget) {
      used += k.size;
      collected += k.value;
      if (collected >= config_.target) {
        out.emplace_back(g, 1.0, 1.0);
        return out;
      }
    }
    if (k.i == n) {
      out.emplace_back(g, 1.0, 0.0);
      return out;
    }
    for (auto& [key, p] : arrivals(k.i + 1, used, collected)) out.emplace_back(key, p, 0.0);
    return out;
  };
  auto observe = [&](const OkdKey& k) {
    return okd_observation(k.i, n, k.size, k.value, k.used / config_.budget,
                           k.collected / config_.target);
  };
  LatentMdp lmdp;
  lmdp.horizon = n;
  lmdp.weights = {1.0};
  lmdp.components.push_back(enumerate_component<OkdKey, OkdKeyHash>(
      arrivals(1, 0.0, 0.0), expand, observe, cap / static_cast<std::size_t>(n)));
  return lmdp;
}

double BangPerBuckPolicy::accept_probability(const Observation& obs) const {
  if (obs.terminal) return 0.0;
  return ratio_accepts(obs[2], obs[1], r_) ? 1.0 : 0.0;
}

McEstimate okd_knapsack_objective(const KnapsackEnvironment& env, const Policy& policy,
                                  std::uint64_t episodes, std::uint64_t seed) {
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  const auto& c = env.config();
  RunningStats stats;
  for (std::uint64_t k = 0; k < episodes; ++k) {
    RandomStream rng(derive_seed(seed, "okd-crn", {k}));
    auto items = env.draw_items(rng);
    double used = 0.0;
    double total = 0.0;
    for (int i = 1; i <= c.n; ++i) {
      const auto& it = items[static_cast<std::size_t>(i - 1)];
      auto obs = okd_observation(i, c.n, it.size, it.value, used / c.budget, 0.0);
      if (policy.sample(obs, rng) == Action::kAccept && used + it.size <= c.budget) {
        used += it.size;
        total += it.value;
      }
    }
    stats.push(total);
  }
  return stats.estimate();
}

BangPerBuckSearch okd_bang_per_buck_reference(const KnapsackEnvironment& env,
                                              std::uint64_t mc_episodes, std::uint64_t seed,
                                              int iterations) {
  if (mc_episodes < 1) throw std::invalid_argument("mc_episodes must be >= 1");
  const auto& c = env.config();
  std::vector<std::vector<KnapsackEnvironment::Item>> sample;
  sample.reserve(mc_episodes);
  double hi = 0.0;
  for (std::uint64_t k = 0; k < mc_episodes; ++k) {
    RandomStream rng(derive_seed(seed, "okd-crn", {k}));
    sample.push_back(env.draw_items(rng));
    for (const auto& it : sample.back())
      if (it.size > 0.0) hi = std::max(hi, it.value / it.size);
  }
  auto objective = [&](double r) {
    double sum = 0.0;
    for (const auto& items : sample) {
      double used = 0.0;
      double total = 0.0;
      for (const auto& it : items) {
        if (ratio_accepts(it.value, it.size, r) && used + it.size <= c.budget) {
          used += it.size;
          total += it.value;
        }
      }
      sum += total;
    }
    return sum / static_cast<double>(sample.size());
  };

  BangPerBuckSearch out;
  out.lo = 0.0;
  out.hi = hi;
  out.iterations = iterations;
  if (!(hi > 0.0) || !std::isfinite(hi)) {
    out.degenerate = true;
    out.ratio = 0.5 * hi;
    out.objective = objective(out.ratio);
    out.warning = "degenerate bang-per-buck search interval; returning its midpoint";
    return out;
  }

  // Coarse scan to bracket the best cell, then ternary search inside the bracket.
  constexpr int kCells = 32;
  double best_r = 0.0;
  double best_f = objective(0.0);
  for (int j = 1; j <= kCells; ++j) {
    double r = hi * j / kCells;
    double f = objective(r);
    if (f > best_f) {
      best_f = f;
      best_r = r;
    }
  }
  double lo = std::max(0.0, best_r - hi / kCells);
  double up = std::min(hi, best_r + hi / kCells);
  for (int it = 0; it < iterations; ++it) {
    double m1 = lo + (up - lo) / 3.0;
    double m2 = up - (up - lo) / 3.0;
    double f1 = objective(m1);
    double f2 = objective(m2);
    if (f1 > best_f) best_f = f1, best_r = m1;
    if (f2 > best_f) best_f = f2, best_r = m2;
    if (f1 < f2)
      lo = m1;
    else
      up = m2;
  }
  double mid = 0.5 * (lo + up);
  double f_mid = objective(mid);
  if (f_mid >= best_f) best_f = f_mid, best_r = mid;
  out.ratio = best_r;
  out.objective = best_f;
  return out;
}

}  // namespace lmdp
