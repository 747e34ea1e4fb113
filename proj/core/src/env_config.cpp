#include "lmdp/env_config.hpp"

namespace lmdp {

void EnvConfig::validate() const {
  if (!is_sp() && !is_okd()) throw ConfigError("env must be \"sp\" or \"okd\", got \"" + env + "\"");
  if (n < 1) throw ConfigError("env.n must be >= 1");
  if (is_okd()) {
    if (!(budget > 0.0)) throw ConfigError("env.budget must be > 0");
    if (!(target > 0.0)) throw ConfigError("env.target must be > 0");
  }
}

void to_json(nlohmann::json& j, const EnvConfig& c) {
  j = nlohmann::json{{"env", c.env}, {"n", c.n}, {"seed", c.seed}};
  if (c.is_sp()) {
    j["classical"] = c.classical;
    if (c.best_last) j["best_last"] = true;
  } else {
    j["gran"] = c.gran;
    j["budget"] = c.budget;
    j["target"] = c.target;
  }
}

void from_json(const nlohmann::json& j, EnvConfig& c) {
  c = EnvConfig{};
  c.env = j.at("env").get<std::string>();
  c.n = j.at("n").get<int>();
  c.seed = j.value("seed", std::uint64_t{0});
  c.classical = j.value("classical", false);
  c.best_last = j.value("best_last", false);
  c.gran = j.value("gran", 1);
  c.budget = j.value("budget", 1.0);
  c.target = j.value("target", 1.0);
  c.validate();
}

SpConfig make_sp_config(const EnvConfig& c) {
  c.validate();
  if (!c.is_sp()) throw ConfigError("not an sp environment");
  if (c.best_last) return sp_best_last(c.n);
  return sp_generate_distribution(c.n, c.seed, c.classical);
}

OkdConfig make_okd_config(const EnvConfig& c) {
  c.validate();
  if (!c.is_okd()) throw ConfigError("not an okd environment");
  OkdConfig o;
  o.n = c.n;
  o.budget = c.budget;
  o.target = c.target;
  o.seed = c.seed;
  if (c.gran > 1) {
    o.value_dist = ItemDistribution::granular(okd_sample_distribution(c.gran, derive_seed(c.seed, "okd-values")));
    o.size_dist = ItemDistribution::granular(okd_sample_distribution(c.gran, derive_seed(c.seed, "okd-sizes")));
  }
  return o;
}

std::unique_ptr<Environment> make_environment(const EnvConfig& c) {
  if (c.is_sp()) return std::make_unique<SecretaryEnvironment>(make_sp_config(c));
  return std::make_unique<KnapsackEnvironment>(make_okd_config(c));
}

nlohmann::json default_feature_spec(const EnvConfig& c) {
  if (c.is_sp()) return {{"kind", "sp_poly"}, {"d0", 4}};
  return {{"kind", "okd_poly"}, {"d0", 3}};
}

}  // namespace lmdp
