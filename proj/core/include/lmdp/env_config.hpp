#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "lmdp/knapsack.hpp"
#include "lmdp/lmdp.hpp"
#include "lmdp/secretary.hpp"

namespace lmdp {

// {"env": "sp"|"okd", "n", "seed", "classical", "gran", "budget", "target"}.
// P-series and bin weights are re-derived from the seed.
struct EnvConfig {
  std::string env = "sp";
  int n = 10;
  std::uint64_t seed = 0;
  bool classical = false;
  // SP only: every P_i = 1.
  bool best_last = false;
  // OKD only: gran <= 1 means Unif[0,1].
  int gran = 1;
  double budget = 1.0;
  double target = 1.0;

  bool is_sp() const { return env == "sp"; }
  bool is_okd() const { return env == "okd"; }
  void validate() const;
};

void to_json(nlohmann::json& j, const EnvConfig& c);
void from_json(const nlohmann::json& j, EnvConfig& c);

SpConfig make_sp_config(const EnvConfig& c);
OkdConfig make_okd_config(const EnvConfig& c);
std::unique_ptr<Environment> make_environment(const EnvConfig& c);

// Default feature map for the environment: SP polynomial d0 = 4, OKD polynomial d0 = 3.
nlohmann::json default_feature_spec(const EnvConfig& c);

}  // namespace lmdp
