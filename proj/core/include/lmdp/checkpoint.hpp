#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "lmdp/env_config.hpp"
#include "lmdp/policy.hpp"

namespace lmdp {

// {"env": ..., "feature": {"kind", "d0"}, "theta": [...], "meta": {"seed", "iteration"}}
nlohmann::json checkpoint_to_json(const LogLinearPolicy& policy, const EnvConfig& env,
                                  std::uint64_t seed, int iteration);

struct Checkpoint {
  EnvConfig env;
  nlohmann::json feature;
  LogLinearPolicy policy;
  std::uint64_t seed = 0;
  int iteration = 0;
};

Checkpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const std::string& path, const nlohmann::json& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace lmdp
