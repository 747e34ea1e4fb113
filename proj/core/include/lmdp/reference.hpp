#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "lmdp/env_config.hpp"
#include "lmdp/knapsack.hpp"
#include "lmdp/secretary.hpp"

namespace lmdp {

struct ReferenceOptions {
  std::uint64_t okd_search_episodes = 100000;
  int okd_search_iterations = 64;
};

// DP optimum for SP; bang-per-buck for OKD, which is only a reference and not optimal.
struct ReferenceModel {
  std::shared_ptr<const Policy> policy;
  std::string description;
  bool optimal = false;
  std::optional<SpDpSolution> sp;
  std::optional<BangPerBuckSearch> okd;
};

ReferenceModel make_reference(const EnvConfig& env, std::uint64_t seed,
                              const ReferenceOptions& options = {});

}  // namespace lmdp
