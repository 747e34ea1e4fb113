#pragma once

#include <cstdint>

#include "lmdp/lmdp.hpp"

namespace lmdp {

// Mean regularized return sum_t r_t + lambda H(pi(.|s_t)); episode k uses stream (seed, "eval", k).
McEstimate evaluate_value_mc(const Environment& env, const Policy& policy, double lambda,
                             std::uint64_t episodes, std::uint64_t seed, int workers = 1);

}  // namespace lmdp
