#include "lmdp/reference.hpp"

#include <sstream>

namespace lmdp {

ReferenceModel make_reference(const EnvConfig& env, std::uint64_t seed,
                              const ReferenceOptions& options) {
  ReferenceModel ref;
  if (env.is_sp()) {
    auto dp = sp_optimal_policy_dp(make_sp_config(env));
    std::ostringstream os;
    if (dp.threshold_index)
      os << "dp-optimal threshold: reject the first " << *dp.threshold_index << " of " << env.n;
    else
      os << "dp-optimal table policy";
    ref.description = os.str();
    ref.policy = std::make_shared<SpTablePolicy>(dp.policy());
    ref.optimal = true;
    ref.sp = std::move(dp);
    return ref;
  }
  KnapsackEnvironment okd(make_okd_config(env));
  auto search = okd_bang_per_buck_reference(okd, options.okd_search_episodes,
                                            derive_seed(seed, "bang-per-buck"),
                                            options.okd_search_iterations);
  std::ostringstream os;
  os << "bang-per-buck r = " << search.ratio << " (reference only, not optimal)";
  ref.description = os.str();
  ref.policy = std::make_shared<BangPerBuckPolicy>(search.ratio);
  ref.optimal = false;
  ref.okd = std::move(search);
  return ref;
}

}  // namespace lmdp
