#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "lmdp/exact.hpp"
#include "lmdp/fitting_error.hpp"
#include "lmdp/kappa.hpp"
#include "lmdp/npg.hpp"

namespace lmdp {

struct DiagnosticsConfig {
  bool enabled = true;
  int every = 1;
  // Exact computation when the environment enumerates within the cap.
  std::size_t state_cap = kDefaultStateCap;
  std::uint64_t err_episodes = 200;
  // Monte Carlo kappa for non-enumerable environments; expensive for large d.
  bool mc_kappa = false;
  std::uint64_t kappa_episodes = 2000;
};

// Per-iteration ln kappa(theta_t) and decayed average fitting error against a reference.
class TheoryDiagnostics final : public TrainObserver {
 public:
  TheoryDiagnostics(const Environment& env, std::shared_ptr<const Policy> reference,
                    SamplerSpec sampler, double eta, double lambda, double clip,
                    std::uint64_t seed, DiagnosticsConfig config = {}, int workers = 1);

  IterationDiagnostics on_iteration(int t, const LogLinearPolicy& pi_t,
                                    const Eigen::VectorXd& g_t) override;

  bool exact() const { return exact_.has_value(); }
  const std::vector<double>& err_trace() const { return errors_; }

 private:
  const Environment& env_;
  std::shared_ptr<const Policy> reference_;
  SamplerSpec sampler_;
  double lambda_;
  double clip_;
  std::uint64_t seed_;
  DiagnosticsConfig config_;
  int workers_;
  std::optional<LatentMdp> exact_;
  std::optional<WeightedStates> reference_occupancy_;
  std::optional<WeightedStates> fixed_occupancy_;
  DecayedAverage average_;
  std::vector<double> errors_;
};

}  // namespace lmdp
