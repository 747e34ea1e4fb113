#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "lmdp/lmdp.hpp"
#include "lmdp/policy.hpp"
#include "lmdp/quadratic.hpp"
#include "lmdp/sampler.hpp"

namespace lmdp {

enum class SamplerKind {
  kOnPolicy,     // d^{theta_t}
  kFixed,        // grafted d~^{pi_s}: roll pi_s, uniform action at step h
  kNaiveRandom,  // accept with probability 1/2 everywhere
};

struct SamplerSpec {
  SamplerKind kind = SamplerKind::kOnPolicy;
  std::shared_ptr<const Policy> policy;

  std::string describe() const;
};

inline const double kDefaultClip = std::log(2.0) + 5.0;

struct TrainConfig {
  double eta = 0.2;
  int episodes = 100;  // T
  int batch = 100;     // N
  double lambda = 0.0;
  double clip = kDefaultClip;  // U
  double ball_radius = 50.0;   // G
  SamplerSpec sampler;
  std::uint64_t seed = 0;
  QuadraticSolverOptions solver;
  int workers = 0;  // 0: LMDP_NPG_WORKERS, else 1
  // Monte Carlo episodes used to log the (lambda = 0) reward of the updated policy.
  std::uint64_t eval_episodes = 1000;
  int eval_every = 1;
  int checkpoint_every = 0;
  // Label of the trajectory streams; phases with the same label share randomness.
  std::string stream_label = "final";

  void validate() const;
};

struct TrainLogRow {
  int iteration = 0;
  std::uint64_t samples_cumulative = 0;
  std::string mode;
  double reward_mean = std::numeric_limits<double>::quiet_NaN();
  double reward_ci95 = std::numeric_limits<double>::quiet_NaN();
  double ln_kappa = std::numeric_limits<double>::quiet_NaN();
  double avg_err = std::numeric_limits<double>::quiet_NaN();
  double lambda = 0.0;
  double wall_ms = 0.0;
};

struct TrainLog {
  std::vector<TrainLogRow> rows;
  // theta_0 .. theta_T
  std::vector<Eigen::VectorXd> theta_trace;
};

struct IterationDiagnostics {
  double ln_kappa = std::numeric_limits<double>::quiet_NaN();
  double avg_err = std::numeric_limits<double>::quiet_NaN();
};

class TrainObserver {
 public:
  virtual ~TrainObserver() = default;
  // Sees pi_t and the solved direction g_t before theta moves.
  virtual IterationDiagnostics on_iteration(int t, const LogLinearPolicy& pi_t,
                                            const Eigen::VectorXd& g_t) = 0;
};

struct PhaseInfo {
  std::string mode = "direct";
  std::uint64_t samples_offset = 0;
  std::function<void(int iteration, const LogLinearPolicy&)> on_checkpoint;
};

struct TrainResult {
  TrainLog log;
  LogLinearPolicy policy;
};

class NonFiniteParameters : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Row t describes iteration t: samples collected so far, the reward of theta_{t+1},
// and diagnostics of (theta_t, g_t).
TrainResult npg_train(const Environment& env, const LogLinearPolicy& policy0,
                      const TrainConfig& config, const PhaseInfo& phase = {},
                      TrainObserver* observer = nullptr);

// The N x H advantage samples of iteration t, ordered by (batch index, h).
std::vector<AdvantageSample> collect_samples(const Environment& env, const Policy& pi_t,
                                             const TrainConfig& config, int t);

}  // namespace lmdp
