#include <benchmark/benchmark.h>

#include <memory>

#include "lmdp/exact.hpp"
#include "lmdp/features.hpp"
#include "lmdp/fisher.hpp"
#include "lmdp/knapsack.hpp"
#include "lmdp/npg.hpp"
#include "lmdp/quadratic.hpp"
#include "lmdp/sampler.hpp"
#include "lmdp/secretary.hpp"

namespace lmdp {
namespace {

void BM_SampleAdvantageSp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SecretaryEnvironment env(sp_generate_distribution(n, 1));
  LogLinearPolicy pi(std::make_shared<SpPolyFeatures>(), Eigen::VectorXd::Constant(8, 0.1));
  std::uint64_t k = 0;
  for (auto _ : state) {
    RandomStream rng(k);
    benchmark::DoNotOptimize(
        sample_advantage(env, pi, true, pi, static_cast<int>(k++ % n), 0.0, kDefaultClip, rng));
  }
}
BENCHMARK(BM_SampleAdvantageSp)->Arg(10)->Arg(100);

void BM_SampleAdvantageOkd(benchmark::State& state) {
  OkdConfig c;
  c.n = 10;
  c.budget = 2.0;
  c.target = 2.5;
  KnapsackEnvironment env(c);
  LogLinearPolicy pi(std::make_shared<OkdPolyFeatures>());
  std::uint64_t k = 0;
  for (auto _ : state) {
    RandomStream rng(k);
    benchmark::DoNotOptimize(
        sample_advantage(env, pi, true, pi, static_cast<int>(k++ % 10), 0.0, kDefaultClip, rng));
  }
}
BENCHMARK(BM_SampleAdvantageOkd);

// One NPG iteration worth of Fisher/gradient accumulation plus the ball-constrained solve, d = 243.
void BM_FisherAndSolveOkd(benchmark::State& state) {
  OkdConfig c;
  c.n = 10;
  c.budget = 2.0;
  c.target = 2.5;
  KnapsackEnvironment env(c);
  LogLinearPolicy pi(std::make_shared<OkdPolyFeatures>());
  TrainConfig t;
  t.batch = 100;
  t.workers = 1;
  const auto samples = collect_samples(env, pi, t, 0);
  for (auto _ : state) {
    const auto est = estimate_fisher_and_gradient(samples, pi);
    benchmark::DoNotOptimize(solve_constrained_quadratic(est.f_hat, est.nabla_hat, t.ball_radius));
  }
}
BENCHMARK(BM_FisherAndSolveOkd)->Unit(benchmark::kMillisecond);

void BM_ExactValueSp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SecretaryEnvironment env(sp_generate_distribution(n, 1));
  const auto lmdp = env.exact_model(kDefaultStateCap);
  LogLinearPolicy pi(std::make_shared<SpPolyFeatures>(), Eigen::VectorXd::Constant(8, 0.1));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_value_exact(lmdp, pi, 0.01));
}
BENCHMARK(BM_ExactValueSp)->Arg(10)->Arg(100);

void BM_PolicyGradientSp(benchmark::State& state) {
  SecretaryEnvironment env(sp_generate_distribution(40, 1));
  const auto lmdp = env.exact_model(kDefaultStateCap);
  LogLinearPolicy pi(std::make_shared<SpPolyFeatures>(), Eigen::VectorXd::Constant(8, 0.1));
  for (auto _ : state) benchmark::DoNotOptimize(policy_gradient_exact(lmdp, pi, 0.0));
}
BENCHMARK(BM_PolicyGradientSp);

}  // namespace
}  // namespace lmdp

BENCHMARK_MAIN();
