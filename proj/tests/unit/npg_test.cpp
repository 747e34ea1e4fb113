#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include <Eigen/Dense>

#include "lmdp/exact.hpp"
#include "lmdp/fisher.hpp"
#include "lmdp/npg.hpp"
#include "lmdp/quadratic.hpp"
#include "lmdp/sampler.hpp"
#include "lmdp/secretary.hpp"
#include "lmdp/train_log.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace lmdp {
namespace {

Eigen::MatrixXd random_psd(int d, int rank, RandomStream& rng) {
  Eigen::MatrixXd a(d, rank);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < rank; ++j) a(i, j) = rng.normal();
  return a * a.transpose();
}

Eigen::VectorXd random_vector(int d, RandomStream& rng) {
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v[i] = rng.normal();
  return v;
}

TEST(SampleAdvantage, OneStepAdvantage) {
  oracle::BanditEnvironment bandit(1.0, 0.3);
  ConstantPolicy pi_t(0.7);
  const double v = 0.7 * 1.0 + 0.3 * 0.3;
  RunningStats acc, rej;
  for (std::uint64_t k = 0; k < 200000; ++k) {
    RandomStream rng(derive_seed(1, "one-step", {k}));
    const auto s = sample_advantage(bandit, pi_t, true, pi_t, 0, 0.0, kDefaultClip, rng);
    ASSERT_TRUE(s.valid);
    (s.action == Action::kAccept ? acc : rej).push(s.a_hat);
  }
  EXPECT_LE(std::abs(acc.mean() - (1.0 - v)), 4.0 * acc.estimate().std_error);
  EXPECT_LE(std::abs(rej.mean() - (0.3 - v)), 4.0 * rej.estimate().std_error);
}

TEST(SampleAdvantage, ZeroRewardIsAlwaysZero) {
  SecretaryEnvironment sp(sp_generate_distribution(6, 1));
  oracle::BanditEnvironment bandit(0.0, 0.0);
  ConstantPolicy pi(0.4);
  for (std::uint64_t k = 0; k < 2000; ++k) {
    RandomStream rng(k);
    EXPECT_EQ(sample_advantage(bandit, pi, false, pi, 0, 0.0, kDefaultClip, rng).a_hat, 0.0);
  }
}

TEST(SampleAdvantage, BoundHoldsWithRegularization) {
  SecretaryEnvironment env(sp_generate_distribution(8, 2));
  LogLinearPolicy pi(std::make_shared<SpPolyFeatures>(), Eigen::VectorXd::Constant(8, -3.0));
  const double lambda = 0.5, clip = 1.0;
  const double bound = advantage_bound(lambda, clip, 8);
  EXPECT_DOUBLE_EQ(bound, 2.0 * (1.0 + lambda * clip + 8.0 * (1.0 + lambda * std::log(2.0))));
  for (std::uint64_t k = 0; k < 5000; ++k) {
    RandomStream rng(k);
    const auto s = sample_advantage(env, pi, k % 2, pi, static_cast<int>(k % 8), lambda, clip, rng);
    EXPECT_LE(std::abs(s.a_hat), bound);
  }
}

TEST(SampleAdvantage, UnbiasedOnSmallSecretary) {
  constexpr int n = 4;
  SecretaryEnvironment env(sp_generate_distribution(n, 3));
  const auto lmdp = env.exact_model(kDefaultStateCap);
  auto features = std::make_shared<SpPolyFeatures>();
  RandomStream trng(4);
  Eigen::VectorXd theta(8);
  for (int i = 0; i < 8; ++i) theta[i] = 0.5 * trng.normal();
  LogLinearPolicy pi(features, theta);
  std::map<std::tuple<int, int, int>, RunningStats> cells;  // (h, state, action)
  for (std::uint64_t k = 0; k < 400000; ++k) {
    RandomStream rng(derive_seed(8, "unbiased", {k}));
    const int h = static_cast<int>(k % n);
    const auto s = sample_advantage(env, pi, true, pi, h, 0.0, kDefaultClip, rng);
    if (!s.valid) continue;
    cells[{h, testing::find_state(lmdp, 0, s.state), index_of(s.action)}].push(s.a_hat);
  }
  int checked = 0, pass = 0;
  for (const auto& [key, stats] : cells) {
    const auto [h, state, a] = key;
    if (stats.count() < 1000) continue;
    const double exact = advantage_exact(lmdp, pi, 0.0, 0, n - h, state, static_cast<Action>(a));
    ++checked;
    pass += std::abs(stats.mean() - exact) <= 3.0 * stats.estimate().std_error;
  }
  EXPECT_GE(checked, 10);
  EXPECT_GE(pass, checked - 1);
}

TEST(ClipError, GapWithinBound) {
  RandomStream rng(10);
  int violations = 0;
  for (int k = 0; k < 10000; ++k) {
    const double p = rng.uniform();
    const double clip = std::log(2.0) - 1.0 + rng.uniform() * (10.0 - std::log(2.0) + 1.0);
    const double gap = binary_entropy(p) - clipped_binary_entropy(p, clip);
    violations += !(gap >= 0.0 && gap <= 2.0 / std::exp(clip + 1.0));
  }
  EXPECT_EQ(violations, 0);
}

TEST(FisherEstimate, SingleSample) {
  auto f = std::make_shared<SpPolyFeatures>();
  LogLinearPolicy pi(f, Eigen::VectorXd::LinSpaced(8, -0.5, 0.5));
  AdvantageSample s{sp_observation(3, 6, true), Action::kAccept, 0.75, 2, true};
  const Eigen::VectorXd g = pi.grad_log_prob(s.state, s.action);
  const auto est = estimate_fisher_and_gradient(std::vector<AdvantageSample>{s}, pi);
  EXPECT_LT((est.f_hat - g * g.transpose()).norm(), 1e-15);
  EXPECT_LT((est.nabla_hat - 0.75 * g).norm(), 1e-15);
  EXPECT_EQ(est.samples, 1u);
}

TEST(FisherEstimate, DuplicatedSetDoubles) {
  SecretaryEnvironment env(sp_generate_distribution(6, 1));
  LogLinearPolicy pi(std::make_shared<SpPolyFeatures>(), Eigen::VectorXd::Constant(8, 0.1));
  TrainConfig c;
  c.batch = 20;
  const auto samples = collect_samples(env, pi, c, 0);
  auto twice = samples;
  twice.insert(twice.end(), samples.begin(), samples.end());
  const auto one = estimate_fisher_and_gradient(samples, pi);
  const auto two = estimate_fisher_and_gradient(twice, pi);
  EXPECT_LT((two.f_hat - 2.0 * one.f_hat).norm(), 1e-12 * one.f_hat.norm());
  EXPECT_LT((two.nabla_hat - 2.0 * one.nabla_hat).norm(), 1e-12 * (1.0 + one.nabla_hat.norm()));
}

TEST(FisherEstimate, InvalidSamplesCarryNoScore) {
  LogLinearPolicy pi(std::make_shared<SpPolyFeatures>());
  AdvantageSample bad{sp_observation(0, 5, false), Action::kAccept, 3.0, 4, false};
  const auto est = estimate_fisher_and_gradient(std::vector<AdvantageSample>{bad}, pi);
  EXPECT_EQ(est.f_hat.norm(), 0.0);
  EXPECT_EQ(est.nabla_hat.norm(), 0.0);
}

// Fisher of the on-policy distribution by enumerating literal instances and action paths.
Eigen::MatrixXd fisher_by_paths(const SpConfig& cfg, const LogLinearPolicy& pi) {
  const int n = cfg.n;
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(pi.dimension(), pi.dimension());
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    double w = 1.0;
    for (int i = 1; i <= n; ++i) {
      const double p = cfg.p_series[static_cast<std::size_t>(i - 1)];
      w *= ((mask >> (i - 1)) & 1u) ? p : 1.0 - p;
    }
    if (w == 0.0) continue;
    double reach = w;
    for (int i = 1; i <= n; ++i) {
      const auto s = sp_observation(i, n, (mask >> (i - 1)) & 1u);
      for (Action a : kActions) {
        const Eigen::VectorXd g = pi.grad_log_prob(s, a);
        sigma += reach * pi.probability(s, a) * g * g.transpose();
      }
      reach *= pi.probability(s, Action::kReject);
    }
  }
  return sigma;
}

TEST(FisherEstimate, MatchesEnumeratedFisherAtZero) {
  const auto cfg = sp_generate_distribution(5, 6);
  SecretaryEnvironment env(cfg);
  LogLinearPolicy pi(std::make_shared<SpPolyFeatures>());
  const Eigen::MatrixXd oracle_sigma = fisher_by_paths(cfg, pi);
  const Eigen::MatrixXd exact = fisher_exact(env.exact_model(kDefaultStateCap), pi, {&pi, false});
  EXPECT_LT((exact - oracle_sigma).norm(), 1e-10);
  EXPECT_LT((fisher_exact(env.literal_model(kDefaultStateCap), pi, {&pi, false}) - oracle_sigma).norm(), 1e-10);

  TrainConfig c;
  c.batch = 20000;
  const auto est = estimate_fisher_and_gradient(collect_samples(env, pi, c, 0), pi);
  EXPECT_LT((est.f_hat / c.batch - oracle_sigma).norm() / oracle_sigma.norm(), 0.03);
}

TEST(QuadraticSolver, IdentityInteriorAndBoundary) {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(5, 5);
  const Eigen::VectorXd v = (Eigen::VectorXd(5) << 1, -2, 0.5, 0, 3).finished();
  for (auto method : {QuadraticMethod::kTrustRegion, QuadraticMethod::kProjectedGradient}) {
    QuadraticSolverOptions o;
    o.method = method;
    EXPECT_LT((solve_constrained_quadratic(I, v, 10.0, o).g - v).norm(), 1e-8);
    const auto b = solve_constrained_quadratic(I, v, 1.5, o);
    EXPECT_LT((b.g - 1.5 * v / v.norm()).norm(), 1e-8);
    EXPECT_TRUE(b.on_boundary);
  }
}

TEST(QuadraticSolver, RandomFullRankMatchesDenseSolve) {
  RandomStream rng(2);
  for (int k = 0; k < 20; ++k) {
    const int d = 2 + k * 3;
    const Eigen::MatrixXd f = random_psd(d, d + 2, rng);
    Eigen::VectorXd x = random_vector(d, rng);
    const Eigen::VectorXd nabla = f * x;
    const Eigen::VectorXd dense = f.ldlt().solve(nabla);
    const auto sol = solve_constrained_quadratic(f, nabla, dense.norm() * 1.5 + 1.0);
    EXPECT_LT((sol.g - dense).norm(), 1e-6 * std::max(1.0, dense.norm())) << d;
    EXPECT_FALSE(sol.on_boundary);
  }
}

TEST(QuadraticSolver, ProjectedGradientIsMonotone) {
  RandomStream rng(3);
  const Eigen::MatrixXd f = random_psd(12, 6, rng);
  const Eigen::VectorXd nabla = random_vector(12, rng);
  QuadraticSolverOptions o;
  o.method = QuadraticMethod::kProjectedGradient;
  o.record_trace = true;
  const auto sol = solve_constrained_quadratic(f, nabla, 2.0, o);
  ASSERT_FALSE(sol.trace.empty());
  for (std::size_t i = 1; i < sol.trace.size(); ++i) EXPECT_LE(sol.trace[i], sol.trace[i - 1] + 1e-12);
  EXPECT_LE(sol.g.norm(), 2.0 + 1e-12);
  const auto tr = solve_constrained_quadratic(f, nabla, 2.0);
  EXPECT_LE(tr.objective, sol.objective + 1e-9);
}

TEST(QuadraticSolver, ZeroMatrixPointsAlongGradient) {
  const Eigen::VectorXd nabla = (Eigen::VectorXd(3) << 3, 0, -4).finished();
  const auto sol = solve_constrained_quadratic(Eigen::MatrixXd::Zero(3, 3), nabla, 2.0);
  EXPECT_LT((sol.g - 2.0 * nabla / 5.0).norm(), 1e-12);
}

TEST(NpgTrain, ZeroStepKeepsParameters) {
  SecretaryEnvironment env(sp_generate_distribution(6, 1));
  LogLinearPolicy pi0(std::make_shared<SpPolyFeatures>(), Eigen::VectorXd::Constant(8, 0.2));
  TrainConfig c;
  c.eta = 0.0;
  c.episodes = 5;
  c.batch = 10;
  c.eval_episodes = 100;
  const auto r = npg_train(env, pi0, c);
  for (const auto& th : r.log.theta_trace) EXPECT_EQ(th, pi0.theta());
  // Same evaluation streams per iteration are distinct, same policy: rewards agree in law.
  for (const auto& row : r.log.rows) EXPECT_NEAR(row.reward_mean, r.log.rows[0].reward_mean, 0.3);
}

TEST(NpgTrain, BanditAcceptProbabilityIncreases) {
  oracle::BanditEnvironment bandit(1.0, 0.0);
  auto f = std::make_shared<SpPolyFeatures>(1);
  int monotone = 0;
  constexpr int kSeeds = 10;
  for (int seed = 0; seed < kSeeds; ++seed) {
    TrainConfig c;
    c.episodes = 15;
    c.batch = 100;
    c.eval_episodes = 0;
    c.seed = static_cast<std::uint64_t>(seed);
    const auto r = npg_train(bandit, LogLinearPolicy(f), c);
    bool up = true;
    for (std::size_t t = 1; t < r.log.theta_trace.size(); ++t)
      up = up && LogLinearPolicy(f, r.log.theta_trace[t]).accept_probability(oracle::BanditEnvironment::state()) >=
                     LogLinearPolicy(f, r.log.theta_trace[t - 1]).accept_probability(oracle::BanditEnvironment::state());
    monotone += up;
  }
  EXPECT_GE(monotone, 9);
}

class NormRecorder final : public TrainObserver {
 public:
  IterationDiagnostics on_iteration(int, const LogLinearPolicy&, const Eigen::VectorXd& g) override {
    norms.push_back(g.norm());
    return {};
  }
  std::vector<double> norms;
};

TEST(NpgTrain, DeterministicAcrossWorkersAndBallRespected) {
  SecretaryEnvironment env(sp_generate_distribution(8, 4));
  LogLinearPolicy pi0(std::make_shared<SpPolyFeatures>());
  TrainConfig c;
  c.episodes = 6;
  c.batch = 15;
  c.lambda = 0.01;
  c.ball_radius = 0.5;
  c.eval_episodes = 300;
  c.seed = 12;
  NormRecorder rec;
  c.workers = 1;
  const auto a = npg_train(env, pi0, c, {}, &rec);
  c.workers = 3;
  const auto b = npg_train(env, pi0, c);
  ASSERT_EQ(a.log.theta_trace.size(), 7u);
  for (std::size_t t = 0; t < a.log.theta_trace.size(); ++t) EXPECT_EQ(a.log.theta_trace[t], b.log.theta_trace[t]);
  std::ostringstream sa, sb;
  write_train_log_csv(sa, a.log.rows, false);
  write_train_log_csv(sb, b.log.rows, false);
  EXPECT_EQ(sa.str(), sb.str());
  for (double g : rec.norms) EXPECT_LE(g, 0.5 + 1e-12);
  for (std::size_t t = 0; t < a.log.rows.size(); ++t)
    EXPECT_EQ(a.log.rows[t].samples_cumulative, (t + 1) * 15u * 8u);
}

TEST(TrainLogCsv, RoundTripAndSchemaErrors) {
  std::vector<TrainLogRow> rows(2);
  rows[0].iteration = 0;
  rows[0].samples_cumulative = 10;
  rows[0].mode = "direct/final";
  rows[0].reward_mean = 0.1 + 0.2;
  rows[0].ln_kappa = std::numeric_limits<double>::infinity();
  rows[1].iteration = 1;
  rows[1].mode = "direct/final";
  std::stringstream ss;
  write_train_log_csv(ss, rows);
  EXPECT_EQ(ss.str().rfind("schema_version,1\n", 0), 0u);
  const auto back = read_train_log_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].reward_mean, 0.1 + 0.2);
  EXPECT_TRUE(std::isinf(back[0].ln_kappa));
  EXPECT_TRUE(std::isnan(back[1].avg_err));

  std::stringstream bad("schema_version,1\niteration,samples,mode,reward_mean,reward_ci95,ln_kappa,avg_err,lambda,wall_ms\n");
  try {
    read_train_log_csv(bad);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("samples"), std::string::npos);
  }
}

}  // namespace
}  // namespace lmdp
