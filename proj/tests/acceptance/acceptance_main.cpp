// Acceptance suite. One PASS/FAIL line per criterion; exit status 1 if any fails.
// Usage: lmdp_acceptance [criterion ids...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "lmdp/curriculum.hpp"
#include "lmdp/env_config.hpp"
#include "lmdp/exact.hpp"
#include "lmdp/features.hpp"
#include "lmdp/kappa.hpp"
#include "lmdp/knapsack.hpp"
#include "lmdp/monte_carlo.hpp"
#include "lmdp/npg.hpp"
#include "lmdp/policy.hpp"
#include "lmdp/quadratic.hpp"
#include "lmdp/random.hpp"
#include "lmdp/reference.hpp"
#include "lmdp/sampler.hpp"
#include "lmdp/secretary.hpp"
#include "lmdp/train_log.hpp"
#include "oracles.hpp"

#ifdef LMDP_ACCEPTANCE_CLI
#include "lmdp_cli/commands.hpp"
#endif

namespace lmdp {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_s;  // 0: no runtime bound
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

int find_state(const LatentMdp& lmdp, const Observation& obs) {
  const auto& st = lmdp.components[0].states;
  for (std::size_t i = 0; i < st.size(); ++i)
    if (st[i].observation == obs) return static_cast<int>(i);
  return -1;
}

Eigen::VectorXd normal_vector(int d, double scale, RandomStream& rng) {
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v[i] = scale * rng.normal();
  return v;
}

// ---------------------------------------------------------------------------

Outcome dp_vs_bruteforce() {
  double worst = 0.0;
  double v5 = 0.0;
  for (int n = 3; n <= 6; ++n) {
    const auto dp = sp_optimal_policy_dp(sp_generate_distribution(n, 0, true));
    const double brute = oracle::sp_permutation_optimum(n);
    const auto rule = [&](int i, bool x) {
      return x && dp.accept[static_cast<std::size_t>(i - 1)] ? 1.0 : 0.0;
    };
    worst = std::max({worst, std::abs(dp.value - brute),
                      std::abs(oracle::sp_permutation_value(n, rule) - brute)});
    if (n == 5) v5 = dp.value;
  }
  const double err5 = std::abs(v5 - 13.0 / 30.0);
  return {worst <= 1e-12 && err5 <= 1e-12,
          fmt("max |dp - brute| = %.2e, |V5 - 13/30| = %.2e", worst, err5)};
}

Outcome classical_threshold() {
  const auto cfg = sp_generate_distribution(100, 0, true);
  const auto dp = sp_optimal_policy_dp(cfg);
  if (!dp.threshold_index) return {false, "DP policy is not a threshold policy"};
  const int k = *dp.threshold_index;
  SecretaryEnvironment env(cfg);
  const double v = evaluate_value_exact(env.exact_model(kDefaultStateCap), dp.policy(), 0.0);
  const bool ok = std::abs(k - 36) <= 1 && dp.value >= 1.0 / std::exp(1.0) && dp.value <= 0.40 &&
                  std::abs(v - dp.value) <= 1e-12;
  return {ok, fmt("rejects first %d, value %.6f (policy evaluation %.6f)", k, dp.value, v)};
}

// Episodes are positioned at (i, x) by rejecting h times and keeping only arrivals with the
// requested indicator, then one estimate is drawn from there.
Outcome sampler_unbiased() {
  constexpr int n = 5;
  constexpr std::uint64_t per_cell = 100000;
  int cells = 0;
  int pass = 0;
  double worst_z = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SecretaryEnvironment env(sp_generate_distribution(n, derive_seed(seed, "c3-env")));
    const auto lmdp = env.exact_model(kDefaultStateCap);
    RandomStream trng(derive_seed(seed, "c3-theta"));
    LogLinearPolicy pi(std::make_shared<SpPolyFeatures>(), normal_vector(8, 0.5, trng));
    for (int h = 0; h < n; ++h) {
      for (bool x : {false, true}) {
        if (h == 0 && !x) continue;
        const Observation target = sp_observation(h + 1, n, x);
        const int state = find_state(lmdp, target);
        std::array<RunningStats, 2> stats;
        RandomStream rng(derive_seed(seed, "c3-draws", {static_cast<std::uint64_t>(h), x}));
        while (std::min(stats[0].count(), stats[1].count()) < per_cell) {
          auto ep = env.start_episode(rng);
          for (int t = 0; t < h; ++t) ep->step(Action::kReject);
          if (!(ep->observation() == target)) continue;
          const auto s = sample_advantage_from(*ep, pi, true, pi, h, n, 0.0, kDefaultClip, rng);
          auto& st = stats[static_cast<std::size_t>(index_of(s.action))];
          if (st.count() < per_cell) st.push(s.a_hat);
        }
        for (Action a : kActions) {
          const auto& st = stats[static_cast<std::size_t>(index_of(a))];
          const double exact = advantage_exact(lmdp, pi, 0.0, 0, n - h, state, a);
          const double se = st.estimate().std_error;
          const double z = se > 0 ? std::abs(st.mean() - exact) / se
                                  : (st.mean() == exact ? 0.0 : INFINITY);
          worst_z = std::max(worst_z, z);
          ++cells;
          pass += z <= 3.0;
        }
      }
    }
  }
  const double rate = static_cast<double>(pass) / cells;
  return {rate >= 0.99,
          fmt("%d/%d cells within 3 sigma (%.2f%%), max |z| = %.2f", pass, cells, 100 * rate, worst_z)};
}

Outcome gradient_theorem() {
  constexpr int n = 4;
  SecretaryEnvironment env(sp_generate_distribution(n, 0, true));
  const auto lmdp = env.exact_model(kDefaultStateCap);
  auto f = std::make_shared<SpPolyFeatures>();
  RandomStream rng(derive_seed(4, "c4-theta"));
  double worst = 0.0;
  int checked = 0;
  for (double lambda : {0.0, 0.01}) {
    for (int trial = 0; trial < 6; ++trial) {
      const Eigen::VectorXd theta =
          trial == 0 ? Eigen::VectorXd::Zero(8) : normal_vector(8, 0.7, rng);
      const LogLinearPolicy pi(f, theta);
      const Eigen::VectorXd g = policy_gradient_exact(lmdp, pi, lambda);
      const double e = 1e-3;
      for (int i = 0; i < 8; ++i) {
        auto v = [&](double dx) {
          Eigen::VectorXd t = theta;
          t[i] += dx;
          return evaluate_value_exact(lmdp, pi.with_theta(t), lambda);
        };
        const double fd = (-v(2 * e) + 8 * v(e) - 8 * v(-e) + v(-2 * e)) / (12 * e);
        worst = std::max(worst, std::abs(fd - g[i]) / std::max(std::abs(g[i]), 1e-6));
        ++checked;
      }
    }
  }
  return {worst < 1e-5, fmt("%d coordinates, max relative error %.2e", checked, worst)};
}

Outcome performance_difference() {
  double worst = 0.0;
  RandomStream rng(derive_seed(5, "c5"));
  for (int k = 0; k < 100; ++k) {
    const double lambda = k % 3 == 0 ? 0.0 : 0.5 * rng.uniform();
    double lhs = 0.0;
    double rhs = 0.0;
    if (k < 50) {
      const auto r = oracle::random_lmdp(derive_seed(5, "c5-lmdp", {static_cast<std::uint64_t>(k)}),
                                         1 + k % 4, 3 + k % 5, 2 + k % 4);
      const auto p1 = oracle::random_table_policy(r.observations, 2 * k + 1000);
      const auto p2 = oracle::random_table_policy(r.observations, 2 * k + 1001);
      lhs = evaluate_value_exact(r.lmdp, *p1, lambda) - evaluate_value_exact(r.lmdp, *p2, lambda);
      rhs = performance_difference_rhs(r.lmdp, *p1, *p2, lambda);
    } else {
      const int n = 3 + k % 4;
      SecretaryEnvironment env(sp_generate_distribution(n, static_cast<std::uint64_t>(k)));
      const auto lmdp = k % 2 ? env.literal_model(kDefaultStateCap) : env.exact_model(kDefaultStateCap);
      auto f = std::make_shared<SpPolyFeatures>();
      const LogLinearPolicy p1(f, normal_vector(8, 1.0, rng));
      const LogLinearPolicy p2(f, normal_vector(8, 1.0, rng));
      lhs = evaluate_value_exact(lmdp, p1, lambda) - evaluate_value_exact(lmdp, p2, lambda);
      rhs = performance_difference_rhs(lmdp, p1, p2, lambda);
    }
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return {worst <= 1e-10, fmt("100 tuples, max |lhs - rhs| = %.2e", worst)};
}

Outcome kappa_sandwich() {
  constexpr int n = 10;
  const auto cfg = sp_generate_distribution(n, 0, true);
  SecretaryEnvironment env(cfg);
  const auto lmdp = env.exact_model(kDefaultStateCap);
  const auto dp = sp_optimal_policy_dp(cfg);
  const auto ref = dp.policy();
  const double p = threshold_for_index(n, dp.threshold_index.value_or(0));
  const auto closed = kappa_closed_form_sp(cfg.p_series, p, 0.2);
  auto f = std::make_shared<SpOneHotFeatures>(n);
  const LogLinearPolicy zero(f);

  struct Case {
    const char* label;
    SamplerSpec sampler;
    double k;
    double expected;
  };
  const std::vector<Case> cases = {
      {"curl", {SamplerKind::kFixed, std::make_shared<SpThresholdPolicy>(0.2)}, closed.k_curl, 1.5},
      {"naive", {SamplerKind::kNaiveRandom, nullptr}, closed.k_naive, 512.0 * 3.0 / 9.0}};
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const double at0 = kappa_empirical(lmdp, ref, c.sampler, zero);
    RandomStream rng(derive_seed(6, "c6-grid"));
    double running = at0;
    double lo = at0;
    bool above = false;
    for (int trial = 0; trial < 50; ++trial) {
      const double scale = trial % 5 == 4 ? 60.0 : 3.0;
      const double kt = kappa_empirical(lmdp, ref, c.sampler, zero.with_theta(normal_vector(2 * n, scale, rng)));
      above |= !(kt <= 2.0 * c.k + 1e-9);
      running = std::max(running, kt);
      lo = std::min(lo, kt);
    }
    const bool case_ok = std::abs(c.k - c.expected) <= 1e-9 && std::abs(at0 - c.k) <= 1e-9 && !above &&
                         running >= c.k - 1e-9 && running <= 2.0 * c.k + 1e-9;
    ok &= case_ok;
    detail += fmt("%s: k = %.6g, kappa(0) = %.10g, grid [%.4g, %.4g]; ", c.label, c.k,
                  at0, lo, running);
  }
  detail += "(each grid point <= 2k, running max in [k, 2k])";
  return {ok, detail};
}

Outcome failure_mode() {
  constexpr int n = 10;
  const auto cfg = sp_best_last(n);
  SecretaryEnvironment env(cfg);
  const auto lmdp = env.exact_model(kDefaultStateCap);
  const auto ref = sp_optimal_policy_dp(cfg).policy();
  const LogLinearPolicy zero(std::make_shared<SpOneHotFeatures>(n));
  RandomStream rng(derive_seed(7, "c7"));
  std::vector<LogLinearPolicy> grid = {zero};
  for (int k = 0; k < 5; ++k) grid.push_back(zero.with_theta(normal_vector(2 * n, 2.0, rng)));
  int infinite = 0;
  int total = 0;
  double naive_max = 0.0;
  bool naive_ok = true;
  const SamplerSpec naive{SamplerKind::kNaiveRandom, nullptr};
  for (const auto& at : grid) {
    for (double q : {0.2, 0.5, 0.85}) {
      const SamplerSpec curl{SamplerKind::kFixed, std::make_shared<SpThresholdPolicy>(q)};
      infinite += std::isinf(kappa_empirical(lmdp, ref, curl, at));
      ++total;
    }
    const double kn = kappa_empirical(lmdp, ref, naive, at);
    naive_ok &= std::isfinite(kn) && kn <= 2.0 * std::ldexp(1.0, n - 1);
    naive_max = std::max(naive_max, kn);
  }
  return {infinite == total && naive_ok,
          fmt("threshold sampler +inf in %d/%d cases; naive max %.6g (bound %g)", infinite, total,
              naive_max, 2.0 * std::ldexp(1.0, n - 1))};
}

Outcome clip_error() {
  RandomStream rng(derive_seed(8, "c8"));
  int violations = 0;
  double worst_mismatch = 0.0;
  const double lo = std::log(2.0) - 1.0;
  for (int k = 0; k < 10000; ++k) {
    double p = rng.uniform();
    if (k < 4) p = std::vector<double>{0.0, 1.0, 0.5, 1e-300}[static_cast<std::size_t>(k)];
    const double clip = lo + rng.uniform() * (10.0 - lo);
    const double gap = binary_entropy(p) - clipped_binary_entropy(p, clip);
    double direct = 0.0;
    for (double pa : {p, 1.0 - p})
      if (pa > 0) direct += pa * std::max(0.0, -std::log(pa) - clip);
    worst_mismatch = std::max(worst_mismatch, std::abs(gap - direct));
    violations += !(gap >= 0.0 && gap <= 2.0 / std::exp(clip + 1.0));
  }
  return {violations == 0 && worst_mismatch <= 1e-12,
          fmt("10000 draws, %d violations, max deviation from direct sum %.1e", violations,
              worst_mismatch)};
}

// Boundary oracle: bisection on mu for ||(F + mu I)^{-1} nabla|| = R with Cholesky solves.
Eigen::VectorXd ball_projection(const Eigen::MatrixXd& f, const Eigen::VectorXd& nabla, double r) {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(f.rows(), f.cols());
  auto solve = [&](double mu) { return Eigen::VectorXd((f + mu * I).llt().solve(nabla)); };
  double lo = 0.0;
  double hi = nabla.norm() / r;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (solve(mid).norm() > r ? lo : hi) = mid;
  }
  return solve(0.5 * (lo + hi));
}

Outcome quadratic_solver() {
  RandomStream rng(derive_seed(9, "c9"));
  double worst_interior = 0.0;
  double worst_boundary = 0.0;
  double worst_kkt = 0.0;
  int wrong_flag = 0;
  int max_d = 0;
  for (int k = 0; k < 100; ++k) {
    const int d = k % 10 == 9 ? 243 : 2 + static_cast<int>(rng.uniform() * 241);
    max_d = std::max(max_d, d);
    Eigen::MatrixXd a(d, d + 3);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d + 3; ++j) a(i, j) = rng.normal() / std::sqrt(d);
    const Eigen::MatrixXd f = a * a.transpose();
    const bool interior = k % 2 == 0;
    const Eigen::VectorXd nabla = interior ? Eigen::VectorXd(f * normal_vector(d, 1.0, rng))
                                           : normal_vector(d, 1.0, rng);
    const Eigen::VectorXd dense = f.ldlt().solve(nabla);
    const double radius = interior ? 1.5 * dense.norm() + 1.0 : 0.5 * dense.norm();
    const auto sol = solve_constrained_quadratic(f, nabla, radius);
    if (interior) {
      worst_interior = std::max(worst_interior, (sol.g - dense).norm() / std::max(1.0, dense.norm()));
      wrong_flag += sol.on_boundary;
    } else {
      const Eigen::VectorXd proj = ball_projection(f, nabla, radius);
      worst_boundary = std::max(worst_boundary, (sol.g - proj).norm() / std::max(1.0, proj.norm()));
      const double mu = sol.g.dot(nabla - f * sol.g) / sol.g.squaredNorm();
      const Eigen::VectorXd res = f * sol.g + mu * sol.g - nabla;
      worst_kkt = std::max({worst_kkt, res.norm() / std::max(1.0, nabla.norm()),
                            std::abs(sol.g.norm() - radius) / radius, mu < 0 ? -mu : 0.0});
      wrong_flag += !sol.on_boundary;
    }
  }
  return {worst_interior <= 1e-6 && worst_boundary <= 1e-6 && worst_kkt <= 1e-6 && wrong_flag == 0,
          fmt("d <= %d; interior err %.1e, boundary err %.1e, KKT residual %.1e", max_d,
              worst_interior, worst_boundary, worst_kkt)};
}

Outcome end_to_end() {
  const auto cfg = sp_generate_distribution(10, 0, true);
  const double v_star = sp_optimal_policy_dp(cfg).value;
  int good = 0;
  std::string values;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CurriculumConfig c;
    c.final_env.n = 10;
    c.final_env.classical = true;
    c.warmup_env = c.final_env;
    c.train.eta = 0.2;
    c.train.batch = 100;
    c.train.episodes = 2000;
    c.train.lambda = 0.0;
    c.train.seed = seed;
    c.train.eval_every = 100;
    c.diagnostics.enabled = false;
    const auto r = run_scheme(TrainingScheme::kDirect, c);
    SecretaryEnvironment env(cfg);
    const auto mc = evaluate_value_mc(env, *r.policy, 0.0, 100000, derive_seed(seed, "c10-eval"));
    good += mc.mean >= 0.95 * v_star;
    values += fmt("%.4f ", mc.mean);
  }
  return {good >= 4, fmt("V* = %.4f; final MC values %s-> %d/5 >= 0.95 V*", v_star, values.c_str(), good)};
}

struct Fig1Budget {
  int warmup_t = 400;
  int final_t = 300;
  int naive_t = 400;  // final_t + warmup_t * 10 / 40
};

Outcome curriculum_effect() {
  const Fig1Budget b;
  std::map<std::string, std::vector<double>> finals;
  std::vector<std::vector<double>> fix_kappa;
  std::vector<std::vector<double>> naive_kappa;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CurriculumConfig c;
    c.final_env.n = 40;
    c.final_env.seed = derive_seed(seed, "c11-env");
    c.warmup_env = generate_curriculum(c.final_env, 10, derive_seed(seed, "warmup-env"));
    c.train.eta = 0.2;
    c.train.batch = 100;
    c.train.episodes = b.final_t;
    c.warmup_episodes = b.warmup_t;
    c.train.seed = seed;
    c.train.eval_every = 10;
    CurriculumConfig naive = c;
    naive.train.episodes = b.naive_t;
    const auto env = make_environment(c.final_env);
    const auto lmdp = env->exact_model(kDefaultStateCap);

    CurriculumRunner runner(c);
    for (auto s : {TrainingScheme::kFixSampCurl, TrainingScheme::kCurl}) {
      const auto r = runner.run(s);
      finals[scheme_name(s)].push_back(evaluate_value_exact(lmdp, *r.policy, 0.0));
      if (s == TrainingScheme::kFixSampCurl) {
        std::vector<double> k;
        for (const auto& row : r.final_phase->rows) k.push_back(row.ln_kappa);
        fix_kappa.push_back(k);
      }
    }
    const auto r = run_scheme(TrainingScheme::kNaiveSamp, naive);
    finals["naive_samp"].push_back(evaluate_value_exact(lmdp, *r.policy, 0.0));
    std::vector<double> k;
    for (const auto& row : r.final_phase->rows) k.push_back(row.ln_kappa);
    naive_kappa.push_back(k);
  }
  const double m_fix = median(finals["fix_samp_curl"]);
  const double m_curl = median(finals["curl"]);
  const double m_naive = median(finals["naive_samp"]);
  int kappa_violations = 0;
  int logged = 0;
  double worst_gap = -INFINITY;
  for (int t = 0; t < b.final_t; ++t) {
    std::vector<double> a, n;
    for (std::size_t s = 0; s < fix_kappa.size(); ++s) {
      a.push_back(fix_kappa[s][static_cast<std::size_t>(t)]);
      n.push_back(naive_kappa[s][static_cast<std::size_t>(t)]);
    }
    const double ma = median(a), mn = median(n);
    ++logged;
    kappa_violations += !(ma <= mn);
    worst_gap = std::max(worst_gap, ma - mn);
  }
  const bool ok = m_fix >= m_naive && m_curl >= m_naive && kappa_violations == 0;
  return {ok, fmt("median final value fix_samp_curl %.4f, curl %.4f, naive_samp %.4f; "
                  "median ln kappa fix <= naive at %d/%d iterations (max excess %.3g)",
                  m_fix, m_curl, m_naive, logged - kappa_violations, logged, worst_gap)};
}

// Budget and target for the OKD criterion: about four average items fit, and success needs
// more value than an arbitrary four items carry.
constexpr double kOkdBudget = 2.0;
constexpr double kOkdTarget = 2.5;

Outcome okd_smoke() {
  EnvConfig e;
  e.env = "okd";
  e.n = 10;
  e.budget = kOkdBudget;
  e.target = kOkdTarget;
  e.seed = 12;
  const auto env = make_environment(e);
  const std::uint64_t crn = derive_seed(12, "c12-crn");
  const auto ref = make_reference(e, derive_seed(12, "c12-reference"));
  const double v_ref = evaluate_value_mc(*env, *ref.policy, 0.0, 100000, crn).mean;
  const double v_all = evaluate_value_mc(*env, ConstantPolicy(1.0), 0.0, 100000, crn).mean;
  const double v_none = evaluate_value_mc(*env, ConstantPolicy(0.0), 0.0, 100000, crn).mean;
  int good = 0;
  std::string values;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CurriculumConfig c;
    c.final_env = e;
    c.warmup_env = generate_curriculum(e, 5, derive_seed(seed, "warmup-env"));
    c.train.eta = 0.2;
    c.train.batch = 100;
    c.train.episodes = 200;
    c.warmup_episodes = 200;
    c.train.seed = seed;
    c.train.eval_every = 20;
    c.diagnostics.every = 20;
    const auto r = run_scheme(TrainingScheme::kCurl, c);
    const double v = evaluate_value_mc(*env, *r.policy, 0.0, 100000, crn).mean;
    good += v >= 0.9 * v_ref;
    values += fmt("%.4f ", v);
  }
  const bool ok = v_ref > v_all && v_ref > v_none && good >= 3;
  return {ok, fmt("B = %g, V = %g; bang-per-buck r = %.4f value %.4f, accept-all %.4f, reject-all "
                  "%.4f; curl %s-> %d/5 >= 0.9 ref",
                  kOkdBudget, kOkdTarget, ref.okd->ratio, v_ref, v_all, v_none, values.c_str(), good)};
}

std::string serialize(const SchemeResult& r) {
  std::ostringstream s;
  write_train_log_csv(s, r.rows, false);
  if (r.warmup) write_theta_trace_csv(s, r.warmup->theta_trace);
  if (r.final_phase) write_theta_trace_csv(s, r.final_phase->theta_trace);
  return s.str();
}

std::string run_all(CurriculumConfig c, int workers) {
  c.train.workers = workers;
  CurriculumRunner runner(c);
  std::string out;
  for (auto s : kAllSchemes) out += scheme_name(s) + "\n" + serialize(runner.run(s));
  return out;
}

#ifdef LMDP_ACCEPTANCE_CLI
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// All files of a run directory; log.csv without the wall-clock column, manifest without the
// output directory.
std::map<std::string, std::string> run_cli(const std::string& config, const std::filesystem::path& out,
                                           int workers) {
  namespace fs = std::filesystem;
  fs::remove_all(out);
  std::ostringstream o, e;
  cli::Overrides ov;
  ov.output_dir = out.string();
  ov.workers = workers;
  if (cli::cmd_run(config, ov, o, e) != cli::kExitOk) throw std::runtime_error(e.str());
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(out)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), out).string();
    std::string text = slurp(entry.path());
    if (entry.path().filename() == "log.csv") {
      std::stringstream in(text);
      std::string line;
      text.clear();
      while (std::getline(in, line)) text += line.substr(0, line.rfind(',')) + "\n";
    } else if (entry.path().filename() == "manifest.json") {
      auto j = nlohmann::json::parse(text);
      j["config"].erase("output_dir");
      text = j.dump();
    }
    files[rel] = text;
  }
  return files;
}
#endif

Outcome determinism() {
  CurriculumConfig sp;
  sp.final_env.n = 8;
  sp.final_env.seed = 13;
  sp.warmup_env = generate_curriculum(sp.final_env, 4, derive_seed(13, "warmup-env"));
  sp.train.episodes = 6;
  sp.train.batch = 20;
  sp.train.eval_episodes = 300;
  sp.train.seed = 13;
  const std::string a = run_all(sp, 1);
  const bool sp_same = a == run_all(sp, 1) && a == run_all(sp, 2) && a == run_all(sp, 3);

  CurriculumConfig okd;
  okd.final_env.env = "okd";
  okd.final_env.n = 6;
  okd.final_env.budget = 1.5;
  okd.final_env.target = 1.5;
  okd.warmup_env = generate_curriculum(okd.final_env, 3, derive_seed(13, "warmup-env"));
  okd.train.episodes = 3;
  okd.train.batch = 20;
  okd.train.eval_episodes = 200;
  okd.train.seed = 13;
  okd.reference.okd_search_episodes = 2000;
  okd.diagnostics.err_episodes = 50;
  auto okd_run = [&](int workers) {
    auto c = okd;
    c.train.workers = workers;
    return serialize(run_scheme(TrainingScheme::kCurl, c));
  };
  const std::string o1 = okd_run(1);
  const bool okd_same = o1 == okd_run(2);
  std::string detail = fmt("SP 9 schemes workers {1,1,2,3}: %s; OKD curl workers {1,2}: %s",
                           sp_same ? "identical" : "DIFFER", okd_same ? "identical" : "DIFFER");
  bool ok = sp_same && okd_same;
#ifdef LMDP_ACCEPTANCE_CLI
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "lmdp_acceptance_determinism";
  fs::create_directories(dir);
  const nlohmann::json cfg = {{"seed", 21},
                              {"env", {{"env", "sp"}, {"n", 8}}},
                              {"schemes", {"fix_samp_curl", "curl_reg", "naive_samp"}},
                              {"train", {{"episodes", 5}, {"batch", 16}, {"eval_episodes", 200}}},
                              {"curriculum", {{"warmup_n", 4}}}};
  const auto path = dir / "experiment.json";
  std::ofstream(path) << cfg.dump(2);
  const auto c1 = run_cli(path.string(), dir / "w1", 1);
  const auto c2 = run_cli(path.string(), dir / "w2", 2);
  const auto c1b = run_cli(path.string(), dir / "w1b", 1);
  const bool cli_same = c1 == c2 && c1 == c1b;
  detail += fmt("; CLI run outputs (%zu files) workers {1,2,1}: %s", c1.size(),
                cli_same ? "identical" : "DIFFER");
  ok &= cli_same;
  fs::remove_all(dir);
#endif
  return {ok, detail};
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "dp-vs-bruteforce", 5, dp_vs_bruteforce},
      {2, "classical-threshold", 5, classical_threshold},
      {3, "sampler-unbiased", 120, sampler_unbiased},
      {4, "gradient-theorem", 30, gradient_theorem},
      {5, "performance-difference", 0, performance_difference},
      {6, "kappa-sandwich", 60, kappa_sandwich},
      {7, "threshold-sampler-failure", 0, failure_mode},
      {8, "clip-error-bound", 0, clip_error},
      {9, "quadratic-solver", 0, quadratic_solver},
      {10, "end-to-end-learning", 900, end_to_end},
      {11, "curriculum-effect", 3600, curriculum_effect},
      {12, "okd-reference-and-curl", 3600, okd_smoke},
      {13, "determinism", 0, determinism},
  };
  return all;
}

}  // namespace
}  // namespace lmdp

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failed = 0;
  int ran = 0;
  for (const auto& c : lmdp::criteria()) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    lmdp::Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = o.pass;
    if (c.limit_s > 0 && secs >= c.limit_s) {
      pass = false;
      o.detail += lmdp::fmt("; runtime %.1f s exceeds %.0f s", secs, c.limit_s);
    }
    ++ran;
    failed += !pass;
    std::printf("[%s] %2d %-26s %8.2f s  %s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
