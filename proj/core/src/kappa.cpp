#include "lmdp/kappa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "lmdp/secretary.hpp"

namespace lmdp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// E_{a ~ b}[score_a^2] / ||phi||^2 for a two-action log-linear policy with pi = pi_theta(accept).
double action_weight(double pi, double b_accept) {
  return b_accept * (1.0 - pi) * (1.0 - pi) + (1.0 - b_accept) * pi * pi;
}

double lambda_max_sym(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  return es.eigenvalues().maxCoeff();
}

void check_psd_input(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols()) throw std::invalid_argument(std::string(what) + " is not square");
  if (!m.allFinite()) throw std::domain_error(std::string(what) + " has non-finite entries");
  Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  const double top = std::max(std::abs(es.eigenvalues().maxCoeff()), 1e-300);
  if (es.eigenvalues().minCoeff() < -1e-8 * top)
    throw std::domain_error(std::string(what) + " is not positive semidefinite");
}

// lambda_max(B_r^{-1/2} A_r B_r^{-1/2}) with B_r given by its eigenpairs.
double reduced_kappa(const Eigen::MatrixXd& a_r, const Eigen::MatrixXd& b_r, double ridge) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (b_r + b_r.transpose()));
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  Eigen::VectorXd lam = es.eigenvalues().array() + ridge;
  if (lam.size() == 0) return 1.0;
  if (lam.minCoeff() <= 0.0) return kInf;
  Eigen::MatrixXd w = es.eigenvectors() * lam.cwiseSqrt().cwiseInverse().asDiagonal();
  Eigen::MatrixXd m = w.transpose() * a_r * w;
  return std::max(0.0, lambda_max_sym(0.5 * (m + m.transpose())));
}

}  // namespace

KappaClosedForm kappa_closed_form_sp(std::span<const double> p_series, double p, double q) {
  const int n = static_cast<int>(p_series.size());
  if (n < 1) throw std::invalid_argument("empty P-series");
  KappaClosedForm out;
  out.kp = threshold_index(n, p);
  out.kq = threshold_index(n, q);
  auto P = [&](int j) { return p_series[static_cast<std::size_t>(j - 1)]; };

  if (q <= p) {
    double k = 1.0;
    for (int j = out.kq + 1; j <= out.kp; ++j) k = (P(j) >= 1.0) ? kInf : k / (1.0 - P(j));
    out.k_curl = k;
  }
  double best = 1.0;
  double prod = 1.0;
  for (int i = out.kp + 2; i <= n; ++i) {
    prod *= 2.0 * (1.0 - P(i - 1));
    best = std::max(best, prod);
  }
  out.k_naive = std::ldexp(best, out.kp);
  return out;
}

double relative_condition_number(const Eigen::MatrixXd& reference, const Eigen::MatrixXd& sampler,
                                 const KappaOptions& options) {
  if (reference.rows() != sampler.rows()) throw std::invalid_argument("kappa: dimension mismatch");
  check_psd_input(reference, "reference Fisher matrix");
  check_psd_input(sampler, "sampler Fisher matrix");
  const Eigen::MatrixXd a = 0.5 * (reference + reference.transpose());
  const Eigen::MatrixXd b = 0.5 * (sampler + sampler.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  const Eigen::VectorXd sig = es.eigenvalues();
  const double top = sig.size() ? std::max(sig.maxCoeff(), 0.0) : 0.0;
  const double a_top = std::max(lambda_max_sym(a), 0.0);
  if (a_top == 0.0) return 0.0;

  std::vector<Eigen::Index> range;
  std::vector<Eigen::Index> null;
  for (Eigen::Index i = 0; i < sig.size(); ++i)
    (sig[i] > options.rank_tol * top ? range : null).push_back(i);

  if (!null.empty() && options.ridge == 0.0) {
    Eigen::MatrixXd un(a.rows(), static_cast<Eigen::Index>(null.size()));
    for (std::size_t k = 0; k < null.size(); ++k) un.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(null[k]);
    if (lambda_max_sym(un.transpose() * a * un) > options.rank_tol * a_top) return kInf;
  }
  if (options.ridge > 0.0) {
    Eigen::MatrixXd m = es.eigenvectors().transpose() * a * es.eigenvectors();
    Eigen::VectorXd inv = (sig.cwiseMax(0.0).array() + options.ridge).rsqrt();
    m = inv.asDiagonal() * m * inv.asDiagonal();
    return std::max(0.0, lambda_max_sym(0.5 * (m + m.transpose())));
  }
  Eigen::MatrixXd ur(a.rows(), static_cast<Eigen::Index>(range.size()));
  Eigen::VectorXd lr(static_cast<Eigen::Index>(range.size()));
  for (std::size_t k = 0; k < range.size(); ++k) {
    ur.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(range[k]);
    lr[static_cast<Eigen::Index>(k)] = sig[range[k]];
  }
  Eigen::VectorXd inv = lr.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd m = inv.asDiagonal() * (ur.transpose() * a * ur) * inv.asDiagonal();
  return std::max(0.0, lambda_max_sym(0.5 * (m + m.transpose())));
}

Eigen::MatrixXd fisher_from_occupancy(const WeightedStates& occupancy, const LogLinearPolicy& at,
                                      const Policy* action_policy) {
  const Eigen::Index d = at.dimension();
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd phi(d);
  for (std::size_t s = 0; s < occupancy.states.size(); ++s) {
    const auto& obs = occupancy.states[s];
    const double pi = at.features_and_probability(obs, {phi.data(), static_cast<std::size_t>(d)});
    const double b = action_policy ? action_policy->accept_probability(obs) : 0.5;
    const double c = occupancy.mass[s] * action_weight(pi, b);
    if (c > 0.0) f.selfadjointView<Eigen::Lower>().rankUpdate(phi, c);
  }
  Eigen::MatrixXd full = f.selfadjointView<Eigen::Lower>();
  return full;
}

double kappa_from_occupancy(const WeightedStates& reference, const Policy& reference_policy,
                            const WeightedStates& sampler, const Policy* sampler_actions,
                            const LogLinearPolicy& at, const KappaOptions& options) {
  const Eigen::Index d = at.dimension();
  Eigen::VectorXd phi(d);

  // Feature vectors carrying positive weight under each distribution.
  auto support = [&](const WeightedStates& occ, const Policy* actions, std::vector<Eigen::VectorXd>& vecs,
                     std::vector<double>& weights) {
    for (std::size_t s = 0; s < occ.states.size(); ++s) {
      const auto& obs = occ.states[s];
      const double pi = at.features_and_probability(obs, {phi.data(), static_cast<std::size_t>(d)});
      const double b = actions ? actions->accept_probability(obs) : 0.5;
      const double c = occ.mass[s] * action_weight(pi, b);
      if (c > 0.0 && phi.squaredNorm() > 0.0) {
        vecs.push_back(phi);
        weights.push_back(c);
      }
    }
  };
  std::vector<Eigen::VectorXd> ref_vecs, samp_vecs;
  std::vector<double> ref_w, samp_w;
  support(reference, &reference_policy, ref_vecs, ref_w);
  support(sampler, sampler_actions, samp_vecs, samp_w);
  if (ref_vecs.empty()) return 0.0;

  Eigen::MatrixXd q;  // orthonormal basis of the sampler span
  if (!samp_vecs.empty()) {
    Eigen::MatrixXd rows(d, static_cast<Eigen::Index>(samp_vecs.size()));
    for (std::size_t k = 0; k < samp_vecs.size(); ++k)
      rows.col(static_cast<Eigen::Index>(k)) = samp_vecs[k].normalized();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv[i] > options.rank_tol * sv[0]) ++rank;
    q = svd.matrixU().leftCols(rank);
  }
  if (options.ridge == 0.0) {
    for (const auto& v : ref_vecs) {
      const double norm = v.norm();
      const double resid = q.cols() ? (v - q * (q.transpose() * v)).norm() : norm;
      if (resid > options.rank_tol * norm) return kInf;
    }
  } else {
    // With a ridge the problem is posed on the full space.
    q = Eigen::MatrixXd::Identity(d, d);
  }

  const Eigen::Index r = q.cols();
  Eigen::MatrixXd a_r = Eigen::MatrixXd::Zero(r, r);
  Eigen::MatrixXd b_r = Eigen::MatrixXd::Zero(r, r);
  for (std::size_t k = 0; k < ref_vecs.size(); ++k) {
    Eigen::VectorXd z = q.transpose() * ref_vecs[k];
    a_r.selfadjointView<Eigen::Lower>().rankUpdate(z, ref_w[k]);
  }
  for (std::size_t k = 0; k < samp_vecs.size(); ++k) {
    Eigen::VectorXd z = q.transpose() * samp_vecs[k];
    b_r.selfadjointView<Eigen::Lower>().rankUpdate(z, samp_w[k]);
  }
  Eigen::MatrixXd a_full = a_r.selfadjointView<Eigen::Lower>();
  Eigen::MatrixXd b_full = b_r.selfadjointView<Eigen::Lower>();
  return reduced_kappa(a_full, b_full, options.ridge);
}

double kappa_empirical(const LatentMdp& lmdp, const Policy& reference, const SamplerSpec& sampler,
                       const LogLinearPolicy& at, const KappaOptions& options) {
  static const NaiveRandomPolicy kNaive;
  const WeightedStates ref_occ = state_occupancy(lmdp, reference);
  switch (sampler.kind) {
    case SamplerKind::kOnPolicy:
      return kappa_from_occupancy(ref_occ, reference, state_occupancy(lmdp, at), &at, at, options);
    case SamplerKind::kFixed:
      if (!sampler.policy) throw std::invalid_argument("fixed sampler without policy");
      return kappa_from_occupancy(ref_occ, reference, state_occupancy(lmdp, *sampler.policy), nullptr,
                                  at, options);
    case SamplerKind::kNaiveRandom:
      return kappa_from_occupancy(ref_occ, reference, state_occupancy(lmdp, kNaive), nullptr, at,
                                  options);
  }
  return kInf;
}

double kappa_empirical_mc(const Environment& env, const Policy& reference,
                          const SamplerSpec& sampler, const LogLinearPolicy& at,
                          std::uint64_t episodes, std::uint64_t seed,
                          const KappaOptions& options) {
  static const NaiveRandomPolicy kNaive;
  const Eigen::Index d = at.dimension();
  const std::uint64_t floor_episodes =
      (10 * static_cast<std::uint64_t>(d) * static_cast<std::uint64_t>(d) +
       static_cast<std::uint64_t>(env.horizon()) - 1) /
      static_cast<std::uint64_t>(std::max(1, env.horizon()));
  episodes = std::max(episodes, floor_episodes);

  const Policy* roll = &at;
  const Policy* actions = &at;
  if (sampler.kind == SamplerKind::kFixed) {
    roll = sampler.policy.get();
    actions = nullptr;
  } else if (sampler.kind == SamplerKind::kNaiveRandom) {
    roll = &kNaive;
    actions = nullptr;
  }

  auto estimate = [&](const Policy& rollout_policy, const Policy* action_policy, const char* label) {
    constexpr Eigen::Index kBlock = 2048;
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd block(d, kBlock);
    Eigen::Index used = 0;
    Eigen::VectorXd phi(d);
    auto flush = [&] {
      if (used == 0) return;
      f.selfadjointView<Eigen::Lower>().rankUpdate(block.leftCols(used));
      used = 0;
    };
    for (std::uint64_t k = 0; k < episodes; ++k) {
      RandomStream rng(derive_seed(seed, label, {k}));
      auto traj = rollout(env, rollout_policy, rng);
      for (const auto& step : traj.steps) {
        const double pi = at.features_and_probability(step.observation, {phi.data(), static_cast<std::size_t>(d)});
        const double b = action_policy ? action_policy->accept_probability(step.observation) : 0.5;
        const double c = action_weight(pi, b);
        if (c <= 0.0) continue;
        block.col(used++) = std::sqrt(c) * phi;
        if (used == kBlock) flush();
      }
    }
    flush();
    Eigen::MatrixXd full = f.selfadjointView<Eigen::Lower>();
    return Eigen::MatrixXd(full / static_cast<double>(episodes));
  };
  const Eigen::MatrixXd a = estimate(reference, &reference, "kappa-reference");
  const Eigen::MatrixXd b = estimate(*roll, actions, "kappa-sampler");
  return relative_condition_number(a, b, options);
}

nlohmann::json KappaReport::to_json() const {
  auto num = [](double x) -> nlohmann::json {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return nullptr;
    return x;
  };
  nlohmann::json j;
  j["kappa_lower"] = kappa_lower ? num(*kappa_lower) : nlohmann::json(nullptr);
  j["kappa_upper"] = kappa_upper ? num(*kappa_upper) : nlohmann::json(nullptr);
  j["kappa_empirical"] = num(kappa_empirical);
  j["ln_kappa_empirical"] = num(std::log(kappa_empirical));
  j["at_theta"] = std::vector<double>(at_theta.data(), at_theta.data() + at_theta.size());
  j["sampler"] = sampler;
  j["reference_relative"] = reference_relative;
  return j;
}

OptimalThreshold optimal_threshold_from_series(std::span<const double> p_series) {
  SpConfig config;
  config.n = static_cast<int>(p_series.size());
  config.p_series.assign(p_series.begin(), p_series.end());
  const auto dp = sp_optimal_policy_dp(config);
  OptimalThreshold out;
  out.dp_index = dp.threshold_index.value_or(-1);
  if (dp.closed_form_index) {
    out.index = dp.closed_form_index;
    out.p = threshold_for_index(config.n, *out.index);
    out.closed_form = true;
  }
  return out;
}

}  // namespace lmdp
