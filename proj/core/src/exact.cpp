#include "lmdp/exact.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include <Eigen/Dense>

namespace lmdp {
namespace {

using ProbTable = std::vector<std::vector<std::array<double, 2>>>;

ProbTable policy_table(const LatentMdp& lmdp, const Policy& policy) {
  ProbTable probs(lmdp.components.size());
  for (std::size_t m = 0; m < lmdp.components.size(); ++m) {
    const auto& states = lmdp.components[m].states;
    probs[m].resize(states.size(), {0.0, 0.0});
    for (std::size_t s = 0; s < states.size(); ++s)
      if (!states[s].terminal()) probs[m][s] = policy.probabilities(states[s].observation);
  }
  return probs;
}

// reward_weight = 0, lambda = 1 gives the entropy-to-go.
ValueTables backward(const LatentMdp& lmdp, const ProbTable& probs, double reward_weight,
                     double lambda) {
  const int H = lmdp.horizon;
  ValueTables t;
  t.horizon = H;
  t.lambda = lambda;
  t.v.resize(lmdp.components.size());
  t.q.resize(lmdp.components.size());
  for (std::size_t m = 0; m < lmdp.components.size(); ++m) {
    const auto& states = lmdp.components[m].states;
    const std::size_t S = states.size();
    auto& v = t.v[m];
    auto& q = t.q[m];
    v.assign(static_cast<std::size_t>(H) + 1, std::vector<double>(S, 0.0));
    q.assign(static_cast<std::size_t>(H) + 1, std::vector<std::array<double, 2>>(S, {0.0, 0.0}));
    for (int h = 1; h <= H; ++h) {
      const auto& prev = v[static_cast<std::size_t>(h - 1)];
      for (std::size_t s = 0; s < S; ++s) {
        if (states[s].terminal()) continue;
        double value = 0.0;
        for (int a = 0; a < 2; ++a) {
          double pa = probs[m][s][static_cast<std::size_t>(a)];
          double qa = 0.0;
          for (const auto& tr : states[s].transitions[static_cast<std::size_t>(a)])
            qa += tr.probability * (reward_weight * tr.reward + prev[static_cast<std::size_t>(tr.next)]);
          if (lambda > 0.0) qa += lambda * neg_log(pa);
          q[static_cast<std::size_t>(h)][s][static_cast<std::size_t>(a)] = qa;
          if (pa > 0.0) value += pa * qa;
        }
        v[static_cast<std::size_t>(h)][s] = value;
      }
    }
  }
  return t;
}

VisitationTable forward(const LatentMdp& lmdp, const ProbTable& probs) {
  const int H = lmdp.horizon;
  VisitationTable d(lmdp.components.size());
  for (std::size_t m = 0; m < lmdp.components.size(); ++m) {
    const auto& comp = lmdp.components[m];
    const std::size_t S = comp.states.size();
    d[m].assign(static_cast<std::size_t>(std::max(H, 1)), std::vector<double>(S, 0.0));
    if (H == 0) continue;
    for (const auto& [s, p] : comp.initial) d[m][0][static_cast<std::size_t>(s)] += p;
    for (int t = 0; t + 1 < H; ++t) {
      const auto& cur = d[m][static_cast<std::size_t>(t)];
      auto& nxt = d[m][static_cast<std::size_t>(t) + 1];
      for (std::size_t s = 0; s < S; ++s) {
        double mass = cur[s];
        if (mass == 0.0) continue;
        if (comp.states[s].terminal()) {
          nxt[s] += mass;
          continue;
        }
        for (int a = 0; a < 2; ++a) {
          double pa = probs[m][s][static_cast<std::size_t>(a)];
          if (pa == 0.0) continue;
          for (const auto& tr : comp.states[s].transitions[static_cast<std::size_t>(a)])
            nxt[static_cast<std::size_t>(tr.next)] += mass * pa * tr.probability;
        }
      }
    }
  }
  return d;
}

void check_indices(const LatentMdp& lmdp, int m, int h, int s) {
  if (m < 0 || static_cast<std::size_t>(m) >= lmdp.components.size())
    throw std::out_of_range("component index");
  if (h < 0 || h > lmdp.horizon) throw std::out_of_range("steps remaining");
  if (s < 0 || static_cast<std::size_t>(s) >= lmdp.components[static_cast<std::size_t>(m)].states.size())
    throw std::out_of_range("state index");
}

// Visits every (m, t, s, a) with positive mass under `dist`: fn(m, t, s, a, mass).
template <class Fn>
void for_each_pair(const LatentMdp& lmdp, const SamplingDistribution& dist, Fn&& fn) {
  if (dist.state_policy == nullptr) throw std::invalid_argument("sampling distribution without policy");
  auto probs = policy_table(lmdp, *dist.state_policy);
  auto d = forward(lmdp, probs);
  for (std::size_t m = 0; m < lmdp.components.size(); ++m) {
    const auto& states = lmdp.components[m].states;
    for (int t = 0; t < lmdp.horizon; ++t) {
      for (std::size_t s = 0; s < states.size(); ++s) {
        double mass = lmdp.weights[m] * d[m][static_cast<std::size_t>(t)][s];
        if (mass == 0.0 || states[s].terminal()) continue;
        for (Action a : kActions) {
          double pa = dist.uniform_actions ? 0.5 : probs[m][s][static_cast<std::size_t>(index_of(a))];
          if (pa == 0.0) continue;
          fn(m, t, s, a, mass * pa);
        }
      }
    }
  }
}

}  // namespace

double ValueTables::advantage(int m, int h, int s, Action a) const {
  if (h == 0) return 0.0;
  const auto mi = static_cast<std::size_t>(m);
  const auto hi = static_cast<std::size_t>(h);
  const auto si = static_cast<std::size_t>(s);
  return q[mi][hi][si][static_cast<std::size_t>(index_of(a))] - v[mi][hi][si];
}

ValueTables value_tables(const LatentMdp& lmdp, const Policy& policy, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be non-negative");
  return backward(lmdp, policy_table(lmdp, policy), 1.0, lambda);
}

std::vector<std::vector<std::vector<double>>> entropy_tables(const LatentMdp& lmdp,
                                                             const Policy& policy) {
  return backward(lmdp, policy_table(lmdp, policy), 0.0, 1.0).v;
}

double evaluate_value_exact(const LatentMdp& lmdp, const Policy& policy, double lambda) {
  auto tables = value_tables(lmdp, policy, lambda);
  double value = 0.0;
  for (std::size_t m = 0; m < lmdp.components.size(); ++m) {
    double vm = 0.0;
    for (const auto& [s, p] : lmdp.components[m].initial)
      vm += p * tables.v[m][static_cast<std::size_t>(lmdp.horizon)][static_cast<std::size_t>(s)];
    value += lmdp.weights[m] * vm;
  }
  return value;
}

double advantage_exact(const LatentMdp& lmdp, const Policy& policy, double lambda, int m, int h,
                       int s, Action a) {
  check_indices(lmdp, m, h, s);
  if (h == 0) return 0.0;
  if (lmdp.components[static_cast<std::size_t>(m)].states[static_cast<std::size_t>(s)].terminal())
    return 0.0;
  return value_tables(lmdp, policy, lambda).advantage(m, h, s, a);
}

VisitationTable visitation_table(const LatentMdp& lmdp, const Policy& policy) {
  return forward(lmdp, policy_table(lmdp, policy));
}

std::vector<std::vector<double>> visitation_distribution(const LatentMdp& lmdp,
                                                         const Policy& policy, int t) {
  if (t < 0 || t >= lmdp.horizon) throw std::out_of_range("visitation step");
  auto d = visitation_table(lmdp, policy);
  std::vector<std::vector<double>> out;
  out.reserve(d.size());
  for (auto& per : d) out.push_back(std::move(per[static_cast<std::size_t>(t)]));
  return out;
}

double state_action_mass(const SamplingDistribution& dist, double state_mass,
                         const Observation& obs, Action a) {
  if (obs.terminal) return 0.0;
  double pa = dist.uniform_actions ? 0.5 : dist.state_policy->probability(obs, a);
  return state_mass * pa;
}

Eigen::VectorXd policy_gradient_exact(const LatentMdp& lmdp, const LogLinearPolicy& policy,
                                      double lambda) {
  auto tables = value_tables(lmdp, policy, lambda);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(policy.dimension());
  SamplingDistribution on_policy{&policy, false};
  for_each_pair(lmdp, on_policy, [&](std::size_t m, int t, std::size_t s, Action a, double mass) {
    const auto& obs = lmdp.components[m].states[s].observation;
    double q = tables.q[m][static_cast<std::size_t>(lmdp.horizon - t)][s][static_cast<std::size_t>(index_of(a))];
    grad += (mass * q) * policy.grad_log_prob(obs, a);
  });
  return grad;
}

double performance_difference_rhs(const LatentMdp& lmdp, const Policy& pi1, const Policy& pi2,
                                  double lambda) {
  auto tables2 = value_tables(lmdp, pi2, lambda);
  double total = 0.0;
  SamplingDistribution d1{&pi1, false};
  for_each_pair(lmdp, d1, [&](std::size_t m, int t, std::size_t s, Action a, double mass) {
    const auto& obs = lmdp.components[m].states[s].observation;
    double adv = tables2.advantage(static_cast<int>(m), lmdp.horizon - t, static_cast<int>(s), a);
    double term = adv;
    if (lambda > 0.0)
      term += lambda * (std::log(pi2.probability(obs, a)) - std::log(pi1.probability(obs, a)));
    total += mass * term;
  });
  return total;
}

Eigen::MatrixXd fisher_exact(const LatentMdp& lmdp, const LogLinearPolicy& at,
                             const SamplingDistribution& dist) {
  const int d = at.dimension();
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(d, d);
  for_each_pair(lmdp, dist, [&](std::size_t m, int, std::size_t s, Action a, double mass) {
    Eigen::VectorXd g = at.grad_log_prob(lmdp.components[m].states[s].observation, a);
    f.selfadjointView<Eigen::Lower>().rankUpdate(g, mass);
  });
  Eigen::MatrixXd full = f.selfadjointView<Eigen::Lower>();
  return full;
}

double compatible_loss_exact(const LatentMdp& lmdp, const LogLinearPolicy& at, double lambda,
                             const SamplingDistribution& dist, const Eigen::VectorXd& g) {
  auto tables = value_tables(lmdp, at, lambda);
  double loss = 0.0;
  for_each_pair(lmdp, dist, [&](std::size_t m, int t, std::size_t s, Action a, double mass) {
    const auto& obs = lmdp.components[m].states[s].observation;
    double adv = tables.advantage(static_cast<int>(m), lmdp.horizon - t, static_cast<int>(s), a);
    double r = adv - g.dot(at.grad_log_prob(obs, a));
    loss += mass * r * r;
  });
  return loss;
}

Eigen::VectorXd compatible_fit_exact(const LatentMdp& lmdp, const LogLinearPolicy& at,
                                     double lambda, const SamplingDistribution& dist) {
  auto tables = value_tables(lmdp, at, lambda);
  const int d = at.dimension();
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
  for_each_pair(lmdp, dist, [&](std::size_t m, int t, std::size_t s, Action a, double mass) {
    const auto& obs = lmdp.components[m].states[s].observation;
    Eigen::VectorXd g = at.grad_log_prob(obs, a);
    double adv = tables.advantage(static_cast<int>(m), lmdp.horizon - t, static_cast<int>(s), a);
    f.noalias() += mass * g * g.transpose();
    b += (mass * adv) * g;
  });
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(f);
  cod.setThreshold(1e-12);
  return cod.solve(b);
}

WeightedStates state_occupancy(const LatentMdp& lmdp, const Policy& policy) {
  auto probs = policy_table(lmdp, policy);
  auto d = forward(lmdp, probs);
  WeightedStates out;
  std::unordered_map<Observation, std::size_t, ObservationHash> index;
  for (std::size_t m = 0; m < lmdp.components.size(); ++m) {
    const auto& states = lmdp.components[m].states;
    for (int t = 0; t < lmdp.horizon; ++t) {
      for (std::size_t s = 0; s < states.size(); ++s) {
        double mass = lmdp.weights[m] * d[m][static_cast<std::size_t>(t)][s];
        if (mass == 0.0 || states[s].terminal()) continue;
        auto [it, inserted] = index.emplace(states[s].observation, out.states.size());
        if (inserted) {
          out.states.push_back(states[s].observation);
          out.mass.push_back(0.0);
        }
        out.mass[it->second] += mass;
      }
    }
  }
  return out;
}

}  // namespace lmdp
