#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "lmdp/lmdp.hpp"
#include "lmdp/policy.hpp"

namespace lmdp {

// Regularized value tables. h counts remaining steps: v[m][h][s], q[m][h][s][a], h = 0..H.
// Q_h(s,a) = r(s,a) + lambda ln(1/pi(a|s)) + E V_{h-1}(s'),  V_h(s) = sum_a pi(a|s) Q_h(s,a).
struct ValueTables {
  int horizon = 0;
  double lambda = 0.0;
  std::vector<std::vector<std::vector<double>>> v;
  std::vector<std::vector<std::vector<std::array<double, 2>>>> q;

  double advantage(int m, int h, int s, Action a) const;
};

ValueTables value_tables(const LatentMdp& lmdp, const Policy& policy, double lambda);

// Expected entropy-to-go H_h(s) = E[sum of H(pi(.|s_t))], same layout as ValueTables::v.
std::vector<std::vector<std::vector<double>>> entropy_tables(const LatentMdp& lmdp,
                                                             const Policy& policy);

// V^{pi,lambda} = sum_m w_m sum_{s0} nu_m(s0) V_{m,H}(s0).
double evaluate_value_exact(const LatentMdp& lmdp, const Policy& policy, double lambda);

double advantage_exact(const LatentMdp& lmdp, const Policy& policy, double lambda, int m, int h,
                       int s, Action a);

// d[m][t][s] for t = 0..H-1. Terminal states are absorbing and keep their mass.
using VisitationTable = std::vector<std::vector<std::vector<double>>>;
VisitationTable visitation_table(const LatentMdp& lmdp, const Policy& policy);

// d_{m,t}(s) for a single step t, per component.
std::vector<std::vector<double>> visitation_distribution(const LatentMdp& lmdp,
                                                         const Policy& policy, int t);

// Which action distribution pairs with the state visitation of `state_policy`.
struct SamplingDistribution {
  const Policy* state_policy = nullptr;
  // false: d(s) pi(a|s), the state-action visitation. true: grafted d(s) Unif(a).
  bool uniform_actions = false;
};

// Mass of (s, a) under the distribution at one step given d(s).
double state_action_mass(const SamplingDistribution& dist, double state_mass,
                         const Observation& obs, Action a);

// Gradient of V^{pi_theta,lambda}.
Eigen::VectorXd policy_gradient_exact(const LatentMdp& lmdp, const LogLinearPolicy& policy,
                                      double lambda);

// sum_m w_m sum_h E_{d^{pi1}}[A^{pi2,lambda} + lambda ln(pi2/pi1)].
double performance_difference_rhs(const LatentMdp& lmdp, const Policy& pi1, const Policy& pi2,
                                  double lambda);

// Sigma_v^theta = sum_m w_m sum_h E_{v}[score score^T].
Eigen::MatrixXd fisher_exact(const LatentMdp& lmdp, const LogLinearPolicy& at,
                             const SamplingDistribution& dist);

// L(g; theta, v).
double compatible_loss_exact(const LatentMdp& lmdp, const LogLinearPolicy& at, double lambda,
                             const SamplingDistribution& dist, const Eigen::VectorXd& g);

// Minimizer of L(g; theta, v) (pseudo-inverse solution of the normal equations).
Eigen::VectorXd compatible_fit_exact(const LatentMdp& lmdp, const LogLinearPolicy& at,
                                     double lambda, const SamplingDistribution& dist);

// State occupancy summed over components and steps, aggregated by observation.
struct WeightedStates {
  std::vector<Observation> states;
  std::vector<double> mass;
};
WeightedStates state_occupancy(const LatentMdp& lmdp, const Policy& policy);

}  // namespace lmdp
