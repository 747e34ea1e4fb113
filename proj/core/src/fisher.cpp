#include "lmdp/fisher.hpp"

#include <stdexcept>

namespace lmdp {

FisherAndGradientEstimate estimate_fisher_and_gradient(std::span<const AdvantageSample> samples,
                                                       const LogLinearPolicy& pi_t) {
  if (samples.empty()) throw std::invalid_argument("estimate_fisher_and_gradient: no samples");
  const Eigen::Index d = pi_t.dimension();
  FisherAndGradientEstimate est;
  est.f_hat = Eigen::MatrixXd::Zero(d, d);
  est.nabla_hat = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd phi(d);
  for (const auto& s : samples) {
    if (!s.valid) continue;
    const double p = pi_t.features_and_probability(s.state, {phi.data(), static_cast<std::size_t>(d)});
    const double coef = s.action == Action::kAccept ? 1.0 - p : -p;
    phi *= coef;
    est.f_hat.selfadjointView<Eigen::Lower>().rankUpdate(phi);
    est.nabla_hat += s.a_hat * phi;
    ++est.samples;
  }
  Eigen::MatrixXd full = est.f_hat.selfadjointView<Eigen::Lower>();
  est.f_hat = std::move(full);
  return est;
}

}  // namespace lmdp
