#include "lmdp/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lmdp {

Eigen::VectorXd FeatureMap::operator()(const Observation& obs) const {
  Eigen::VectorXd phi(dimension());
  map(obs, {phi.data(), static_cast<std::size_t>(phi.size())});
  return phi;
}

SpPolyFeatures::SpPolyFeatures(int d0) : d0_(d0) {
  if (d0 < 1) throw ConfigError("sp_poly: d0 must be >= 1");
}

void SpPolyFeatures::map(const Observation& obs, std::span<double> out) const {
  const double f = obs[0];
  const double x = obs[1];
  double power = 1.0;
  for (int k = 0; k < d0_; ++k) {
    out[static_cast<std::size_t>(k)] = power;
    out[static_cast<std::size_t>(d0_ + k)] = power * x;
    power *= f;
  }
}

double SpPolyFeatures::norm_bound() const { return std::sqrt(static_cast<double>(dimension())); }

nlohmann::json SpPolyFeatures::describe() const { return {{"kind", "sp_poly"}, {"d0", d0_}}; }

OkdPolyFeatures::OkdPolyFeatures(int d0) : d0_(d0) {
  if (d0 < 1) throw ConfigError("okd_poly: d0 must be >= 1");
  dim_ = 1;
  for (int k = 0; k < 5; ++k) dim_ *= d0;
}

void OkdPolyFeatures::map(const Observation& obs, std::span<double> out) const {
  // powers[c][e] = obs[c]^e
  double powers[5][16];
  if (d0_ > 16) throw ConfigError("okd_poly: d0 > 16 unsupported");
  for (int c = 0; c < 5; ++c) {
    powers[c][0] = 1.0;
    for (int e = 1; e < d0_; ++e) powers[c][e] = powers[c][e - 1] * obs[c];
  }
  std::size_t idx = 0;
  for (int a = 0; a < d0_; ++a)
    for (int b = 0; b < d0_; ++b) {
      const double ab = powers[0][a] * powers[1][b];
      for (int c = 0; c < d0_; ++c) {
        const double abc = ab * powers[2][c];
        for (int d = 0; d < d0_; ++d) {
          const double abcd = abc * powers[3][d];
          for (int e = 0; e < d0_; ++e) out[idx++] = abcd * powers[4][e];
        }
      }
    }
}

double OkdPolyFeatures::norm_bound() const { return std::sqrt(static_cast<double>(dim_)); }

nlohmann::json OkdPolyFeatures::describe() const { return {{"kind", "okd_poly"}, {"d0", d0_}}; }

SpOneHotFeatures::SpOneHotFeatures(int n) : n_(n) {
  if (n < 1) throw ConfigError("sp_one_hot: n must be >= 1");
}

int SpOneHotFeatures::state_index(const Observation& obs) const {
  const int i = static_cast<int>(std::lround(obs[0] * n_));
  if (i < 1 || i > n_) throw std::out_of_range("sp_one_hot: observation outside 1..n");
  return 2 * (i - 1) + (obs[1] > 0.5 ? 1 : 0);
}

void SpOneHotFeatures::map(const Observation& obs, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  if (obs.terminal) return;
  out[static_cast<std::size_t>(state_index(obs))] = 1.0;
}

nlohmann::json SpOneHotFeatures::describe() const { return {{"kind", "sp_one_hot"}, {"n", n_}}; }

std::shared_ptr<const FeatureMap> make_feature_map(const nlohmann::json& spec) {
  const auto kind = spec.at("kind").get<std::string>();
  if (kind == "sp_poly") return std::make_shared<SpPolyFeatures>(spec.value("d0", 4));
  if (kind == "okd_poly") return std::make_shared<OkdPolyFeatures>(spec.value("d0", 3));
  if (kind == "sp_one_hot") return std::make_shared<SpOneHotFeatures>(spec.at("n").get<int>());
  throw ConfigError("unknown feature kind \"" + kind + "\"");
}

}  // namespace lmdp
