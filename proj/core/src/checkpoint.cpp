#include "lmdp/checkpoint.hpp"

#include <fstream>
#include <iomanip>
#include <stdexcept>
#include <vector>

namespace lmdp {

nlohmann::json checkpoint_to_json(const LogLinearPolicy& policy, const EnvConfig& env,
                                  std::uint64_t seed, int iteration) {
  std::vector<double> theta(policy.theta().data(), policy.theta().data() + policy.theta().size());
  return {{"env", env},
          {"feature", policy.features()->describe()},
          {"theta", theta},
          {"meta", {{"seed", seed}, {"iteration", iteration}}}};
}

Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  auto env = j.at("env").get<EnvConfig>();
  auto feature = j.at("feature");
  auto features = make_feature_map(feature);
  auto values = j.at("theta").get<std::vector<double>>();
  Eigen::VectorXd theta = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  const auto& meta = j.value("meta", nlohmann::json::object());
  return Checkpoint{env, feature, LogLinearPolicy(features, theta), meta.value("seed", std::uint64_t{0}),
                    meta.value("iteration", 0)};
}

void save_checkpoint(const std::string& path, const nlohmann::json& checkpoint) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  // nlohmann::json prints doubles with round-trip precision.
  out << checkpoint.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return checkpoint_from_json(nlohmann::json::parse(in));
}

}  // namespace lmdp
