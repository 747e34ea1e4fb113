#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "lmdp/types.hpp"

namespace lmdp {

// Two-action difference features: phi(s) = phi(s, accept) - phi(s, reject).
class FeatureMap {
 public:
  virtual ~FeatureMap() = default;
  virtual int dimension() const = 0;
  virtual void map(const Observation& obs, std::span<double> out) const = 0;
  // Analytic bound on ||phi(s)||_2 over every valid observation.
  virtual double norm_bound() const = 0;
  virtual nlohmann::json describe() const = 0;

  Eigen::VectorXd operator()(const Observation& obs) const;
};

// (1, f, ..., f^{d0-1}, x, f x, ..., f^{d0-1} x)
class SpPolyFeatures final : public FeatureMap {
 public:
  explicit SpPolyFeatures(int d0 = 4);
  int dimension() const override { return 2 * d0_; }
  void map(const Observation& obs, std::span<double> out) const override;
  double norm_bound() const override;
  nlohmann::json describe() const override;
  int degree() const { return d0_; }

 private:
  int d0_;
};

// All monomials f^a s^b v^c r^d q^e with exponents < d0; index = ((((a d0 + b) d0 + c) d0 + d) d0 + e).
class OkdPolyFeatures final : public FeatureMap {
 public:
  explicit OkdPolyFeatures(int d0 = 3);
  int dimension() const override { return dim_; }
  void map(const Observation& obs, std::span<double> out) const override;
  double norm_bound() const override;
  nlohmann::json describe() const override;
  int degree() const { return d0_; }

 private:
  int d0_;
  int dim_;
};

// One coordinate per SP state (i, x): index 2 (i - 1) + x.
class SpOneHotFeatures final : public FeatureMap {
 public:
  explicit SpOneHotFeatures(int n);
  int dimension() const override { return 2 * n_; }
  void map(const Observation& obs, std::span<double> out) const override;
  double norm_bound() const override { return 1.0; }
  nlohmann::json describe() const override;
  int state_index(const Observation& obs) const;

 private:
  int n_;
};

// Builds a feature map from {"kind": "sp_poly"|"okd_poly"|"sp_one_hot", "d0": int, "n": int}.
std::shared_ptr<const FeatureMap> make_feature_map(const nlohmann::json& spec);

}  // namespace lmdp
