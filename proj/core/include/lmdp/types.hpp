#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>

namespace lmdp {

enum class Action : std::uint8_t { kReject = 0, kAccept = 1 };
inline constexpr int kActionCount = 2;
inline constexpr std::array<Action, 2> kActions = {Action::kReject, Action::kAccept};

inline constexpr int index_of(Action a) { return static_cast<int>(a); }

// Raw observation tuple fed to feature maps. Terminal observations are all zeros.
struct Observation {
  static constexpr int kMaxSize = 5;

  std::array<double, kMaxSize> values{};
  std::uint8_t size = 0;
  bool terminal = false;

  double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
  std::span<const double> view() const { return {values.data(), size}; }

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct ObservationHash {
  std::size_t operator()(const Observation& o) const noexcept;
};

class InstanceTooLarge : public std::runtime_error {
 public:
  explicit InstanceTooLarge(const std::string& detail)
      : std::runtime_error("instance too large for exact evaluation: " + detail) {}
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Estimate with a normal-approximation 95% half width.
struct McEstimate {
  double mean = 0.0;
  double ci95_halfwidth = 0.0;
  double std_error = 0.0;
  std::uint64_t count = 0;
};

// Welford accumulator.
class RunningStats {
 public:
  void push(double x) {
    ++n_;
    double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }
  void merge(const RunningStats& other);
  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  McEstimate estimate() const;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace lmdp
