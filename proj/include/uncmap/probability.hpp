#pragma once

#include <cmath>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "uncmap/error.hpp"

namespace uncmap {

inline constexpr double kProbabilitySumTolerance = 1e-9;

/// Length-K class distribution. Construction checks nonnegativity and that the
/// entries sum to 1 within 1e-9.
class ProbabilityVector {
public:
  ProbabilityVector() = default;
  explicit ProbabilityVector(std::vector<double> p) : p_(std::move(p)) { validate(); }
  ProbabilityVector(std::initializer_list<double> p) : p_(p) { validate(); }

  static ProbabilityVector uniform(std::size_t k) {
    return ProbabilityVector(std::vector<double>(k, 1.0 / static_cast<double>(k)));
  }

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t i) const noexcept { return p_[i]; }
  std::span<const double> values() const noexcept { return p_; }
  auto begin() const noexcept { return p_.begin(); }
  auto end() const noexcept { return p_.end(); }

  friend bool operator==(const ProbabilityVector&, const ProbabilityVector&) = default;

private:
  void validate() const {
    if (p_.empty()) throw InvalidArgument("probability vector is empty");
    double sum = 0.0;
    for (double v : p_) {
      if (!std::isfinite(v) || v < 0.0)
        throw InvalidArgument("probability vector has an invalid entry " + std::to_string(v));
      sum += v;
    }
    if (std::abs(sum - 1.0) > kProbabilitySumTolerance)
      throw InvalidArgument("probability vector sums to " + std::to_string(sum));
  }

  std::vector<double> p_;
};

}  // namespace uncmap
