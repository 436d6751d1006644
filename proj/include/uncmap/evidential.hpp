#pragma once

// Mass functions on the class frame {0..K-1}, Dempster's rule, the pignistic
// transform, and the evidential k-NN classifier (Denoeux 1995) that turns the
// k nearest training points into one combined mass function per query.
//
// Focal sets are bitsets over the frame, so K is capped at 30.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uncmap/error.hpp"
#include "uncmap/geometry.hpp"
#include "uncmap/probability.hpp"

namespace uncmap {

using FocalSet = std::uint32_t;

inline constexpr int kMaxFrameSize = 30;
inline constexpr double kMassPruneThreshold = 1e-12;
inline constexpr double kMassSumTolerance = 1e-9;

inline int cardinality(FocalSet a) noexcept { return std::popcount(a); }
inline FocalSet singleton(int k) noexcept { return FocalSet{1} << k; }

class MassFunction {
public:
  /// Masses below the prune threshold are dropped, then the rest is
  /// renormalized. The empty set may not carry mass.
  MassFunction(int frame_size, std::map<FocalSet, double> focal) : k_(frame_size), focal_(std::move(focal)) {
    check_frame(k_);
    double sum = 0.0;
    for (const auto& [set, m] : focal_) {
      if (set == 0 && m > 0.0) throw InvalidArgument("mass function assigns mass to the empty set");
      if ((set & ~frame()) != 0) throw InvalidArgument("focal set outside the frame");
      if (!std::isfinite(m) || m < 0.0) throw InvalidArgument("negative or non-finite mass");
      sum += m;
    }
    if (std::abs(sum - 1.0) > kMassSumTolerance)
      throw InvalidArgument("masses sum to " + std::to_string(sum) + ", expected 1");
    prune_and_normalize();
  }

  static MassFunction vacuous(int frame_size) {
    check_frame(frame_size);
    return MassFunction(frame_size, {{full_frame(frame_size), 1.0}});
  }

  static MassFunction bayesian(const ProbabilityVector& p) {
    std::map<FocalSet, double> focal;
    for (std::size_t k = 0; k < p.size(); ++k)
      if (p[k] > 0.0) focal[singleton(static_cast<int>(k))] = p[k];
    return MassFunction(static_cast<int>(p.size()), std::move(focal));
  }

  int frame_size() const noexcept { return k_; }
  FocalSet frame() const noexcept { return full_frame(k_); }
  const std::map<FocalSet, double>& focal() const noexcept { return focal_; }

  double mass(FocalSet a) const noexcept {
    auto it = focal_.find(a);
    return it == focal_.end() ? 0.0 : it->second;
  }

  bool is_vacuous() const noexcept { return focal_.size() == 1 && focal_.begin()->first == frame(); }
  bool is_bayesian() const noexcept {
    return std::all_of(focal_.begin(), focal_.end(), [](const auto& e) { return cardinality(e.first) == 1; });
  }

  static FocalSet full_frame(int k) noexcept { return k >= 32 ? ~FocalSet{0} : (FocalSet{1} << k) - 1; }

private:
  friend MassFunction dempster_combine(const MassFunction&, const MassFunction&);
  struct Unchecked {};
  MassFunction(Unchecked, int k, std::map<FocalSet, double> focal) : k_(k), focal_(std::move(focal)) {
    prune_and_normalize(false);
  }

  static void check_frame(int k) {
    if (k < 1 || k > kMaxFrameSize)
      throw InvalidArgument("frame size " + std::to_string(k) + " outside [1, " + std::to_string(kMaxFrameSize) + "]");
  }

  // Combination results are only rescaled when pruning dropped something, so
  // combining with the vacuous mass reproduces the other operand bit for bit.
  void prune_and_normalize(bool always = true) {
    const auto pruned =
        std::erase_if(focal_, [](const auto& e) { return e.first == 0 || e.second < kMassPruneThreshold; });
    if (!always && pruned == 0 && !focal_.empty()) return;
    double sum = 0.0;
    for (const auto& [set, m] : focal_) sum += m;
    if (focal_.empty() || !(sum > 0.0)) {
      focal_ = {{frame(), 1.0}};
      return;
    }
    for (auto& [set, m] : focal_) m /= sum;
  }

  int k_ = 1;
  std::map<FocalSet, double> focal_;
};

/// Dempster's rule: conjunctive combination with the conflict mass removed
/// and the remainder scaled by 1/(1 - conflict).
inline MassFunction dempster_combine(const MassFunction& a, const MassFunction& b) {
  if (a.frame_size() != b.frame_size())
    throw InvalidArgument("cannot combine mass functions over frames of size " + std::to_string(a.frame_size()) +
                          " and " + std::to_string(b.frame_size()));
  std::map<FocalSet, double> joint;
  double conflict = 0.0;
  for (const auto& [sa, ma] : a.focal()) {
    for (const auto& [sb, mb] : b.focal()) {
      const FocalSet c = sa & sb;
      if (c == 0)
        conflict += ma * mb;
      else
        joint[c] += ma * mb;
    }
  }
  if (conflict >= 1.0 - 1e-12) throw CombinationUndefined("total conflict: Dempster combination is undefined");
  if (conflict > 0.0) {
    const double scale = 1.0 / (1.0 - conflict);
    for (auto& [set, m] : joint) m *= scale;
  }
  return MassFunction(MassFunction::Unchecked{}, a.frame_size(), std::move(joint));
}

/// BetP(k) = sum over focal A containing k of m(A)/|A|.
inline ProbabilityVector pignistic(const MassFunction& m) {
  std::vector<double> p(static_cast<std::size_t>(m.frame_size()), 0.0);
  for (const auto& [set, mass] : m.focal()) {
    const double share = mass / cardinality(set);
    for (int k = 0; k < m.frame_size(); ++k)
      if (set & singleton(k)) p[static_cast<std::size_t>(k)] += share;
  }
  return ProbabilityVector(std::move(p));
}

struct EvidentialKnnParams {
  int k = 5;
  double alpha0 = 0.95;
  // 0 selects the per-class scale 1 / (mean squared within-class distance).
  double gamma = 0.0;
};

class EvidentialKnn {
public:
  EvidentialKnn(std::vector<Point2> points, std::vector<int> labels, int n_classes, EvidentialKnnParams params)
      : points_(std::move(points)), labels_(std::move(labels)), n_classes_(n_classes), params_(params) {
    if (params_.k < 1) throw InvalidArgument("evidential_knn: k must be >= 1");
    if (!(params_.alpha0 > 0.0 && params_.alpha0 < 1.0)) throw InvalidArgument("evidential_knn: alpha0 must lie in (0,1)");
    if (!(params_.gamma >= 0.0) || !std::isfinite(params_.gamma))
      throw InvalidArgument("evidential_knn: gamma must be > 0 (or 0 for per-class automatic scale)");
    if (static_cast<std::size_t>(params_.k) > points_.size())
      throw InvalidArgument("evidential_knn: k=" + std::to_string(params_.k) + " exceeds the " +
                            std::to_string(points_.size()) + " training points");
    if (n_classes_ > kMaxFrameSize)
      throw InvalidArgument("evidential_knn supports at most " + std::to_string(kMaxFrameSize) + " classes");
    gammas_.assign(static_cast<std::size_t>(n_classes_), params_.gamma);
    if (params_.gamma == 0.0) {
      for (int c = 0; c < n_classes_; ++c) {
        double sum = 0.0;
        std::size_t pairs = 0;
        for (std::size_t i = 0; i < points_.size(); ++i) {
          if (labels_[i] != c) continue;
          for (std::size_t j = i + 1; j < points_.size(); ++j) {
            if (labels_[j] != c) continue;
            sum += squared_distance(points_[i], points_[j]);
            ++pairs;
          }
        }
        const double mean = pairs > 0 ? sum / static_cast<double>(pairs) : 0.0;
        gammas_[static_cast<std::size_t>(c)] = 1.0 / (mean + 1e-12);
      }
    }
  }

  int n_classes() const noexcept { return n_classes_; }
  const EvidentialKnnParams& params() const noexcept { return params_; }
  std::span<const double> class_gammas() const noexcept { return gammas_; }
  std::span<const Point2> points() const noexcept { return points_; }
  std::span<const int> labels() const noexcept { return labels_; }

  /// Indices of the k nearest training points; distance ties go to the lower index.
  std::vector<std::size_t> neighbors(const Point2& q) const {
    std::vector<std::pair<double, std::size_t>> d(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) d[i] = {squared_distance(q, points_[i]), i};
    const auto k = static_cast<std::ptrdiff_t>(params_.k);
    std::partial_sort(d.begin(), d.begin() + k, d.end());
    std::vector<std::size_t> idx(static_cast<std::size_t>(k));
    for (std::ptrdiff_t i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = d[static_cast<std::size_t>(i)].second;
    return idx;
  }

  MassFunction mass(const Point2& q) const {
    MassFunction acc = MassFunction::vacuous(n_classes_);
    const FocalSet omega = acc.frame();
    for (std::size_t i : neighbors(q)) {
      const int c = labels_[i];
      const double support =
          params_.alpha0 * std::exp(-gammas_[static_cast<std::size_t>(c)] * squared_distance(q, points_[i]));
      if (support < kMassPruneThreshold) continue;
      std::map<FocalSet, double> focal{{singleton(c), support}};
      if (1.0 - support > 0.0) focal[omega] = 1.0 - support;
      acc = dempster_combine(acc, MassFunction(n_classes_, std::move(focal)));
    }
    return acc;
  }

private:
  std::vector<Point2> points_;
  std::vector<int> labels_;
  int n_classes_;
  EvidentialKnnParams params_;
  std::vector<double> gammas_;
};

}  // namespace uncmap
