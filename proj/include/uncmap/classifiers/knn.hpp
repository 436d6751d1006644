#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uncmap/classifiers/outputs.hpp"
#include "uncmap/error.hpp"
#include "uncmap/geometry.hpp"
#include "uncmap/probability.hpp"

namespace uncmap {

struct KnnParams {
  int k = 5;
  double alpha = 1.0;
  double radius_scale = 2.0;
};

/// k-nearest-neighbor classifier with Laplace-smoothed vote probabilities:
/// p_c = (count_c + alpha) / (k + alpha K).
///
/// Local counts additionally drop neighbors farther than a support radius,
/// derived at fit time from the training density. Without that cut every query
/// would see exactly k votes, and sparse regions would look as certain as
/// dense ones to count-based decompositions.
class KnnModel {
public:
  KnnModel(std::vector<Point2> points, std::vector<int> labels, int n_classes, KnnParams params)
      : points_(std::move(points)), labels_(std::move(labels)), n_classes_(n_classes), params_(params) {
    if (params_.k < 1) throw InvalidArgument("knn: k must be >= 1");
    if (static_cast<std::size_t>(params_.k) > points_.size())
      throw InvalidArgument("knn: k=" + std::to_string(params_.k) + " exceeds the " + std::to_string(points_.size()) +
                            " training points");
    if (!(params_.alpha >= 0.0)) throw InvalidArgument("knn: alpha must be >= 0");
    if (!(params_.radius_scale >= 0.0)) throw InvalidArgument("knn: radius_scale must be >= 0");
    support_radius_ = std::numeric_limits<double>::infinity();
    if (params_.radius_scale > 0.0 && points_.size() > 1) {
      const std::size_t kth = std::min<std::size_t>(static_cast<std::size_t>(params_.k), points_.size() - 1);
      double sum = 0.0;
      std::vector<double> d;
      d.reserve(points_.size());
      for (std::size_t i = 0; i < points_.size(); ++i) {
        d.clear();
        for (std::size_t j = 0; j < points_.size(); ++j)
          if (j != i) d.push_back(squared_distance(points_[i], points_[j]));
        std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(kth - 1), d.end());
        sum += std::sqrt(d[kth - 1]);
      }
      const double mean = sum / static_cast<double>(points_.size());
      if (mean > 0.0) support_radius_ = params_.radius_scale * mean;
    }
  }

  int n_classes() const noexcept { return n_classes_; }
  const KnnParams& params() const noexcept { return params_; }
  double support_radius() const noexcept { return support_radius_; }
  std::span<const Point2> points() const noexcept { return points_; }
  std::span<const int> labels() const noexcept { return labels_; }

  /// (squared distance, training index) of the k nearest points, nearest
  /// first. Equal distances are ordered by training index.
  std::vector<std::pair<double, std::size_t>> neighbors(const Point2& q) const {
    std::vector<std::pair<double, std::size_t>> d(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) d[i] = {squared_distance(q, points_[i]), i};
    const auto k = static_cast<std::ptrdiff_t>(params_.k);
    std::partial_sort(d.begin(), d.begin() + k, d.end());
    d.resize(static_cast<std::size_t>(k));
    return d;
  }

  ProbabilityVector predict_proba(const Point2& q) const {
    std::vector<double> counts(static_cast<std::size_t>(n_classes_), 0.0);
    for (const auto& [dist, i] : neighbors(q)) counts[static_cast<std::size_t>(labels_[i])] += 1.0;
    const double denom = params_.k + params_.alpha * n_classes_;
    for (double& c : counts) c = (c + params_.alpha) / denom;
    return ProbabilityVector(std::move(counts));
  }

  LocalCounts local_counts(const Point2& q) const {
    LocalCounts out{std::vector<int>(static_cast<std::size_t>(n_classes_), 0)};
    const double r2 = support_radius_ * support_radius_;
    for (const auto& [dist, i] : neighbors(q))
      if (dist <= r2) ++out.counts[static_cast<std::size_t>(labels_[i])];
    return out;
  }

private:
  std::vector<Point2> points_;
  std::vector<int> labels_;
  int n_classes_;
  KnnParams params_;
  double support_radius_;
};

}  // namespace uncmap
