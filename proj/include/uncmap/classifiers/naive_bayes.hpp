#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "uncmap/error.hpp"
#include "uncmap/geometry.hpp"
#include "uncmap/probability.hpp"

namespace uncmap {

/// Gaussian naive Bayes over the two projected coordinates. Per-class
/// variances are floored at 1e-9 * (feature variance + 1e-12).
class GaussianNbModel {
public:
  struct ClassStats {
    double log_prior = 0.0;
    std::array<double, 2> mean{0.0, 0.0};
    std::array<double, 2> var{0.0, 0.0};
  };

  GaussianNbModel(std::span<const Point2> points, std::span<const int> labels, int n_classes) {
    const std::size_t n = points.size();
    auto coord = [](const Point2& p, int f) { return f == 0 ? p.x : p.y; };

    std::array<double, 2> floor{};
    for (int f = 0; f < 2; ++f) {
      double mean = 0.0;
      for (const auto& p : points) mean += coord(p, f);
      mean /= static_cast<double>(n);
      double ss = 0.0;
      for (const auto& p : points) ss += (coord(p, f) - mean) * (coord(p, f) - mean);
      floor[static_cast<std::size_t>(f)] = 1e-9 * (ss / static_cast<double>(n) + 1e-12);
    }

    stats_.resize(static_cast<std::size_t>(n_classes));
    std::vector<std::size_t> count(static_cast<std::size_t>(n_classes), 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& s = stats_[static_cast<std::size_t>(labels[i])];
      ++count[static_cast<std::size_t>(labels[i])];
      s.mean[0] += points[i].x;
      s.mean[1] += points[i].y;
    }
    for (int c = 0; c < n_classes; ++c) {
      const auto cnt = count[static_cast<std::size_t>(c)];
      if (cnt == 0) throw InvalidArgument("gaussian_nb: class index " + std::to_string(c) + " has no training rows");
      auto& s = stats_[static_cast<std::size_t>(c)];
      s.mean[0] /= static_cast<double>(cnt);
      s.mean[1] /= static_cast<double>(cnt);
      s.log_prior = std::log(static_cast<double>(cnt) / static_cast<double>(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
      auto& s = stats_[static_cast<std::size_t>(labels[i])];
      for (int f = 0; f < 2; ++f) {
        const double dev = coord(points[i], f) - s.mean[static_cast<std::size_t>(f)];
        s.var[static_cast<std::size_t>(f)] += dev * dev;
      }
    }
    for (int c = 0; c < n_classes; ++c) {
      auto& s = stats_[static_cast<std::size_t>(c)];
      for (std::size_t f = 0; f < 2; ++f)
        s.var[f] = std::max(s.var[f] / static_cast<double>(count[static_cast<std::size_t>(c)]), floor[f]);
    }
  }

  int n_classes() const noexcept { return static_cast<int>(stats_.size()); }
  std::span<const ClassStats> class_stats() const noexcept { return stats_; }

  ProbabilityVector predict_proba(const Point2& q) const {
    std::vector<double> logp(stats_.size());
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < stats_.size(); ++c) {
      const auto& s = stats_[c];
      double lp = s.log_prior;
      const double x[2] = {q.x, q.y};
      for (std::size_t f = 0; f < 2; ++f) {
        const double dev = x[f] - s.mean[f];
        lp += -0.5 * std::log(2.0 * std::numbers::pi * s.var[f]) - dev * dev / (2.0 * s.var[f]);
      }
      logp[c] = lp;
      best = std::max(best, lp);
    }
    double sum = 0.0;
    for (double& v : logp) sum += (v = std::exp(v - best));
    for (double& v : logp) v /= sum;
    return ProbabilityVector(std::move(logp));
  }

private:
  std::vector<ClassStats> stats_;
};

}  // namespace uncmap
