#pragma once

// One-vs-rest RBF support vector machine trained by kernelized Pegasos
// (stochastic subgradient descent on the mean hinge loss).
//
// Training points are first collapsed into distinct (point, label) pairs with
// multiplicity weights. Samples are drawn in proportion to weight and the
// regularization is tied to the number of distinct points, so duplicating the
// whole training set leaves the fitted model bit-identical.
//
// The kernel carries a +1 term that acts as a (regularized) bias.
// Probabilities are a softmax over the per-class decision values.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "uncmap/error.hpp"
#include "uncmap/geometry.hpp"
#include "uncmap/probability.hpp"
#include "uncmap/rng.hpp"

namespace uncmap {

struct SvmParams {
  double C = 1.0;
  double gamma = 0.5;
  int epochs = 200;
  std::uint64_t seed = 0;
};

class SvmModel {
public:
  /// Support vectors and coefficients of one binary (class vs rest) machine.
  struct BinaryMachine {
    std::vector<std::size_t> support;  // indices into support_points()
    std::vector<double> coef;          // alpha_i * y_i / (lambda * T)
  };

  SvmModel(std::span<const Point2> points, std::span<const int> labels, int n_classes, SvmParams params)
      : n_classes_(n_classes), params_(params) {
    if (!(params_.C > 0.0)) throw InvalidArgument("svm: C must be > 0");
    if (!(params_.gamma > 0.0)) throw InvalidArgument("svm: gamma must be > 0");
    if (params_.epochs < 1) throw InvalidArgument("svm: epochs must be >= 1");

    std::map<std::tuple<double, double, int>, std::size_t> index;
    for (std::size_t i = 0; i < points.size(); ++i) {
      auto [it, inserted] = index.try_emplace({points[i].x, points[i].y, labels[i]}, points_.size());
      if (inserted) {
        points_.push_back(points[i]);
        labels_.push_back(labels[i]);
        weights_.push_back(0.0);
      }
      weights_[it->second] += 1.0;
    }

    const std::size_t u = points_.size();
    std::vector<double> cumulative(u);
    double total = 0.0;
    for (std::size_t i = 0; i < u; ++i) cumulative[i] = (total += weights_[i]);

    const double lambda = 1.0 / (params_.C * static_cast<double>(u));
    const std::uint64_t iterations = static_cast<std::uint64_t>(params_.epochs) * u;

    machines_.resize(static_cast<std::size_t>(n_classes_));
    std::vector<double> margin(u);
    std::vector<std::uint32_t> alpha(u);
    for (int c = 0; c < n_classes_; ++c) {
      std::fill(margin.begin(), margin.end(), 0.0);
      std::fill(alpha.begin(), alpha.end(), 0u);
      SplitMix64 rng(derive_seed(params_.seed, static_cast<std::uint64_t>(c)));
      for (std::uint64_t t = 1; t <= iterations; ++t) {
        const double draw = rng.uniform() * total;
        const auto i = static_cast<std::size_t>(
            std::min<std::ptrdiff_t>(std::upper_bound(cumulative.begin(), cumulative.end(), draw) - cumulative.begin(),
                                     static_cast<std::ptrdiff_t>(u - 1)));
        const double yi = labels_[i] == c ? 1.0 : -1.0;
        if (yi * margin[i] / (lambda * static_cast<double>(t)) < 1.0) {
          ++alpha[i];
          for (std::size_t j = 0; j < u; ++j) margin[j] += yi * kernel(points_[i], points_[j]);
        }
      }
      auto& m = machines_[static_cast<std::size_t>(c)];
      const double scale = 1.0 / (lambda * static_cast<double>(iterations));
      for (std::size_t i = 0; i < u; ++i) {
        if (alpha[i] == 0) continue;
        m.support.push_back(i);
        m.coef.push_back(static_cast<double>(alpha[i]) * (labels_[i] == c ? 1.0 : -1.0) * scale);
      }
    }
  }

  int n_classes() const noexcept { return n_classes_; }
  const SvmParams& params() const noexcept { return params_; }
  std::span<const Point2> support_points() const noexcept { return points_; }
  std::span<const int> support_labels() const noexcept { return labels_; }
  std::span<const double> weights() const noexcept { return weights_; }
  const std::vector<BinaryMachine>& machines() const noexcept { return machines_; }

  double kernel(const Point2& a, const Point2& b) const noexcept {
    return std::exp(-params_.gamma * squared_distance(a, b)) + 1.0;
  }

  std::vector<double> decision_values(const Point2& q) const {
    std::vector<double> f(machines_.size(), 0.0);
    for (std::size_t c = 0; c < machines_.size(); ++c) {
      const auto& m = machines_[c];
      for (std::size_t s = 0; s < m.support.size(); ++s) f[c] += m.coef[s] * kernel(points_[m.support[s]], q);
    }
    return f;
  }

  ProbabilityVector predict_proba(const Point2& q) const {
    std::vector<double> f = decision_values(q);
    const double best = *std::max_element(f.begin(), f.end());
    double sum = 0.0;
    for (double& v : f) sum += (v = std::exp(v - best));
    for (double& v : f) v /= sum;
    return ProbabilityVector(std::move(f));
  }

private:
  int n_classes_;
  SvmParams params_;
  std::vector<Point2> points_;
  std::vector<int> labels_;
  std::vector<double> weights_;
  std::vector<BinaryMachine> machines_;
};

}  // namespace uncmap
