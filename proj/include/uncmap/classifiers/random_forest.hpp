#pragma once

// Bootstrap-aggregated CART trees on the projected plane.
//
// Each tree draws its own bootstrap sample from the seed derive_seed(seed, i),
// so tree i is the same whether the forest has i+1 or 1000 trees. Splits
// minimize weighted Gini impurity over both coordinates, with thresholds at
// midpoints between consecutive distinct values. A sample goes left when
// value <= threshold.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "uncmap/classifiers/outputs.hpp"
#include "uncmap/error.hpp"
#include "uncmap/geometry.hpp"
#include "uncmap/probability.hpp"
#include "uncmap/rng.hpp"

namespace uncmap {

struct RandomForestParams {
  int n_trees = 100;
  int max_depth = 8;
  std::uint64_t seed = 0;
  double leaf_alpha = 1.0;
  int min_samples_split = 2;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> distribution;  // leaves only
};

class DecisionTree {
public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  std::size_t depth() const { return depth_from(0); }

  const std::vector<double>& leaf_distribution(const Point2& q) const {
    std::size_t at = 0;
    while (nodes_[at].feature >= 0) {
      const auto& n = nodes_[at];
      const double v = n.feature == 0 ? q.x : q.y;
      at = static_cast<std::size_t>(v <= n.threshold ? n.left : n.right);
    }
    return nodes_[at].distribution;
  }

private:
  std::size_t depth_from(std::size_t at) const {
    const auto& n = nodes_[at];
    if (n.feature < 0) return 0;
    return 1 + std::max(depth_from(static_cast<std::size_t>(n.left)), depth_from(static_cast<std::size_t>(n.right)));
  }

  std::vector<TreeNode> nodes_;
};

namespace detail {

class TreeBuilder {
public:
  TreeBuilder(std::span<const Point2> points, std::span<const int> labels, int n_classes,
              const RandomForestParams& params)
      : points_(points), labels_(labels), n_classes_(n_classes), params_(params) {}

  DecisionTree build(std::vector<std::size_t> sample) {
    nodes_.clear();
    grow(sample, 0);
    return DecisionTree(std::move(nodes_));
  }

private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double impurity = 0.0;
  };

  double coord(std::size_t i, int f) const { return f == 0 ? points_[i].x : points_[i].y; }

  static double gini(const std::vector<double>& counts, double n) {
    if (n <= 0.0) return 0.0;
    double s = 0.0;
    for (double c : counts) s += (c / n) * (c / n);
    return 1.0 - s;
  }

  Split best_split(std::vector<std::size_t>& sample) const {
    Split best;
    const double n = static_cast<double>(sample.size());
    std::vector<double> total(static_cast<std::size_t>(n_classes_), 0.0);
    for (auto i : sample) total[static_cast<std::size_t>(labels_[i])] += 1.0;

    for (int f = 0; f < 2; ++f) {
      std::sort(sample.begin(), sample.end(), [&](std::size_t a, std::size_t b) {
        const double va = coord(a, f), vb = coord(b, f);
        return va < vb || (va == vb && a < b);
      });
      std::vector<double> left(static_cast<std::size_t>(n_classes_), 0.0);
      std::vector<double> right = total;
      for (std::size_t s = 0; s + 1 < sample.size(); ++s) {
        const auto lbl = static_cast<std::size_t>(labels_[sample[s]]);
        left[lbl] += 1.0;
        right[lbl] -= 1.0;
        const double lo = coord(sample[s], f);
        const double hi = coord(sample[s + 1], f);
        if (!(lo < hi)) continue;
        const double nl = static_cast<double>(s + 1);
        const double nr = n - nl;
        const double imp = (nl * gini(left, nl) + nr * gini(right, nr)) / n;
        if (best.feature < 0 || imp < best.impurity) {
          double t = lo + (hi - lo) / 2.0;
          if (!(t < hi)) t = lo;
          best = {f, t, imp};
        }
      }
    }
    return best;
  }

  int grow(std::vector<std::size_t>& sample, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();

    std::vector<double> counts(static_cast<std::size_t>(n_classes_), 0.0);
    for (auto i : sample) counts[static_cast<std::size_t>(labels_[i])] += 1.0;
    const bool pure = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; }) <= 1;

    Split split;
    if (depth < params_.max_depth && static_cast<int>(sample.size()) >= params_.min_samples_split && !pure)
      split = best_split(sample);

    if (split.feature < 0) {
      const double denom = static_cast<double>(sample.size()) + params_.leaf_alpha * n_classes_;
      for (double& c : counts) c = (c + params_.leaf_alpha) / denom;
      nodes_[static_cast<std::size_t>(id)].distribution = std::move(counts);
      return id;
    }

    std::vector<std::size_t> left, right;
    for (auto i : sample) (coord(i, split.feature) <= split.threshold ? left : right).push_back(i);
    sample.clear();
    sample.shrink_to_fit();
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    auto& node = nodes_[static_cast<std::size_t>(id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  std::span<const Point2> points_;
  std::span<const int> labels_;
  int n_classes_;
  const RandomForestParams& params_;
  std::vector<TreeNode> nodes_;
};

}  // namespace detail

class RandomForestModel {
public:
  RandomForestModel(std::span<const Point2> points, std::span<const int> labels, int n_classes,
                    RandomForestParams params)
      : n_classes_(n_classes), params_(params) {
    if (params_.n_trees < 1) throw InvalidArgument("random_forest: n_trees must be >= 1");
    if (params_.max_depth < 1) throw InvalidArgument("random_forest: max_depth must be >= 1");
    if (!(params_.leaf_alpha >= 0.0)) throw InvalidArgument("random_forest: leaf_alpha must be >= 0");
    detail::TreeBuilder builder(points, labels, n_classes, params_);
    const std::size_t n = points.size();
    trees_.reserve(static_cast<std::size_t>(params_.n_trees));
    for (int t = 0; t < params_.n_trees; ++t) {
      SplitMix64 rng(derive_seed(params_.seed, static_cast<std::uint64_t>(t)));
      std::vector<std::size_t> sample(n);
      for (auto& s : sample) s = static_cast<std::size_t>(rng.index(n));
      trees_.push_back(builder.build(std::move(sample)));
    }
  }

  RandomForestModel(std::vector<DecisionTree> trees, int n_classes, RandomForestParams params)
      : n_classes_(n_classes), params_(params), trees_(std::move(trees)) {}

  int n_classes() const noexcept { return n_classes_; }
  const RandomForestParams& params() const noexcept { return params_; }
  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }

  EnsembleDistribution members(const Point2& q) const {
    EnsembleDistribution e;
    e.members.reserve(trees_.size());
    for (const auto& t : trees_) e.members.emplace_back(t.leaf_distribution(q));
    return e;
  }

  /// Mean of the tree distributions, summed in tree order.
  ProbabilityVector predict_proba(const Point2& q) const {
    std::vector<double> p(static_cast<std::size_t>(n_classes_), 0.0);
    for (const auto& t : trees_) {
      const auto& d = t.leaf_distribution(q);
      for (std::size_t k = 0; k < p.size(); ++k) p[k] += d[k];
    }
    for (double& v : p) v /= static_cast<double>(trees_.size());
    return ProbabilityVector(std::move(p));
  }

private:
  int n_classes_;
  RandomForestParams params_;
  std::vector<DecisionTree> trees_;
};

}  // namespace uncmap
