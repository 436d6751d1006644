#pragma once

// The 2D working space: a chosen feature pair or the top-2 principal
// components. Classifiers are fitted in this space and grids live in it.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "uncmap/dataset.hpp"
#include "uncmap/error.hpp"
#include "uncmap/geometry.hpp"

namespace uncmap {

enum class ProjectionMode { feature_pair, pca };

inline const char* to_string(ProjectionMode m) noexcept {
  return m == ProjectionMode::pca ? "pca" : "feature_pair";
}

struct ProjectionSpec {
  ProjectionMode mode = ProjectionMode::feature_pair;
  std::string feature_x;
  std::string feature_y;
  bool standardize = false;

  static ProjectionSpec pair(std::string x, std::string y, bool standardize = false) {
    return {ProjectionMode::feature_pair, std::move(x), std::move(y), standardize};
  }
  static ProjectionSpec pca(bool standardize = true) { return {ProjectionMode::pca, {}, {}, standardize}; }

  std::string canonical() const {
    std::string s = to_string(mode);
    if (mode == ProjectionMode::feature_pair) s += ":" + feature_x + "," + feature_y;
    return s + (standardize ? ":std" : ":raw");
  }

  friend bool operator==(const ProjectionSpec&, const ProjectionSpec&) = default;
};

struct ProjectionTransform {
  // Per input column actually used (2 columns in pair mode, d in pca mode).
  std::vector<double> means;
  std::vector<double> scales;  // 1.0 when not standardizing
  // PCA only: unit loading vectors over the d input columns.
  std::array<std::vector<double>, 2> loadings;
  std::array<double, 2> explained_variance{0.0, 0.0};
};

struct Projected2D {
  std::vector<Point2> points;
  std::array<std::string, 2> axis_labels;
  ProjectionTransform transform;
};

namespace detail {

inline void column_stats(const Eigen::VectorXd& col, double& mean, double& sd) {
  const double n = static_cast<double>(col.size());
  mean = col.sum() / n;
  const double ss = (col.array() - mean).square().sum();
  sd = col.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
}

// Each loading vector's largest-magnitude entry is made positive; ties go to
// the lowest index.
inline void normalize_sign(Eigen::VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(best))) best = i;
  if (v(best) < 0) v = -v;
}

}  // namespace detail

inline Projected2D project(const Dataset& ds, const ProjectionSpec& spec) {
  const Eigen::Index n = static_cast<Eigen::Index>(ds.n_rows());
  Projected2D out;

  // Selected columns, centered and optionally scaled.
  std::vector<std::size_t> cols;
  if (spec.mode == ProjectionMode::feature_pair) {
    if (spec.feature_x == spec.feature_y)
      throw InvalidArgument("feature pair must name two different features, got '" + spec.feature_x + "' twice");
    cols = {ds.feature_index(spec.feature_x), ds.feature_index(spec.feature_y)};
  } else {
    if (ds.n_features() < 2) throw InvalidArgument("pca needs at least 2 features");
    for (std::size_t j = 0; j < ds.n_features(); ++j) cols.push_back(j);
  }

  Eigen::MatrixXd Z(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const Eigen::VectorXd col = ds.X.col(static_cast<Eigen::Index>(cols[c]));
    double mean = 0.0, sd = 0.0;
    detail::column_stats(col, mean, sd);
    double scale = 1.0;
    if (spec.standardize) {
      if (!(sd > 0.0))
        throw InvalidArgument("feature '" + ds.feature_names[cols[c]] + "' has zero variance and cannot be standardized");
      scale = sd;
    }
    const bool center = spec.standardize || spec.mode == ProjectionMode::pca;
    out.transform.means.push_back(center ? mean : 0.0);
    out.transform.scales.push_back(scale);
    Z.col(static_cast<Eigen::Index>(c)) = (col.array() - (center ? mean : 0.0)) / scale;
  }

  if (spec.mode == ProjectionMode::feature_pair) {
    out.points.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) out.points[static_cast<std::size_t>(i)] = {Z(i, 0), Z(i, 1)};
    out.axis_labels = {spec.feature_x, spec.feature_y};
    return out;
  }

  const Eigen::MatrixXd cov = (Z.transpose() * Z) / std::max<double>(1.0, static_cast<double>(n - 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw InternalError("eigendecomposition of the covariance failed");
  // Eigen returns ascending eigenvalues.
  const Eigen::VectorXd evals = solver.eigenvalues();
  const Eigen::Index d = evals.size();
  double total = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) total += std::max(0.0, evals(i));

  Eigen::MatrixXd W(d, 2);
  for (int a = 0; a < 2; ++a) {
    Eigen::VectorXd v = solver.eigenvectors().col(d - 1 - a);
    detail::normalize_sign(v);
    W.col(a) = v;
    out.transform.loadings[static_cast<std::size_t>(a)].assign(v.data(), v.data() + d);
    const double lambda = std::max(0.0, evals(d - 1 - a));
    out.transform.explained_variance[static_cast<std::size_t>(a)] = total > 0.0 ? lambda / total : 0.0;
  }

  const Eigen::MatrixXd P = Z * W;
  out.points.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) out.points[static_cast<std::size_t>(i)] = {P(i, 0), P(i, 1)};
  out.axis_labels = {"PC1", "PC2"};
  return out;
}

/// Bounding rectangle widened by `margin_fraction` of the range on each side.
/// A zero-range axis is widened to unit width around its value.
inline Rect data_bounds(const std::vector<Point2>& pts, double margin_fraction) {
  if (pts.empty()) throw InvalidArgument("data_bounds needs at least one point");
  if (!(margin_fraction >= 0.0)) throw InvalidArgument("margin fraction must be >= 0");
  Rect r{pts[0].x, pts[0].x, pts[0].y, pts[0].y};
  for (const auto& p : pts) {
    r.xmin = std::min(r.xmin, p.x);
    r.xmax = std::max(r.xmax, p.x);
    r.ymin = std::min(r.ymin, p.y);
    r.ymax = std::max(r.ymax, p.y);
  }
  auto widen = [margin_fraction](double& lo, double& hi) {
    const double range = hi - lo;
    if (range == 0.0) {
      lo -= 0.5;
      hi += 0.5;
    } else {
      lo -= margin_fraction * range;
      hi += margin_fraction * range;
    }
  };
  widen(r.xmin, r.xmax);
  widen(r.ymin, r.ymax);
  return r;
}

inline Rect data_bounds(const Projected2D& p, double margin_fraction) {
  return data_bounds(p.points, margin_fraction);
}

}  // namespace uncmap
