#pragma once

// One interface over the built-in classifiers. A FittedModel is immutable
// after fit and safe to query from many threads at once.

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "uncmap/classifiers/knn.hpp"
#include "uncmap/classifiers/naive_bayes.hpp"
#include "uncmap/classifiers/outputs.hpp"
#include "uncmap/classifiers/random_forest.hpp"
#include "uncmap/classifiers/spec.hpp"
#include "uncmap/classifiers/svm.hpp"
#include "uncmap/error.hpp"
#include "uncmap/evidential.hpp"
#include "uncmap/geometry.hpp"

namespace uncmap {

class FittedModel {
public:
  using Impl = std::variant<KnnModel, GaussianNbModel, RandomForestModel, SvmModel, EvidentialKnn>;

  FittedModel(ClassifierSpec spec, std::vector<std::string> class_names, std::size_t n_train, Impl impl)
      : spec_(std::move(spec)),
        class_names_(std::move(class_names)),
        n_train_(n_train),
        impl_(std::make_shared<const Impl>(std::move(impl))) {}

  const ClassifierSpec& spec() const noexcept { return spec_; }
  ClassifierKind kind() const noexcept { return spec_.kind; }
  const std::vector<Capability>& capabilities() const { return model_descriptor(spec_.kind).capabilities; }
  bool has(Capability c) const { return model_descriptor(spec_.kind).has(c); }
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }
  std::size_t n_classes() const noexcept { return class_names_.size(); }
  std::size_t n_train() const noexcept { return n_train_; }
  const Impl& impl() const noexcept { return *impl_; }

  template <class T>
  const T& as() const {
    if (const T* p = std::get_if<T>(impl_.get())) return *p;
    throw InternalError("model does not hold the requested implementation");
  }

private:
  ClassifierSpec spec_;
  std::vector<std::string> class_names_;
  std::size_t n_train_;
  std::shared_ptr<const Impl> impl_;
};

inline FittedModel fit(const ClassifierSpec& requested, std::span<const Point2> points, std::span<const int> labels,
                       std::vector<std::string> class_names) {
  const ClassifierSpec spec = requested.resolved();
  const int k = static_cast<int>(class_names.size());
  const std::size_t n = points.size();
  if (labels.size() != n) throw InvalidArgument("points and labels differ in length");
  if (k < 2) throw InvalidArgument("training data must have at least 2 classes");
  if (n < static_cast<std::size_t>(k))
    throw InvalidArgument("need at least as many training rows (" + std::to_string(n) + ") as classes (" +
                          std::to_string(k) + ")");
  std::vector<bool> present(static_cast<std::size_t>(k), false);
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0 || labels[i] >= k) throw InvalidArgument("class index out of range at row " + std::to_string(i));
    if (!is_finite(points[i])) throw InvalidArgument("non-finite training point at row " + std::to_string(i));
    present[static_cast<std::size_t>(labels[i])] = true;
  }
  if (std::count(present.begin(), present.end(), true) < 2)
    throw InvalidArgument("training data contains a single class; uncertainty over one class is meaningless");

  auto i = [&](const char* name) { return static_cast<int>(spec.get(name)); };
  auto r = [&](const char* name) { return spec.get(name); };
  auto seed = [&]() { return static_cast<std::uint64_t>(spec.get("seed")); };

  std::vector<Point2> pts(points.begin(), points.end());
  std::vector<int> lbl(labels.begin(), labels.end());

  auto make = [&]() -> FittedModel::Impl {
    switch (spec.kind) {
      case ClassifierKind::knn:
        return KnnModel(std::move(pts), std::move(lbl), k, KnnParams{i("k"), r("alpha"), r("radius_scale")});
      case ClassifierKind::gaussian_nb:
        return GaussianNbModel(pts, lbl, k);
      case ClassifierKind::random_forest:
        return RandomForestModel(pts, lbl, k, RandomForestParams{i("n_trees"), i("max_depth"), seed(), r("leaf_alpha")});
      case ClassifierKind::svm:
        return SvmModel(pts, lbl, k, SvmParams{r("C"), r("gamma"), i("epochs"), seed()});
      case ClassifierKind::evidential_knn:
        return EvidentialKnn(std::move(pts), std::move(lbl), k, EvidentialKnnParams{i("k"), r("alpha0"), r("gamma")});
    }
    throw InternalError("unhandled classifier kind");
  };
  return FittedModel(spec, std::move(class_names), n, make());
}

inline FittedModel fit(const ClassifierSpec& spec, std::span<const Point2> points, std::span<const int> labels,
                       int n_classes) {
  std::vector<std::string> names;
  for (int c = 0; c < n_classes; ++c) names.push_back(std::to_string(c));
  return fit(spec, points, labels, std::move(names));
}

namespace detail {

inline void require(const FittedModel& m, Capability c) {
  if (!m.has(c))
    throw CapabilityError(std::string("model '") + to_string(m.kind()) + "' lacks the '" + to_string(c) +
                          "' capability");
}

inline void check_query(const Point2& q) {
  if (!is_finite(q)) throw InvalidArgument("query point is not finite");
}

}  // namespace detail

inline ProbabilityVector predict_proba(const FittedModel& m, const Point2& q) {
  detail::check_query(q);
  return std::visit(
      [&](const auto& impl) -> ProbabilityVector {
        using T = std::decay_t<decltype(impl)>;
        if constexpr (std::is_same_v<T, EvidentialKnn>)
          return pignistic(impl.mass(q));
        else
          return impl.predict_proba(q);
      },
      m.impl());
}

inline LocalCounts local_counts(const FittedModel& m, const Point2& q) {
  detail::require(m, Capability::local_counts);
  detail::check_query(q);
  return m.as<KnnModel>().local_counts(q);
}

inline EnsembleDistribution ensemble_members(const FittedModel& m, const Point2& q) {
  detail::require(m, Capability::ensemble_members);
  detail::check_query(q);
  return m.as<RandomForestModel>().members(q);
}

inline MassFunction mass_function(const FittedModel& m, const Point2& q) {
  detail::require(m, Capability::mass_function);
  detail::check_query(q);
  return m.as<EvidentialKnn>().mass(q);
}

// Structured text form of a fitted model. Every kind carries "kind",
// "hyperparams" and "class_names"; the rest is kind-specific (see README).
inline nlohmann::json to_json(const FittedModel& m) {
  using nlohmann::json;
  json j;
  j["kind"] = to_string(m.kind());
  j["hyperparams"] = m.spec().hyperparams;
  j["class_names"] = m.class_names();
  auto points_json = [](std::span<const Point2> pts) {
    json a = json::array();
    for (const auto& p : pts) a.push_back({p.x, p.y});
    return a;
  };
  std::visit(
      [&](const auto& impl) {
        using T = std::decay_t<decltype(impl)>;
        if constexpr (std::is_same_v<T, KnnModel>) {
          j["points"] = points_json(impl.points());
          j["labels"] = std::vector<int>(impl.labels().begin(), impl.labels().end());
          j["support_radius"] = std::isfinite(impl.support_radius()) ? json(impl.support_radius()) : json(nullptr);
        } else if constexpr (std::is_same_v<T, GaussianNbModel>) {
          json classes = json::array();
          for (const auto& s : impl.class_stats())
            classes.push_back({{"log_prior", s.log_prior}, {"mean", s.mean}, {"var", s.var}});
          j["classes"] = classes;
        } else if constexpr (std::is_same_v<T, RandomForestModel>) {
          json trees = json::array();
          for (const auto& t : impl.trees()) {
            json nodes = json::array();
            for (const auto& n : t.nodes()) {
              if (n.feature < 0)
                nodes.push_back({{"leaf", n.distribution}});
              else
                nodes.push_back(
                    {{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right}});
            }
            trees.push_back({{"nodes", nodes}});
          }
          j["trees"] = trees;
        } else if constexpr (std::is_same_v<T, SvmModel>) {
          j["points"] = points_json(impl.support_points());
          j["labels"] = std::vector<int>(impl.support_labels().begin(), impl.support_labels().end());
          j["weights"] = std::vector<double>(impl.weights().begin(), impl.weights().end());
          json machines = json::array();
          for (const auto& mc : impl.machines()) machines.push_back({{"support", mc.support}, {"coef", mc.coef}});
          j["machines"] = machines;
        } else if constexpr (std::is_same_v<T, EvidentialKnn>) {
          j["points"] = points_json(impl.points());
          j["labels"] = std::vector<int>(impl.labels().begin(), impl.labels().end());
          j["class_gammas"] = std::vector<double>(impl.class_gammas().begin(), impl.class_gammas().end());
        }
      },
      m.impl());
  return j;
}

}  // namespace uncmap
