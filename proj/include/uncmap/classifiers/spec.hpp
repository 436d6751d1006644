#pragma once

// Classifier identities, capabilities, and hyperparameter schemas.
//
// A ClassifierSpec is a kind plus a sparse key->value map. `resolved()` fills
// in defaults and validates every value against the kind's schema, so every
// downstream consumer sees a complete, checked parameter set.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uncmap/dataset.hpp"
#include "uncmap/error.hpp"

namespace uncmap {

enum class ClassifierKind { knn, gaussian_nb, random_forest, svm, evidential_knn };

enum class Capability { probability, ensemble_members, local_counts, mass_function };

inline const char* to_string(Capability c) noexcept {
  switch (c) {
    case Capability::probability: return "probability";
    case Capability::ensemble_members: return "ensemble_members";
    case Capability::local_counts: return "local_counts";
    case Capability::mass_function: return "mass_function";
  }
  return "?";
}

inline const char* to_string(ClassifierKind k) noexcept {
  switch (k) {
    case ClassifierKind::knn: return "knn";
    case ClassifierKind::gaussian_nb: return "gaussian_nb";
    case ClassifierKind::random_forest: return "random_forest";
    case ClassifierKind::svm: return "svm";
    case ClassifierKind::evidential_knn: return "evidential_knn";
  }
  return "?";
}

struct HyperparamSchema {
  std::string name;
  bool integer = false;
  double default_value = 0.0;
  double min = 0.0;
  double max = 0.0;
  bool min_inclusive = true;
  bool max_inclusive = true;
  std::string description;

  bool accepts(double v) const noexcept {
    if (!std::isfinite(v)) return false;
    if (integer && v != std::floor(v)) return false;
    if (min_inclusive ? v < min : v <= min) return false;
    if (max_inclusive ? v > max : v >= max) return false;
    return true;
  }

  std::string range_text() const {
    auto num = [](double v) { return detail::format_real(v); };
    return std::string(min_inclusive ? "[" : "(") + num(min) + ", " + num(max) + (max_inclusive ? "]" : ")");
  }
};

struct ModelDescriptor {
  ClassifierKind kind;
  std::string id;
  std::string display_name;
  std::vector<Capability> capabilities;
  std::vector<HyperparamSchema> hyperparams;
  std::string reference;

  bool has(Capability c) const noexcept {
    return std::find(capabilities.begin(), capabilities.end(), c) != capabilities.end();
  }
};

inline constexpr double kMaxSeed = 9007199254740992.0;  // 2^53, exact in a double

inline const std::vector<ModelDescriptor>& model_registry() {
  static const std::vector<ModelDescriptor> registry = {
      {ClassifierKind::knn,
       "knn",
       "K-Nearest Neighbors",
       {Capability::probability, Capability::local_counts},
       {{"k", true, 5, 1, 1000, true, true, "number of neighbors"},
        {"alpha", false, 1, 0, 100, true, true, "Laplace smoothing added to every class count"},
        {"radius_scale", false, 2, 0, 1e6, true, true,
         "local counts only include neighbors within radius_scale times the mean k-th neighbor distance of the "
         "training set; 0 counts all k neighbors"}},
       "T. Cover, P. Hart (1967). Nearest neighbor pattern classification. IEEE Transactions on Information "
       "Theory 13(1):21-27."},
      {ClassifierKind::gaussian_nb,
       "gaussian_nb",
       "Gaussian Naive Bayes",
       {Capability::probability},
       {},
       "T. Hastie, R. Tibshirani, J. Friedman (2009). The Elements of Statistical Learning, 2nd ed., section 6.6.3. "
       "Springer."},
      {ClassifierKind::random_forest,
       "random_forest",
       "Random Forest",
       {Capability::probability, Capability::ensemble_members},
       {{"n_trees", true, 100, 1, 1000, true, true, "number of trees"},
        {"max_depth", true, 8, 1, 64, true, true, "maximum tree depth"},
        {"seed", true, 0, 0, kMaxSeed, true, true, "seed of the per-tree seed sequence"},
        {"leaf_alpha", false, 1, 0, 100, true, true, "smoothing added to leaf class counts"}},
       "L. Breiman (2001). Random Forests. Machine Learning 45(1):5-32."},
      {ClassifierKind::svm,
       "svm",
       "Support Vector Machine (RBF, one-vs-rest)",
       {Capability::probability},
       {{"C", false, 1, 0, 1e6, false, true, "regularization strength"},
        {"gamma", false, 0.5, 0, 1e6, false, true, "RBF kernel width"},
        {"epochs", true, 200, 1, 10000, true, true, "passes of stochastic subgradient descent"},
        {"seed", true, 0, 0, kMaxSeed, true, true, "sampling seed"}},
       "C. Cortes, V. Vapnik (1995). Support-vector networks. Machine Learning 20(3):273-297. Trained with "
       "S. Shalev-Shwartz et al. (2011), Pegasos. Probabilities are a softmax over decision values (not Platt "
       "scaling)."},
      {ClassifierKind::evidential_knn,
       "evidential_knn",
       "Evidential K-Nearest Neighbors",
       {Capability::probability, Capability::mass_function},
       {{"k", true, 5, 1, 1000, true, true, "number of neighbors"},
        {"alpha0", false, 0.95, 0, 1, false, false, "maximum support a single neighbor can give"},
        {"gamma", false, 0, 0, 1e6, true, true, "distance scale; 0 selects a per-class automatic scale"}},
       "T. Denoeux (1995). A k-nearest neighbor classification rule based on Dempster-Shafer theory. IEEE "
       "Transactions on Systems, Man, and Cybernetics 25(5):804-813."},
  };
  return registry;
}

inline const ModelDescriptor& model_descriptor(ClassifierKind kind) {
  for (const auto& d : model_registry())
    if (d.kind == kind) return d;
  throw InternalError("no descriptor for classifier kind");
}

inline ClassifierKind parse_classifier_kind(std::string_view id) {
  for (const auto& d : model_registry())
    if (d.id == id) return d.kind;
  throw NotFoundError("unknown model '" + std::string(id) + "'");
}

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::knn;
  std::map<std::string, double> hyperparams;

  /// Defaults filled in; unknown keys and out-of-range values rejected.
  ClassifierSpec resolved() const {
    const auto& desc = model_descriptor(kind);
    for (const auto& [key, value] : hyperparams) {
      const bool known = std::any_of(desc.hyperparams.begin(), desc.hyperparams.end(),
                                     [&](const HyperparamSchema& h) { return h.name == key; });
      if (!known) throw InvalidArgument(desc.id + ": unknown hyperparameter '" + key + "'");
    }
    ClassifierSpec out{kind, {}};
    for (const auto& h : desc.hyperparams) {
      auto it = hyperparams.find(h.name);
      const double v = it == hyperparams.end() ? h.default_value : it->second;
      if (!h.accepts(v))
        throw InvalidArgument(desc.id + ": " + h.name + "=" + detail::format_real(v) + " outside " + h.range_text() +
                              (h.integer ? " (integer)" : ""));
      out.hyperparams[h.name] = v;
    }
    return out;
  }

  double get(const std::string& name) const {
    auto it = hyperparams.find(name);
    if (it != hyperparams.end()) return it->second;
    for (const auto& h : model_descriptor(kind).hyperparams)
      if (h.name == name) return h.default_value;
    throw InvalidArgument(std::string(to_string(kind)) + ": unknown hyperparameter '" + name + "'");
  }

  /// `kind:key=val,...` over the resolved parameters, keys sorted.
  std::string canonical() const {
    const ClassifierSpec r = resolved();
    std::string s = to_string(kind);
    char sep = ':';
    for (const auto& [k, v] : r.hyperparams) {
      s += sep + k + "=" + detail::format_real(v);
      sep = ',';
    }
    return s;
  }

  /// Parses the command-line form `kind` or `kind:key=val,key=val`.
  static ClassifierSpec parse(std::string_view text) {
    const std::size_t colon = text.find(':');
    ClassifierSpec spec{parse_classifier_kind(text.substr(0, colon)), {}};
    if (colon == std::string_view::npos) return spec;
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      const std::size_t comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      const std::size_t eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0)
        throw InvalidArgument("malformed hyperparameter '" + std::string(item) + "', expected key=value");
      auto v = detail::parse_real(item.substr(eq + 1));
      if (!v) throw InvalidArgument("hyperparameter '" + std::string(item.substr(0, eq)) + "' is not a number");
      spec.hyperparams[std::string(item.substr(0, eq))] = *v;
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return spec;
  }

  friend bool operator==(const ClassifierSpec&, const ClassifierSpec&) = default;
};

}  // namespace uncmap
