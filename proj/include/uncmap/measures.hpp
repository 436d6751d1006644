#pragma once

// Uncertainty measures and their registry.
//
// Probability-based measures consume a ProbabilityVector; the decompositions
// consume neighbor counts or ensemble members; the evidential measures consume
// a mass function. All outputs are raw values (bits where a logarithm is
// involved); display scaling happens in the grid evaluator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "uncmap/classifiers/classifier.hpp"
#include "uncmap/classifiers/outputs.hpp"
#include "uncmap/error.hpp"
#include "uncmap/evidential.hpp"
#include "uncmap/probability.hpp"

namespace uncmap {

// ---------------------------------------------------------------------------
// Probability-based measures

inline double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return std::max(0.0, h);
}
inline double entropy(const ProbabilityVector& p) { return entropy(p.values()); }

inline double gini(const ProbabilityVector& p) {
  double s = 0.0;
  for (double v : p) s += v * v;
  return 1.0 - s;
}

inline double least_confident(const ProbabilityVector& p) { return 1.0 - *std::max_element(p.begin(), p.end()); }

/// 1 - (p_(1) - p_(2)) over the two largest entries.
inline double margin(const ProbabilityVector& p) {
  if (p.size() < 2) throw InvalidArgument("margin needs at least 2 classes");
  double first = -1.0, second = -1.0;
  for (double v : p) {
    if (v > first) {
      second = first;
      first = v;
    } else if (v > second) {
      second = v;
    }
  }
  return 1.0 - (first - second);
}

// ---------------------------------------------------------------------------
// Relative-likelihood decomposition (Senge et al. 2014)

struct SupportPair {
  double pi_plus = 0.0;
  double pi_minus = 0.0;
};

struct RlDecomposition {
  double epistemic = 0.0;
  double aleatoric = 0.0;
  SupportPair support;
};

namespace detail {

/// theta^s (1-theta)^f normalized by its maximum at theta = s/(s+f).
inline double relative_likelihood(double theta, double s, double f) {
  if (s + f == 0.0) return 1.0;
  auto log_lik = [&](double t) {
    double v = 0.0;
    if (s > 0.0) v += s * std::log(t);
    if (f > 0.0) v += f * std::log1p(-t);
    return v;
  };
  const double hat = s / (s + f);
  return std::exp(log_lik(theta) - log_lik(hat));
}

inline constexpr int kSupGridIntervals = 1024;
inline constexpr int kSupBisections = 40;

/// sup over theta in [0,1] of min(lik(theta), line(theta)), where lik is
/// unimodal and line is monotone. A uniform grid locates the peak; bisection on
/// lik - line then pins the crossing next to it.
template <class Lik, class Line>
double sup_of_min(const Lik& lik, const Line& line) {
  auto h = [&](double t) { return std::min(lik(t), line(t)); };
  auto diff = [&](double t) { return lik(t) - line(t); };
  constexpr double step = 1.0 / kSupGridIntervals;

  int best_i = 0;
  double best = h(0.0);
  for (int i = 1; i <= kSupGridIntervals; ++i) {
    const double v = h(i * step);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  for (int side : {-1, 1}) {
    const int j = best_i + side;
    if (j < 0 || j > kSupGridIntervals) continue;
    double a = std::min(best_i, j) * step;
    double b = std::max(best_i, j) * step;
    double da = diff(a);
    const double db = diff(b);
    if ((da > 0.0) == (db > 0.0)) continue;
    for (int it = 0; it < kSupBisections; ++it) {
      const double m = 0.5 * (a + b);
      const double dm = diff(m);
      if ((dm > 0.0) == (da > 0.0)) {
        a = m;
        da = dm;
      } else {
        b = m;
      }
    }
    best = std::max(best, h(0.5 * (a + b)));
  }
  return best;
}

inline RlDecomposition compute_rl_decomposition(int successes, int failures) {
  const double s = successes, f = failures;
  auto lik = [s, f](double t) { return detail::relative_likelihood(t, s, f); };
  RlDecomposition out;
  out.support.pi_plus = detail::sup_of_min(lik, [](double t) { return 2.0 * t - 1.0; });
  out.support.pi_minus = detail::sup_of_min(lik, [](double t) { return 1.0 - 2.0 * t; });
  out.epistemic = std::min(out.support.pi_plus, out.support.pi_minus);
  out.aleatoric = 1.0 - std::max(out.support.pi_plus, out.support.pi_minus);
  return out;
}

}  // namespace detail

/// Binary relative-likelihood decomposition on (successes, failures).
/// Results depend only on the two counts and are memoized per thread.
inline RlDecomposition rl_decomposition(int successes, int failures) {
  if (successes < 0 || failures < 0) throw InvalidArgument("counts must be nonnegative");
  thread_local std::unordered_map<std::uint64_t, RlDecomposition> memo;
  const std::uint64_t key = (static_cast<std::uint64_t>(successes) << 32) | static_cast<std::uint32_t>(failures);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  const RlDecomposition r = detail::compute_rl_decomposition(successes, failures);
  if (memo.size() < 1'000'000) memo.emplace(key, r);
  return r;
}

/// Multi-class counts are reduced to the locally dominant class (lowest index
/// on ties) against the rest.
inline RlDecomposition rl_decomposition(const LocalCounts& counts) {
  if (counts.counts.size() < 2) throw InvalidArgument("rl_decomposition needs at least 2 classes");
  const auto top = std::max_element(counts.counts.begin(), counts.counts.end());
  const int s = *top;
  return rl_decomposition(s, counts.total() - s);
}

// ---------------------------------------------------------------------------
// Ensemble (information-theoretic) decomposition

struct EnsembleDecomposition {
  double total = 0.0;
  double aleatoric = 0.0;
  double epistemic = 0.0;      // clamped at 0
  double epistemic_raw = 0.0;  // total - aleatoric before clamping
};

inline EnsembleDecomposition ensemble_decomposition(const EnsembleDistribution& e) {
  EnsembleDecomposition out;
  const std::vector<double> mean = e.mean();
  out.total = entropy(mean);
  const double h0 = entropy(e.members.front());
  double a = 0.0;
  for (const auto& m : e.members) a += entropy(m) - h0;
  out.aleatoric = h0 + a / static_cast<double>(e.members.size());
  out.epistemic_raw = out.total - out.aleatoric;
  out.epistemic = std::max(0.0, out.epistemic_raw);
  return out;
}

// ---------------------------------------------------------------------------
// Evidential measures

/// Generalized Hartley non-specificity: sum of m(A) log2 |A|.
inline double nonspecificity(const MassFunction& m) {
  double n = 0.0;
  for (const auto& [set, mass] : m.focal()) n += mass * std::log2(static_cast<double>(cardinality(set)));
  return n;
}

/// Klir-Parviz discord: -sum_A m(A) log2 sum_B m(B) |A n B| / |B|.
inline double discord(const MassFunction& m) {
  double d = 0.0;
  for (const auto& [a, ma] : m.focal()) {
    double inner = 0.0;
    for (const auto& [b, mb] : m.focal()) inner += mb * cardinality(a & b) / static_cast<double>(cardinality(b));
    d -= ma * std::log2(inner);
  }
  return std::max(0.0, d);
}

// ---------------------------------------------------------------------------
// Registry

enum class MeasureKind {
  entropy,
  gini,
  least_confident,
  margin,
  rl_decomposition,
  ensemble_decomposition,
  nonspecificity,
  discord
};

struct MeasureDescriptor {
  MeasureKind kind;
  std::string id;
  std::string display_name;
  Capability required_capability;
  std::vector<std::string> components;
  std::string reference;
};

inline const std::vector<MeasureDescriptor>& measure_registry() {
  static const std::vector<MeasureDescriptor> registry = {
      {MeasureKind::entropy, "entropy", "Shannon entropy", Capability::probability, {"total"},
       "C. E. Shannon (1948). A Mathematical Theory of Communication. Bell System Technical Journal 27(3):379-423."},
      {MeasureKind::gini, "gini", "Gini index", Capability::probability, {"total"},
       "L. Breiman, J. Friedman, R. Olshen, C. Stone (1984). Classification and Regression Trees. Wadsworth."},
      {MeasureKind::least_confident, "least_confident", "Least confident", Capability::probability, {"total"},
       "D. D. Lewis, W. A. Gale (1994). A Sequential Algorithm for Training Text Classifiers. SIGIR, 3-12. "
       "See also B. Settles (2009). Active Learning Literature Survey. University of Wisconsin-Madison TR 1648."},
      {MeasureKind::margin, "margin", "Margin", Capability::probability, {"total"},
       "T. Scheffer, C. Decomain, S. Wrobel (2001). Active Hidden Markov Models for Information Extraction. "
       "Advances in Intelligent Data Analysis, LNCS 2189, 309-318."},
      {MeasureKind::rl_decomposition, "rl_decomposition", "Epistemic / aleatoric (relative likelihood)",
       Capability::local_counts, {"epistemic", "aleatoric"},
       "R. Senge, S. Boesner, K. Dembczynski, J. Haasenritter, O. Hirsch, N. Donner-Banzhoff, E. Huellermeier "
       "(2014). Reliable classification: Learning classifiers that distinguish aleatoric and epistemic "
       "uncertainty. Information Sciences 255:16-29."},
      {MeasureKind::ensemble_decomposition, "ensemble_decomposition", "Total / aleatoric / epistemic (ensemble)",
       Capability::ensemble_members, {"total", "aleatoric", "epistemic"},
       "S. Depeweg, J. M. Hernandez-Lobato, F. Doshi-Velez, S. Udluft (2018). Decomposition of Uncertainty in "
       "Bayesian Deep Learning for Efficient and Risk-sensitive Learning. ICML. See also E. Huellermeier, "
       "W. Waegeman (2021). Aleatoric and epistemic uncertainty in machine learning. Machine Learning "
       "110:457-506."},
      {MeasureKind::nonspecificity, "nonspecificity", "Non-specificity", Capability::mass_function, {"total"},
       "D. Dubois, H. Prade (1985). A note on measures of specificity for fuzzy sets. International Journal of "
       "General Systems 10(4):279-283. See also G. J. Klir, M. J. Wierman (1999). Uncertainty-Based "
       "Information. Physica-Verlag."},
      {MeasureKind::discord, "discord", "Discord (Klir-Parviz)", Capability::mass_function, {"total"},
       "G. J. Klir, B. Parviz (1992). A note on the measure of discord. Proceedings of the 8th Conference on "
       "Uncertainty in Artificial Intelligence, 138-141."},
  };
  return registry;
}

inline const MeasureDescriptor& find_measure(std::string_view id) {
  for (const auto& d : measure_registry())
    if (d.id == id) return d;
  throw NotFoundError("unknown measure '" + std::string(id) + "'");
}

inline void check_compatible(ClassifierKind kind, const MeasureDescriptor& measure) {
  if (!model_descriptor(kind).has(measure.required_capability))
    throw CapabilityError("measure '" + measure.id + "' requires the '" + to_string(measure.required_capability) +
                          "' capability, which model '" + to_string(kind) + "' does not provide");
}

inline void check_compatible(const FittedModel& model, const MeasureDescriptor& measure) {
  check_compatible(model.kind(), measure);
}

/// Writes one value per descriptor component into `out`.
inline void evaluate_measure(const FittedModel& model, const MeasureDescriptor& measure, const Point2& q,
                             std::span<double> out) {
  switch (measure.kind) {
    case MeasureKind::entropy: out[0] = entropy(predict_proba(model, q)); return;
    case MeasureKind::gini: out[0] = gini(predict_proba(model, q)); return;
    case MeasureKind::least_confident: out[0] = least_confident(predict_proba(model, q)); return;
    case MeasureKind::margin: out[0] = margin(predict_proba(model, q)); return;
    case MeasureKind::rl_decomposition: {
      const auto r = rl_decomposition(local_counts(model, q));
      out[0] = r.epistemic;
      out[1] = r.aleatoric;
      return;
    }
    case MeasureKind::ensemble_decomposition: {
      const auto e = ensemble_decomposition(ensemble_members(model, q));
      out[0] = e.total;
      out[1] = e.aleatoric;
      out[2] = e.epistemic;
      return;
    }
    case MeasureKind::nonspecificity: out[0] = nonspecificity(mass_function(model, q)); return;
    case MeasureKind::discord: out[0] = discord(mass_function(model, q)); return;
  }
  throw InternalError("unhandled measure");
}

}  // namespace uncmap
