#pragma once

#include <numeric>
#include <vector>

#include "uncmap/error.hpp"
#include "uncmap/probability.hpp"

namespace uncmap {

/// Class counts among the neighbors of a query. The total is the number of
/// neighbors that were counted (k, or fewer when a support radius applies).
struct LocalCounts {
  std::vector<int> counts;

  int total() const noexcept { return std::accumulate(counts.begin(), counts.end(), 0); }
  friend bool operator==(const LocalCounts&, const LocalCounts&) = default;
};

/// Per-member class distributions of an ensemble at one query.
struct EnsembleDistribution {
  std::vector<ProbabilityVector> members;

  std::vector<double> mean() const {
    if (members.empty()) throw InvalidArgument("ensemble has no members");
    // Shifted by the first member so identical members average exactly.
    const auto& first = members.front();
    const double n = static_cast<double>(members.size());
    std::vector<double> m(first.size(), 0.0);
    for (const auto& p : members)
      for (std::size_t k = 0; k < m.size(); ++k) m[k] += p[k] - first[k];
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = first[k] + m[k] / n;
    return m;
  }
};

}  // namespace uncmap
