#pragma once

// Evaluation grid over the projected plane and the parallel evaluator.
//
// Cells are evaluated pointwise at their centers. Values are stored row-major:
// cell (ix, iy) sits at index iy * nx + ix, centered at (x0 + ix dx, y0 + iy dy).
// Each worker writes a disjoint set of rows, so the output does not depend on
// the number of workers or on scheduling.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <exception>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <shared_mutex>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "uncmap/classifiers/classifier.hpp"
#include "uncmap/dataset.hpp"
#include "uncmap/error.hpp"
#include "uncmap/geometry.hpp"
#include "uncmap/measures.hpp"
#include "uncmap/projection.hpp"

namespace uncmap {

inline constexpr int kMinResolution = 2;
inline constexpr int kMaxResolution = 1000;
inline constexpr int kDefaultResolution = 100;
inline constexpr double kDefaultMargin = 0.1;
inline constexpr std::size_t kMaxGridCells = 10'000'000;

struct GridSpec {
  double x0 = 0.0;
  double y0 = 0.0;
  double dx = 1.0;
  double dy = 1.0;
  int nx = 1;
  int ny = 1;

  std::size_t cells() const noexcept { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  Point2 center(int ix, int iy) const noexcept { return {x0 + ix * dx, y0 + iy * dy}; }
  Point2 center(std::size_t cell) const noexcept {
    return center(static_cast<int>(cell % static_cast<std::size_t>(nx)),
                  static_cast<int>(cell / static_cast<std::size_t>(nx)));
  }

  void validate() const {
    if (nx < 1 || ny < 1) throw InvalidArgument("grid needs at least one cell per axis");
    if (!(dx > 0.0) || !(dy > 0.0) || !std::isfinite(dx) || !std::isfinite(dy))
      throw InvalidArgument("grid spacing must be positive and finite");
    if (cells() > kMaxGridCells) throw InvalidArgument("grid exceeds " + std::to_string(kMaxGridCells) + " cells");
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

inline GridSpec make_grid(const Rect& bounds, int resolution) {
  if (resolution < kMinResolution || resolution > kMaxResolution)
    throw InvalidArgument("resolution " + std::to_string(resolution) + " outside [" + std::to_string(kMinResolution) +
                          ", " + std::to_string(kMaxResolution) + "]");
  if (!(bounds.width() > 0.0) || !(bounds.height() > 0.0) || !std::isfinite(bounds.width()) ||
      !std::isfinite(bounds.height()))
    throw InvalidArgument("grid bounds are degenerate");
  GridSpec g;
  g.nx = g.ny = resolution;
  g.dx = bounds.width() / resolution;
  g.dy = bounds.height() / resolution;
  g.x0 = bounds.xmin + g.dx / 2.0;
  g.y0 = bounds.ymin + g.dy / 2.0;
  return g;
}

struct HeatmapGrid {
  GridSpec spec;
  std::string component_name;
  std::vector<double> values;      // min-max normalized for display
  std::vector<double> raw_values;  // measure output as computed
  double raw_min = 0.0;
  double raw_max = 0.0;
  bool normalized = false;
  bool flat = false;  // raw_max == raw_min; values are all zero
};

/// Min-max scaling into [0,1]. A constant map becomes all zeros and is flagged.
inline void normalize(HeatmapGrid& g) {
  const auto [lo, hi] = std::minmax_element(g.raw_values.begin(), g.raw_values.end());
  g.raw_min = *lo;
  g.raw_max = *hi;
  g.values.resize(g.raw_values.size());
  g.flat = !(g.raw_max > g.raw_min);
  const double range = g.raw_max - g.raw_min;
  for (std::size_t i = 0; i < g.values.size(); ++i)
    g.values[i] = g.flat ? 0.0 : (g.raw_values[i] - g.raw_min) / range;
  g.normalized = true;
}

inline unsigned default_workers() noexcept { return std::max(1u, std::thread::hardware_concurrency()); }

using Deadline = std::chrono::steady_clock::time_point;
inline constexpr Deadline kNoDeadline = Deadline::max();

/// One HeatmapGrid per component of the measure. Workers check `deadline`
/// between rows and abandon the evaluation once it has passed.
inline std::vector<HeatmapGrid> evaluate(const FittedModel& model, const MeasureDescriptor& measure,
                                         const GridSpec& spec, unsigned workers = default_workers(),
                                         Deadline deadline = kNoDeadline) {
  spec.validate();
  check_compatible(model, measure);
  const std::size_t ncomp = measure.components.size();
  const std::size_t ncell = spec.cells();
  std::vector<double> raw(ncomp * ncell);  // cell-major: raw[cell * ncomp + c]

  const unsigned w = std::clamp<unsigned>(workers, 1u, static_cast<unsigned>(spec.ny));
  std::vector<std::exception_ptr> errors(w);
  auto run = [&](unsigned id) {
    try {
      for (int iy = static_cast<int>(id); iy < spec.ny; iy += static_cast<int>(w)) {
        if (deadline != kNoDeadline && std::chrono::steady_clock::now() > deadline)
          throw TimeoutError("grid evaluation exceeded its time budget");
        for (int ix = 0; ix < spec.nx; ++ix) {
          const std::size_t cell = static_cast<std::size_t>(iy) * static_cast<std::size_t>(spec.nx) +
                                   static_cast<std::size_t>(ix);
          evaluate_measure(model, measure, spec.center(ix, iy), std::span<double>(raw.data() + cell * ncomp, ncomp));
        }
      }
    } catch (...) {
      errors[id] = std::current_exception();
    }
  };
  if (w == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(w);
    for (unsigned id = 0; id < w; ++id) pool.emplace_back(run, id);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<HeatmapGrid> out(ncomp);
  for (std::size_t c = 0; c < ncomp; ++c) {
    auto& g = out[c];
    g.spec = spec;
    g.component_name = measure.components[c];
    g.raw_values.resize(ncell);
    for (std::size_t cell = 0; cell < ncell; ++cell) {
      const double v = raw[cell * ncomp + c];
      if (!std::isfinite(v)) {
        const Point2 p = spec.center(cell);
        throw InternalError("non-finite value for component '" + g.component_name + "' at cell (" +
                            std::to_string(cell % static_cast<std::size_t>(spec.nx)) + ", " +
                            std::to_string(cell / static_cast<std::size_t>(spec.nx)) + ") centered at (" +
                            detail::format_real(p.x) + ", " + detail::format_real(p.y) + ")");
      }
      g.raw_values[cell] = v;
    }
    normalize(g);
  }
  return out;
}

inline std::vector<HeatmapGrid> evaluate(const FittedModel& model, std::string_view measure_id, const GridSpec& spec,
                                         unsigned workers = default_workers(), Deadline deadline = kNoDeadline) {
  return evaluate(model, find_measure(measure_id), spec, workers, deadline);
}

struct ScatterPoint {
  double x = 0.0;
  double y = 0.0;
  int class_index = 0;
};

inline std::vector<ScatterPoint> scatter_overlay(const Dataset& ds, const Projected2D& p) {
  if (p.points.size() != ds.n_rows()) throw InvalidArgument("projection does not match dataset");
  std::vector<ScatterPoint> out(ds.n_rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {p.points[i].x, p.points[i].y, ds.y[i]};
  return out;
}

/// CSV export: header `x,y,<component...>`, one row per cell in row-major order.
inline void write_grid_csv(std::ostream& out, const std::vector<HeatmapGrid>& grids) {
  if (grids.empty()) throw InvalidArgument("nothing to export");
  const GridSpec& spec = grids.front().spec;
  out << "x,y";
  for (const auto& g : grids) out << ',' << g.component_name;
  out << '\n';
  for (std::size_t cell = 0; cell < spec.cells(); ++cell) {
    const Point2 p = spec.center(cell);
    out << detail::format_real(p.x) << ',' << detail::format_real(p.y);
    for (const auto& g : grids) out << ',' << detail::format_real(g.values[cell]);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Model cache

struct FittedContext {
  Projected2D projection;
  FittedModel model;
  double fit_ms = 0.0;
};

/// Fitted (projection, model) pairs keyed by dataset identity and content,
/// projection and classifier spec. Lookups take a shared lock; inserts are
/// serialized. The oldest entry is evicted beyond `capacity`.
class ModelCache {
public:
  explicit ModelCache(std::size_t capacity = 32) : capacity_(std::max<std::size_t>(1, capacity)) {}

  struct Lookup {
    std::shared_ptr<const FittedContext> context;
    bool hit = false;
  };

  static std::string key(const Dataset& ds, const ProjectionSpec& proj, const ClassifierSpec& clf) {
    return ds.id + "#" + std::to_string(ds.fingerprint) + "|" + proj.canonical() + "|" + clf.canonical();
  }

  Lookup get_or_fit(const Dataset& ds, const ProjectionSpec& proj, const ClassifierSpec& clf) {
    const std::string k = key(ds, proj, clf);
    {
      std::shared_lock lock(mutex_);
      if (auto it = entries_.find(k); it != entries_.end()) return {it->second, true};
    }
    const auto start = std::chrono::steady_clock::now();
    Projected2D projected = project(ds, proj);
    FittedModel model = fit(clf, projected.points, ds.y, ds.class_names);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    auto ctx = std::make_shared<const FittedContext>(FittedContext{std::move(projected), std::move(model), ms});

    std::unique_lock lock(mutex_);
    if (auto it = entries_.find(k); it != entries_.end()) return {it->second, true};
    entries_.emplace(k, ctx);
    order_.push_back(k);
    while (order_.size() > capacity_) {
      entries_.erase(order_.front());
      order_.pop_front();
    }
    return {ctx, false};
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
  }

private:
  std::size_t capacity_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const FittedContext>> entries_;
  std::list<std::string> order_;
};

}  // namespace uncmap
