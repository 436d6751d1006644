#pragma once

#include <cmath>

namespace uncmap {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double squared_distance(const Point2& a, const Point2& b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline bool is_finite(const Point2& p) noexcept { return std::isfinite(p.x) && std::isfinite(p.y); }

struct Rect {
  double xmin = 0.0;
  double xmax = 0.0;
  double ymin = 0.0;
  double ymax = 0.0;

  double width() const noexcept { return xmax - xmin; }
  double height() const noexcept { return ymax - ymin; }
  bool contains(const Point2& p) const noexcept {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
  bool strictly_contains(const Point2& p) const noexcept {
    return p.x > xmin && p.x < xmax && p.y > ymin && p.y < ymax;
  }
};

}  // namespace uncmap
