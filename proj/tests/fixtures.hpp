#pragma once

// Seeded fixtures shared by the unit and acceptance suites.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <unistd.h>

#include "uncmap/geometry.hpp"
#include "uncmap/rng.hpp"

namespace uncmap::fixtures {

inline double normal(SplitMix64& rng) {
  // Box-Muller; u1 is kept away from 0.
  const double u1 = (static_cast<double>(rng.next() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

struct LabeledPoints {
  std::vector<Point2> points;
  std::vector<int> labels;
};

/// Two unit-variance Gaussian classes centered at (-offset, 0) and
/// (+offset, 0). Class 1 is the exact mirror image of class 0 through x = 0,
/// so the symmetry axis is exactly x = 0.
inline LabeledPoints mirrored_two_gaussians(std::uint64_t seed = 7, int per_class = 100, double offset = 1.5) {
  SplitMix64 rng(seed);
  LabeledPoints out;
  std::vector<Point2> left;
  for (int i = 0; i < per_class; ++i) left.push_back({normal(rng) - offset, normal(rng)});
  for (const auto& p : left) {
    out.points.push_back(p);
    out.labels.push_back(0);
    out.points.push_back({-p.x, p.y});
    out.labels.push_back(1);
  }
  return out;
}

inline std::vector<Point2> uniform_points(SplitMix64& rng, int n, double lo, double hi) {
  std::vector<Point2> pts;
  for (int i = 0; i < n; ++i) pts.push_back({lo + (hi - lo) * rng.uniform(), lo + (hi - lo) * rng.uniform()});
  return pts;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("uncmap_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }

  std::filesystem::path write(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

private:
  std::filesystem::path path_;
};

}  // namespace uncmap::fixtures
