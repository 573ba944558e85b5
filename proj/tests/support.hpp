#pragma once

// Helpers shared by the unit tests.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "chordstats/core.hpp"

namespace chordstats::test_support {

/// Literal specular-reflection stepper, independent of the unfolding code:
/// moves the particle to the nearest wall, flips the velocity components
/// of the walls it touches, and records the time of every wall hit.
/// Returns the gaps between consecutive hits within travel distance R.
inline std::vector<double> reflect_gaps(const BoxDims& box, Point p,
                                        std::vector<double> v, double R) {
  const std::size_t n = box.dimension();
  std::vector<double> hits;
  double travelled = 0.0;
  for (;;) {
    double dt = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (v[i] > 0) dt = std::min(dt, (box.side(i) - p[i]) / v[i]);
      if (v[i] < 0) dt = std::min(dt, -p[i] / v[i]);
    }
    if (travelled + dt > R) break;
    travelled += dt;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] += dt * v[i];
      const double to_wall = v[i] > 0   ? (box.side(i) - p[i]) / v[i]
                             : v[i] < 0 ? -p[i] / v[i]
                                        : std::numeric_limits<double>::infinity();
      if (to_wall <= 1e-12 * travelled) {
        p[i] = v[i] > 0 ? box.side(i) : 0.0;
        v[i] = -v[i];
      }
    }
    hits.push_back(travelled);
  }
  std::vector<double> gaps;
  for (std::size_t k = 1; k < hits.size(); ++k) {
    gaps.push_back(hits[k] - hits[k - 1]);
  }
  return gaps;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("chordstats_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace chordstats::test_support
