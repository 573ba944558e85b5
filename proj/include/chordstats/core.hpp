#pragma once

// Geometry and configuration value types shared by every other header.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace chordstats {

#ifdef CHORDSTATS_VERSION
inline constexpr std::string_view version = CHORDSTATS_VERSION;
#else
inline constexpr std::string_view version = "0.1.0";
#endif

using Point = std::vector<double>;

/// Side lengths of an axis-aligned box [0,a1] x ... x [0,an], n >= 2.
class BoxDims {
 public:
  explicit BoxDims(std::vector<double> sides) : sides_(std::move(sides)) {
    if (sides_.size() < 2) {
      throw std::invalid_argument("box needs at least two sides");
    }
    for (double s : sides_) {
      if (!(s > 0.0) || !std::isfinite(s)) {
        throw std::invalid_argument("box sides must be finite and positive");
      }
    }
  }

  std::size_t dimension() const noexcept { return sides_.size(); }
  std::span<const double> sides() const noexcept { return sides_; }
  double side(std::size_t i) const { return sides_.at(i); }

  /// Sides in ascending order.
  std::vector<double> sorted() const {
    std::vector<double> s = sides_;
    std::sort(s.begin(), s.end());
    return s;
  }

  double volume() const noexcept {
    return std::accumulate(sides_.begin(), sides_.end(), 1.0,
                           std::multiplies<>());
  }

  /// (n-1)-dimensional surface area: 2 * sum_i prod_{j != i} a_j.
  double surface_area() const noexcept {
    double area = 0.0;
    for (std::size_t i = 0; i < sides_.size(); ++i) {
      double face = 1.0;
      for (std::size_t j = 0; j < sides_.size(); ++j) {
        if (j != i) face *= sides_[j];
      }
      area += face;
    }
    return 2.0 * area;
  }

  BoxDims scaled(double factor) const {
    std::vector<double> s = sides_;
    for (double& x : s) x *= factor;
    return BoxDims(std::move(s));
  }

  bool contains(std::span<const double> p) const noexcept {
    if (p.size() != sides_.size()) return false;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!(p[i] >= 0.0 && p[i] <= sides_[i])) return false;
    }
    return true;
  }

  friend bool operator==(const BoxDims&, const BoxDims&) = default;

 private:
  std::vector<double> sides_;
};

/// Length of the main diagonal, the longest possible chord.
inline double diag(const BoxDims& box) {
  double sum = 0.0;
  for (double s : box.sides()) sum += s * s;
  return std::sqrt(sum);
}

class UnitVector {
 public:
  static constexpr double tolerance = 1e-12;

  /// Takes components that already have unit norm (within tolerance).
  explicit UnitVector(std::vector<double> components)
      : c_(std::move(components)) {
    if (c_.size() < 2) {
      throw std::invalid_argument("direction needs at least two components");
    }
    if (std::abs(norm_squared(c_) - 1.0) > tolerance) {
      throw std::invalid_argument("direction is not a unit vector");
    }
  }

  /// Rescales an arbitrary nonzero vector to unit length.
  static UnitVector normalized(std::vector<double> v) {
    const double n2 = norm_squared(v);
    if (!(n2 > 0.0) || !std::isfinite(n2)) {
      throw std::invalid_argument("direction must be a nonzero finite vector");
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (double& x : v) x *= inv;
    // One refinement pass keeps the norm within a few ulps of 1.
    const double fix = 1.0 / std::sqrt(norm_squared(v));
    for (double& x : v) x *= fix;
    return UnitVector(std::move(v));
  }

  std::size_t dimension() const noexcept { return c_.size(); }
  std::span<const double> components() const noexcept { return c_; }
  double operator[](std::size_t i) const { return c_[i]; }

  friend bool operator==(const UnitVector&, const UnitVector&) = default;

 private:
  static double norm_squared(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
  }

  std::vector<double> c_;
};

struct TotalDistance {
  double distance;
};

struct BounceCount {
  std::uint64_t bounces;
};

using Termination = std::variant<TotalDistance, BounceCount>;

struct TrajectoryConfig {
  Point start;
  UnitVector direction;
  Termination termination;

  void validate(const BoxDims& box) const {
    if (direction.dimension() != box.dimension()) {
      throw std::invalid_argument("direction dimension does not match box");
    }
    if (!box.contains(start)) {
      throw std::invalid_argument("start point lies outside the box");
    }
    if (const auto* d = std::get_if<TotalDistance>(&termination)) {
      if (!(d->distance > 0.0)) {
        throw std::invalid_argument("travel distance must be positive");
      }
    } else if (std::get<BounceCount>(termination).bounces < 1) {
      throw std::invalid_argument("bounce count must be at least 1");
    }
  }
};

/// Start at a fixed point for every particle.
struct FixedPoint {
  Point point;
};

/// Start uniformly distributed in the box.
struct UniformInBox {};

using StartPolicy = std::variant<FixedPoint, UniformInBox>;

inline FixedPoint origin_start(std::size_t dimension) {
  return FixedPoint{Point(dimension, 0.0)};
}

enum class SampleModel { SpreadingSim, AbsorptionSim, LineEnsemble };

inline std::string_view to_string(SampleModel m) {
  switch (m) {
    case SampleModel::SpreadingSim: return "spreading";
    case SampleModel::AbsorptionSim: return "absorption";
    case SampleModel::LineEnsemble: return "chords";
  }
  return "unknown";
}

inline SampleModel sample_model_from_string(std::string_view s) {
  if (s == "spreading") return SampleModel::SpreadingSim;
  if (s == "absorption") return SampleModel::AbsorptionSim;
  if (s == "chords") return SampleModel::LineEnsemble;
  throw std::invalid_argument("unknown sample model '" + std::string(s) + "'");
}

/// Provenance of a sample: how it was generated.
struct SampleMeta {
  SampleModel model = SampleModel::SpreadingSim;
  std::vector<double> box;
  /// Particle count M (spreading/absorption) or line count (chords).
  std::uint64_t particles = 0;
  /// R for spreading, N for absorption, line count for chords.
  double termination = 0.0;
  std::uint64_t seed = 0;
  std::string start = "origin";
  std::vector<std::string> warnings;
};

struct SampleSet {
  std::vector<double> lengths;
  SampleMeta meta;

  std::size_t size() const noexcept { return lengths.size(); }

  double mean() const {
    if (lengths.empty()) throw std::domain_error("mean of an empty sample");
    return std::accumulate(lengths.begin(), lengths.end(), 0.0) /
           static_cast<double>(lengths.size());
  }
};

}  // namespace chordstats
