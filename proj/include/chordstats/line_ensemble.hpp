#pragma once

// Random directed lines through a box under the translation- and
// rotation-invariant line measure dl = dA(q) dS(v), and their chord lengths.
// A line is (v, q) with q the foot point in the hyperplane through the
// origin orthogonal to v.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "chordstats/accumulate.hpp"
#include "chordstats/core.hpp"
#include "chordstats/random.hpp"

namespace chordstats {

struct DirectedLine {
  UnitVector direction;
  Point offset;
};

namespace detail {

inline void require_line_dimension(const BoxDims& box) {
  if (box.dimension() != 2 && box.dimension() != 3) {
    throw std::invalid_argument("line ensemble supports 2D and 3D boxes");
  }
}

}  // namespace detail

/// (n-1)-volume of the box's shadow on the hyperplane orthogonal to v:
/// sum_i |v_i| prod_{j != i} a_j.
inline double projected_shadow_area(const BoxDims& box, const UnitVector& v) {
  if (v.dimension() != box.dimension()) {
    throw std::invalid_argument("direction dimension does not match box");
  }
  double area = 0.0;
  for (std::size_t i = 0; i < box.dimension(); ++i) {
    double face = std::abs(v[i]);
    for (std::size_t j = 0; j < box.dimension(); ++j) {
      if (j != i) face *= box.side(j);
    }
    area += face;
  }
  return area;
}

/// Total dl-measure of the directed lines meeting the box.
inline double normalizing_constant(const BoxDims& box) {
  detail::require_line_dimension(box);
  const auto s = box.sides();
  if (box.dimension() == 2) return 4.0 * (s[0] + s[1]);
  return 2.0 * std::numbers::pi * (s[0] * s[1] + s[0] * s[2] + s[1] * s[2]);
}

/// Length of line ∩ box by slab clipping; 0 when the line misses.
inline double chord_length(const BoxDims& box, const DirectedLine& line) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < box.dimension(); ++i) {
    const double q = line.offset[i];
    const double v = line.direction[i];
    if (v == 0.0) {
      if (q < 0.0 || q > box.side(i)) return 0.0;
      continue;
    }
    double s0 = -q / v;
    double s1 = (box.side(i) - q) / v;
    if (s0 > s1) std::swap(s0, s1);
    lo = std::max(lo, s0);
    hi = std::min(hi, s1);
    if (hi <= lo) return 0.0;
  }
  return hi - lo;
}

namespace detail {

/// Orthonormal basis of the hyperplane orthogonal to v (n = 2 or 3).
inline std::vector<Point> orthogonal_basis(const UnitVector& v) {
  if (v.dimension() == 2) return {Point{-v[1], v[0]}};
  // Cross with the axis least aligned with v.
  std::size_t k = 0;
  for (std::size_t i = 1; i < 3; ++i) {
    if (std::abs(v[i]) < std::abs(v[k])) k = i;
  }
  std::array<double, 3> axis{0.0, 0.0, 0.0};
  axis[k] = 1.0;
  Point e1{v[1] * axis[2] - v[2] * axis[1], v[2] * axis[0] - v[0] * axis[2],
           v[0] * axis[1] - v[1] * axis[0]};
  const double n1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
  for (double& x : e1) x /= n1;
  Point e2{v[1] * e1[2] - v[2] * e1[1], v[2] * e1[0] - v[0] * e1[2],
           v[0] * e1[1] - v[1] * e1[0]};
  return {e1, e2};
}

inline double shadow_envelope(const BoxDims& box) {
  const auto s = box.sides();
  if (box.dimension() == 2) return s[0] + s[1];
  return s[0] * s[1] + s[0] * s[2] + s[1] * s[2];
}

inline constexpr double kGrazingChord = 1e-12;
inline constexpr std::size_t kChordsPerChunk = 1u << 14;

}  // namespace detail

struct ChordDraw {
  DirectedLine line;
  double length;
};

/// One line from dl / C restricted to lines meeting the box. The direction
/// is accepted with probability shadow(v) / envelope, then the foot point
/// is uniform on the shadow (rejection inside its bounding box in a basis
/// of v-perp; a miss is detected by the clipping itself).
inline ChordDraw sample_line(Rng& rng, const BoxDims& box) {
  detail::require_line_dimension(box);
  const std::size_t n = box.dimension();
  const double envelope = detail::shadow_envelope(box);
  const std::size_t corners = std::size_t{1} << n;
  for (;;) {
    UnitVector v = sample_uniform_direction(rng, n);
    if (rng.uniform() * envelope >= projected_shadow_area(box, v)) continue;

    const auto basis = detail::orthogonal_basis(v);
    std::vector<double> lo(basis.size(), std::numeric_limits<double>::infinity());
    std::vector<double> hi(basis.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t corner = 0; corner < corners; ++corner) {
      for (std::size_t k = 0; k < basis.size(); ++k) {
        double proj = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double x = (corner >> i) & 1u ? box.side(i) : 0.0;
          proj += x * basis[k][i];
        }
        lo[k] = std::min(lo[k], proj);
        hi[k] = std::max(hi[k], proj);
      }
    }
    for (;;) {
      Point q(n, 0.0);
      for (std::size_t k = 0; k < basis.size(); ++k) {
        const double coord = lo[k] + rng.uniform() * (hi[k] - lo[k]);
        for (std::size_t i = 0; i < n; ++i) q[i] += coord * basis[k][i];
      }
      DirectedLine line{v, std::move(q)};
      const double len = chord_length(box, line);
      if (len > detail::kGrazingChord) return {std::move(line), len};
    }
  }
}

/// Folds `count` chord lengths into `prototype`. Lines are drawn in chunks
/// of fixed size, chunk c from its own stream, merged in chunk order.
template <LengthAccumulator Acc>
Acc accumulate_chords(const BoxDims& box, std::size_t count, std::uint64_t seed,
                      const Acc& prototype, unsigned threads = 0) {
  detail::require_line_dimension(box);
  if (count < 1) throw std::invalid_argument("chord count must be at least 1");
  const std::size_t chunks =
      (count + detail::kChordsPerChunk - 1) / detail::kChordsPerChunk;
  auto run_chunk = [&](std::size_t c, Acc& acc) {
    Rng rng(seed, stream_id(StreamPurpose::ChordChunk, c));
    const std::size_t begin = c * detail::kChordsPerChunk;
    const std::size_t end = std::min(count, begin + detail::kChordsPerChunk);
    for (std::size_t i = begin; i < end; ++i) {
      acc.add(sample_line(rng, box).length);
    }
  };
  return reduce_chunks(chunks, threads, prototype, run_chunk);
}

inline SampleSet sample_chords(const BoxDims& box, std::size_t count,
                               std::uint64_t seed, unsigned threads = 0) {
  SampleSet out;
  out.lengths = accumulate_chords(box, count, seed, LengthCollector{}, threads)
                    .lengths;
  out.meta.model = SampleModel::LineEnsemble;
  out.meta.box.assign(box.sides().begin(), box.sides().end());
  out.meta.particles = count;
  out.meta.termination = static_cast<double>(count);
  out.meta.seed = seed;
  out.meta.start = "none";
  return out;
}

}  // namespace chordstats
