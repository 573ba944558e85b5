#pragma once

// Reproducible random streams. Every stream is a pure function of
// (master seed, stream id), so work can be split across threads in any
// order without changing results.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "chordstats/core.hpp"

namespace chordstats {

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stream ids are namespaced so that, e.g., particle 7 of a billiard run
/// and chunk 7 of a chord run never share a stream.
enum class StreamPurpose : std::uint64_t {
  Particle = 1,
  ChordChunk = 2,
  SphereQuadrature = 3,
  Test = 15,
};

inline constexpr std::uint64_t stream_id(StreamPurpose purpose,
                                         std::uint64_t index) noexcept {
  return (static_cast<std::uint64_t>(purpose) << 56) ^ index;
}

/// xoshiro256** seeded through splitmix64 from (seed, stream).
/// Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  Rng(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t sm = seed;
    const std::uint64_t a = splitmix64(sm);
    std::uint64_t sm2 = stream ^ 0x6a09e667f3bcc909ULL;
    const std::uint64_t b = splitmix64(sm2);
    std::uint64_t mix = a ^ (b * 0xd1342543de82ef95ULL) ^ (b >> 17);
    for (auto& word : s_) word = splitmix64(mix);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1].
  double uniform_open_left() noexcept {
    return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; caches the second variate.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_open_left()));
    const double phi = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Uniform direction on S^{n-1}.
inline UnitVector sample_uniform_direction(Rng& rng, std::size_t n) {
  if (n < 2) throw std::invalid_argument("direction dimension must be >= 2");
  if (n == 2) {
    const double angle = 2.0 * std::numbers::pi * rng.uniform();
    return UnitVector::normalized({std::cos(angle), std::sin(angle)});
  }
  if (n == 3) {
    // Archimedes: the height is uniform on [-1, 1].
    const double z = 2.0 * rng.uniform() - 1.0;
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return UnitVector::normalized({r * std::cos(phi), r * std::sin(phi), z});
  }
  std::vector<double> v(n);
  for (;;) {
    double n2 = 0.0;
    for (double& x : v) {
      x = rng.normal();
      n2 += x * x;
    }
    if (n2 > 1e-300) break;
  }
  return UnitVector::normalized(std::move(v));
}

/// Uniform direction on the positive orthant part of S^{n-1}.
inline std::vector<double> sample_positive_orthant_direction(Rng& rng,
                                                             std::size_t n) {
  const UnitVector u = sample_uniform_direction(rng, n);
  std::vector<double> v(u.components().begin(), u.components().end());
  for (double& x : v) x = std::abs(x);
  return v;
}

/// Uniform point in the box.
inline Point sample_point_in_box(Rng& rng, const BoxDims& box) {
  Point p(box.dimension());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = rng.uniform() * box.side(i);
  return p;
}

}  // namespace chordstats
