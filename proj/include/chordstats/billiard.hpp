#pragma once

// Billiard free-path sampling in an axis-aligned box.
//
// Specular reflection is never simulated directly. A reflected trajectory
// is the fold-back of the straight ray p + t v in R^n, and its bounce
// lengths are exactly the gaps between consecutive crossings of the ray
// with the grid planes x_i = k * a_i. CrossingStream enumerates those
// crossings by merging one arithmetic sequence per axis, with O(n) state.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "chordstats/accumulate.hpp"
#include "chordstats/core.hpp"
#include "chordstats/parallel.hpp"
#include "chordstats/random.hpp"

namespace chordstats {

struct CrossingEvent {
  double time;
  /// Index of the wall family crossed; the lowest index when several
  /// families are crossed at once (edge or corner hit).
  std::size_t axis;
};

/// Relative tolerance under which two crossing times count as one event.
inline constexpr double kCrossingMergeTolerance = 1e-12;

class CrossingStream {
 public:
  CrossingStream(const BoxDims& box, std::span<const double> start,
                 const UnitVector& direction) {
    const std::size_t n = box.dimension();
    if (start.size() != n || direction.dimension() != n) {
      throw std::invalid_argument("start/direction dimension mismatch");
    }
    axes_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = direction[i];
      if (v == 0.0) continue;
      Axis ax{box.side(i), start[i], v, 0.0, v > 0 ? 1.0 : -1.0, 0.0, i};
      const double cell = start[i] / ax.side;
      ax.k = v > 0 ? std::floor(cell) + 1.0 : std::ceil(cell) - 1.0;
      ax.next_time = ax.time_of(ax.k);
      // A start lying on a plane up to rounding must not produce an event
      // at t ~ 0.
      const double min_time = 1e-12 * ax.side / std::abs(v);
      while (ax.next_time <= min_time) ax.advance();
      axes_.push_back(ax);
    }
    if (axes_.empty()) {
      throw std::invalid_argument("direction has no nonzero component");
    }
  }

  /// Next crossing time in increasing order.
  CrossingEvent next() {
    double t = std::numeric_limits<double>::infinity();
    for (const Axis& ax : axes_) t = std::min(t, ax.next_time);
    const double limit = t + kCrossingMergeTolerance * t;
    std::size_t axis = std::numeric_limits<std::size_t>::max();
    for (Axis& ax : axes_) {
      if (ax.next_time <= limit) {
        axis = std::min(axis, ax.index);
        ax.advance();
      }
    }
    return {t, axis};
  }

 private:
  struct Axis {
    double side;
    double start;
    double velocity;
    double k;
    double step;
    double next_time;
    std::size_t index;

    // Computed from the integer plane index every time, never by
    // accumulation, so error stays at rounding level after 10^6 crossings.
    double time_of(double plane) const {
      return (plane * side - start) / velocity;
    }
    void advance() {
      k += step;
      next_time = time_of(k);
    }
  };

  std::vector<Axis> axes_;
};

/// All crossings for one trajectory: times in (0, R] for a distance
/// budget, or the first N + 1 crossings for a bounce budget.
inline std::vector<CrossingEvent> unfold_crossings(
    const BoxDims& box, const TrajectoryConfig& config) {
  config.validate(box);
  CrossingStream stream(box, config.start, config.direction);
  std::vector<CrossingEvent> events;
  if (const auto* d = std::get_if<TotalDistance>(&config.termination)) {
    for (CrossingEvent e = stream.next(); e.time <= d->distance;
         e = stream.next()) {
      events.push_back(e);
    }
  } else {
    const std::uint64_t n = std::get<BounceCount>(config.termination).bounces;
    events.reserve(n + 1);
    for (std::uint64_t i = 0; i <= n; ++i) events.push_back(stream.next());
  }
  return events;
}

/// Feeds every bounce length of one trajectory to `sink`. The partial
/// segment before the first crossing and the one after the last crossing
/// are not bounce lengths and are dropped.
template <class Sink>
void for_each_gap(const BoxDims& box, std::span<const double> start,
                  const UnitVector& direction, const Termination& termination,
                  Sink&& sink) {
  CrossingStream stream(box, start, direction);
  double prev = stream.next().time;
  if (const auto* d = std::get_if<TotalDistance>(&termination)) {
    if (prev > d->distance) return;
    for (;;) {
      const double t = stream.next().time;
      if (t > d->distance) break;
      sink(t - prev);
      prev = t;
    }
  } else {
    const std::uint64_t n = std::get<BounceCount>(termination).bounces;
    for (std::uint64_t i = 0; i < n; ++i) {
      const double t = stream.next().time;
      sink(t - prev);
      prev = t;
    }
  }
}

/// Gaps of one trajectory as a vector.
inline std::vector<double> trajectory_gaps(const BoxDims& box,
                                           const TrajectoryConfig& config) {
  config.validate(box);
  std::vector<double> gaps;
  for_each_gap(box, config.start, config.direction, config.termination,
               [&](double g) { gaps.push_back(g); });
  return gaps;
}

struct ParticleRun {
  std::size_t particles = 1;
  Termination termination = TotalDistance{1.0};
  StartPolicy start = UniformInBox{};
  std::uint64_t seed = 0;
  /// 0 selects the hardware concurrency. Results never depend on it.
  unsigned threads = 0;
};

namespace detail {

inline Point particle_start(const StartPolicy& policy, const BoxDims& box,
                            Rng& rng) {
  if (const auto* fixed = std::get_if<FixedPoint>(&policy)) {
    return fixed->point;
  }
  return sample_point_in_box(rng, box);
}

inline std::string describe_start(const StartPolicy& policy) {
  if (const auto* fixed = std::get_if<FixedPoint>(&policy)) {
    bool at_origin = true;
    std::string s;
    for (double x : fixed->point) {
      if (x != 0.0) at_origin = false;
      if (!s.empty()) s += ',';
      s += std::to_string(x);
    }
    return at_origin ? "origin" : s;
  }
  return "uniform";
}

inline void validate_run(const BoxDims& box, const ParticleRun& run) {
  if (run.particles < 1) {
    throw std::invalid_argument("particle count must be at least 1");
  }
  if (const auto* fixed = std::get_if<FixedPoint>(&run.start)) {
    if (!box.contains(fixed->point)) {
      throw std::invalid_argument("start point lies outside the box");
    }
  }
  if (const auto* d = std::get_if<TotalDistance>(&run.termination)) {
    if (!(d->distance > 0.0) || !std::isfinite(d->distance)) {
      throw std::invalid_argument("travel distance must be positive");
    }
  } else if (std::get<BounceCount>(run.termination).bounces < 1) {
    throw std::invalid_argument("bounce count must be at least 1");
  }
}

inline constexpr std::size_t kParticlesPerChunk = 256;

}  // namespace detail

/// Runs every particle of `run` and folds its bounce lengths into copies of
/// `prototype`. Particle i draws its start and direction from stream i of
/// the master seed, and partial results are merged in particle order (or
/// per worker for order-independent accumulators), so the result is a
/// function of (box, run) alone.
template <LengthAccumulator Acc>
Acc accumulate_particles(const BoxDims& box, const ParticleRun& run,
                         const Acc& prototype) {
  detail::validate_run(box, run);
  const std::size_t n = box.dimension();
  const std::size_t chunks =
      (run.particles + detail::kParticlesPerChunk - 1) /
      detail::kParticlesPerChunk;

  auto run_chunk = [&](std::size_t c, Acc& acc) {
    const ChunkRange r = chunk_range(run.particles, chunks, c);
    for (std::size_t i = r.begin; i < r.end; ++i) {
      Rng rng(run.seed, stream_id(StreamPurpose::Particle, i));
      const Point start = detail::particle_start(run.start, box, rng);
      const UnitVector dir = sample_uniform_direction(rng, n);
      for_each_gap(box, start, dir, run.termination,
                   [&acc](double g) { acc.add(g); });
    }
  };

  return reduce_chunks(chunks, run.threads, prototype, run_chunk);
}

namespace detail {

inline SampleSet collect(const BoxDims& box, const ParticleRun& run,
                         SampleModel model, double termination) {
  SampleSet out;
  out.lengths = accumulate_particles(box, run, LengthCollector{}).lengths;
  out.meta.model = model;
  out.meta.box.assign(box.sides().begin(), box.sides().end());
  out.meta.particles = run.particles;
  out.meta.termination = termination;
  out.meta.seed = run.seed;
  out.meta.start = describe_start(run.start);
  return out;
}

}  // namespace detail

/// Spreading model: M particles each travel a total distance R; the sample
/// is the multiset union of all complete bounce lengths.
inline SampleSet sample_spreading(const BoxDims& box, std::size_t particles,
                                  double distance, const StartPolicy& start,
                                  std::uint64_t seed, unsigned threads = 0) {
  ParticleRun run{particles, TotalDistance{distance}, start, seed, threads};
  SampleSet out =
      detail::collect(box, run, SampleModel::SpreadingSim, distance);
  if (distance <= diag(box)) {
    out.meta.warnings.push_back(
        "travel distance does not exceed the box diagonal; most particles "
        "record no complete bounce");
  }
  return out;
}

/// Absorption model: M particles each contribute exactly N bounce lengths.
inline SampleSet sample_absorption(const BoxDims& box, std::size_t particles,
                                   std::uint64_t bounces,
                                   const StartPolicy& start, std::uint64_t seed,
                                   unsigned threads = 0) {
  ParticleRun run{particles, BounceCount{bounces}, start, seed, threads};
  return detail::collect(box, run, SampleModel::AbsorptionSim,
                         static_cast<double>(bounces));
}

}  // namespace chordstats
