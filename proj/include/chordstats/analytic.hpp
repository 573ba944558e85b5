#pragma once

// Closed-form free path length distributions in a box.
//
//   X: spreading model = chord length of a random line under the invariant
//      line measure (pdf in 2D and 3D, cdf in any dimension).
//   Y: absorption model in 2D, split into a singular part (segments that
//      start and end on the same wall family) and a smooth part.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "chordstats/core.hpp"
#include "chordstats/quadrature.hpp"
#include "chordstats/random.hpp"

namespace chordstats {

enum class BreakpointKind {
  JumpDiscontinuity,
  InverseSqrtSingularityOnRight,
  SmoothButNotAnalytic,
  ContinuousDifferentiable,
};

struct Breakpoint {
  double location;
  BreakpointKind kind;
  /// Number of coinciding features (3 for the sides of a cube).
  int multiplicity = 1;
};

inline const char* to_string(BreakpointKind k) {
  switch (k) {
    case BreakpointKind::JumpDiscontinuity: return "jump";
    case BreakpointKind::InverseSqrtSingularityOnRight: return "inverse-sqrt-right";
    case BreakpointKind::SmoothButNotAnalytic: return "smooth-not-analytic";
    case BreakpointKind::ContinuousDifferentiable: return "continuous-differentiable";
  }
  return "unknown";
}

/// A density on (0, support_end] that is analytic between breakpoints.
class PiecewiseDensity {
 public:
  PiecewiseDensity(double support_end, std::vector<Breakpoint> breakpoints,
                   std::function<double(double)> density)
      : support_end_(support_end),
        breakpoints_(std::move(breakpoints)),
        density_(std::move(density)) {
    std::sort(breakpoints_.begin(), breakpoints_.end(),
              [](const Breakpoint& x, const Breakpoint& y) {
                return x.location < y.location;
              });
    for (const auto& b : breakpoints_) cuts_.push_back(b.location);
  }

  double support_end() const noexcept { return support_end_; }
  std::span<const Breakpoint> breakpoints() const noexcept {
    return breakpoints_;
  }
  std::span<const double> cut_points() const noexcept { return cuts_; }

  /// Density at t; zero outside (0, support_end).
  double operator()(double t) const {
    if (t <= 0.0 || t >= support_end_) return 0.0;
    return density_(t);
  }

  /// Intervals between consecutive breakpoints covering the support.
  std::vector<std::array<double, 2>> pieces() const {
    std::vector<std::array<double, 2>> out;
    double lo = 0.0;
    for (double c : cuts_) {
      if (c > lo && c < support_end_) {
        out.push_back({lo, c});
        lo = c;
      }
    }
    out.push_back({lo, support_end_});
    return out;
  }

  double integrate(double lo, double hi,
                   const quadrature::Options& opt = {}) const {
    lo = std::max(lo, 0.0);
    hi = std::min(hi, support_end_);
    if (!(hi > lo)) return 0.0;
    auto f = [this](double t) { return density_(t); };
    return quadrature::integrate_piecewise(f, lo, hi, cuts_, opt);
  }

  double cdf(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= support_end_) return 1.0;
    return integrate(0.0, t);
  }

  /// cdf at each of the ascending points, by cumulative integration.
  std::vector<double> cdf_at(std::span<const double> points) const {
    std::vector<double> out(points.size());
    // Fine grids put many pieces where the density is rounding noise.
    quadrature::Options opt;
    opt.absolute = 1e-16;
    double acc = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double t = std::clamp(points[i], 0.0, support_end_);
      if (t < prev) {
        throw std::invalid_argument("cdf_at needs ascending points");
      }
      acc += integrate(prev, t, opt);
      prev = t;
      out[i] = std::min(acc, 1.0);
    }
    return out;
  }

  double total_mass() const { return integrate(0.0, support_end_); }

  double mean() const {
    auto f = [this](double t) { return t * density_(t); };
    return quadrature::integrate_piecewise(f, 0.0, support_end_, cuts_);
  }

 private:
  double support_end_;
  std::vector<Breakpoint> breakpoints_;
  std::vector<double> cuts_;
  std::function<double(double)> density_;
};

namespace detail {

inline void require_dimension(const BoxDims& box, std::size_t n) {
  if (box.dimension() != n) {
    throw std::invalid_argument("this distribution needs a " +
                                std::to_string(n) + "-dimensional box");
  }
}

inline void require_positive(double t) {
  if (!(t > 0.0)) throw std::domain_error("length must be positive");
}

inline std::atomic<std::uint64_t> artanh_clamp_events{0};

}  // namespace detail

/// Number of artanh evaluations whose argument was clamped away from +-1.
inline std::uint64_t artanh_clamp_count() noexcept {
  return detail::artanh_clamp_events.load(std::memory_order_relaxed);
}

inline double artanh_clamped(double z) {
  constexpr double edge = 1.0 - 1e-12;
  if (std::abs(z) > edge) {
    detail::artanh_clamp_events.fetch_add(1, std::memory_order_relaxed);
    z = std::copysign(edge, z);
  }
  return 0.5 * std::log((1.0 + z) / (1.0 - z));
}

// ---------------------------------------------------------------------------
// Spreading model, two dimensions.

namespace detail {

inline double pdf_x2(double a, double b, double t) {
  if (t >= std::hypot(a, b)) return 0.0;
  const double scale = 1.0 / (a + b);
  if (t <= a) return scale;
  if (t <= b) return scale * a * a * b / (t * t * std::sqrt((t - a) * (t + a)));
  return scale * (-1.0 + (a * a * b / std::sqrt((t - a) * (t + a)) +
                          a * b * b / std::sqrt((t - b) * (t + b))) /
                             (t * t));
}

}  // namespace detail

inline double pdf_X_2d(const BoxDims& box, double t) {
  detail::require_dimension(box, 2);
  detail::require_positive(t);
  const auto s = box.sorted();
  return detail::pdf_x2(s[0], s[1], t);
}

/// Closed-form cdf of X in 2D.
inline double cdf_X_2d(const BoxDims& box, double t) {
  detail::require_dimension(box, 2);
  const auto s = box.sorted();
  const double a = s[0], b = s[1];
  if (t <= 0.0) return 0.0;
  if (t >= std::hypot(a, b)) return 1.0;
  double numerator = a + b - t;
  if (b < t) numerator += t - b - a * std::sqrt(1.0 - b * b / (t * t));
  if (a < t) numerator += t - a - b * std::sqrt(1.0 - a * a / (t * t));
  return std::clamp(1.0 - numerator / (a + b), 0.0, 1.0);
}

inline PiecewiseDensity density_X_2d(const BoxDims& box) {
  detail::require_dimension(box, 2);
  const auto s = box.sorted();
  std::vector<Breakpoint> bps;
  bps.push_back({s[0], BreakpointKind::InverseSqrtSingularityOnRight, 1});
  if (s[1] == s[0]) {
    bps.back().multiplicity = 2;
  } else {
    bps.push_back({s[1], BreakpointKind::InverseSqrtSingularityOnRight, 1});
  }
  return PiecewiseDensity(
      diag(box), std::move(bps),
      [a = s[0], b = s[1]](double t) { return detail::pdf_x2(a, b, t); });
}

// ---------------------------------------------------------------------------
// Spreading model, three dimensions.

namespace detail {

/// The per-permutation building block; its branch is chosen from its own
/// thresholds x and sqrt(x^2 + y^2).
inline double orthant_pdf_term(double x, double y, double z, double t) {
  constexpr double pi = std::numbers::pi;
  const double t2 = t * t;
  const double t4 = t2 * t2;
  if (t <= x) return t2 * t * (8.0 * x - 3.0 * t);
  const double x2 = x * x;
  const double y2 = y * y;
  if (t <= std::sqrt(x2 + y2)) {
    return (6.0 * t4 - x2 * x2 + 6.0 * pi * x2 * y * z) -
           4.0 * (y + z) * std::sqrt(std::abs(t2 - x2)) * (x2 + 2.0 * t2);
  }
  const double r = std::sqrt(std::abs(t2 - x2 - y2));
  return 6.0 * pi * x2 * y * z + y2 * y2 - 3.0 * t4 - 6.0 * x2 * y2 +
         r * 4.0 * z * (x2 + y2 + 2.0 * t2) +
         4.0 * x * std::sqrt(std::abs(t2 - y2)) * (y2 + 2.0 * t2) -
         12.0 * x2 * y * z * std::atan(r / y) -
         4.0 * z * std::sqrt(std::abs(t2 - x2)) * (x2 + 2.0 * t2) -
         12.0 * x * y2 * z * std::atan(r / x);
}

inline double pdf_x3(double a, double b, double c, double t) {
  if (t * t >= a * a + b * b + c * c) return 0.0;
  const double sum = detail::orthant_pdf_term(a, b, c, t) +
                     detail::orthant_pdf_term(b, c, a, t) +
                     detail::orthant_pdf_term(c, a, b, t);
  return sum / (3.0 * std::numbers::pi * t * t * t * (a * b + a * c + b * c));
}

}  // namespace detail

inline double pdf_X_3d(const BoxDims& box, double t) {
  detail::require_dimension(box, 3);
  detail::require_positive(t);
  return detail::pdf_x3(box.side(0), box.side(1), box.side(2), t);
}

inline PiecewiseDensity density_X_3d(const BoxDims& box) {
  detail::require_dimension(box, 3);
  const auto s = box.sorted();
  std::vector<Breakpoint> bps;
  for (double side : s) {
    if (!bps.empty() && bps.back().location == side) {
      ++bps.back().multiplicity;
    } else {
      bps.push_back({side, BreakpointKind::JumpDiscontinuity, 1});
    }
  }
  const std::array<double, 3> diagonals = {std::hypot(s[0], s[1]),
                                           std::hypot(s[0], s[2]),
                                           std::hypot(s[1], s[2])};
  std::vector<Breakpoint> extra;
  for (double d : diagonals) {
    const bool is_side = std::find(s.begin(), s.end(), d) != s.end();
    if (is_side) continue;
    auto same = std::find_if(extra.begin(), extra.end(),
                             [d](const Breakpoint& b) { return b.location == d; });
    if (same != extra.end()) {
      ++same->multiplicity;
    } else {
      extra.push_back({d, BreakpointKind::ContinuousDifferentiable, 1});
    }
  }
  bps.insert(bps.end(), extra.begin(), extra.end());
  return PiecewiseDensity(
      diag(box), std::move(bps),
      [a = box.side(0), b = box.side(1), c = box.side(2)](double t) {
        return detail::pdf_x3(a, b, c, t);
      });
}

/// cdf of X in 3D by quadrature of the density.
inline double cdf_X_3d(const BoxDims& box, double t) {
  return density_X_3d(box).cdf(t);
}

/// cdf of X in 3D by direct quadrature over the positive orthant of the
/// sphere, restricted to directions with t*v_i <= a_i. The region is
/// covered in spherical coordinates (v = (sin th cos ph, sin th sin ph,
/// cos th)) by three (th, ph) strips; the third one is subtracted.
/// Independent of the closed-form density.
inline double cdf_X_3d_spherical(const BoxDims& box, double t) {
  detail::require_dimension(box, 3);
  if (t <= 0.0) return 0.0;
  if (t >= diag(box)) return 1.0;
  const double a = box.side(0), b = box.side(1), c = box.side(2);
  constexpr double half_pi = std::numbers::pi / 2.0;

  auto integrand = [&](double th, double ph) {
    const double st = std::sin(th);
    const double vx = st * std::cos(ph);
    const double vy = st * std::sin(ph);
    const double vz = std::cos(th);
    return (a * b * vz + a * vy * c + vx * b * c) -
           2.0 * t * (a * vy * vz + vx * b * vz + vx * vy * c) +
           3.0 * t * t * vx * vy * vz;
  };
  const quadrature::Options inner_opt{1e-13, 12};
  const quadrature::Options outer_opt{1e-12, 16};
  auto strip = [&](double th, double ph_lo) {
    auto f = [&](double ph) { return integrand(th, ph); };
    return quadrature::integrate(f, ph_lo, half_pi, inner_opt) * std::sin(th);
  };
  auto clamp1 = [](double u) { return std::min(u, 1.0); };

  const double th_min = std::acos(clamp1(c / t));
  const double th_a = std::max(th_min, std::asin(clamp1(a / t)));
  const double th_b = std::max(th_min, std::asin(clamp1(b / t)));
  const double th_max = std::asin(clamp1(std::hypot(a, b) / t));

  const double full = quadrature::integrate(
      [&](double th) { return strip(th, 0.0); }, th_min, th_a, outer_opt);
  const double cut_a = quadrature::integrate_left_sqrt(
      [&](double th) {
        return strip(th, std::acos(clamp1(a / (t * std::sin(th)))));
      },
      th_a, th_max, outer_opt);
  const double cut_b = quadrature::integrate_left_sqrt(
      [&](double th) {
        return strip(th, std::asin(clamp1(b / (t * std::sin(th)))));
      },
      th_b, th_max, outer_opt);

  const double numerator = full + cut_a - cut_b;
  const double denominator =
      std::numbers::pi / 4.0 * (a * b + a * c + b * c);
  return 1.0 - numerator / denominator;
}

// ---------------------------------------------------------------------------
// Absorption model, two dimensions.

namespace detail {

inline double pdf_y2(double a, double b, double t) {
  const double d2 = a * a + b * b;
  const double d = std::sqrt(d2);
  if (t >= d) return 0.0;
  const double d3 = d2 * d;
  constexpr double two_over_pi = 2.0 / std::numbers::pi;
  if (t <= a) {
    return two_over_pi *
           (2.0 * (a + b) / d2 -
            2.0 * a * b / d3 *
                (artanh_clamped(a / d) + artanh_clamped(b / d)));
  }
  const double sa = std::sqrt((t - a) * (t + a));
  const double sing_a = a * (b - sa) / (t * (b + sa) * sa);
  if (t <= b) {
    return two_over_pi *
           (sing_a + (2.0 * a * b + 2.0 * a * t - 2.0 * a * sa) / (t * d2) +
            2.0 * a * b *
                (-artanh_clamped(t / d) +
                 artanh_clamped(sa * d / (t * b)) - artanh_clamped(b / d)) /
                d3);
  }
  const double sb = std::sqrt((t - b) * (t + b));
  const double sing_b = b * (a - sb) / (t * (a + sb) * sb);
  return two_over_pi *
         (sing_a + sing_b + 2.0 * (2.0 * a * b - a * sa - b * sb) / (t * d2) +
          2.0 * a * b *
              (-2.0 * artanh_clamped(t / d) +
               artanh_clamped(sa * d / (t * b)) +
               artanh_clamped(sb * d / (t * a))) /
              d3);
}

}  // namespace detail

/// Density of Y in closed form (three branches, artanh terms).
inline double pdf_Y_2d(const BoxDims& box, double t) {
  detail::require_dimension(box, 2);
  detail::require_positive(t);
  const auto s = box.sorted();
  return detail::pdf_y2(s[0], s[1], t);
}

/// Contribution of segments that start and end on the same wall family
/// (all such segments in a given direction have the same length).
inline double pdf_Y_singular(const BoxDims& box, double t) {
  detail::require_dimension(box, 2);
  detail::require_positive(t);
  const auto s = box.sorted();
  const double a = s[0], b = s[1];
  if (t <= a || t >= std::hypot(a, b)) return 0.0;
  auto part = [t](double x, double y) {
    const double sx = std::sqrt((t - x) * (t + x));
    return x * (y - sx) / (t * (y + sx) * sx);
  };
  double sum = part(a, b);
  if (t > b) sum += part(b, a);
  return 2.0 / std::numbers::pi * sum;
}

namespace detail {

/// Antiderivative in T of 2x / ((y + sqrt(T^2 - x^2)) T^2) on
/// (x, sqrt(x^2 + y^2)], written in a form that stays finite at the
/// upper end (the artanh form there is infinity minus infinity).
inline double smooth_antiderivative(double x, double y, double T) {
  const double d2 = x * x + y * y;
  const double d = std::sqrt(d2);
  const double s = std::sqrt(std::max(T * T - x * x, 0.0));
  return 2.0 * x * (s - y) / (T * d2) +
         2.0 * x * y / (d2 * d) * std::log(x * (d + T) / (T * y + s * d));
}

}  // namespace detail

/// Contribution of all other segments.
inline double pdf_Y_smooth(const BoxDims& box, double t) {
  detail::require_dimension(box, 2);
  detail::require_positive(t);
  const auto s = box.sorted();
  const double a = s[0], b = s[1];
  const double d = std::hypot(a, b);
  if (t >= d) return 0.0;
  using detail::smooth_antiderivative;
  const double from_a = smooth_antiderivative(a, b, d) -
                        smooth_antiderivative(a, b, std::max(a, t));
  const double from_b = smooth_antiderivative(b, a, d) -
                        smooth_antiderivative(b, a, std::max(b, t));
  return 2.0 / std::numbers::pi * (from_a + from_b);
}

inline PiecewiseDensity density_Y_2d(const BoxDims& box) {
  detail::require_dimension(box, 2);
  const auto s = box.sorted();
  std::vector<Breakpoint> bps;
  bps.push_back({s[0], BreakpointKind::InverseSqrtSingularityOnRight, 1});
  if (s[1] == s[0]) {
    bps.back().multiplicity = 2;
  } else {
    bps.push_back({s[1], BreakpointKind::InverseSqrtSingularityOnRight, 1});
  }
  return PiecewiseDensity(
      diag(box), std::move(bps),
      [a = s[0], b = s[1]](double t) { return detail::pdf_y2(a, b, t); });
}

inline double cdf_Y_2d(const BoxDims& box, double t) {
  return density_Y_2d(box).cdf(t);
}

// ---------------------------------------------------------------------------
// Sphere measures and the mean free path.

/// Surface area of the unit sphere S^{k} in R^{k+1}.
inline double sphere_area(std::size_t k) {
  const double m = static_cast<double>(k + 1);
  return 2.0 * std::pow(std::numbers::pi, m / 2.0) / std::tgamma(m / 2.0);
}

/// Integral of v_n over the positive orthant part of S^{n-1}.
inline double positive_orthant_vn_integral(std::size_t n) {
  if (n < 2) throw std::invalid_argument("dimension must be >= 2");
  return sphere_area(n) / (std::numbers::pi * std::ldexp(1.0, static_cast<int>(n)));
}

struct MonteCarloEstimate {
  double value;
  double standard_error;
};

/// Monte Carlo estimate of the same orthant integral.
inline MonteCarloEstimate positive_orthant_vn_integral_mc(
    std::size_t n, std::size_t samples, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("dimension must be >= 2");
  if (samples < 2) throw std::invalid_argument("need at least two samples");
  Rng rng(seed, stream_id(StreamPurpose::SphereQuadrature, n));
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double vn = sample_positive_orthant_direction(rng, n).back();
    sum += vn;
    sum2 += vn * vn;
  }
  const double m = static_cast<double>(samples);
  const double mean = sum / m;
  const double var = std::max(sum2 / m - mean * mean, 0.0) * m / (m - 1.0);
  const double area =
      sphere_area(n - 1) / std::ldexp(1.0, static_cast<int>(n));
  return {area * mean, area * std::sqrt(var / m)};
}

/// Mean chord length as 2 pi |S^{n-1}| / |S^n| * Vol / Area.
inline double mean_free_path_sphere_ratio(const BoxDims& box) {
  const std::size_t n = box.dimension();
  return 2.0 * std::numbers::pi * sphere_area(n - 1) / sphere_area(n) *
         box.volume() / box.surface_area();
}

/// Mean chord length as 2 sqrt(pi) Gamma((n+1)/2) / Gamma(n/2) * Vol / Area.
inline double mean_free_path_gamma(const BoxDims& box) {
  const double n = static_cast<double>(box.dimension());
  return 2.0 * std::sqrt(std::numbers::pi) * std::tgamma((n + 1.0) / 2.0) /
         std::tgamma(n / 2.0) * box.volume() / box.surface_area();
}

/// Mean free path; the 2D and 3D reductions are evaluated directly.
inline double mean_free_path(const BoxDims& box) {
  const auto s = box.sides();
  if (box.dimension() == 2) {
    return std::numbers::pi * s[0] * s[1] / (2.0 * (s[0] + s[1]));
  }
  if (box.dimension() == 3) {
    return 2.0 * s[0] * s[1] * s[2] /
           (s[0] * s[1] + s[0] * s[2] + s[1] * s[2]);
  }
  return mean_free_path_gamma(box);
}

// ---------------------------------------------------------------------------
// cdf of X in any dimension.

/// Monte Carlo evaluation of
///   1 - int_{S+, v_i <= a_i/t} sum_i v_i prod_{j!=i} (a_j - t v_j) dS
///       / ( prod_i a_i * int_{S+} sum_i v_i / a_i dS ).
/// The directions are drawn once and reused for every t, so the estimate
/// is monotone in t. The denominator uses the exact orthant integral.
class SphereCdfEstimator {
 public:
  SphereCdfEstimator(BoxDims box, std::size_t points, std::uint64_t seed)
      : box_(std::move(box)), n_(box_.dimension()), points_(points) {
    if (points < 2) throw std::invalid_argument("need at least two points");
    directions_.resize(points * n_);
    Rng rng(seed, stream_id(StreamPurpose::SphereQuadrature, 0));
    for (std::size_t k = 0; k < points; ++k) {
      const auto v = sample_positive_orthant_direction(rng, n_);
      std::copy(v.begin(), v.end(), directions_.begin() + k * n_);
    }
    double inv_sum = 0.0;
    for (double s : box_.sides()) inv_sum += 1.0 / s;
    denominator_ = box_.volume() * inv_sum * positive_orthant_vn_integral(n_);
    orthant_area_ =
        sphere_area(n_ - 1) / std::ldexp(1.0, static_cast<int>(n_));
  }

  const BoxDims& box() const noexcept { return box_; }
  std::size_t points() const noexcept { return points_; }

  MonteCarloEstimate cdf(double t) const {
    if (t <= 0.0) return {0.0, 0.0};
    const auto a = box_.sides();
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t k = 0; k < points_; ++k) {
      const double* v = &directions_[k * n_];
      bool inside = true;
      for (std::size_t i = 0; i < n_ && inside; ++i) inside = t * v[i] <= a[i];
      if (!inside) continue;
      double g = 0.0;
      for (std::size_t i = 0; i < n_; ++i) {
        double prod = v[i];
        for (std::size_t j = 0; j < n_; ++j) {
          if (j != i) prod *= a[j] - t * v[j];
        }
        g += prod;
      }
      sum += g;
      sum2 += g * g;
    }
    const double m = static_cast<double>(points_);
    const double mean = sum / m;
    const double var = std::max(sum2 / m - mean * mean, 0.0) * m / (m - 1.0);
    const double scale = orthant_area_ / denominator_;
    return {1.0 - scale * mean, scale * std::sqrt(var / m)};
  }

 private:
  BoxDims box_;
  std::size_t n_;
  std::size_t points_;
  std::vector<double> directions_;
  double denominator_ = 0.0;
  double orthant_area_ = 0.0;
};

inline MonteCarloEstimate cdf_general_n(const BoxDims& box, double t,
                                        std::size_t points = 1u << 20,
                                        std::uint64_t seed = 1) {
  return SphereCdfEstimator(box, points, seed).cdf(t);
}

}  // namespace chordstats
