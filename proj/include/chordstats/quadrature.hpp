#pragma once

// Adaptive quadrature for piecewise-analytic integrands whose pieces may
// start with an integrable (t - t0)^(-1/2) singularity.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace chordstats::quadrature {

struct Options {
  double tolerance = 1e-10;
  unsigned max_depth = 15;
  /// Absolute error target; a piece whose estimated error is below it is
  /// accepted even when the relative target is out of reach (an integrand
  /// that is pure rounding noise near a zero of the density).
  double absolute = 0.0;
};

namespace detail {

using Kronrod15 = boost::math::quadrature::gauss_kronrod<double, 15>;

// Same bisection rule as Boost's adaptive driver, plus the absolute target.
template <class G>
double bisect(G& g, double a, double b, unsigned depth, double tol,
              double floor) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double err = 0.0;
  // With zero levels Boost applies the rule once and reports the error of
  // the rule on [-1, 1], unscaled.
  const double est = Kronrod15::integrate(g, a, b, 0, 0.0, &err);
  err *= half;
  floor = std::max(floor, tol * std::abs(est));
  if (depth == 0 || err <= floor) return est;
  return bisect(g, a, mid, depth - 1, tol, 0.5 * floor) +
         bisect(g, mid, b, depth - 1, tol, 0.5 * floor);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (15 point) on [lo, hi]. The interval is mapped
/// onto [0, 1] first so that the rounding floor of the nodes does not
/// depend on where the interval sits.
template <class F>
double integrate(F&& f, double lo, double hi, const Options& opt = {}) {
  if (!(hi > lo)) return 0.0;
  const double width = hi - lo;
  auto g = [&](double s) { return f(lo + s * width); };
  return width * detail::bisect(g, 0.0, 1.0, opt.max_depth, opt.tolerance,
                                opt.absolute / width);
}

/// Integral over [lo, hi] of f where f may blow up like (t - lo)^(-1/2) at
/// the left end. Substitutes t = lo + u^2 so the integrand becomes
/// 2 u f(lo + u^2), which is bounded.
///
/// Below u0 ~ sqrt(eps |lo|) the sum lo + u^2 rounds back to lo, so g would
/// jump there and the adaptive rule would chase the jump to full depth.
/// That sliver is taken as u0 * g(u0) instead, exact to O(u0^2).
template <class F>
double integrate_left_sqrt(F&& f, double lo, double hi,
                           const Options& opt = {}) {
  if (!(hi > lo)) return 0.0;
  auto g = [&](double u) { return 2.0 * u * f(lo + u * u); };
  const double u_hi = std::sqrt(hi - lo);
  const double u0 = std::sqrt(
      8.0 * std::numeric_limits<double>::epsilon() * std::abs(lo));
  if (u_hi <= 2.0 * u0) return integrate(f, lo, hi, opt);
  const double sliver = u0 > 0.0 ? u0 * g(u0) : 0.0;
  return sliver + integrate(g, u0, u_hi, opt);
}

/// Integral over [lo, hi] split at every breakpoint strictly inside it.
/// Each piece starting at a breakpoint (or at `lo` when `lo` is itself a
/// breakpoint) is integrated with the square-root substitution.
template <class F>
double integrate_piecewise(F&& f, double lo, double hi,
                           std::span<const double> breakpoints,
                           const Options& opt = {}) {
  if (!(hi > lo)) return 0.0;
  std::vector<double> cuts;
  cuts.push_back(lo);
  for (double b : breakpoints) {
    if (b > lo && b < hi) cuts.push_back(b);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  auto is_breakpoint = [&](double x) {
    return std::find(breakpoints.begin(), breakpoints.end(), x) !=
           breakpoints.end();
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += is_breakpoint(cuts[i])
                 ? integrate_left_sqrt(f, cuts[i], cuts[i + 1], opt)
                 : integrate(f, cuts[i], cuts[i + 1], opt);
  }
  return total;
}

}  // namespace chordstats::quadrature
