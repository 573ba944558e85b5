#pragma once

// Empirical distributions: ECDFs, streaming histograms, Kolmogorov-Smirnov
// distances, and recovery of box sides from the empirical density.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "chordstats/analytic.hpp"
#include "chordstats/core.hpp"

namespace chordstats {

/// Sorted sample with its provenance. The ECDF is right-continuous with
/// steps of 1/count.
class EcdfSummary {
 public:
  EcdfSummary() = default;
  explicit EcdfSummary(std::vector<double> lengths, SampleMeta meta = {})
      : sorted_(std::move(lengths)), meta_(std::move(meta)) {
    for (double x : sorted_) {
      if (!std::isfinite(x)) throw std::invalid_argument("non-finite length");
    }
    std::sort(sorted_.begin(), sorted_.end());
  }
  explicit EcdfSummary(SampleSet sample)
      : EcdfSummary(std::move(sample.lengths), std::move(sample.meta)) {}

  std::span<const double> sorted() const noexcept { return sorted_; }
  std::size_t count() const noexcept { return sorted_.size(); }
  bool empty() const noexcept { return sorted_.empty(); }
  const SampleMeta& provenance() const noexcept { return meta_; }

  double operator()(double t) const {
    if (sorted_.empty()) return 0.0;
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), t);
    return static_cast<double>(it - sorted_.begin()) /
           static_cast<double>(sorted_.size());
  }

  double mean() const {
    if (sorted_.empty()) throw std::domain_error("mean of an empty sample");
    return std::accumulate(sorted_.begin(), sorted_.end(), 0.0) /
           static_cast<double>(sorted_.size());
  }

  double max() const {
    if (sorted_.empty()) throw std::domain_error("max of an empty sample");
    return sorted_.back();
  }

 private:
  std::vector<double> sorted_;
  SampleMeta meta_;
};

namespace detail {

inline void require_nonempty(const EcdfSummary& s) {
  if (s.empty()) throw std::invalid_argument("empty sample");
}

/// Calls visit(x, below, at_or_below) for each distinct value x, with the
/// ECDF just left of x and at x.
template <class Visit>
void for_each_step(const EcdfSummary& s, Visit&& visit) {
  const auto xs = s.sorted();
  const double n = static_cast<double>(xs.size());
  std::size_t i = 0;
  while (i < xs.size()) {
    std::size_t j = i + 1;
    while (j < xs.size() && xs[j] == xs[i]) ++j;
    visit(xs[i], static_cast<double>(i) / n, static_cast<double>(j) / n);
    i = j;
  }
}

}  // namespace detail

/// sup_t |ECDF(t) - cdf(t)|, evaluated on both sides of every step.
/// A PiecewiseDensity is a density, not a cdf; it takes the overload below.
template <class Cdf>
  requires(!std::same_as<std::remove_cvref_t<Cdf>, PiecewiseDensity>)
double ks_distance(const EcdfSummary& sample, Cdf&& cdf) {
  detail::require_nonempty(sample);
  double d = 0.0;
  detail::for_each_step(sample, [&](double x, double below, double at) {
    const double f = cdf(x);
    d = std::max({d, f - below, at - f});
  });
  return std::clamp(d, 0.0, 1.0);
}

/// Same, with the cdf of a piecewise density evaluated by one cumulative
/// sweep over the distinct sample values.
inline double ks_distance(const EcdfSummary& sample,
                          const PiecewiseDensity& density) {
  detail::require_nonempty(sample);
  std::vector<double> xs;
  std::vector<double> below, at;
  detail::for_each_step(sample, [&](double x, double lo, double hi) {
    xs.push_back(x);
    below.push_back(lo);
    at.push_back(hi);
  });
  const auto f = density.cdf_at(xs);
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    d = std::max({d, f[i] - below[i], at[i] - f[i]});
  }
  return std::clamp(d, 0.0, 1.0);
}

/// Two-sample statistic sup_t |F1(t) - F2(t)|.
inline double ks_two_sample(const EcdfSummary& x, const EcdfSummary& y) {
  detail::require_nonempty(x);
  detail::require_nonempty(y);
  const auto a = x.sorted();
  const auto b = y.sorted();
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == t) ++i;
    while (j < b.size() && b[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

/// Fixed-bin streaming histogram. Bins are [e_k, e_{k+1}) except the last,
/// which is closed. The running sum is kept in 2^-40 fixed point so merged
/// results do not depend on merge order.
class Histogram {
 public:
  static constexpr bool order_independent = true;

  static Histogram uniform(double lo, double hi, std::size_t bins) {
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
      throw std::invalid_argument("histogram range must satisfy lo < hi");
    }
    if (bins < 1) throw std::invalid_argument("histogram needs a bin");
    std::vector<double> edges(bins + 1);
    for (std::size_t k = 0; k <= bins; ++k) {
      edges[k] = lo + (hi - lo) * static_cast<double>(k) /
                          static_cast<double>(bins);
    }
    edges.back() = hi;
    Histogram h(std::move(edges));
    h.uniform_ = true;
    return h;
  }

  static Histogram with_edges(std::vector<double> edges) {
    if (edges.size() < 2) throw std::invalid_argument("need two edges");
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
      if (!(edges[k + 1] > edges[k])) {
        throw std::invalid_argument("edges must be strictly increasing");
      }
    }
    return Histogram(std::move(edges));
  }

  /// Counts given directly, e.g. read back from a file.
  static Histogram from_counts(std::vector<double> edges,
                               std::vector<std::uint64_t> counts,
                               std::uint64_t underflow = 0,
                               std::uint64_t overflow = 0) {
    Histogram h = with_edges(std::move(edges));
    const Histogram u =
        uniform(h.edges_.front(), h.edges_.back(), h.bins());
    h.uniform_ = u.edges_ == h.edges_;
    if (counts.size() != h.bins()) {
      throw std::invalid_argument("count/edge size mismatch");
    }
    h.counts_ = std::move(counts);
    h.underflow_ = underflow;
    h.overflow_ = overflow;
    h.total_ = std::accumulate(h.counts_.begin(), h.counts_.end(),
                               underflow + overflow);
    for (std::size_t k = 0; k < h.bins(); ++k) {
      const double mid = 0.5 * (h.edges_[k] + h.edges_[k + 1]);
      h.sum_fixed_ += static_cast<__int128>(h.counts_[k]) * to_fixed(mid);
    }
    return h;
  }

  void add(double x) {
    ++total_;
    sum_fixed_ += to_fixed(x);
    if (x < edges_.front()) {
      ++underflow_;
      return;
    }
    if (x > edges_.back()) {
      ++overflow_;
      return;
    }
    counts_[bin_of(x)]++;
  }

  void merge(const Histogram& other) {
    if (other.edges_ != edges_) {
      throw std::invalid_argument("cannot merge histograms with other edges");
    }
    for (std::size_t k = 0; k < counts_.size(); ++k) {
      counts_[k] += other.counts_[k];
    }
    underflow_ += other.underflow_;
    overflow_ += other.overflow_;
    total_ += other.total_;
    sum_fixed_ += other.sum_fixed_;
  }

  std::size_t bins() const noexcept { return counts_.size(); }
  std::span<const double> edges() const noexcept { return edges_; }
  std::span<const std::uint64_t> counts() const noexcept { return counts_; }
  std::uint64_t underflow() const noexcept { return underflow_; }
  std::uint64_t overflow() const noexcept { return overflow_; }
  /// Every value added, including under- and overflow.
  std::uint64_t total() const noexcept { return total_; }
  std::uint64_t binned() const noexcept {
    return total_ - underflow_ - overflow_;
  }
  bool is_uniform() const noexcept { return uniform_; }

  double mean() const {
    if (total_ == 0) throw std::domain_error("mean of an empty histogram");
    return static_cast<double>(sum_fixed_) / kFixedScale /
           static_cast<double>(total_);
  }

  /// counts / (binned * width); integrates to 1 over the binned range.
  std::vector<double> density() const {
    std::vector<double> out(bins(), 0.0);
    const double n = static_cast<double>(binned());
    if (n == 0.0) return out;
    for (std::size_t k = 0; k < bins(); ++k) {
      out[k] = static_cast<double>(counts_[k]) /
               (n * (edges_[k + 1] - edges_[k]));
    }
    return out;
  }

  /// Fraction of all values <= each edge (the ECDF at the edges, with ties
  /// at an interior edge counted in the bin above).
  std::vector<double> ecdf_at_edges() const {
    std::vector<double> out(edges_.size());
    const double n = static_cast<double>(total_);
    std::uint64_t acc = underflow_;
    out[0] = n > 0 ? static_cast<double>(acc) / n : 0.0;
    for (std::size_t k = 0; k < bins(); ++k) {
      acc += counts_[k];
      out[k + 1] = n > 0 ? static_cast<double>(acc) / n : 0.0;
    }
    return out;
  }

  std::size_t bin_of(double x) const {
    if (uniform_) {
      const double w = (edges_.back() - edges_.front()) /
                       static_cast<double>(bins());
      auto k = static_cast<std::size_t>((x - edges_.front()) / w);
      k = std::min(k, bins() - 1);
      // Division can land one bin off near an edge.
      if (k > 0 && x < edges_[k]) --k;
      if (k + 1 < bins() && x >= edges_[k + 1]) ++k;
      return k;
    }
    const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    const auto k = static_cast<std::size_t>(it - edges_.begin());
    return std::min(k == 0 ? 0 : k - 1, bins() - 1);
  }

 private:
  explicit Histogram(std::vector<double> edges)
      : edges_(std::move(edges)), counts_(edges_.size() - 1, 0) {}

  static constexpr double kFixedScale = 1099511627776.0;  // 2^40

  static __int128 to_fixed(double x) {
    return static_cast<__int128>(std::llround(x * kFixedScale));
  }

  std::vector<double> edges_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t underflow_ = 0;
  std::uint64_t overflow_ = 0;
  std::uint64_t total_ = 0;
  __int128 sum_fixed_ = 0;
  bool uniform_ = false;
};

/// Bracket for a KS statistic when one side is only known through bin
/// counts: lower is attained at the bin edges, upper assumes the worst
/// placement of every count inside its bin.
struct KsBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Histogram against a cdf, given as its values at the histogram edges.
inline KsBounds ks_bounds(const Histogram& h, std::span<const double> cdf_edges) {
  if (cdf_edges.size() != h.edges().size()) {
    throw std::invalid_argument("one cdf value per edge required");
  }
  if (h.total() == 0) throw std::invalid_argument("empty histogram");
  const auto fn = h.ecdf_at_edges();
  KsBounds b;
  // Mass below the first edge is placed anywhere in (-inf, e_0].
  b.upper = std::max(fn[0], cdf_edges[0]);
  for (std::size_t k = 0; k < fn.size(); ++k) {
    b.lower = std::max(b.lower, std::abs(fn[k] - cdf_edges[k]));
  }
  for (std::size_t k = 0; k + 1 < fn.size(); ++k) {
    b.upper = std::max({b.upper, fn[k + 1] - cdf_edges[k],
                        cdf_edges[k + 1] - fn[k]});
  }
  b.upper = std::max({b.upper, 1.0 - fn.back(), 1.0 - cdf_edges.back()});
  b.upper = std::min(b.upper, 1.0);
  return b;
}

template <class Cdf>
  requires(!std::same_as<std::remove_cvref_t<Cdf>, PiecewiseDensity>)
KsBounds ks_bounds_fn(const Histogram& h, Cdf&& cdf) {
  std::vector<double> f;
  f.reserve(h.edges().size());
  for (double e : h.edges()) f.push_back(cdf(e));
  return ks_bounds(h, f);
}

inline KsBounds ks_bounds(const Histogram& h, const PiecewiseDensity& density) {
  return ks_bounds(h, density.cdf_at(h.edges()));
}

/// Two histograms on identical edges.
inline KsBounds ks_bounds(const Histogram& x, const Histogram& y) {
  if (!std::equal(x.edges().begin(), x.edges().end(), y.edges().begin(),
                  y.edges().end())) {
    throw std::invalid_argument("histograms must share their edges");
  }
  if (x.total() == 0 || y.total() == 0) {
    throw std::invalid_argument("empty histogram");
  }
  const auto fx = x.ecdf_at_edges();
  const auto fy = y.ecdf_at_edges();
  KsBounds b;
  b.upper = std::max(fx[0], fy[0]);
  for (std::size_t k = 0; k < fx.size(); ++k) {
    b.lower = std::max(b.lower, std::abs(fx[k] - fy[k]));
  }
  for (std::size_t k = 0; k + 1 < fx.size(); ++k) {
    b.upper = std::max({b.upper, fx[k + 1] - fy[k], fy[k + 1] - fx[k]});
  }
  b.upper = std::max({b.upper, 1.0 - fx.back(), 1.0 - fy.back()});
  b.upper = std::min(b.upper, 1.0);
  return b;
}

// --------------------------------------------------------------------------
// Side recovery

struct RecoveryConfig {
  /// Dyadic bin count over (0, max sample].
  std::size_t bins = 4096;
  /// Window half-widths as fractions of the sample maximum.
  std::vector<double> window_fractions{1.0 / 50, 1.0 / 100, 1.0 / 200};
  std::size_t min_window_bins = 3;
  double threshold = 5.0;
  /// Candidates scoring below this fraction of the strongest one are
  /// treated as side lobes of a stronger feature.
  double relative_threshold = 0.25;
  /// Largest relative gap between the sample mean and the mean free path
  /// of the inferred box tolerated when some sides had to be inferred as
  /// repeated.
  double mean_tolerance = 0.05;
};

struct DetectedBreakpoint {
  double location;
  double score;
  int multiplicity = 1;
};

struct RecoveryReport {
  bool sufficient = false;
  std::string message;
  std::size_t dimension = 0;
  std::size_t sample_count = 0;
  double sample_mean = 0.0;
  /// Ascending detected locations (top `dimension` by score).
  std::vector<DetectedBreakpoint> breakpoints;
  /// Every local maximum above threshold, before truncation.
  std::vector<DetectedBreakpoint> candidates;
  /// Ascending, with repeated sides expanded.
  std::vector<double> sides;
  double predicted_mean = 0.0;
  double mean_residual = 0.0;
  double bin_width = 0.0;
};

namespace detail {

/// Weights w_j such that sum_j w_j y_j is the least-squares line through
/// (x_j, y_j), x_j = j + 1/2, evaluated at x = 0.
inline std::vector<double> intercept_weights(std::size_t m) {
  const double md = static_cast<double>(m);
  const double xbar = md / 2.0;
  double sxx = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double dx = static_cast<double>(j) + 0.5 - xbar;
    sxx += dx * dx;
  }
  std::vector<double> w(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double dx = static_cast<double>(j) + 0.5 - xbar;
    w[j] = 1.0 / md - xbar * dx / sxx;
  }
  return w;
}

/// Score at every interior edge k (between bin k-1 and bin k): one-sided
/// linear extrapolations of the bin counts to the edge from the right and
/// from the left, differenced and divided by their Poisson standard error.
inline std::vector<double> edge_scores(std::span<const std::uint64_t> counts,
                                       std::size_t m) {
  const std::size_t bins = counts.size();
  std::vector<double> score(bins + 1, -std::numeric_limits<double>::infinity());
  if (bins < 2 * m) return score;
  const auto w = intercept_weights(m);
  for (std::size_t k = m; k + m <= bins; ++k) {
    double right = 0.0, left = 0.0, var = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double yr = static_cast<double>(counts[k + j]);
      const double yl = static_cast<double>(counts[k - 1 - j]);
      right += w[j] * yr;
      left += w[j] * yl;
      var += w[j] * w[j] * (std::max(yr, 1.0) + std::max(yl, 1.0));
    }
    score[k] = (right - left) / std::sqrt(var);
  }
  return score;
}

/// Multiplicity vectors: compositions of n into k positive parts.
inline void compositions(int n, int k, std::vector<int>& cur,
                         std::vector<std::vector<int>>& out) {
  if (k == 1) {
    cur.push_back(n);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int first = 1; first <= n - k + 1; ++first) {
    cur.push_back(first);
    compositions(n - first, k - 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

/// Recovery from a histogram with uniform bins starting at 0, plus the
/// exact sample mean. `dimension` is 2 or 3.
inline RecoveryReport recover_sides(const Histogram& hist, double sample_mean,
                                    std::size_t dimension,
                                    const RecoveryConfig& cfg = {}) {
  if (dimension < 2) throw std::invalid_argument("dimension must be >= 2");
  if (!hist.is_uniform() || hist.edges().front() != 0.0) {
    throw std::invalid_argument("recovery needs uniform bins starting at 0");
  }
  if (cfg.window_fractions.empty()) {
    throw std::invalid_argument("at least one window is required");
  }
  RecoveryReport rep;
  rep.dimension = dimension;
  rep.sample_count = hist.total();
  rep.sample_mean = sample_mean;
  const std::size_t bins = hist.bins();
  const double span = hist.edges().back();
  rep.bin_width = span / static_cast<double>(bins);

  std::vector<double> combined(bins + 1,
                               -std::numeric_limits<double>::infinity());
  std::size_t smallest = bins;
  std::size_t largest = 0;
  for (double frac : cfg.window_fractions) {
    const auto m = std::max<std::size_t>(
        cfg.min_window_bins,
        static_cast<std::size_t>(std::llround(frac * static_cast<double>(bins))));
    smallest = std::min(smallest, m);
    largest = std::max(largest, m);
    const auto s = detail::edge_scores(hist.counts(), m);
    for (std::size_t k = 0; k <= bins; ++k) {
      combined[k] = std::max(combined[k], s[k]);
    }
  }

  // Local maxima, first one wins on ties. A singular spike sitting at the
  // far end of a left window drags its extrapolation down and leaves a
  // secondary peak one window further on, so the suppression radius spans
  // the largest window plus the smallest.
  const std::size_t radius = largest + smallest;
  for (std::size_t k = 0; k <= bins; ++k) {
    if (!(combined[k] > cfg.threshold)) continue;
    const std::size_t lo = k >= radius ? k - radius : 0;
    const std::size_t hi = std::min(bins, k + radius);
    bool peak = true;
    for (std::size_t j = lo; j <= hi && peak; ++j) {
      if (j < k && combined[j] >= combined[k]) peak = false;
      if (j > k && combined[j] > combined[k]) peak = false;
    }
    if (peak) {
      rep.candidates.push_back(
          {rep.bin_width * static_cast<double>(k), combined[k], 1});
    }
  }

  double strongest = 0.0;
  for (const auto& c : rep.candidates) strongest = std::max(strongest, c.score);
  std::vector<DetectedBreakpoint> top;
  for (const auto& c : rep.candidates) {
    if (c.score >= cfg.relative_threshold * strongest) top.push_back(c);
  }
  std::sort(top.begin(), top.end(),
            [](const auto& x, const auto& y) { return x.score > y.score; });
  if (top.size() > dimension) top.resize(dimension);
  std::sort(top.begin(), top.end(), [](const auto& x, const auto& y) {
    return x.location < y.location;
  });
  rep.breakpoints = top;

  if (top.empty()) {
    rep.message = "insufficient evidence: no significant breakpoint";
    return rep;
  }

  // Distribute `dimension` sides over the detected locations. With as many
  // locations as sides this is forced; otherwise pick the multiplicities
  // whose mean free path best matches the sample mean.
  std::vector<std::vector<int>> options;
  std::vector<int> cur;
  detail::compositions(static_cast<int>(dimension),
                       static_cast<int>(top.size()), cur, options);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& mult : options) {
    std::vector<double> sides;
    for (std::size_t i = 0; i < top.size(); ++i) {
      sides.insert(sides.end(), static_cast<std::size_t>(mult[i]),
                   top[i].location);
    }
    const double predicted = mean_free_path(BoxDims(sides));
    const double resid = std::abs(sample_mean - predicted) / predicted;
    if (resid < best) {
      best = resid;
      rep.sides = sides;
      rep.predicted_mean = predicted;
      rep.mean_residual = resid;
      for (std::size_t i = 0; i < top.size(); ++i) {
        rep.breakpoints[i].multiplicity = mult[i];
      }
    }
  }

  if (top.size() < dimension && rep.mean_residual > cfg.mean_tolerance) {
    rep.sufficient = false;
    rep.sides.clear();
    rep.message =
        "insufficient evidence: " + std::to_string(top.size()) +
        " breakpoint(s) found and no multiplicity assignment matches the "
        "sample mean";
    return rep;
  }
  rep.sufficient = true;
  rep.message = "recovered " + std::to_string(dimension) + " sides from " +
                std::to_string(top.size()) + " breakpoint(s)";
  return rep;
}

/// Bins the sample on (0, max] and recovers `dimension` sides.
inline RecoveryReport recover_sides(const EcdfSummary& sample,
                                    std::size_t dimension,
                                    const RecoveryConfig& cfg = {}) {
  detail::require_nonempty(sample);
  if (sample.sorted().front() < 0.0) {
    throw std::invalid_argument("lengths must be non-negative");
  }
  const double top = sample.max();
  if (!(top > 0.0)) {
    RecoveryReport rep;
    rep.dimension = dimension;
    rep.sample_count = sample.count();
    rep.message = "insufficient evidence: all lengths are zero";
    return rep;
  }
  Histogram h = Histogram::uniform(0.0, top, cfg.bins);
  for (double x : sample.sorted()) h.add(x);
  return recover_sides(h, sample.mean(), dimension, cfg);
}

inline RecoveryReport recover_sides_2d(const EcdfSummary& sample,
                                       const RecoveryConfig& cfg = {}) {
  return recover_sides(sample, 2, cfg);
}

inline RecoveryReport recover_sides_3d(const EcdfSummary& sample,
                                       const RecoveryConfig& cfg = {}) {
  return recover_sides(sample, 3, cfg);
}

}  // namespace chordstats
