// Acceptance checks AC1..AC16. One PASS/FAIL line per criterion; the exit
// status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "chordstats/chordstats.hpp"

using namespace chordstats;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void check(const char* id, const char* title, double time_limit,
           const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_limit > 0 && secs > time_limit) {
    o.pass = false;
    o.detail += "; over time limit " + std::to_string(time_limit) + " s";
  }
  if (!o.pass) ++failures;
  std::printf("%s %s: %s [%s] (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, title,
              o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

BoxDims random_box(Rng& rng, std::size_t n) {
  std::vector<double> s(n);
  for (double& x : s) x = 0.2 + 4.8 * rng.uniform();
  return BoxDims(std::move(s));
}

constexpr std::size_t kKsBins = std::size_t{1} << 18;

Histogram fine_histogram(const BoxDims& box) {
  return Histogram::uniform(0.0, diag(box), kKsBins);
}

// Shared between AC6/AC7 and AC9.
std::optional<Histogram> spreading_12, spreading_346;

Histogram run_spreading(const BoxDims& box, std::uint64_t seed) {
  ParticleRun run{100000, TotalDistance{1000.0}, origin_start(box.dimension()),
                  seed, 0};
  return accumulate_particles(box, run, fine_histogram(box));
}

}  // namespace

int main() {
  check("AC1", "mean free path of the unit cube", 5.0, [] {
    const BoxDims box({1, 1, 1});
    const double exact = mean_free_path(box);
    const double sampled = accumulate_chords(box, 1000000, 101,
                                             Histogram::uniform(0, diag(box), 64))
                               .mean();
    const bool ok = exact == 2.0 / 3.0 && std::abs(sampled - exact) < 0.002;
    return Outcome{ok, "closed form " + fmt("%.17g", exact) + ", chord mean " +
                           fmt("%.6f", sampled)};
  });

  check("AC2", "mean free path of the 1x2 rectangle", 1.0, [] {
    const BoxDims box({1, 2});
    const double m = mean_free_path(box);
    const double e1 = std::abs(mean_free_path_sphere_ratio(box) - pi / 3);
    const double e2 = std::abs(mean_free_path_gamma(box) - pi / 3);
    const double e3 = std::abs(density_X_2d(box).mean() - m);
    const bool ok = std::abs(m - pi / 3) < 1e-12 && e1 < 1e-12 && e2 < 1e-12 && e3 < 1e-6;
    return Outcome{ok, "form errors " + fmt("%.1e", e1) + ", " + fmt("%.1e", e2) +
                           "; first moment error " + fmt("%.1e", e3)};
  });

  check("AC3", "constant branch of pdf_X_2d", 0, [] {
    const BoxDims box({1, 2});
    double worst = 0.0;
    for (int i = 1; i <= 100; ++i) {
      worst = std::max(worst, std::abs(pdf_X_2d(box, i / 101.0) - 1.0 / 3.0));
    }
    return Outcome{worst <= 1e-15, "max deviation " + fmt("%.1e", worst)};
  });

  check("AC4", "constant branch of pdf_Y_2d", 0, [] {
    const BoxDims box({1, 2});
    double worst = 0.0;
    for (int i = 1; i <= 100; ++i) {
      worst = std::max(worst, std::abs(pdf_Y_2d(box, i / 101.0) - 0.32553));
    }
    return Outcome{worst < 1e-4, "value " + fmt("%.7f", pdf_Y_2d(box, 0.5)) +
                                     ", max deviation " + fmt("%.1e", worst)};
  });

  check("AC5", "normalization on random boxes", 30.0, [] {
    Rng rng(105, stream_id(StreamPurpose::Test, 5));
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const BoxDims b2 = random_box(rng, 2);
      const BoxDims b3 = random_box(rng, 3);
      worst = std::max(worst, std::abs(density_X_2d(b2).total_mass() - 1.0));
      worst = std::max(worst, std::abs(density_Y_2d(b2).total_mass() - 1.0));
      worst = std::max(worst, std::abs(density_X_3d(b3).total_mass() - 1.0));
    }
    return Outcome{worst < 1e-8, "max |mass - 1| " + fmt("%.1e", worst)};
  });

  check("AC6", "spreading simulation vs cdf_X_2d, box 1x2", 0, [] {
    const BoxDims box({1, 2});
    spreading_12 = run_spreading(box, 106);
    const auto ks = ks_bounds(*spreading_12, density_X_2d(box));
    return Outcome{ks.upper < 0.01, "KS <= " + fmt("%.5f", ks.upper) + " (edges " +
                                        fmt("%.5f", ks.lower) + "), " +
                                        std::to_string(spreading_12->total()) +
                                        " lengths"};
  });

  check("AC7", "spreading simulation vs cdf_X_3d, box 3x4x6", 0, [] {
    const BoxDims box({3, 4, 6});
    spreading_346 = run_spreading(box, 107);
    const auto ks = ks_bounds(*spreading_346, density_X_3d(box));
    return Outcome{ks.upper < 0.01, "KS <= " + fmt("%.5f", ks.upper) + " (edges " +
                                        fmt("%.5f", ks.lower) + "), " +
                                        std::to_string(spreading_346->total()) +
                                        " lengths"};
  });

  check("AC8", "absorption simulation vs cdf of pdf_Y_2d, box 1x2", 0, [] {
    const BoxDims box({1, 2});
    ParticleRun run{100000, BounceCount{1000}, origin_start(2), 108, 0};
    const auto h = accumulate_particles(box, run, fine_histogram(box));
    const auto ks = ks_bounds(h, density_Y_2d(box));
    return Outcome{ks.upper < 0.01, "KS <= " + fmt("%.5f", ks.upper) + " (edges " +
                                        fmt("%.5f", ks.lower) + ")"};
  });

  check("AC9", "chord sampler vs spreading simulation, two-sample", 0, [] {
    std::string detail;
    bool ok = true;
    const std::pair<BoxDims, const std::optional<Histogram>*> cases[] = {
        {BoxDims({1, 2}), &spreading_12}, {BoxDims({3, 4, 6}), &spreading_346}};
    std::uint64_t seed = 109;
    for (const auto& [box, sim] : cases) {
      if (!sim->has_value()) return Outcome{false, "spreading histogram missing"};
      const auto chords = accumulate_chords(box, 1000000, seed++, fine_histogram(box));
      const auto ks = ks_bounds(chords, **sim);
      ok = ok && ks.upper < 0.02;
      detail += (detail.empty() ? "" : ", ") + std::string(box.dimension() == 2 ? "1x2" : "3x4x6") +
                " KS <= " + fmt("%.5f", ks.upper);
    }
    return Outcome{ok, detail};
  });

  check("AC10", "cdf_X_3d by density quadrature vs spherical quadrature", 0, [] {
    double worst = 0.0;
    for (const auto& box : {BoxDims({3, 4, 6}), BoxDims({1, 1, 1})}) {
      const auto d = density_X_3d(box);
      std::vector<double> t;
      for (int i = 1; i <= 50; ++i) t.push_back(diag(box) * i / 51.0);
      const auto f = d.cdf_at(t);
      for (std::size_t i = 0; i < t.size(); ++i) {
        worst = std::max(worst, std::abs(f[i] - cdf_X_3d_spherical(box, t[i])));
      }
    }
    return Outcome{worst < 1e-5, "max difference " + fmt("%.1e", worst)};
  });

  check("AC11", "general-dimension cdf vs closed forms", 0, [] {
    double worst_z = 0.0;
    for (const auto& box : {BoxDims({1, 2}), BoxDims({3, 4, 6})}) {
      const SphereCdfEstimator est(box, 1000000, 111);
      const auto d = box.dimension() == 2 ? density_X_2d(box) : density_X_3d(box);
      std::vector<double> t;
      for (int i = 1; i <= 20; ++i) t.push_back(diag(box) * i / 21.0);
      const auto f = d.cdf_at(t);
      for (std::size_t i = 0; i < t.size(); ++i) {
        const auto e = est.cdf(t[i]);
        const double z = std::abs(e.value - f[i]) / e.standard_error;
        worst_z = std::max(worst_z, z);
      }
    }
    return Outcome{worst_z < 3.0, "max |error| / SE " + fmt("%.2f", worst_z)};
  });

  check("AC12", "positive-orthant integral of v_n", 0, [] {
    bool ok = std::abs(positive_orthant_vn_integral(2) - 1.0) < 1e-12 &&
              std::abs(positive_orthant_vn_integral(3) - pi / 4) < 1e-12;
    double worst_z = 0.0;
    for (std::size_t n = 2; n <= 6; ++n) {
      const auto mc = positive_orthant_vn_integral_mc(n, 1000000, 112);
      worst_z = std::max(worst_z, std::abs(mc.value - positive_orthant_vn_integral(n)) /
                                      mc.standard_error);
    }
    ok = ok && worst_z < 3.0;
    return Outcome{ok, "max |error| / SE " + fmt("%.2f", worst_z)};
  });

  check("AC13", "singular + smooth parts of pdf_Y_2d", 0, [] {
    Rng rng(113, stream_id(StreamPurpose::Test, 13));
    double worst = 0.0;
    for (int b = 0; b < 10; ++b) {
      const BoxDims box = random_box(rng, 2);
      for (int i = 1; i <= 1000; ++i) {
        const double t = diag(box) * i / 1001.0;
        const double whole = pdf_Y_2d(box, t);
        worst = std::max(worst, std::abs(pdf_Y_singular(box, t) +
                                         pdf_Y_smooth(box, t) - whole) /
                                    std::max(1.0, whole));
      }
    }
    return Outcome{worst < 1e-9, "max difference " + fmt("%.1e", worst)};
  });

  check("AC14", "side recovery from spreading samples", 300.0, [] {
    struct Case {
      BoxDims box;
      std::size_t target;
      double tolerance;
    };
    const Case cases[] = {{BoxDims({1, 2}), 1000000, 0.02},
                          {BoxDims({3, 4, 6}), 10000000, 0.03}};
    bool ok = true;
    std::string detail;
    std::uint64_t seed = 114;
    for (const auto& c : cases) {
      // Enough particles for the requested sample size at R = 1000.
      const double per_particle = 1000.0 / mean_free_path(c.box);
      const auto particles =
          static_cast<std::size_t>(std::ceil(1.05 * c.target / per_particle));
      const auto s = sample_spreading(c.box, particles, 1000.0, UniformInBox{}, seed++);
      std::vector<double> lengths(s.lengths.begin(),
                                  s.lengths.begin() +
                                      static_cast<std::ptrdiff_t>(std::min(c.target, s.size())));
      const auto rep = recover_sides(EcdfSummary(std::move(lengths)), c.box.dimension());
      const auto truth = c.box.sorted();
      std::string sides;
      bool case_ok = rep.sufficient && rep.sides.size() == truth.size();
      for (std::size_t i = 0; i < rep.sides.size(); ++i) {
        sides += (i ? "," : "") + fmt("%.4f", rep.sides[i]);
        if (i < truth.size()) {
          case_ok = case_ok && std::abs(rep.sides[i] - truth[i]) <= c.tolerance * truth[i];
        }
      }
      ok = ok && case_ok;
      detail += (detail.empty() ? "" : "; ") + std::to_string(std::min(c.target, s.size())) +
                " samples -> (" + sides + ")";
    }
    return Outcome{ok, detail};
  });

  check("AC15", "singularity and jump structure", 0, [] {
    const BoxDims b2({1, 2});
    std::vector<double> scaled;
    for (int k = 4; k <= 8; ++k) {
      const double eps = std::pow(10.0, -k);
      scaled.push_back(pdf_X_2d(b2, 1.0 + eps) * std::sqrt(eps));
    }
    double worst_ratio = 0.0;
    bool ok = true;
    for (std::size_t i = 1; i < scaled.size(); ++i) {
      ok = ok && scaled[i] > 0;
      worst_ratio = std::max(worst_ratio, std::abs(scaled[i] / scaled[i - 1] - 1.0));
    }
    ok = ok && worst_ratio < 0.05;
    const BoxDims b3({3, 4, 6});
    double min_jump = INFINITY;
    for (double s : {3.0, 4.0, 6.0}) {
      min_jump = std::min(min_jump, pdf_X_3d(b3, s * (1 + 1e-12)) - pdf_X_3d(b3, s * (1 - 1e-12)));
    }
    ok = ok && min_jump > 0;
    double worst_gap = 0.0;
    for (double d : {5.0, std::hypot(3.0, 6.0), std::hypot(4.0, 6.0)}) {
      worst_gap = std::max(worst_gap, std::abs(pdf_X_3d(b3, d * (1 + 1e-12)) -
                                               pdf_X_3d(b3, d * (1 - 1e-12))));
    }
    ok = ok && worst_gap < 1e-6;
    return Outcome{ok, "sqrt-scaled ratio drift " + fmt("%.1e", worst_ratio) +
                           ", smallest jump " + fmt("%.4f", min_jump) +
                           ", diagonal gap " + fmt("%.1e", worst_gap)};
  });

  check("AC16", "skew-box ratio pdf_Y/pdf_X at b/2", 0, [] {
    std::string detail;
    double prev = 0.0;
    bool ok = true;
    for (double b : {10.0, 100.0, 1000.0}) {
      const BoxDims box({1, b});
      const double r = pdf_Y_2d(box, b / 2) / pdf_X_2d(box, b / 2);
      ok = ok && r > prev;
      prev = r;
      detail += (detail.empty() ? "" : ", ") + fmt("%.4f", r);
    }
    return Outcome{ok, "ratios " + detail};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
