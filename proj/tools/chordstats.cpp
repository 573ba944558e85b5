// chordstats command-line tool.
//
// Exit codes: 0 success, 1 usage, 2 computation failure or insufficient
// evidence (including a KS statistic above the threshold in `compare`),
// 3 I/O failure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chordstats/chordstats.hpp"

namespace cs = chordstats;
using cs::io::Json;

namespace {

constexpr double kAutoHistogramRows = 1e7;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ComputationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(cs::io::parse_double(item));
    } catch (const cs::io::IoError&) {
      throw UsageError(std::string("bad ") + what + ": '" + text + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string("empty ") + what);
  return out;
}

cs::BoxDims parse_box(const std::string& text) {
  try {
    return cs::BoxDims(parse_list(text, "box"));
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("invalid box: ") + e.what());
  }
}

cs::StartPolicy parse_start(const std::string& text, const cs::BoxDims& box) {
  if (text == "origin") return cs::origin_start(box.dimension());
  if (text == "uniform") return cs::UniformInBox{};
  auto p = parse_list(text, "start point");
  if (p.size() != box.dimension() || !box.contains(p)) {
    throw UsageError("start point must lie in the box");
  }
  return cs::FixedPoint{std::move(p)};
}

std::vector<double> parse_grid(const std::string& text, double diag) {
  if (text.empty()) {
    std::vector<double> g(1001);
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] = diag * static_cast<double>(i) / 1000.0;
    }
    return g;
  }
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw UsageError("grid must be lo:hi:step");
  double lo, hi, step;
  try {
    lo = cs::io::parse_double(parts[0]);
    hi = cs::io::parse_double(parts[1]);
    step = cs::io::parse_double(parts[2]);
  } catch (const cs::io::IoError&) {
    throw UsageError("bad grid '" + text + "'");
  }
  if (!(step > 0.0) || !(hi >= lo)) {
    throw UsageError("grid needs lo <= hi and step > 0");
  }
  const auto count =
      static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (count > 50'000'000) throw UsageError("grid has too many points");
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) {
    g[i] = lo + step * static_cast<double>(i);
  }
  return g;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw cs::io::IoError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  bool to_stdout() const { return !file_; }
  void close() {
    stream().flush();
    if (!stream()) throw cs::io::IoError("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

// -------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string box;
  std::string model;
  std::optional<std::uint64_t> particles;
  std::optional<double> distance;
  std::optional<std::uint64_t> bounces;
  std::optional<std::uint64_t> count;
  std::uint64_t seed = 0;
  std::string start = "uniform";
  std::string emit = "auto";
  std::size_t bins = 200;
  std::string output;
  std::string format = "csv";
  unsigned threads = 0;
};

int run_simulate(const SimulateArgs& a) {
  const cs::BoxDims box = parse_box(a.box);
  const cs::SampleModel model = [&] {
    try {
      return cs::sample_model_from_string(a.model);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }();
  const auto fmt = cs::io::format_from_string(a.format);
  if (a.bins < 1) throw UsageError("--bins must be at least 1");

  double expected_rows = 0.0;
  cs::SampleMeta meta;
  meta.model = model;
  meta.box.assign(box.sides().begin(), box.sides().end());
  meta.seed = a.seed;
  cs::ParticleRun run;
  switch (model) {
    case cs::SampleModel::SpreadingSim:
      if (!a.particles || !a.distance || a.bounces || a.count) {
        throw UsageError("spreading needs --particles and --distance only");
      }
      run.termination = cs::TotalDistance{*a.distance};
      expected_rows = static_cast<double>(*a.particles) * *a.distance /
                      cs::mean_free_path(box);
      meta.termination = *a.distance;
      break;
    case cs::SampleModel::AbsorptionSim:
      if (!a.particles || !a.bounces || a.distance || a.count) {
        throw UsageError("absorption needs --particles and --bounces only");
      }
      run.termination = cs::BounceCount{*a.bounces};
      expected_rows =
          static_cast<double>(*a.particles) * static_cast<double>(*a.bounces);
      meta.termination = static_cast<double>(*a.bounces);
      break;
    case cs::SampleModel::LineEnsemble:
      if (!a.count || a.particles || a.distance || a.bounces) {
        throw UsageError("chords needs --count only");
      }
      expected_rows = static_cast<double>(*a.count);
      meta.termination = static_cast<double>(*a.count);
      break;
  }
  if (model != cs::SampleModel::LineEnsemble) {
    run.particles = *a.particles;
    run.start = parse_start(a.start, box);
    run.seed = a.seed;
    run.threads = a.threads;
    meta.particles = *a.particles;
    meta.start = cs::detail::describe_start(run.start);
    if (model == cs::SampleModel::SpreadingSim && *a.distance <= cs::diag(box)) {
      meta.warnings.push_back(
          "travel distance does not exceed the box diagonal");
    }
  } else {
    meta.particles = *a.count;
    meta.start = "none";
  }

  bool histogram = a.emit == "histogram";
  if (a.emit == "auto") {
    histogram = expected_rows > kAutoHistogramRows;
    if (histogram) {
      std::cerr << "note: about " << static_cast<std::uint64_t>(expected_rows)
                << " lengths expected; writing a " << a.bins
                << "-bin histogram (use --emit raw to override)\n";
    }
  } else if (a.emit != "raw" && a.emit != "histogram") {
    throw UsageError("--emit must be raw, histogram or auto");
  }
  for (const auto& w : meta.warnings) std::cerr << "warning: " << w << '\n';

  Output out(a.output);
  if (histogram) {
    const auto proto = cs::Histogram::uniform(0.0, cs::diag(box), a.bins);
    const cs::Histogram h =
        model == cs::SampleModel::LineEnsemble
            ? cs::accumulate_chords(box, *a.count, a.seed, proto, a.threads)
            : cs::accumulate_particles(box, run, proto);
    cs::io::write_histogram(out.stream(), meta, h, fmt);
  } else {
    const std::vector<double> lengths =
        model == cs::SampleModel::LineEnsemble
            ? cs::accumulate_chords(box, *a.count, a.seed,
                                    cs::LengthCollector{}, a.threads)
                  .lengths
            : cs::accumulate_particles(box, run, cs::LengthCollector{}).lengths;
    cs::io::write_raw(out.stream(), meta, lengths, fmt);
  }
  out.close();
  return 0;
}

// -------------------------------------------------------------------------
// pdf / cdf

struct CurveArgs {
  std::string box;
  std::string model;
  std::string grid;
  std::string output;
  std::string format = "csv";
  std::size_t points = 1u << 20;
  std::uint64_t seed = 1;
};

void require_model_dimension(const std::string& model, const cs::BoxDims& box) {
  const std::size_t n = box.dimension();
  if (model == "X2d" && n != 2) throw UsageError("X2d needs a 2D box");
  if (model == "X3d" && n != 3) throw UsageError("X3d needs a 3D box");
  if (model == "Y2d" && n != 2) {
    throw UsageError(
        "the absorption model Y has a closed form only for 2D boxes");
  }
  if (model != "X2d" && model != "X3d" && model != "Y2d" &&
      model != "general-n") {
    throw UsageError("--model must be X2d, X3d, Y2d or general-n");
  }
}

std::optional<cs::PiecewiseDensity> density_for(const std::string& model,
                                                const cs::BoxDims& box) {
  if (model == "X2d") return cs::density_X_2d(box);
  if (model == "X3d") return cs::density_X_3d(box);
  if (model == "Y2d") return cs::density_Y_2d(box);
  return std::nullopt;
}

Json breakpoints_json(const cs::PiecewiseDensity& d) {
  Json arr = Json::array();
  for (const auto& b : d.breakpoints()) {
    arr.push_back({{"location", b.location},
                   {"kind", cs::to_string(b.kind)},
                   {"multiplicity", b.multiplicity}});
  }
  return arr;
}

int run_curve(const CurveArgs& a, bool is_pdf) {
  const cs::BoxDims box = parse_box(a.box);
  require_model_dimension(a.model, box);
  const auto fmt = cs::io::format_from_string(a.format);
  if (is_pdf && a.model == "general-n") {
    throw UsageError(
        "no closed-form density in general dimension; use `cdf` instead");
  }
  const double d = cs::diag(box);
  std::vector<double> t;
  for (double x : parse_grid(a.grid, d)) {
    // pdf lives on (0, diag], cdf on [0, diag].
    if (x > d || x < 0.0 || (is_pdf && x == 0.0)) continue;
    t.push_back(x);
  }

  Json meta;
  meta["kind"] = is_pdf ? "pdf" : "cdf";
  meta["model"] = a.model;
  meta["box"] = std::vector<double>(box.sides().begin(), box.sides().end());
  meta["support_end"] = d;
  std::vector<double> v(t.size());
  if (const auto dens = density_for(a.model, box)) {
    meta["breakpoints"] = breakpoints_json(*dens);
    if (is_pdf) {
      for (std::size_t i = 0; i < t.size(); ++i) v[i] = (*dens)(t[i]);
    } else if (a.model == "X2d") {
      for (std::size_t i = 0; i < t.size(); ++i) v[i] = cs::cdf_X_2d(box, t[i]);
    } else {
      // Ascending pass so each value extends the previous integral.
      std::vector<std::size_t> order(t.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(),
                [&](auto i, auto j) { return t[i] < t[j]; });
      std::vector<double> sorted(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) sorted[i] = t[order[i]];
      const auto f = dens->cdf_at(sorted);
      for (std::size_t i = 0; i < t.size(); ++i) v[order[i]] = f[i];
    }
  } else {
    const cs::SphereCdfEstimator est(box, a.points, a.seed);
    double worst_se = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto e = est.cdf(t[i]);
      v[i] = e.value;
      worst_se = std::max(worst_se, e.standard_error);
    }
    meta["monte_carlo_points"] = a.points;
    meta["seed"] = a.seed;
    meta["max_standard_error"] = worst_se;
  }
  Output out(a.output);
  cs::io::write_table(out.stream(), meta, t, v, fmt);
  out.close();
  return 0;
}

// -------------------------------------------------------------------------
// compare

struct CompareArgs {
  std::string sample;
  std::string model;
  std::string box;
  double threshold = 0.01;
  std::size_t bins = 200;
  std::string output;
};

cs::io::SampleFile load(const std::string& path) {
  auto f = cs::io::read_sample_file(path);
  if (f.count() == 0) throw ComputationError("sample '" + path + "' is empty");
  return f;
}

int run_compare(const CompareArgs& a) {
  auto file = load(a.sample);
  if (file.meta.box.empty()) throw ComputationError("sample has no box");
  const cs::BoxDims box(file.meta.box);
  if (!a.box.empty()) {
    const cs::BoxDims requested = parse_box(a.box);
    if (!(requested == box)) {
      throw UsageError("box " + a.box + " does not match the sample's box");
    }
  }
  std::string model = a.model;
  if (model.empty()) {
    if (file.meta.model == cs::SampleModel::AbsorptionSim) {
      model = "Y2d";
    } else {
      model = box.dimension() == 2 ? "X2d" : "X3d";
    }
  }
  require_model_dimension(model, box);
  const auto dens = density_for(model, box);
  if (!dens) throw UsageError("compare needs X2d, X3d or Y2d");

  Json report;
  report["sample"] = a.sample;
  report["model"] = model;
  report["box"] = file.meta.box;
  report["count"] = file.count();
  report["threshold"] = a.threshold;

  double ks = 0.0;
  double sample_mean = 0.0;
  const double d = cs::diag(box);
  auto hist = cs::Histogram::uniform(0.0, d, a.bins);
  if (file.is_histogram()) {
    const auto b = cs::ks_bounds(*file.histogram, *dens);
    ks = b.lower;
    report["ks"] = b.lower;
    report["ks_method"] = "histogram-edges";
    report["ks_upper_bound"] = b.upper;
    sample_mean = file.mean.value_or(file.histogram->mean());
    // Residuals on the file's own bins.
    hist = *file.histogram;
  } else {
    const cs::EcdfSummary ecdf(file.lengths, file.meta);
    if (model == "X2d") {
      ks = cs::ks_distance(ecdf, [&](double x) { return cs::cdf_X_2d(box, x); });
    } else {
      ks = cs::ks_distance(ecdf, *dens);
    }
    report["ks"] = ks;
    report["ks_method"] = "exact";
    sample_mean = ecdf.mean();
    for (double x : ecdf.sorted()) hist.add(x);
  }
  const double model_mean =
      model == "Y2d" ? dens->mean() : cs::mean_free_path(box);
  report["sample_mean"] = sample_mean;
  report["model_mean"] = model_mean;
  report["mean_error"] = sample_mean - model_mean;
  report["mean_relative_error"] = (sample_mean - model_mean) / model_mean;

  const auto f = dens->cdf_at(hist.edges());
  const auto counts = hist.counts();
  const double n = static_cast<double>(hist.total());
  Json residuals = Json::array();
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double observed = static_cast<double>(counts[k]) / n;
    const double expected = f[k + 1] - f[k];
    const double se = std::sqrt(std::max(expected * (1.0 - expected), 1e-300) / n);
    residuals.push_back({{"t_lo", hist.edges()[k]},
                         {"t_hi", hist.edges()[k + 1]},
                         {"observed", observed},
                         {"expected", expected},
                         {"z", (observed - expected) / se}});
  }
  report["residuals"] = std::move(residuals);
  const bool pass = ks < a.threshold;
  report["pass"] = pass;

  Output out(a.output);
  out.stream() << report.dump(2) << '\n';
  out.close();
  (out.to_stdout() ? std::cerr : std::cout)
      << "KS " << ks << (pass ? " < " : " >= ") << a.threshold
      << " against " << model << "; sample mean " << sample_mean
      << ", model mean " << model_mean << '\n';
  return pass ? 0 : 2;
}

// -------------------------------------------------------------------------
// recover

struct RecoverArgs {
  std::string sample;
  std::size_t dim = 0;
  std::size_t bins = 4096;
  double threshold = 5.0;
  std::string output;
};

int run_recover(const RecoverArgs& a) {
  auto file = load(a.sample);
  const std::size_t dim = a.dim ? a.dim : file.meta.box.size();
  if (dim < 2) throw UsageError("give --dim (2 or 3)");
  if (file.count() < 10'000) {
    throw ComputationError("recovery needs at least 10^4 lengths, got " +
                           std::to_string(file.count()));
  }
  cs::RecoveryConfig cfg;
  cfg.bins = a.bins;
  cfg.threshold = a.threshold;
  cs::RecoveryReport rep;
  if (file.is_histogram()) {
    const auto& h = *file.histogram;
    if (!h.is_uniform() || h.edges().front() != 0.0) {
      throw ComputationError("histogram bins must be uniform from 0");
    }
    rep = cs::recover_sides(h, file.mean.value_or(h.mean()), dim, cfg);
  } else {
    rep = cs::recover_sides(cs::EcdfSummary(std::move(file.lengths)), dim, cfg);
  }

  Json j;
  j["sufficient"] = rep.sufficient;
  j["message"] = rep.message;
  j["dimension"] = rep.dimension;
  j["sample_count"] = rep.sample_count;
  j["sides"] = rep.sides;
  Json bps = Json::array();
  for (const auto& b : rep.breakpoints) {
    bps.push_back({{"location", b.location},
                   {"score", b.score},
                   {"multiplicity", b.multiplicity}});
  }
  j["breakpoints"] = std::move(bps);
  Json cands = Json::array();
  for (const auto& b : rep.candidates) {
    cands.push_back({{"location", b.location}, {"score", b.score}});
  }
  j["candidates"] = std::move(cands);
  j["sample_mean"] = rep.sample_mean;
  j["predicted_mean"] = rep.predicted_mean;
  j["mean_residual"] = rep.mean_residual;
  j["bin_width"] = rep.bin_width;

  Output out(a.output);
  out.stream() << j.dump(2) << '\n';
  out.close();
  auto& human = out.to_stdout() ? std::cerr : std::cout;
  if (rep.sufficient) {
    human << "recovered sides:";
    for (double s : rep.sides) human << ' ' << s;
    human << '\n';
  } else {
    human << rep.message << '\n';
  }
  return rep.sufficient ? 0 : 2;
}

// -------------------------------------------------------------------------
// mean

struct MeanArgs {
  std::string box;
  std::string format = "csv";
};

int run_mean(const MeanArgs& a) {
  const cs::BoxDims box = parse_box(a.box);
  const auto fmt = cs::io::format_from_string(a.format);
  const double m = cs::mean_free_path(box);
  if (fmt == cs::io::Format::Json) {
    Json j;
    j["box"] = std::vector<double>(box.sides().begin(), box.sides().end());
    j["mean_free_path"] = m;
    j["sphere_ratio_form"] = cs::mean_free_path_sphere_ratio(box);
    j["gamma_form"] = cs::mean_free_path_gamma(box);
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << cs::io::format_double(m) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Free path lengths of billiards in rectangular boxes"};
  app.set_version_flag("--version", std::string(cs::version));
  app.set_config("--config", "", "key=value file; [verb] sections allowed");
  // Keep `box = 1,2` a single value in config files.
  app.get_config_formatter_base()->arrayDelimiter(';');
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Sample bounce or chord lengths");
  simulate->add_option("--box", sim.box, "Side lengths, e.g. 1,2")->required();
  simulate->add_option("--model", sim.model, "spreading | absorption | chords")
      ->required();
  simulate->add_option("--particles", sim.particles, "Particle count M");
  simulate->add_option("--distance", sim.distance, "Travel distance R");
  simulate->add_option("--bounces", sim.bounces, "Bounce count N");
  simulate->add_option("--count", sim.count, "Chord count");
  simulate->add_option("--seed", sim.seed, "Master seed")->required();
  simulate->add_option("--start", sim.start, "origin | uniform | x,y[,z]")
      ->capture_default_str();
  simulate->add_option("--emit", sim.emit, "raw | histogram | auto")
      ->capture_default_str();
  simulate->add_option("--bins", sim.bins, "Histogram bins over (0, diag]")
      ->capture_default_str();
  simulate->add_option("-o,--output", sim.output, "Output file (default stdout)");
  simulate->add_option("--format", sim.format, "csv | json")->capture_default_str();
  simulate->add_option("--threads", sim.threads, "Worker threads (0 = all)");

  CurveArgs pdf_args, cdf_args;
  auto add_curve = [&](const char* name, const char* help, CurveArgs& c) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--box", c.box, "Side lengths")->required();
    sub->add_option("--model", c.model, "X2d | X3d | Y2d | general-n")->required();
    sub->add_option("--grid", c.grid, "lo:hi:step (default 1001 points on [0, diag])");
    sub->add_option("-o,--output", c.output, "Output file (default stdout)");
    sub->add_option("--format", c.format, "csv | json")->capture_default_str();
    sub->add_option("--points", c.points, "Monte Carlo directions (general-n)")
        ->capture_default_str();
    sub->add_option("--seed", c.seed, "Seed for general-n")->capture_default_str();
    return sub;
  };
  auto* pdf = add_curve("pdf", "Tabulate a density", pdf_args);
  auto* cdf = add_curve("cdf", "Tabulate a distribution function", cdf_args);

  CompareArgs cmp;
  auto* compare = app.add_subcommand("compare", "KS distance of a sample to a model");
  compare->add_option("sample", cmp.sample, "Sample file")->required();
  compare->add_option("--model", cmp.model, "X2d | X3d | Y2d (default from sample)");
  compare->add_option("--box", cmp.box, "Expected box; must match the sample");
  compare->add_option("--threshold", cmp.threshold, "Pass if KS is below this")
      ->capture_default_str();
  compare->add_option("--bins", cmp.bins, "Residual bins for raw samples")
      ->capture_default_str();
  compare->add_option("-o,--output", cmp.output, "Report file (default stdout)");

  RecoverArgs rec;
  auto* recover = app.add_subcommand("recover", "Infer box sides from a sample");
  recover->add_option("sample", rec.sample, "Sample file")->required();
  recover->add_option("--dim", rec.dim, "Dimension (default from metadata)");
  recover->add_option("--bins", rec.bins, "Density bins for raw samples")
      ->capture_default_str();
  recover->add_option("--threshold", rec.threshold, "Score threshold")
      ->capture_default_str();
  recover->add_option("-o,--output", rec.output, "Report file (default stdout)");

  MeanArgs mean_args;
  auto* mean = app.add_subcommand("mean", "Mean free path of a box");
  mean->add_option("--box", mean_args.box, "Side lengths")->required();
  mean->add_option("--format", mean_args.format, "csv | json")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*pdf) return run_curve(pdf_args, true);
    if (*cdf) return run_curve(cdf_args, false);
    if (*compare) return run_compare(cmp);
    if (*recover) return run_recover(rec);
    if (*mean) return run_mean(mean_args);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const cs::io::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
