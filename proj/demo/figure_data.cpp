// Writes the data behind three comparison plots of simulated bounce-length
// histograms against closed-form densities:
//
//   box_1x2_spreading.csv    spreading histogram, box (1,2), and pdf of X
//   box_3x4x6_spreading.csv  spreading histogram, box (3,4,6), and pdf of X
//   box_1x2_absorption.csv   absorption histogram, box (1,2), pdf of Y and X
//
// Columns: t_lo,t_hi,count,density,<model pdf at bin centre>...
// Usage: figure_data [out_dir] [particles] [distance_or_bounces] [bins]
// Defaults: . 100000 1000 200, seeds 1, 2, 3, all particles start at the
// origin.

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "chordstats/chordstats.hpp"

namespace cs = chordstats;

namespace {

struct Curve {
  std::string name;
  std::function<double(double)> pdf;
};

void write(const std::string& path, const cs::Histogram& h,
           const std::vector<Curve>& curves, const cs::io::Json& meta) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << cs::io::header_line(meta) << '\n';
  out << "t_lo,t_hi,count,density";
  for (const auto& c : curves) out << ',' << c.name;
  out << '\n';
  const auto dens = h.density();
  for (std::size_t k = 0; k < h.bins(); ++k) {
    const double lo = h.edges()[k], hi = h.edges()[k + 1];
    out << cs::io::format_double(lo) << ',' << cs::io::format_double(hi) << ','
        << h.counts()[k] << ',' << cs::io::format_double(dens[k]);
    for (const auto& c : curves) {
      out << ',' << cs::io::format_double(c.pdf(0.5 * (lo + hi)));
    }
    out << '\n';
  }
  std::cout << path << ": " << h.total() << " lengths\n";
}

cs::io::Json describe(const cs::BoxDims& box, const char* model,
                      std::size_t particles, double budget,
                      std::uint64_t seed) {
  cs::io::Json j;
  j["box"] = std::vector<double>(box.sides().begin(), box.sides().end());
  j["model"] = model;
  j["particles"] = particles;
  j["termination"] = budget;
  j["seed"] = seed;
  j["start"] = "origin";
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : ".";
  const std::size_t particles = argc > 2 ? std::stoull(argv[2]) : 100000;
  const double budget = argc > 3 ? std::stod(argv[3]) : 1000.0;
  const std::size_t bins = argc > 4 ? std::stoull(argv[4]) : 200;

  try {
    {
      const cs::BoxDims box({1.0, 2.0});
      cs::ParticleRun run{particles, cs::TotalDistance{budget},
                          cs::origin_start(2), 1, 0};
      const auto h = cs::accumulate_particles(
          box, run, cs::Histogram::uniform(0.0, cs::diag(box), bins));
      write(dir + "/box_1x2_spreading.csv", h,
            {{"pdf_X", [&](double t) { return cs::pdf_X_2d(box, t); }}},
            describe(box, "spreading", particles, budget, 1));
    }
    {
      const cs::BoxDims box({3.0, 4.0, 6.0});
      cs::ParticleRun run{particles, cs::TotalDistance{budget},
                          cs::origin_start(3), 2, 0};
      const auto h = cs::accumulate_particles(
          box, run, cs::Histogram::uniform(0.0, cs::diag(box), bins));
      write(dir + "/box_3x4x6_spreading.csv", h,
            {{"pdf_X", [&](double t) { return cs::pdf_X_3d(box, t); }}},
            describe(box, "spreading", particles, budget, 2));
    }
    {
      const cs::BoxDims box({1.0, 2.0});
      cs::ParticleRun run{particles,
                          cs::BounceCount{static_cast<std::uint64_t>(budget)},
                          cs::origin_start(2), 3, 0};
      const auto h = cs::accumulate_particles(
          box, run, cs::Histogram::uniform(0.0, cs::diag(box), bins));
      write(dir + "/box_1x2_absorption.csv", h,
            {{"pdf_Y", [&](double t) { return cs::pdf_Y_2d(box, t); }},
             {"pdf_X", [&](double t) { return cs::pdf_X_2d(box, t); }}},
            describe(box, "absorption", particles, budget, 3));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
