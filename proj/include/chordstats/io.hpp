#pragma once

// Sample and table files.
//
// CSV: one header line `# chordstats v<version> json=<metadata>`, then
// either one length per row (raw) or `t_lo,t_hi,count` rows (histogram),
// or `t,value` rows for pdf/cdf tables.
// JSON: {"meta": {...}, "lengths": [...]} / {"meta": {...}, "histogram":
// {"edges": [...], "counts": [...]}} / {"meta": {...}, "rows": [[t, v]...]}.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "chordstats/core.hpp"
#include "chordstats/stats.hpp"

namespace chordstats::io {

using Json = nlohmann::json;

/// Unreadable, unwritable or malformed file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { Csv, Json };

inline Format format_from_string(std::string_view s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw std::invalid_argument("unknown format '" + std::string(s) + "'");
}

/// Shortest representation that reads back to the same double.
inline std::string format_double(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double x = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
    throw IoError("not a number: '" + std::string(s) + "'");
  }
  return x;
}

inline std::uint64_t parse_count(std::string_view s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  std::uint64_t x = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
    throw IoError("not a count: '" + std::string(s) + "'");
  }
  return x;
}

inline Json meta_to_json(const SampleMeta& m) {
  Json j;
  j["model"] = std::string(to_string(m.model));
  j["box"] = m.box;
  j["particles"] = m.particles;
  j["termination"] = m.termination;
  j["seed"] = m.seed;
  j["start"] = m.start;
  j["warnings"] = m.warnings;
  return j;
}

inline SampleMeta meta_from_json(const Json& j) {
  try {
    SampleMeta m;
    m.model = sample_model_from_string(j.at("model").get<std::string>());
    m.box = j.at("box").get<std::vector<double>>();
    m.particles = j.value("particles", std::uint64_t{0});
    m.termination = j.value("termination", 0.0);
    m.seed = j.value("seed", std::uint64_t{0});
    m.start = j.value("start", std::string("origin"));
    m.warnings = j.value("warnings", std::vector<std::string>{});
    return m;
  } catch (const Json::exception& e) {
    throw IoError(std::string("bad sample metadata: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("bad sample metadata: ") + e.what());
  }
}

/// A sample as stored on disk: raw lengths or a histogram.
struct SampleFile {
  SampleMeta meta;
  std::vector<double> lengths;
  std::optional<Histogram> histogram;
  /// Exact mean of the lengths, when known.
  std::optional<double> mean;

  bool is_histogram() const noexcept { return histogram.has_value(); }
  std::uint64_t count() const {
    return histogram ? histogram->total() : lengths.size();
  }
};

inline std::string header_line(const Json& meta) {
  return "# chordstats v" + std::string(version) + " json=" + meta.dump();
}

inline Json sample_meta_json(const SampleMeta& meta, std::string_view emit,
                             std::optional<double> mean, std::uint64_t count) {
  Json j = meta_to_json(meta);
  j["version"] = std::string(version);
  j["emit"] = std::string(emit);
  j["count"] = count;
  if (mean) j["mean"] = *mean;
  return j;
}

inline void write_raw(std::ostream& os, const SampleMeta& meta,
                      std::span<const double> lengths, Format fmt) {
  std::optional<double> mean;
  if (!lengths.empty()) {
    double sum = 0.0;
    for (double x : lengths) sum += x;
    mean = sum / static_cast<double>(lengths.size());
  }
  const Json m = sample_meta_json(meta, "raw", mean, lengths.size());
  if (fmt == Format::Csv) {
    os << header_line(m) << '\n';
    std::string buf;
    for (double x : lengths) {
      buf += format_double(x);
      buf += '\n';
      if (buf.size() > (1u << 16)) {
        os << buf;
        buf.clear();
      }
    }
    os << buf;
  } else {
    Json j;
    j["meta"] = m;
    j["lengths"] = std::vector<double>(lengths.begin(), lengths.end());
    os << j.dump() << '\n';
  }
}

inline void write_histogram(std::ostream& os, const SampleMeta& meta,
                            const Histogram& h, Format fmt) {
  std::optional<double> mean;
  if (h.total() > 0) mean = h.mean();
  Json m = sample_meta_json(meta, "histogram", mean, h.total());
  m["underflow"] = h.underflow();
  m["overflow"] = h.overflow();
  const auto e = h.edges();
  const auto c = h.counts();
  if (fmt == Format::Csv) {
    os << header_line(m) << '\n';
    for (std::size_t k = 0; k < c.size(); ++k) {
      os << format_double(e[k]) << ',' << format_double(e[k + 1]) << ','
         << c[k] << '\n';
    }
  } else {
    Json j;
    j["meta"] = m;
    j["histogram"] = {{"edges", std::vector<double>(e.begin(), e.end())},
                      {"counts", std::vector<std::uint64_t>(c.begin(), c.end())}};
    os << j.dump() << '\n';
  }
}

namespace detail {

inline Json parse_header(const std::string& line) {
  constexpr std::string_view tag = "# chordstats v";
  if (line.rfind(tag, 0) != 0) throw IoError("missing chordstats header");
  const auto pos = line.find(" json=");
  if (pos == std::string::npos) throw IoError("header without metadata");
  try {
    return Json::parse(line.substr(pos + 6));
  } catch (const Json::exception& e) {
    throw IoError(std::string("bad header metadata: ") + e.what());
  }
}

inline Histogram histogram_from(std::vector<double> edges,
                                std::vector<std::uint64_t> counts,
                                const Json& meta) {
  try {
    return Histogram::from_counts(std::move(edges), std::move(counts),
                                  meta.value("underflow", std::uint64_t{0}),
                                  meta.value("overflow", std::uint64_t{0}));
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("bad histogram: ") + e.what());
  }
}

inline SampleFile finish(const Json& m, SampleFile f) {
  f.meta = meta_from_json(m);
  if (m.contains("mean") && m["mean"].is_number()) {
    f.mean = m["mean"].get<double>();
  }
  return f;
}

}  // namespace detail

inline SampleFile read_sample(std::istream& is) {
  std::string first;
  while (std::getline(is, first)) {
    if (first.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  if (first.empty()) throw IoError("empty sample file");
  SampleFile out;
  if (first.find_first_not_of(" \t") != std::string::npos &&
      first[first.find_first_not_of(" \t")] == '{') {
    std::string rest((std::istreambuf_iterator<char>(is)),
                     std::istreambuf_iterator<char>());
    Json j;
    try {
      j = Json::parse(first + rest);
      const Json& m = j.at("meta");
      if (j.contains("histogram")) {
        auto edges = j["histogram"].at("edges").get<std::vector<double>>();
        auto counts =
            j["histogram"].at("counts").get<std::vector<std::uint64_t>>();
        out.histogram =
            detail::histogram_from(std::move(edges), std::move(counts), m);
      } else {
        out.lengths = j.at("lengths").get<std::vector<double>>();
      }
      return detail::finish(m, std::move(out));
    } catch (const Json::exception& e) {
      throw IoError(std::string("bad JSON sample: ") + e.what());
    }
  }

  const Json m = detail::parse_header(first);
  const std::string emit = m.value("emit", std::string("raw"));
  std::string line;
  if (emit == "histogram") {
    std::vector<double> edges;
    std::vector<std::uint64_t> counts;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto c1 = line.find(',');
      const auto c2 = line.find(',', c1 + 1);
      if (c1 == std::string::npos || c2 == std::string::npos) {
        throw IoError("histogram row needs t_lo,t_hi,count: '" + line + "'");
      }
      const double lo = parse_double(std::string_view(line).substr(0, c1));
      const double hi =
          parse_double(std::string_view(line).substr(c1 + 1, c2 - c1 - 1));
      if (edges.empty()) {
        edges.push_back(lo);
      } else if (lo != edges.back()) {
        throw IoError("histogram rows are not contiguous");
      }
      edges.push_back(hi);
      counts.push_back(parse_count(std::string_view(line).substr(c2 + 1)));
    }
    if (counts.empty()) throw IoError("histogram file has no rows");
    out.histogram =
        detail::histogram_from(std::move(edges), std::move(counts), m);
  } else {
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#' ||
          line.find_first_not_of(" \t\r") == std::string::npos) {
        continue;
      }
      out.lengths.push_back(parse_double(line));
    }
  }
  return detail::finish(m, std::move(out));
}

inline SampleFile read_sample_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_sample(in);
}

/// Two-column table (t, value) with free-form metadata.
inline void write_table(std::ostream& os, const Json& meta,
                        std::span<const double> t, std::span<const double> v,
                        Format fmt) {
  if (t.size() != v.size()) throw std::invalid_argument("column size mismatch");
  if (fmt == Format::Csv) {
    Json m = meta;
    m["version"] = std::string(version);
    os << header_line(m) << '\n';
    for (std::size_t i = 0; i < t.size(); ++i) {
      os << format_double(t[i]) << ',' << format_double(v[i]) << '\n';
    }
  } else {
    Json j;
    j["meta"] = meta;
    j["meta"]["version"] = std::string(version);
    Json rows = Json::array();
    for (std::size_t i = 0; i < t.size(); ++i) rows.push_back({t[i], v[i]});
    j["rows"] = std::move(rows);
    os << j.dump() << '\n';
  }
}

struct Table {
  Json meta;
  std::vector<double> t;
  std::vector<double> value;
};

inline Table read_table(std::istream& is) {
  std::string first;
  std::getline(is, first);
  Table out;
  if (!first.empty() && first[0] == '{') {
    std::string rest((std::istreambuf_iterator<char>(is)),
                     std::istreambuf_iterator<char>());
    try {
      const Json j = Json::parse(first + rest);
      out.meta = j.at("meta");
      for (const auto& r : j.at("rows")) {
        out.t.push_back(r.at(0).get<double>());
        out.value.push_back(r.at(1).get<double>());
      }
    } catch (const Json::exception& e) {
      throw IoError(std::string("bad JSON table: ") + e.what());
    }
    return out;
  }
  out.meta = detail::parse_header(first);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto c = line.find(',');
    if (c == std::string::npos) throw IoError("table row needs t,value");
    out.t.push_back(parse_double(std::string_view(line).substr(0, c)));
    out.value.push_back(parse_double(std::string_view(line).substr(c + 1)));
  }
  return out;
}

}  // namespace chordstats::io
