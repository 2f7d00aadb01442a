#ifndef PLCP_IO_HPP
#define PLCP_IO_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "plcp/error.hpp"
#include "plcp/model.hpp"
#include "plcp/sampler.hpp"

namespace plcp::io {

inline constexpr const char* kVersion = "0.1.0";

/// Shortest decimal form that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s, const char* field) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw Error(Errc::InvalidArgument, field, "not a number: '" + std::string(s) + "'");
  }
  return v;
}

/// Parses "start:stop:step". Both ends are included when the step divides
/// the span to within 1e-12; grid points are start + i * step.
inline std::vector<double> parse_grid(const std::string& spec) {
  const auto a = spec.find(':');
  const auto b = a == std::string::npos ? a : spec.find(':', a + 1);
  if (a == std::string::npos || b == std::string::npos) {
    throw Error(Errc::InvalidArgument, "grid", "grid must be start:stop:step");
  }
  const double start = parse_double(std::string_view(spec).substr(0, a), "grid");
  const double stop = parse_double(std::string_view(spec).substr(a + 1, b - a - 1), "grid");
  const double step = parse_double(std::string_view(spec).substr(b + 1), "grid");
  if (!(step > 0.0) || !(stop >= start) || !std::isfinite(start) || !std::isfinite(stop)) {
    throw Error(Errc::InvalidArgument, "grid", "need start <= stop and step > 0");
  }
  const double span = (stop - start) / step;
  auto n = static_cast<long long>(std::floor(span));
  if (span - static_cast<double>(n) > 1.0 - 1e-12) ++n;
  if (n > 10'000'000) throw Error(Errc::InvalidArgument, "grid", "grid too large");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(n) + 1);
  for (long long i = 0; i <= n; ++i) grid.push_back(start + static_cast<double>(i) * step);
  if (std::abs(grid.back() - stop) <= 1e-12 * std::max(1.0, std::abs(stop))) grid.back() = stop;
  return grid;
}

// ---------------------------------------------------------------------------
// CSV

/// Analytic curves: t,F,err_est. MC curves: t,F,ci_lo,ci_hi.
inline std::string curve_csv(const DistributionCurve& c, bool mc) {
  std::string out = mc ? "t,F,ci_lo,ci_hi\n" : "t,F,err_est\n";
  for (std::size_t i = 0; i < c.size(); ++i) {
    out += format_double(c.grid[i]);
    out += ',';
    out += format_double(c.values[i]);
    const double h = c.halfwidth(i);
    if (mc) {
      out += ',';
      out += format_double(std::max(0.0, c.values[i] - h));
      out += ',';
      out += format_double(std::min(1.0, c.values[i] + h));
    } else {
      out += ',';
      out += format_double(h);
    }
    out += '\n';
  }
  return out;
}

inline std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == sep) {
      out.emplace_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

/// Reads a curve written by curve_csv. MC files get symmetric half-widths
/// (the larger side of the clipped interval); analytic files get none, since
/// a quadrature error estimate is not a sampling band.
inline DistributionCurve read_curve_csv(std::istream& in, const std::string& name = "csv") {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::InvalidArgument, name, "empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  bool mc = false;
  if (line == "t,F,ci_lo,ci_hi") {
    mc = true;
  } else if (line != "t,F,err_est") {
    throw Error(Errc::InvalidArgument, name, "unknown CSV header '" + line + "'");
  }
  DistributionCurve c;
  c.meta.estimator = mc ? "mc" : "analytic";
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cols = split(line, ',');
    if (cols.size() != (mc ? 4u : 3u)) throw Error(Errc::InvalidArgument, name, "bad CSV row");
    c.grid.push_back(parse_double(cols[0], "t"));
    const double f = parse_double(cols[1], "F");
    c.values.push_back(f);
    if (mc) {
      const double lo = parse_double(cols[2], "ci_lo"), hi = parse_double(cols[3], "ci_hi");
      c.ci_halfwidth.push_back(std::max(f - lo, hi - f));
    }
  }
  return c;
}

inline DistributionCurve read_curve_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::InvalidArgument, path, "cannot open file");
  return read_curve_csv(in, path);
}

// ---------------------------------------------------------------------------
// key=value configuration

/// Reads `key = value` lines; '#' starts a comment, blank lines are skipped.
/// Later keys override earlier ones.
inline std::map<std::string, std::string> parse_config(std::istream& in,
                                                       const std::string& name = "config") {
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::InvalidArgument, name,
                  "line " + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    if (key.empty()) {
      throw Error(Errc::InvalidArgument, name, "line " + std::to_string(lineno) + ": empty key");
    }
    out[key] = value;
  }
  return out;
}

inline std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidArgument, path, "cannot open config file");
  return parse_config(in, path);
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::ordered_json to_json(const CurveMeta& m) {
  nlohmann::ordered_json j;
  j["estimator"] = m.estimator;
  j["lambda"] = m.params.lambda;
  j["mu"] = m.params.mu;
  j["trials"] = m.trials;
  j["seed"] = m.seed;
  for (const auto& [k, v] : m.extra) j[k] = v;
  j["version"] = kVersion;
  return j;
}

inline nlohmann::ordered_json to_json(const Realization& real) {
  nlohmann::ordered_json j;
  j["lines"] = nlohmann::ordered_json::array();
  for (const Line& l : real.lines) {
    j["lines"].push_back({{"id", l.id}, {"angle", l.angle}, {"offset", l.signed_offset}});
  }
  j["points"] = nlohmann::ordered_json::array();
  for (const PointOnLine& p : real.points) {
    j["points"].push_back({{"line", p.line_id}, {"arc", p.arc_coord}});
  }
  nlohmann::ordered_json sc;
  sc["kind"] = real.scenario.kind == ScenarioKind::TypicalPoint ? "typical_point"
                                                                : "typical_intersection";
  sc["angle_law"] = real.scenario.angle_law == AngleLaw::PaperUniform ? "paper_uniform"
                                                                      : "sin_weighted";
  j["scenario"] = sc;
  j["seed"] = {{"seed", real.seed.seed}, {"stream", real.seed.stream}};
  j["clip_radius"] = real.clip_radius;
  return j;
}

/// Rebuilds a realization from its dump; lines through the origin are the
/// ones with zero offset among the first origin_line_count ids.
inline Realization realization_from_json(const nlohmann::json& j) {
  Realization real;
  try {
    const auto& sc = j.at("scenario");
    real.scenario.kind = sc.at("kind").get<std::string>() == "typical_point"
                             ? ScenarioKind::TypicalPoint
                             : ScenarioKind::TypicalIntersection;
    real.scenario.angle_law = sc.value("angle_law", std::string("paper_uniform")) == "sin_weighted"
                                  ? AngleLaw::SinWeighted
                                  : AngleLaw::PaperUniform;
    real.clip_radius = j.at("clip_radius").get<double>();
    if (j.contains("seed")) {
      real.seed.seed = j["seed"].value("seed", std::uint64_t{0});
      real.seed.stream = j["seed"].value("stream", std::uint64_t{0});
    }
    const std::size_t origin_lines = real.origin_line_count();
    for (const auto& l : j.at("lines")) {
      Line line;
      line.id = l.at("id").get<LineId>();
      line.angle = l.at("angle").get<double>();
      line.signed_offset = l.at("offset").get<double>();
      line.through_origin = line.id < origin_lines;
      if (line.id != real.lines.size()) {
        throw Error(Errc::InvalidArgument, "lines", "line ids must be 0..n-1 in order");
      }
      real.lines.push_back(line);
    }
    for (const auto& p : j.at("points")) {
      real.points.push_back({p.at("line").get<LineId>(), p.at("arc").get<double>()});
      if (!real.has_line(real.points.back().line_id)) {
        throw Error(Errc::UnknownLine, "points", "point on an unknown line");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, "json", e.what());
  }
  real.intersections = compute_intersections(real.lines, real.clip_radius);
  return real;
}

}  // namespace plcp::io

#endif  // PLCP_IO_HPP
