#ifndef PLCP_SAMPLER_HPP
#define PLCP_SAMPLER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "plcp/error.hpp"
#include "plcp/model.hpp"
#include "plcp/rng.hpp"

namespace plcp {

struct SeedRecord {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  friend bool operator==(const SeedRecord&, const SeedRecord&) = default;
};

struct Intersection {
  LineId line_a = 0;
  LineId line_b = 0;
  double arc_a = 0.0;  // arc coordinate on line_a
  double arc_b = 0.0;  // arc coordinate on line_b
  double x = 0.0;
  double y = 0.0;
};

/// A Palm-conditioned PLCP sample clipped to the disk of radius clip_radius
/// around the origin. Lines are stored by id (lines[i].id == i); the origin
/// lines come first: id 0 is the x-axis, id 1 the second origin line of a
/// typical intersection.
struct Realization {
  std::vector<Line> lines;
  std::vector<PointOnLine> points;
  std::vector<Intersection> intersections;
  PalmScenario scenario;
  double clip_radius = 0.0;
  SeedRecord seed;

  std::size_t origin_line_count() const {
    return scenario.kind == ScenarioKind::TypicalPoint ? 1 : 2;
  }
  bool has_line(LineId id) const { return id < lines.size(); }
};

struct Crossing {
  LineId other_line = 0;
  double s = 0.0;  // signed arc coordinate on the queried line
  double incidence_angle = 0.0;  // in (0, pi)
};

/// Scales the background line count, Poisson(kappa * pi * R * lambda). With
/// kappa = 1 a chord of length 2t through the origin is crossed 2 lambda t
/// times on average.
inline constexpr double kLineCountCalibration = 1.0;

namespace detail {

inline double wrap_angle(double a) {
  a = std::fmod(a, kPi);
  if (a < 0.0) a += kPi;
  if (a >= kPi) a -= kPi;
  return a;
}

inline double chord_half_length(const Line& line, double radius) {
  const double r2 = radius * radius - line.signed_offset * line.signed_offset;
  return r2 > 0.0 ? std::sqrt(r2) : 0.0;
}

inline bool nearly_parallel(double a, double b) {
  return std::abs(std::sin(a - b)) < 1e-12;
}

}  // namespace detail

/// Intersects every pair of lines and keeps the crossings inside the clip
/// disk. Order is (a, b) lexicographic with a < b.
inline std::vector<Intersection> compute_intersections(const std::vector<Line>& lines,
                                                       double clip_radius) {
  std::vector<Intersection> out;
  const double r2 = clip_radius * clip_radius;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const Line& a = lines[i];
    const double ca = a.nx(), sa = a.ny();
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const Line& b = lines[j];
      const double cb = b.nx(), sb = b.ny();
      const double det = ca * sb - sa * cb;
      if (std::abs(det) < 1e-12) continue;
      const double x = (a.signed_offset * sb - b.signed_offset * sa) / det;
      const double y = (b.signed_offset * ca - a.signed_offset * cb) / det;
      if (x * x + y * y > r2) continue;
      Intersection rec;
      rec.line_a = a.id;
      rec.line_b = b.id;
      rec.x = x;
      rec.y = y;
      rec.arc_a = x * a.dx() + y * a.dy();
      rec.arc_b = x * b.dx() + y * b.dy();
      out.push_back(rec);
    }
  }
  return out;
}

/// Draws one Palm-conditioned realization.
///
/// Background lines: count Poisson(kappa * pi * R * lambda), normal angle U[0, pi),
/// offset U[-R, R]. A line then crosses a fixed length-2t chord through the
/// origin with probability 2t / (pi R), so crossings of an origin line within
/// distance t are Poisson(2 lambda t). Every line carries a Poisson(mu)
/// point set on its chord. The conditioning point itself is not placed.
inline Realization sample_palm(const ModelParams& params, const PalmScenario& scenario,
                               double clip_radius, SeedRecord seed) {
  validate(params);
  if (!(clip_radius > 0.0) || !std::isfinite(clip_radius)) {
    throw Error(Errc::NonPositiveRadius, "clip_radius", "clip radius must be positive");
  }
  RandomStream rng(seed.seed, seed.stream);
  Realization real;
  real.scenario = scenario;
  real.clip_radius = clip_radius;
  real.seed = seed;

  real.lines.push_back(Line{0, kPi / 2, 0.0, true});
  if (scenario.kind == ScenarioKind::TypicalIntersection) {
    double theta = 0.0;
    do {
      const double u = rng.uniform();
      theta = scenario.angle_law == AngleLaw::PaperUniform ? kPi * u
                                                           : std::acos(1.0 - 2.0 * u);
    } while (std::abs(std::sin(theta)) < 1e-12);
    // direction angle theta -> normal angle theta + pi/2
    real.lines.push_back(Line{1, detail::wrap_angle(theta + kPi / 2), 0.0, true});
  }

  if (params.lambda > 0.0) {
    const double span = kLineCountCalibration * kPi * clip_radius;
    std::size_t count = 0;
    for (double at = rng.exponential(params.lambda); at <= span;
         at += rng.exponential(params.lambda)) {
      ++count;
    }
    for (std::size_t n = 0; n < count; ++n) {
      double angle = 0.0;
      double offset = 0.0;
      bool degenerate = true;
      while (degenerate) {
        angle = rng.uniform(0.0, kPi);
        offset = rng.uniform(-clip_radius, clip_radius);
        degenerate = std::any_of(real.lines.begin(), real.lines.end(), [&](const Line& l) {
          return detail::nearly_parallel(l.angle, angle);
        });
      }
      real.lines.push_back(
          Line{static_cast<LineId>(real.lines.size()), angle, offset, false});
    }
  }

  for (const Line& line : real.lines) {
    const double h = detail::chord_half_length(line, clip_radius);
    for (double arc = -h + rng.exponential(params.mu); arc <= h;
         arc += rng.exponential(params.mu)) {
      if (line.through_origin && arc == 0.0) continue;
      real.points.push_back(PointOnLine{line.id, arc});
    }
  }

  real.intersections = compute_intersections(real.lines, clip_radius);
  return real;
}

inline Realization sample_palm(const ModelParams& params, const PalmScenario& scenario,
                               double clip_radius, std::uint64_t seed) {
  return sample_palm(params, scenario, clip_radius, SeedRecord{seed, 0});
}

/// All crossings of other lines with an origin line within |s| <= t.
inline std::vector<Crossing> crossings_within(const Realization& real, LineId line_id,
                                              double t) {
  if (!real.has_line(line_id)) {
    throw Error(Errc::UnknownLine, "line_id", "no such line");
  }
  const Line& line = real.lines[line_id];
  if (!line.through_origin) {
    throw Error(Errc::InvalidArgument, "line_id", "line does not pass through the origin");
  }
  if (t > real.clip_radius) {
    throw Error(Errc::TBeyondClip, "t", "t exceeds the clip radius");
  }
  std::vector<Crossing> out;
  for (const Intersection& in : real.intersections) {
    LineId other;
    double s;
    if (in.line_a == line_id) {
      other = in.line_b;
      s = in.arc_a;
    } else if (in.line_b == line_id) {
      other = in.line_a;
      s = in.arc_b;
    } else {
      continue;
    }
    if (std::abs(s) > t) continue;
    const double rel = detail::wrap_angle(real.lines[other].angle - line.angle);
    out.push_back(Crossing{other, s, rel});
  }
  return out;
}

/// Rotates the whole realization about the origin by phi. Lines whose normal
/// angle wraps past pi flip orientation, so their offsets and arc coordinates
/// change sign.
inline Realization rotate(const Realization& real, double phi) {
  Realization out = real;
  std::vector<bool> flipped(out.lines.size(), false);
  for (Line& line : out.lines) {
    double a = line.angle + phi;
    int turns = static_cast<int>(std::floor(a / kPi));
    a -= turns * kPi;
    if (a >= kPi) {
      a -= kPi;
      ++turns;
    }
    line.angle = a;
    if (turns % 2 != 0) {
      line.signed_offset = -line.signed_offset;
      flipped[line.id] = true;
    }
  }
  for (PointOnLine& p : out.points) {
    if (flipped[p.line_id]) p.arc_coord = -p.arc_coord;
  }
  out.intersections = compute_intersections(out.lines, out.clip_radius);
  return out;
}

}  // namespace plcp

#endif  // PLCP_SAMPLER_HPP
