#ifndef PLCP_MODEL_HPP
#define PLCP_MODEL_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "plcp/error.hpp"

namespace plcp {

inline constexpr double kPi = std::numbers::pi;

/// Intensities of a Poisson line Cox process. `lambda` is calibrated so that
/// the number of lines crossing a fixed line within distance t of a point on
/// it is Poisson(2 * lambda * t); `mu` is the point intensity per unit length
/// on every line. All lengths are dimensionless.
struct ModelParams {
  double lambda = 1.0;
  double mu = 1.0;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

inline ModelParams validate(const ModelParams& params) {
  if (!std::isfinite(params.lambda)) {
    throw Error(Errc::NonFinite, "lambda", "lambda must be finite");
  }
  if (!std::isfinite(params.mu)) {
    throw Error(Errc::NonFinite, "mu", "mu must be finite");
  }
  if (params.lambda < 0.0) {
    throw Error(Errc::NegativeIntensity, "lambda", "lambda must be >= 0");
  }
  if (params.mu < 0.0) {
    throw Error(Errc::NegativeIntensity, "mu", "mu must be > 0");
  }
  if (params.mu == 0.0) {
    throw Error(Errc::ZeroMu, "mu", "mu must be > 0");
  }
  return params;
}

using LineId = std::uint32_t;

/// A line in normal form: {p : p . (cos angle, sin angle) = offset}.
/// Arc coordinates along the line are measured from the foot of the
/// perpendicular from the origin in direction (sin angle, -cos angle), so the
/// x-axis (angle pi/2) has arc coordinate equal to x.
struct Line {
  LineId id = 0;
  double angle = 0.0;  // normal angle in [0, pi)
  double signed_offset = 0.0;
  bool through_origin = false;

  double nx() const { return std::cos(angle); }
  double ny() const { return std::sin(angle); }
  double dx() const { return std::sin(angle); }
  double dy() const { return -std::cos(angle); }
  /// Angle of the line's arc direction, in [-pi/2, pi/2).
  double direction_angle() const { return angle - kPi / 2; }
};

struct PointOnLine {
  LineId line_id = 0;
  double arc_coord = 0.0;

  friend bool operator==(const PointOnLine&, const PointOnLine&) = default;
};

enum class ScenarioKind { TypicalPoint, TypicalIntersection };

/// Law of the angle between the two origin lines of a typical intersection.
/// PaperUniform: uniform on (0, pi). SinWeighted: density sin(theta) / 2.
enum class AngleLaw { PaperUniform, SinWeighted };

struct PalmScenario {
  ScenarioKind kind = ScenarioKind::TypicalPoint;
  AngleLaw angle_law = AngleLaw::PaperUniform;  // ignored for TypicalPoint

  static PalmScenario typical_point() { return {}; }
  static PalmScenario typical_intersection(AngleLaw law = AngleLaw::PaperUniform) {
    return {ScenarioKind::TypicalIntersection, law};
  }
};

enum class PolicyKind { ZeroTurn, OneTurn, TwoTurnDirectedPositiveX, KTurn };

/// Which family of street paths the oracle may use.
///
/// `positive_first_hop` restricts the first segment to the positive arc
/// direction of the x-axis line; TwoTurnDirectedPositiveX always implies it.
/// With `include_lower_turn_paths == false` only targets reached with exactly
/// the maximum number of turns count.
struct TurnPolicy {
  PolicyKind kind = PolicyKind::OneTurn;
  int k = 1;
  bool include_lower_turn_paths = true;
  bool positive_first_hop = false;

  static TurnPolicy zero_turn() { return {PolicyKind::ZeroTurn, 0, true, false}; }
  static TurnPolicy one_turn(bool include_lower = true) {
    return {PolicyKind::OneTurn, 1, include_lower, false};
  }
  static TurnPolicy two_turn_directed(bool include_lower = true) {
    return {PolicyKind::TwoTurnDirectedPositiveX, 2, include_lower, true};
  }
  static TurnPolicy k_turn(int k, bool include_lower = true, bool positive_first_hop = false) {
    return {PolicyKind::KTurn, k, include_lower, positive_first_hop};
  }

  int budget() const {
    switch (kind) {
      case PolicyKind::ZeroTurn: return 0;
      case PolicyKind::OneTurn: return 1;
      case PolicyKind::TwoTurnDirectedPositiveX: return 2;
      case PolicyKind::KTurn: return k;
    }
    return k;
  }
  bool directed() const {
    return positive_first_hop || kind == PolicyKind::TwoTurnDirectedPositiveX;
  }
};

struct CurveMeta {
  std::string estimator;  // "analytic:thm1", "mc", ...
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  ModelParams params;
  std::map<std::string, std::string> extra;
};

/// A CDF sampled on a grid. Analytic curves carry zero half-widths (or a
/// quadrature error estimate); Monte Carlo curves carry DKW half-widths.
struct DistributionCurve {
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<double> ci_halfwidth;
  CurveMeta meta;

  std::size_t size() const { return grid.size(); }
  double halfwidth(std::size_t i) const {
    return ci_halfwidth.empty() ? 0.0 : ci_halfwidth[i];
  }

  /// Checks the structural invariants; throws InvalidArgument on violation.
  void check() const {
    if (values.size() != grid.size() ||
        (!ci_halfwidth.empty() && ci_halfwidth.size() != grid.size())) {
      throw Error(Errc::InvalidArgument, "curve", "grid/values size mismatch");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (i > 0 && !(grid[i] > grid[i - 1])) {
        throw Error(Errc::InvalidArgument, "grid", "grid must be strictly increasing");
      }
      if (!(values[i] >= 0.0 && values[i] <= 1.0)) {
        throw Error(Errc::InvalidArgument, "values", "CDF value outside [0, 1]");
      }
      if (i > 0 && values[i] + halfwidth(i) + halfwidth(i - 1) < values[i - 1]) {
        throw Error(Errc::InvalidArgument, "values", "CDF decreases beyond its band");
      }
    }
  }
};

/// Maps a curve at (lambda, mu) onto the same dimensionless model at scale c:
/// lengths multiply by c, intensities divide by c.
inline DistributionCurve rescale(const DistributionCurve& curve, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error(Errc::NonPositiveScale, "c", "scale factor must be positive");
  }
  DistributionCurve out = curve;
  for (double& t : out.grid) t *= c;
  out.meta.params.lambda /= c;
  out.meta.params.mu /= c;
  return out;
}

}  // namespace plcp

#endif  // PLCP_MODEL_HPP
