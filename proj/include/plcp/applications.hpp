#ifndef PLCP_APPLICATIONS_HPP
#define PLCP_APPLICATIONS_HPP

#include <cmath>
#include <cstdint>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

#include "plcp/analytic.hpp"
#include "plcp/error.hpp"
#include "plcp/model.hpp"

namespace plcp::app {

/// Radio parameters of an RIS-assisted link, all in linear units.
struct RisLinkParams {
  double g_t = 1.0;
  double g_r = 1.0;
  double g = 1.0;  // extra far-field gain
  double wavelength = 1.0;
  double area = 1.0;
  double m = 1.0;
  double n = 1.0;
  double d_x = 1.0;
  double d_y = 1.0;
  double p_t = 1.0;
  double n0 = 1.0;
  double gamma = 1.0;  // SNR threshold
};

inline void validate(const RisLinkParams& link) {
  const std::pair<const char*, double> fields[] = {
      {"g_t", link.g_t},   {"g_r", link.g_r}, {"g", link.g},     {"wavelength", link.wavelength},
      {"area", link.area}, {"m", link.m},     {"n", link.n},     {"d_x", link.d_x},
      {"d_y", link.d_y},   {"p_t", link.p_t}, {"n0", link.n0},   {"gamma", link.gamma}};
  for (const auto& [name, v] : fields) {
    if (!std::isfinite(v)) throw Error(Errc::NonFinite, name, std::string(name) + " must be finite");
    if (!(v > 0.0)) throw Error(Errc::InvalidArgument, name, std::string(name) + " must be > 0");
  }
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// A success probability together with the path length it was read at.
struct LinkResult {
  double probability = 0.0;
  double threshold_distance = 0.0;
};

/// Near-field broadcast: received power falls as (d1 + d2)^-2, so success
/// means the nearest one-turn receiver lies within d* of the transmitter.
inline LinkResult nearfield_success(const RisLinkParams& link, const ModelParams& model) {
  validate(link);
  validate(model);
  const double lc = link.wavelength;
  const double d = std::sqrt(link.g_t * link.g_r * lc * lc * link.area * link.area * link.p_t /
                             (16.0 * kPi * kPi * link.gamma * link.n0));
  if (!std::isfinite(d)) return {1.0, d};
  return {analytic::cdf_one_turn_point(model, d), d};
}

/// Far field with optimised phases: success needs d1 * d2 <= c. Since
/// d1 + d2 <= 2 sqrt(c) implies it, F_D(2 sqrt(c)) is a lower bound.
inline LinkResult farfield_success_lower_bound(const RisLinkParams& link, const ModelParams& model) {
  validate(link);
  validate(model);
  const double lc = link.wavelength;
  const double c = std::sqrt(link.g_t * link.g_r * link.g * link.m * link.m * link.n * link.n *
                             link.d_x * link.d_y * lc * lc * link.area * link.area * link.p_t /
                             (64.0 * kPi * kPi * kPi * link.gamma * link.n0));
  const double d = 2.0 * std::sqrt(c);
  if (!std::isfinite(d)) return {1.0, d};
  return {analytic::cdf_one_turn_point(model, d), d};
}

enum class ReachPolicy { OneTurnPoint, ZeroTurnIntersection, OneTurnIntersection };

inline ReachPolicy parse_reach_policy(const std::string& s) {
  if (s == "one-turn-point") return ReachPolicy::OneTurnPoint;
  if (s == "zero-turn-intersection") return ReachPolicy::ZeroTurnIntersection;
  if (s == "one-turn-intersection") return ReachPolicy::OneTurnIntersection;
  throw Error(Errc::InvalidArgument, "policy", "unknown reach policy '" + s + "'");
}

inline double reach_cdf(const ModelParams& model, double t, ReachPolicy policy) {
  switch (policy) {
    case ReachPolicy::OneTurnPoint: return analytic::cdf_one_turn_point(model, t);
    case ReachPolicy::ZeroTurnIntersection: return analytic::cdf_zero_turn_intersection(model, t);
    case ReachPolicy::OneTurnIntersection:
      return analytic::cdf_one_turn_intersection(model, t).value;
  }
  return 0.0;
}

/// Smallest t with F_D(t) = p, to about 1e-9 relative. The bracket grows by
/// doubling from 1 / (mu + lambda) and gives up past `t_cap`.
inline double reach_quantile(const ModelParams& model, double p, ReachPolicy policy,
                             double t_cap = 1e3) {
  validate(model);
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    throw Error(Errc::InvalidArgument, "p", "p must lie in [0, 1)");
  }
  if (p == 0.0) return 0.0;
  const auto f = [&](double t) { return reach_cdf(model, t, policy) - p; };
  double lo = 0.0;
  double hi = 1.0 / (model.mu + model.lambda);
  double fhi = f(hi);
  while (fhi < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > t_cap || p >= 1.0) {
      throw Error(Errc::NoBracket, "p", "quantile not reached below the t cap");
    }
    fhi = f(hi);
  }
  if (fhi == 0.0) return hi;
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, lo == 0.0 ? -p : f(lo), fhi, boost::math::tools::eps_tolerance<double>(40), iters);
  return 0.5 * (a + b);
}

}  // namespace plcp::app

#endif  // PLCP_APPLICATIONS_HPP
