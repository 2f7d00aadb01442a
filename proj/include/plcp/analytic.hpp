#ifndef PLCP_ANALYTIC_HPP
#define PLCP_ANALYTIC_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "plcp/error.hpp"
#include "plcp/model.hpp"
#include "plcp/quadrature.hpp"

namespace plcp::analytic {

/// A quadrature-backed value with its error estimate.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

namespace detail {

inline void check_t(double t) {
  if (!std::isfinite(t)) throw Error(Errc::NonFinite, "t", "t must be finite");
  if (t < 0.0) throw Error(Errc::NegativeT, "t", "t must be >= 0");
}

// 1 - exp(-a) without cancellation for small a
inline double one_minus_exp(double a) { return -std::expm1(-a); }

inline double acot(double c) { return kPi / 2 - std::atan(c); }

}  // namespace detail

/// P(D <= t) when every point on L_x within t is counted once per segment.
/// Kept as a baseline: it over-counts and ignores the crossing lines.
inline double cdf_naive_recursion(const ModelParams& params, double t) {
  validate(params);
  detail::check_t(t);
  return detail::one_minus_exp(params.mu * t);
}

/// One turn from the typical point.
inline double cdf_one_turn_point(const ModelParams& params, double t) {
  validate(params);
  detail::check_t(t);
  const double lam = params.lambda, mu = params.mu;
  // (1 - e^{-2 mu t}) / mu computed stably
  const double reach = -std::expm1(-2.0 * mu * t) / mu;
  return detail::one_minus_exp(2.0 * mu * t + 2.0 * lam * t - lam * reach);
}

/// Zero turns from the typical intersection: void of both origin lines.
inline double cdf_zero_turn_intersection(const ModelParams& params, double t) {
  validate(params);
  detail::check_t(t);
  return detail::one_minus_exp(4.0 * params.mu * t);
}

/// Upper bound from the typical intersection, 1 - exp(-4 (mu + 4 lambda) t).
inline double cdf_upper_intersection(const ModelParams& params, double t) {
  validate(params);
  detail::check_t(t);
  return detail::one_minus_exp(4.0 * (params.mu + 4.0 * params.lambda) * t);
}

/// Nearest-neighbour law of a planar Poisson process.
inline double cdf_ppp2d_reference(double density, double t) {
  if (!std::isfinite(density)) throw Error(Errc::NonFinite, "density", "density must be finite");
  if (density < 0.0) throw Error(Errc::NegativeIntensity, "density", "density must be >= 0");
  detail::check_t(t);
  return detail::one_minus_exp(kPi * density * t * t);
}

// ---------------------------------------------------------------------------
// One turn from the typical intersection

enum class ZSign { TheoremMinus, ProofPlus };
enum class AngleNormalization { AsPrinted, PerAngleUniform };
enum class ThresholdSource { TheoremStatement, ProofEquations };

/// Readings of the one-turn intersection formula.
///
/// z_first_branch_sign: numerator of the first Z branch, sin(w) - sin(w1)
/// or sin(w) + sin(w1). angle_normalization: AsPrinted keeps 1/pi^2 on T_y;
/// PerAngleUniform averages the w1 integral of T_y over its window, so its
/// angle factor is a probability. threshold_source: E11 from the statement
/// (t cos w - x) or from the proof (x replaced by t).
struct Theorem2Variant {
  ZSign z_first_branch_sign = ZSign::TheoremMinus;
  AngleNormalization angle_normalization = AngleNormalization::AsPrinted;
  ThresholdSource threshold_source = ThresholdSource::TheoremStatement;

  friend bool operator==(const Theorem2Variant&, const Theorem2Variant&) = default;

  static Theorem2Variant as_printed() { return {}; }
  /// Minimax-KS winner of the calibration experiment (see README).
  static Theorem2Variant calibrated() {
    return {ZSign::TheoremMinus, AngleNormalization::PerAngleUniform,
            ThresholdSource::ProofEquations};
  }

  static std::vector<Theorem2Variant> all() {
    std::vector<Theorem2Variant> out;
    for (ZSign s : {ZSign::TheoremMinus, ZSign::ProofPlus}) {
      for (AngleNormalization n : {AngleNormalization::AsPrinted, AngleNormalization::PerAngleUniform}) {
        for (ThresholdSource h : {ThresholdSource::TheoremStatement, ThresholdSource::ProofEquations}) {
          out.push_back({s, n, h});
        }
      }
    }
    return out;
  }
};

inline std::string to_string(const Theorem2Variant& v) {
  std::string s = v.z_first_branch_sign == ZSign::TheoremMinus ? "minus" : "plus";
  s += v.angle_normalization == AngleNormalization::AsPrinted ? ",printed" : ",per-angle";
  s += v.threshold_source == ThresholdSource::TheoremStatement ? ",theorem" : ",proof";
  return s;
}

struct AngleThresholds {
  double e11 = 0.0;
  double e12 = 0.0;
  double e21 = 0.0;
  double e22 = 0.0;
  bool ordered = true;  // e21 <= min(e11, e12) and max(e11, e12) <= e22

  /// Window of the middle branch. The two arctan thresholds straddle w in
  /// the order e12 < w < e11, so the window is taken as [min, max].
  double lo() const { return std::min(e11, e12); }
  double hi() const { return std::max(e11, e12); }
};

/// The four angles that split the w1 range into the Z branches, for a line
/// crossing L_x at distance x when L_y sits at angle w.
inline AngleThresholds angle_thresholds(double x, double w, double t,
                                        ThresholdSource source = ThresholdSource::TheoremStatement) {
  if (!(x > 0.0) || !(x <= t) || !(w > 0.0) || !(w < kPi)) {
    throw Error(Errc::DomainError, "x", "thresholds need 0 < x <= t and w in (0, pi)");
  }
  const double sw = std::sin(w), cw = std::cos(w);
  AngleThresholds th;
  // arctan mapped into (0, pi): the angle of the line through the crossing
  const auto angle = [](double num, double den) {
    double a = std::atan2(num, den);
    if (a < 0.0) a += kPi;
    if (a >= kPi) a -= kPi;
    return a;
  };
  th.e11 = source == ThresholdSource::TheoremStatement ? angle(t * sw, t * cw - x)
                                                       : angle(sw, cw - 1.0);
  th.e12 = angle(t * sw, x + t * cw);

  const double k = (2.0 * t - x) / x;
  const double k2 = k * k + 1.0;
  const auto arccos = [](double c, const char* field) {
    if (!std::isfinite(c) || c < -1.0 - 1e-9 || c > 1.0 + 1e-9) {
      throw Error(Errc::DomainError, field, "arccos argument outside [-1, 1]");
    }
    return std::acos(std::clamp(c, -1.0, 1.0));
  };
  th.e21 = arccos((k2 * cw + 2.0 * k) / (2.0 * k * cw + k2), "theta_e21");
  th.e22 = arccos((k2 * cw - 2.0 * k) / (-2.0 * k * cw + k2), "theta_e22");
  th.ordered = th.e21 <= th.lo() + 1e-12 && th.hi() <= th.e22 + 1e-12;
  return th;
}

namespace detail {

enum class ZBranch { Far, Middle, Mixed };

inline ZBranch z_branch(double w1, const AngleThresholds& th) {
  if (w1 >= th.lo() && w1 <= th.hi()) return ZBranch::Middle;
  if (w1 <= th.e21 || w1 >= th.e22) return ZBranch::Far;
  return ZBranch::Mixed;
}

// Z for a known branch. `sw` = sin(w), `s1` = sin(w1), `sd` = sin(w1 - w) != 0.
inline double z_value(ZBranch branch, double x, double t, double sw, double s1, double sd,
                      ZSign sign) {
  double z = 0.0;
  switch (branch) {
    case ZBranch::Middle:
      z = 2.0 * (t - x);
      break;
    case ZBranch::Far: {
      const double num = sign == ZSign::TheoremMinus ? sw - s1 : sw + s1;
      z = 2.0 * t - x * (num / sd + 1.0);
      break;
    }
    case ZBranch::Mixed:
      z = 4.0 * t - 2.0 * x * (1.0 + 2.0 * s1 / sd);
      break;
  }
  return std::clamp(z, 0.0, 4.0 * t);
}

// exp(-mu Z) at fixed (x, w); set to 0 inside the guard band around w1 = w.
struct Survival {
  double mu, x, w, t;
  AngleThresholds th;
  ZSign sign;
  double sw = std::sin(w), cw = std::cos(w);

  double operator()(double w1) const {
    const ZBranch branch = z_branch(w1, th);
    if (branch == ZBranch::Middle) return std::exp(-2.0 * mu * (t - x));
    const double s1 = std::sin(w1), c1 = std::cos(w1);
    const double sd = s1 * cw - c1 * sw;
    if (std::abs(sd) < 1e-9) return 0.0;
    return std::exp(-mu * z_value(branch, x, t, sw, s1, sd, sign));
  }
};

}  // namespace detail

/// Length of L_1 that must be void of points, for a line crossing L_x at x
/// with angle w1, when L_y sits at angle w.
inline double z_length(double x, double w1, double w, double t, const Theorem2Variant& variant) {
  detail::check_t(t);
  if (!(x >= 0.0 && x <= t)) throw Error(Errc::DomainError, "x", "x must lie in [0, t]");
  if (!(w1 > 0.0 && w1 < kPi)) throw Error(Errc::DomainError, "omega1", "omega1 must lie in (0, pi)");
  if (!(w > 0.0 && w < kPi)) throw Error(Errc::DomainError, "omega", "omega must lie in (0, pi)");
  const double sd = std::sin(w1 - w);
  if (std::abs(sd) < 1e-12) {
    throw Error(Errc::DegenerateAngles, "omega1", "omega1 coincides with omega");
  }
  if (x == 0.0) return 2.0 * t;  // every branch reduces to 2t; thresholds undefined
  const AngleThresholds th = angle_thresholds(x, w, t, variant.threshold_source);
  return detail::z_value(detail::z_branch(w1, th), x, t, std::sin(w), std::sin(w1), sd,
                         variant.z_first_branch_sign);
}

struct Theorem2Terms {
  Estimate tx;
  Estimate ty;
};

/// The two crossing-line integrals of the one-turn intersection CDF.
inline Theorem2Terms theorem2_terms(double mu, double t, const Theorem2Variant& variant,
                                    const quad::QuadSpec& spec) {
  detail::check_t(t);
  if (!(mu > 0.0)) throw Error(Errc::ZeroMu, "mu", "mu must be > 0");
  Theorem2Terms out;
  if (t == 0.0) return out;
  const ZSign sign = variant.z_first_branch_sign;
  const bool per_angle = variant.angle_normalization == AngleNormalization::PerAngleUniform;

  quad::QuadSpec inner = spec;
  inner.hints.clear();
  double tx_inner_err = 0.0, ty_inner_err = 0.0;
  double tx_mid_err = 0.0, ty_mid_err = 0.0;

  // Both terms share the (w, x) levels, so they are integrated separately
  // but with the same thresholds per (w, x).
  const auto over_x = [&](double w, bool y_term) {
    const auto f = [&](double x) {
      const AngleThresholds th = angle_thresholds(x, w, t, variant.threshold_source);
      const detail::Survival g{mu, x, w, t, th, sign};
      quad::QuadSpec s = inner;
      if (y_term) {
        const double lo = th.lo(), hi = th.hi();
        if (!(hi > lo)) return 0.0;
        s.hints = {w};
        const quad::QuadResult r = quad::integrate_1d_at(g, lo, hi, s, {w, x});
        ty_inner_err = std::max(ty_inner_err, r.error);
        return per_angle ? r.value * kPi / (hi - lo) : r.value;
      }
      s.hints = {th.e21, th.lo(), w, th.hi(), th.e22};
      const quad::QuadResult r = quad::integrate_1d_at(g, 0.0, kPi, s, {w, x});
      tx_inner_err = std::max(tx_inner_err, r.error);
      return r.value;
    };
    const quad::QuadResult r = quad::integrate_1d_at(f, 0.0, t, inner, {w});
    double& mid = y_term ? ty_mid_err : tx_mid_err;
    mid = std::max(mid, r.error);
    return r.value;
  };

  const double norm = 1.0 / (kPi * kPi);
  const quad::QuadResult rx =
      quad::integrate_1d([&](double w) { return over_x(w, false); }, 0.0, kPi, spec);
  const quad::QuadResult ry =
      quad::integrate_1d([&](double w) { return over_x(w, true); }, 0.0, kPi, spec);
  out.tx = {rx.value * norm, (rx.error + kPi * (tx_mid_err + t * tx_inner_err)) * norm};
  out.ty = {ry.value * norm, (ry.error + kPi * (ty_mid_err + t * ty_inner_err)) * norm};
  return out;
}

/// One turn from the typical intersection.
inline Estimate cdf_one_turn_intersection(const ModelParams& params, double t,
                                          const Theorem2Variant& variant = Theorem2Variant::calibrated(),
                                          const quad::QuadSpec& spec = {}) {
  validate(params);
  detail::check_t(t);
  if (t == 0.0) return {};
  const double lam = params.lambda, mu = params.mu;
  if (lam == 0.0) return {detail::one_minus_exp(4.0 * mu * t), 0.0};
  const Theorem2Terms terms = theorem2_terms(mu, t, variant, spec);
  const double exponent = 4.0 * mu * t + 2.0 * lam * (2.0 * t - terms.tx.value - terms.ty.value);
  const double survival = std::exp(-exponent);
  return {detail::one_minus_exp(exponent),
          survival * 2.0 * lam * (terms.tx.error + terms.ty.error)};
}

// ---------------------------------------------------------------------------
// Two turns from the typical point, first hop along +x

namespace detail {

// Integrand of T on (theta_i, theta_1); w < t.
inline double two_turn_integrand(double ti, double t1, double w, double u, double t, double mu) {
  const double si = std::sin(ti), ci = std::cos(ti);
  const double r = (u - w) / (t - w);
  const bool in_event = ti <= kPi / 2 ? t1 <= acot(ci - r / si) : t1 > acot((r - ci) / si);
  if (!in_event) return 1.0;
  double y = 0.0;
  if (u > w) {
    const double den = ci - si * std::cos(t1) / std::sin(t1);
    if (den == 0.0) return 0.0;
    y = (u - w) / den;
  }
  const double z = std::max(0.0, t - (y + w));
  return std::exp(-mu * z);
}

}  // namespace detail

/// Survival factor T(w, u) for a second-turn line crossing L_x at w before
/// the first-turn line at u, normalised by pi^2 so it lies in [0, 1].
/// Outside the reachability event the factor is 1 (no budget remains).
inline Estimate two_turn_T(double w, double u, double t, double mu, const quad::QuadSpec& spec = {}) {
  detail::check_t(t);
  if (!(mu > 0.0)) throw Error(Errc::ZeroMu, "mu", "mu must be > 0");
  if (!(w >= 0.0 && w <= u && u <= t)) {
    throw Error(Errc::DomainError, "w", "need 0 <= w <= u <= t");
  }
  if (!(t > w)) return {1.0, 0.0};
  const double r = (u - w) / (t - w);
  quad::QuadSpec inner = spec;
  inner.hints.clear();
  double inner_err = 0.0;
  const auto over_t1 = [&](double ti) {
    const double si = std::sin(ti), ci = std::cos(ti);
    quad::QuadSpec s = inner;
    // pole of y, event boundary, and the kink where the budget runs out
    s.hints = {ti, detail::acot(ci / si - r / si),
               ti <= kPi / 2 ? detail::acot(ci - r / si) : detail::acot((r - ci) / si)};
    const quad::QuadResult res = quad::integrate_1d_at(
        [&](double t1) { return detail::two_turn_integrand(ti, t1, w, u, t, mu); }, 0.0, kPi, s,
        {ti});
    inner_err = std::max(inner_err, res.error);
    return res.value;
  };
  quad::QuadSpec outer = spec;
  outer.hints = {kPi / 2};
  const quad::QuadResult res = quad::integrate_1d(over_t1, 0.0, kPi, outer);
  const double norm = 1.0 / (kPi * kPi);
  return {res.value * norm, (res.error + kPi * inner_err) * norm};
}

/// How the crossing positions are weighted in the two-turn bound.
/// AsPrinted: densities 1/u and 1/t multiply the integrands.
/// CountIntegrated: the Poisson counts are integrated over position, so the
/// exponents are integrals of (2 - T) over w and of (2 - G) over u.
enum class TwoTurnWeighting { AsPrinted, CountIntegrated };

/// Bound on P(D <= t) for the directed two-turn family.
inline Estimate cdf_two_turn_bound(const ModelParams& params, double t,
                                   TwoTurnWeighting weighting = TwoTurnWeighting::CountIntegrated,
                                   const quad::QuadSpec& spec = {1e-5, 1e-9, 2000, {}}) {
  validate(params);
  detail::check_t(t);
  const double lam = params.lambda, mu = params.mu;
  if (t == 0.0 || lam == 0.0) return {};
  const bool printed = weighting == TwoTurnWeighting::AsPrinted;
  quad::QuadSpec t_spec{1e-6, 1e-9, spec.max_subdivisions, {}};
  double t_err = 0.0, w_err = 0.0;
  const auto g = [&](double u) {
    if (u == 0.0) return 1.0;
    const auto h = [&](double w) {
      const Estimate tt = two_turn_T(w, u, t, mu, t_spec);
      t_err = std::max(t_err, tt.error);
      return printed ? 2.0 - tt.value / u : 2.0 - tt.value;
    };
    const quad::QuadResult in = quad::integrate_1d_at(h, 0.0, u, spec, {u});
    w_err = std::max(w_err, in.error);
    return std::exp(-lam * in.value);
  };
  const quad::QuadResult out =
      quad::integrate_1d([&](double u) { return 2.0 - g(u); }, 0.0, t, spec);
  const double scale = printed ? 1.0 / t : 1.0;
  const double exponent = lam * out.value * scale;
  // |dG| <= lambda |dI| and |dI| <= w_err + t * t_err on every u
  const double err = lam * scale * (out.error + t * lam * (w_err + t * t_err));
  return {detail::one_minus_exp(exponent), std::exp(-exponent) * err};
}

// ---------------------------------------------------------------------------
// Curves

enum class Formula { Naive, Thm1, Thm2, Cor1, Cor2, Thm3Bound, Ppp };

inline std::string to_string(Formula f) {
  switch (f) {
    case Formula::Naive: return "naive";
    case Formula::Thm1: return "thm1";
    case Formula::Thm2: return "thm2";
    case Formula::Cor1: return "cor1";
    case Formula::Cor2: return "cor2";
    case Formula::Thm3Bound: return "thm3-bound";
    case Formula::Ppp: return "ppp";
  }
  return "?";
}

inline Formula parse_formula(const std::string& s) {
  for (Formula f : {Formula::Naive, Formula::Thm1, Formula::Thm2, Formula::Cor1, Formula::Cor2,
                    Formula::Thm3Bound, Formula::Ppp}) {
    if (to_string(f) == s) return f;
  }
  throw Error(Errc::InvalidArgument, "which", "unknown formula '" + s + "'");
}

struct CurveOptions {
  Theorem2Variant variant = Theorem2Variant::calibrated();
  TwoTurnWeighting weighting = TwoTurnWeighting::CountIntegrated;
  quad::QuadSpec spec;
  quad::QuadSpec bound_spec{1e-5, 1e-9, 2000, {}};
  double ppp_density = -1.0;  // < 0: lambda * mu
};

/// Evaluates one formula on a grid. `ci_halfwidth` holds the error estimate.
inline DistributionCurve analytic_curve(Formula which, const ModelParams& params,
                                        const std::vector<double>& grid,
                                        const CurveOptions& opt = {}) {
  validate(params);
  DistributionCurve c;
  c.grid = grid;
  c.meta.estimator = "analytic:" + to_string(which);
  c.meta.params = params;
  const double density = opt.ppp_density >= 0.0 ? opt.ppp_density : params.lambda * params.mu;
  for (double t : grid) {
    Estimate e;
    switch (which) {
      case Formula::Naive: e.value = cdf_naive_recursion(params, t); break;
      case Formula::Thm1: e.value = cdf_one_turn_point(params, t); break;
      case Formula::Cor1: e.value = cdf_zero_turn_intersection(params, t); break;
      case Formula::Cor2: e.value = cdf_upper_intersection(params, t); break;
      case Formula::Ppp: e.value = cdf_ppp2d_reference(density, t); break;
      case Formula::Thm2: e = cdf_one_turn_intersection(params, t, opt.variant, opt.spec); break;
      case Formula::Thm3Bound: e = cdf_two_turn_bound(params, t, opt.weighting, opt.bound_spec); break;
    }
    c.values.push_back(e.value);
    c.ci_halfwidth.push_back(e.error);
  }
  if (which == Formula::Thm2) c.meta.extra["variant"] = to_string(opt.variant);
  if (which == Formula::Thm3Bound) {
    c.meta.extra["weighting"] =
        opt.weighting == TwoTurnWeighting::AsPrinted ? "as-printed" : "count-integrated";
  }
  if (which == Formula::Ppp) c.meta.extra["density"] = std::to_string(density);
  return c;
}

}  // namespace plcp::analytic

#endif  // PLCP_ANALYTIC_HPP
