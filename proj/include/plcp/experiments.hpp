#ifndef PLCP_EXPERIMENTS_HPP
#define PLCP_EXPERIMENTS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "plcp/analytic.hpp"
#include "plcp/error.hpp"
#include "plcp/model.hpp"
#include "plcp/oracle.hpp"
#include "plcp/sampler.hpp"

namespace plcp {

inline double dkw_halfwidth(std::uint64_t n, double alpha = 0.05) {
  if (n == 0) return 1.0;
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

/// Empirical CDF of possibly censored samples. Censored trials count in n
/// but never in the numerator, so the estimate is exact for t < t_max.
class Ecdf {
 public:
  Ecdf(std::vector<double> observed, std::uint64_t n, double t_max)
      : observed_(std::move(observed)), n_(n), t_max_(t_max) {
    std::sort(observed_.begin(), observed_.end());
    if (observed_.size() > n_) {
      throw Error(Errc::InvalidArgument, "n", "more observations than trials");
    }
  }

  std::uint64_t trials() const { return n_; }
  std::uint64_t censored() const { return n_ - observed_.size(); }
  double t_max() const { return t_max_; }
  const std::vector<double>& observed() const { return observed_; }

  /// Fraction of trials with D <= t (right-continuous).
  double operator()(double t) const {
    if (n_ == 0) return 0.0;
    const auto k = std::upper_bound(observed_.begin(), observed_.end(), t) - observed_.begin();
    return static_cast<double>(k) / static_cast<double>(n_);
  }

  DistributionCurve on_grid(const std::vector<double>& grid, double alpha = 0.05) const {
    DistributionCurve c;
    const double h = dkw_halfwidth(n_, alpha);
    for (double t : grid) {
      if (t > t_max_ + 1e-12) {
        throw Error(Errc::InvalidArgument, "grid", "grid exceeds t_max");
      }
      c.grid.push_back(t);
      c.values.push_back((*this)(t));
      c.ci_halfwidth.push_back(h);
    }
    c.meta.estimator = "mc";
    c.meta.trials = n_;
    return c;
  }

 private:
  std::vector<double> observed_;
  std::uint64_t n_;
  double t_max_;
};

struct McSpec {
  ModelParams params;
  PalmScenario scenario;
  TurnPolicy policy;
  std::uint64_t trials = 10000;
  double t_max = 3.0;
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

inline std::string to_string(const PalmScenario& s) {
  if (s.kind == ScenarioKind::TypicalPoint) return "point";
  return s.angle_law == AngleLaw::PaperUniform ? "intersection" : "intersection-sin";
}

inline std::string to_string(const TurnPolicy& p) {
  std::string s;
  switch (p.kind) {
    case PolicyKind::ZeroTurn: s = "zero-turn"; break;
    case PolicyKind::OneTurn: s = "one-turn"; break;
    case PolicyKind::TwoTurnDirectedPositiveX: s = "two-turn-directed"; break;
    case PolicyKind::KTurn: s = "k-turn:" + std::to_string(p.k); break;
  }
  if (!p.include_lower_turn_paths) s += ",exact";
  if (p.positive_first_hop && p.kind != PolicyKind::TwoTurnDirectedPositiveX) s += ",directed";
  return s;
}

/// Runs `trials` independent trials. Trial i uses stream i of `seed`, and
/// workers take contiguous blocks, so the sample set does not depend on the
/// worker count.
inline Ecdf run_mc_samples(const McSpec& spec) {
  validate(spec.params);
  if (spec.trials < 1) throw Error(Errc::InvalidArgument, "trials", "trials must be >= 1");
  if (!(spec.t_max > 0.0)) throw Error(Errc::NonPositiveRadius, "t_max", "t_max must be > 0");
  if (spec.policy.budget() < 0) {
    throw Error(Errc::PolicyBudgetNegative, "k", "turn budget must be >= 0");
  }
  const std::uint64_t n = spec.trials;
  std::vector<double> raw(n, -1.0);  // -1 marks a censored trial
  const unsigned workers =
      static_cast<unsigned>(std::clamp<std::uint64_t>(spec.workers == 0 ? 1 : spec.workers, 1, n));
  std::vector<std::exception_ptr> failures(workers);
  const auto work = [&](unsigned w) {
    const std::uint64_t lo = n * w / workers, hi = n * (w + 1) / workers;
    try {
      for (std::uint64_t i = lo; i < hi; ++i) {
        const auto d = sample_D(spec.params, spec.scenario, spec.policy, spec.t_max,
                                SeedRecord{spec.seed, i});
        if (d) raw[i] = *d;
      }
    } catch (...) {
      failures[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  std::vector<double> observed;
  observed.reserve(n);
  for (double d : raw) {
    if (d >= 0.0) observed.push_back(d);
  }
  return Ecdf(std::move(observed), n, spec.t_max);
}

inline DistributionCurve run_mc(const McSpec& spec, const std::vector<double>& grid,
                                double alpha = 0.05) {
  for (double t : grid) {
    if (t < 0.0 || t > spec.t_max + 1e-12) {
      throw Error(Errc::InvalidArgument, "grid", "grid must lie in [0, t_max]");
    }
  }
  DistributionCurve c = run_mc_samples(spec).on_grid(grid, alpha);
  c.meta.seed = spec.seed;
  c.meta.params = spec.params;
  c.meta.extra["scenario"] = to_string(spec.scenario);
  c.meta.extra["policy"] = to_string(spec.policy);
  c.meta.extra["t_max"] = std::to_string(spec.t_max);
  return c;
}

// ---------------------------------------------------------------------------
// Comparison

struct ComparisonReport {
  double ks = 0.0;
  double argmax_t = 0.0;
  std::vector<double> grid;
  std::vector<bool> inside_band;  // empty when neither curve carries a band
  std::optional<double> inside_band_fraction;
  bool a_ge_b = true;  // a >= b at every grid point
  bool b_ge_a = true;
  std::map<std::string, std::string> meta;
};

namespace detail {

// Right-continuous step value of a curve at t (its value at the largest grid
// point <= t).
inline std::size_t step_index(const DistributionCurve& c, double t) {
  const auto it = std::upper_bound(c.grid.begin(), c.grid.end(), t + 1e-12);
  return static_cast<std::size_t>(it - c.grid.begin()) - 1;
}

inline bool same_grid(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > 1e-12 * std::max(1.0, std::abs(a[i]))) return false;
  }
  return true;
}

}  // namespace detail

/// KS distance and band diagnostics of two curves. Identical grids compare
/// pointwise; otherwise both are resampled as step functions on the union of
/// their grid points inside the common range.
inline ComparisonReport compare(const DistributionCurve& a, const DistributionCurve& b) {
  for (const auto* c : {&a, &b}) {
    if (c->values.size() != c->grid.size() ||
        (!c->ci_halfwidth.empty() && c->ci_halfwidth.size() != c->grid.size())) {
      throw Error(Errc::GridMismatch, "grid", "curve values do not match its grid");
    }
  }
  if (a.grid.empty() || b.grid.empty()) {
    throw Error(Errc::GridMismatch, "grid", "cannot compare an empty curve");
  }
  std::vector<double> grid;
  if (detail::same_grid(a.grid, b.grid)) {
    grid = a.grid;
  } else {
    const double lo = std::max(a.grid.front(), b.grid.front());
    const double hi = std::min(a.grid.back(), b.grid.back());
    if (lo > hi) throw Error(Errc::GridMismatch, "grid", "grids do not overlap");
    for (const auto* g : {&a.grid, &b.grid}) {
      for (double t : *g) {
        if (t >= lo && t <= hi) grid.push_back(t);
      }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(x)); }),
               grid.end());
  }
  const bool banded = !a.ci_halfwidth.empty() || !b.ci_halfwidth.empty();
  ComparisonReport r;
  r.grid = grid;
  std::size_t inside = 0;
  for (double t : grid) {
    const std::size_t ia = detail::step_index(a, t), ib = detail::step_index(b, t);
    const double va = a.values[ia], vb = b.values[ib];
    const double diff = std::abs(va - vb);
    if (diff > r.ks) {
      r.ks = diff;
      r.argmax_t = t;
    }
    if (va < vb) r.a_ge_b = false;
    if (vb < va) r.b_ge_a = false;
    if (banded) {
      const bool in = diff <= a.halfwidth(ia) + b.halfwidth(ib);
      r.inside_band.push_back(in);
      inside += in ? 1 : 0;
    }
  }
  if (banded) r.inside_band_fraction = static_cast<double>(inside) / static_cast<double>(grid.size());
  r.meta["a"] = a.meta.estimator;
  r.meta["b"] = b.meta.estimator;
  return r;
}

// ---------------------------------------------------------------------------
// Figure sweep

struct SweepSpec {
  std::vector<ModelParams> params{{1.0, 1.0}};
  std::vector<double> grid;
  std::uint64_t trials = 10000;
  double t_max = 3.0;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  bool with_thm2 = true;
  bool with_thm3_bound = true;
  analytic::CurveOptions analytic_options;
};

/// Curves for one (lambda, mu) pair, keyed by name.
using CurveSet = std::map<std::string, DistributionCurve>;

/// Analytic curves and MC estimates behind the comparison figures: one turn
/// from the typical point and intersection, zero/upper bounds, the planar
/// Poisson reference, general and directed two-turn MC, and the two-turn
/// bound.
inline std::vector<CurveSet> figure_sweep(const SweepSpec& spec) {
  using analytic::Formula;
  std::vector<CurveSet> out;
  for (const ModelParams& p : spec.params) {
    validate(p);
    CurveSet set;
    std::vector<Formula> formulas{Formula::Thm1, Formula::Cor1, Formula::Cor2, Formula::Ppp};
    if (spec.with_thm2) formulas.push_back(Formula::Thm2);
    if (spec.with_thm3_bound) formulas.push_back(Formula::Thm3Bound);
    for (Formula f : formulas) {
      set[to_string(f)] = analytic::analytic_curve(f, p, spec.grid, spec.analytic_options);
    }
    const auto mc = [&](const std::string& name, PalmScenario sc, TurnPolicy pol) {
      McSpec m{p, sc, pol, spec.trials, spec.t_max, spec.seed, spec.workers};
      set[name] = run_mc(m, spec.grid);
    };
    mc("mc:point:one-turn", PalmScenario::typical_point(), TurnPolicy::one_turn());
    mc("mc:intersection:one-turn", PalmScenario::typical_intersection(), TurnPolicy::one_turn());
    mc("mc:point:two-turn", PalmScenario::typical_point(), TurnPolicy::k_turn(2));
    mc("mc:point:two-turn-directed-exact", PalmScenario::typical_point(),
       TurnPolicy::two_turn_directed(false));
    out.push_back(std::move(set));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Calibration of the one-turn intersection formula

struct CalibrationRow {
  ModelParams params;
  AngleLaw law = AngleLaw::PaperUniform;
  analytic::Theorem2Variant variant;
  double ks = 0.0;
  double argmax_t = 0.0;
};

struct CalibrationResult {
  std::vector<CalibrationRow> rows;
  analytic::Theorem2Variant best;  // minimax KS against the uniform-angle MC
  double best_worst_ks = 0.0;
};

/// Scores every variant against MC at every parameter pair. The T terms
/// depend on (mu, t, variant) only, so they are computed once per mu.
inline CalibrationResult calibrate_theorem2(const std::vector<ModelParams>& params,
                                            const std::vector<double>& grid,
                                            std::uint64_t trials, std::uint64_t seed,
                                            unsigned workers, const quad::QuadSpec& qspec = {}) {
  using analytic::Theorem2Variant;
  const auto variants = Theorem2Variant::all();
  std::map<double, std::vector<std::vector<analytic::Theorem2Terms>>> terms;  // mu -> variant -> t
  for (const ModelParams& p : params) {
    validate(p);
    if (terms.count(p.mu)) continue;
    auto& per_variant = terms[p.mu];
    for (const auto& v : variants) {
      std::vector<analytic::Theorem2Terms> row;
      for (double t : grid) row.push_back(analytic::theorem2_terms(p.mu, t, v, qspec));
      per_variant.push_back(std::move(row));
    }
  }
  CalibrationResult res;
  std::vector<double> worst(variants.size(), 0.0);
  for (const ModelParams& p : params) {
    for (AngleLaw law : {AngleLaw::PaperUniform, AngleLaw::SinWeighted}) {
      McSpec m{p, PalmScenario::typical_intersection(law), TurnPolicy::one_turn(), trials,
               grid.back(), seed, workers};
      const DistributionCurve mc = run_mc(m, grid);
      for (std::size_t v = 0; v < variants.size(); ++v) {
        DistributionCurve an;
        an.grid = grid;
        for (std::size_t i = 0; i < grid.size(); ++i) {
          const auto& tt = terms[p.mu][v][i];
          const double t = grid[i];
          an.values.push_back(t == 0.0 ? 0.0
                                       : -std::expm1(-4.0 * p.mu * t -
                                                     2.0 * p.lambda * (2.0 * t - tt.tx.value - tt.ty.value)));
        }
        const ComparisonReport r = compare(an, mc);
        res.rows.push_back({p, law, variants[v], r.ks, r.argmax_t});
        if (law == AngleLaw::PaperUniform) worst[v] = std::max(worst[v], r.ks);
      }
    }
  }
  const auto best = std::min_element(worst.begin(), worst.end()) - worst.begin();
  res.best = variants[static_cast<std::size_t>(best)];
  res.best_worst_ks = worst[static_cast<std::size_t>(best)];
  return res;
}

}  // namespace plcp

#endif  // PLCP_EXPERIMENTS_HPP
