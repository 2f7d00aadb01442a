#ifndef PLCP_QUADRATURE_HPP
#define PLCP_QUADRATURE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "plcp/error.hpp"

namespace plcp::quad {

struct QuadSpec {
  double rel_tol = 1e-6;
  double abs_tol = 1e-9;
  int max_subdivisions = 2000;
  std::vector<double> hints;  // interior breakpoints for 1-D integrals

  void check() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
      throw Error(Errc::InvalidArgument, "tolerance", "tolerances must be positive");
    }
    if (max_subdivisions < 1) {
      throw Error(Errc::InvalidArgument, "max_subdivisions", "max_subdivisions must be >= 1");
    }
  }
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
};

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

namespace detail {

// 15-point Kronrod abscissae and weights with the embedded 7-point Gauss rule.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
};

template <class F>
Panel gauss_kronrod15(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(resk);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[static_cast<std::size_t>(j)];
    f1[static_cast<std::size_t>(j)] = f(center - dx);
    f2[static_cast<std::size_t>(j)] = f(center + dx);
    const double sum = f1[static_cast<std::size_t>(j)] + f2[static_cast<std::size_t>(j)];
    resk += kWgk[static_cast<std::size_t>(j)] * sum;
    resabs += kWgk[static_cast<std::size_t>(j)] *
              (std::abs(f1[static_cast<std::size_t>(j)]) + std::abs(f2[static_cast<std::size_t>(j)]));
    if (j % 2 == 1) resg += kWg[static_cast<std::size_t>(j / 2)] * sum;
  }
  const double mean = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[static_cast<std::size_t>(j)] *
              (std::abs(f1[static_cast<std::size_t>(j)] - mean) +
               std::abs(f2[static_cast<std::size_t>(j)] - mean));
  }
  const double value = resk * half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    err = std::max(50.0 * kEps * resabs, err);
  }
  return Panel{a, b, value, err};
}

inline QuadResult sum_panels(std::vector<Panel>& panels, int subdivisions) {
  std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  CompensatedSum value, error;
  for (const Panel& p : panels) {
    value.add(p.value);
    error.add(p.error);
  }
  return QuadResult{value.value(), error.value(), subdivisions};
}

}  // namespace detail

/// Global adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
///
/// The interval is first split at every hint inside (a, b); the panel with
/// the largest error estimate is then bisected until the summed estimate
/// meets max(abs_tol, rel_tol * |value|). The panel sum is taken in
/// left-to-right order with compensation, so results do not depend on the
/// refinement history. Throws QuadratureError with the best estimate when
/// max_subdivisions bisections are not enough.
template <class F>
QuadResult integrate_1d(const F& f, double a, double b, const QuadSpec& spec) {
  spec.check();
  if (!(a <= b)) {
    throw Error(Errc::InvalidArgument, "bounds", "integration requires a <= b");
  }
  if (a == b) return {};

  std::vector<double> cuts{a};
  for (double h : spec.hints) {
    if (h > a && h < b) cuts.push_back(h);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<detail::Panel> panels;
  panels.reserve(cuts.size() + 16);
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    panels.push_back(detail::gauss_kronrod15(f, cuts[i], cuts[i + 1]));
    total += panels.back().value;
    total_err += panels.back().error;
  }
  const auto worse = [&panels](std::size_t x, std::size_t y) {
    if (panels[x].error != panels[y].error) return panels[x].error < panels[y].error;
    return panels[x].a > panels[y].a;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(worse)> heap(worse);
  for (std::size_t i = 0; i < panels.size(); ++i) heap.push(i);

  int subdivisions = 0;
  while (total_err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
    const std::size_t worst = heap.top();
    const detail::Panel p = panels[worst];
    const double mid = 0.5 * (p.a + p.b);
    const bool too_narrow = !(mid > p.a && mid < p.b) ||
                            (p.b - p.a) < 1e-15 * std::max(1.0, std::abs(mid));
    if (subdivisions >= spec.max_subdivisions || too_narrow) {
      QuadResult best = detail::sum_panels(panels, subdivisions);
      throw QuadratureError(best.value, best.error, {},
                            "tolerance not met within the subdivision budget");
    }
    heap.pop();
    const detail::Panel left = detail::gauss_kronrod15(f, p.a, mid);
    const detail::Panel right = detail::gauss_kronrod15(f, mid, p.b);
    total += left.value + right.value - p.value;
    total_err += left.error + right.error - p.error;
    panels[worst] = left;
    panels.push_back(right);
    heap.push(worst);
    heap.push(panels.size() - 1);
    ++subdivisions;
  }
  return detail::sum_panels(panels, subdivisions);
}

/// integrate_1d for an inner level of a hand-nested integral: a failure is
/// rethrown carrying `where`, the outer coordinates of the failing panel.
template <class F>
QuadResult integrate_1d_at(const F& f, double a, double b, const QuadSpec& spec,
                           std::initializer_list<double> where) {
  try {
    return integrate_1d(f, a, b, spec);
  } catch (const QuadratureError& e) {
    if (!e.where().empty()) throw;
    throw QuadratureError(e.best_estimate(), e.error_estimate(), std::vector<double>(where),
                          e.what());
  }
}

/// Integration bounds of one level of an iterated integral, as a function of
/// the outer coordinates (outermost first). `hints` may add breakpoints.
struct Level {
  std::function<std::pair<double, double>(std::span<const double>)> bounds;
  std::function<std::vector<double>(std::span<const double>)> hints;

  static Level fixed(double lo, double hi, std::vector<double> cuts = {}) {
    return Level{[lo, hi](std::span<const double>) { return std::pair{lo, hi}; },
                 [cuts](std::span<const double>) { return cuts; }};
  }
};

namespace detail {

template <class F>
QuadResult integrate_level(const F& f, const std::vector<Level>& region, const QuadSpec& spec,
                           std::vector<double>& coords, std::size_t level) {
  const std::span<const double> outer(coords.data(), level);
  auto [lo, hi] = region[level].bounds(outer);
  if (!(hi > lo)) return {};  // empty or inverted region contributes nothing
  QuadSpec local = spec;
  local.hints = region[level].hints ? region[level].hints(outer) : std::vector<double>{};
  const bool innermost = level + 1 == region.size();
  double inner_err = 0.0;
  const auto g = [&](double x) {
    coords[level] = x;
    if (innermost) return f(std::span<const double>(coords.data(), coords.size()));
    const QuadResult r = integrate_level(f, region, spec, coords, level + 1);
    inner_err = std::max(inner_err, r.error);
    return r.value;
  };
  try {
    QuadResult r = integrate_1d(g, lo, hi, local);
    r.error += (hi - lo) * inner_err;
    return r;
  } catch (const QuadratureError& e) {
    if (!e.where().empty()) throw;
    throw QuadratureError(e.best_estimate(), e.error_estimate(),
                          std::vector<double>(outer.begin(), outer.end()),
                          "nested integral failed at level " + std::to_string(level));
  }
}

}  // namespace detail

/// Iterated integral over `region` (outermost level first). The integrand
/// receives the full coordinate vector. The reported error adds the outer
/// estimate to the outer width times the worst inner estimate. An inner
/// failure propagates with the outer coordinates of the failing panel.
template <class F>
QuadResult integrate_nested(const F& f, const std::vector<Level>& region, const QuadSpec& spec) {
  if (region.empty()) {
    throw Error(Errc::InvalidArgument, "region", "region needs at least one level");
  }
  std::vector<double> coords(region.size(), 0.0);
  return detail::integrate_level(f, region, spec, coords, 0);
}

}  // namespace plcp::quad

#endif  // PLCP_QUADRATURE_HPP
