#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "plcp/experiments.hpp"
#include "plcp/oracle.hpp"
#include "support.hpp"

namespace {

using plcp::kPi;
using plcp::Line;
using plcp::PalmScenario;
using plcp::Realization;
using plcp::TurnPolicy;

// Line with direction angle `dir` through (a, b), in normal form.
Line line_through(plcp::LineId id, double dir, double a, double b) {
  double phi = std::fmod(dir + kPi / 2, kPi);
  if (phi < 0) phi += kPi;
  return Line{id, phi, a * std::cos(phi) + b * std::sin(phi), false};
}

// Arc coordinate of (a, b) on `l`.
double arc_of(const Line& l, double a, double b) { return a * l.dx() + b * l.dy(); }

Realization fixture(PalmScenario sc, double R) {
  Realization r;
  r.scenario = sc;
  r.clip_radius = R;
  r.lines.push_back({0, kPi / 2, 0.0, true});
  return r;
}

void finish(Realization& r) { r.intersections = plcp::compute_intersections(r.lines, r.clip_radius); }

double route_length(const plcp::PathResult& p) {
  double s = 0.0;
  for (const auto& h : p.route) s += h.length();
  return s;
}

TEST(ShortestPath, SingleLineNearestPoint) {
  Realization r = fixture(PalmScenario::typical_point(), 3.0);
  r.points = {{0, 0.7}, {0, -1.2}};
  finish(r);
  const auto p = plcp::shortest_path(r, TurnPolicy::one_turn(), 3.0);
  ASSERT_TRUE(p.length);
  EXPECT_DOUBLE_EQ(*p.length, 0.7);
  EXPECT_EQ(p.turns_used, 0);
  EXPECT_EQ(p.target->arc_coord, 0.7);
  EXPECT_TRUE(plcp::shortest_path(r, TurnPolicy::one_turn(), 0.5).censored());
}

// A point that is Euclidean-near but street-far loses to a street-near one.
TEST(ShortestPath, StreetMetricNotEuclidean) {
  Realization r = fixture(PalmScenario::typical_point(), 3.0);
  r.lines.push_back(line_through(1, kPi / 2, 0.3, 0.0));  // vertical at x = 0.3
  const double euclid_near = arc_of(r.lines[1], 0.3, 0.9);
  r.points = {{0, 1.0}, {1, euclid_near}};
  finish(r);
  ASSERT_LT(std::hypot(0.3, 0.9), 1.0);
  const auto p = plcp::shortest_path(r, TurnPolicy::one_turn(), 3.0);
  ASSERT_TRUE(p.length);
  EXPECT_NEAR(*p.length, 1.0, 1e-12);
  EXPECT_EQ(p.target->line_id, 0u);

  // a second point closer along the streets is taken with one turn
  r.points.push_back({1, arc_of(r.lines[1], 0.3, 0.5)});
  const auto q = plcp::shortest_path(r, TurnPolicy::one_turn(), 3.0);
  EXPECT_NEAR(*q.length, 0.8, 1e-12);
  EXPECT_EQ(q.turns_used, 1);
  ASSERT_EQ(q.route.size(), 2u);
  EXPECT_NEAR(route_length(q), *q.length, 1e-9);
  EXPECT_NEAR(q.route[0].length(), 0.3, 1e-12);
  // zero turns only sees the x-axis point
  EXPECT_NEAR(*plcp::shortest_path(r, TurnPolicy::zero_turn(), 3.0).length, 1.0, 1e-12);
}

// Triangle O, A = (s1, 0), B on the second origin line: the hop along L1 has
// length s1 sin(theta) / sin(theta1 - theta) and B sits at s1 sin(theta1) /
// sin(theta1 - theta) from the origin.
TEST(ShortestPath, CrossingRelationOnTwoTurnRoute) {
  const double theta = 1.1, theta1 = 2.3, s1 = 0.6;
  Realization r = fixture(PalmScenario::typical_intersection(), 4.0);
  r.lines.push_back(line_through(1, theta, 0.0, 0.0));
  r.lines[1].through_origin = true;
  r.lines.push_back(line_through(2, theta1, s1, 0.0));
  finish(r);
  const double s1p = s1 * std::sin(theta1) / std::sin(theta1 - theta);
  const double hop = s1 * std::sin(theta) / std::sin(theta1 - theta);
  auto c = plcp::crossings_within(r, 1, 4.0);
  std::erase_if(c, [](const plcp::Crossing& k) { return k.other_line != 2; });  // drop L_x at the origin
  ASSERT_EQ(c.size(), 1u);
  EXPECT_NEAR(std::abs(c[0].s), s1p, 1e-9);

  // a point on L1 just past B, reached by O -> A -> past B: one turn
  const Line& l1 = r.lines[2];
  const double bx = s1p * std::cos(theta), by = s1p * std::sin(theta);
  const double arc_a = arc_of(l1, s1, 0.0), arc_b = arc_of(l1, bx, by);
  EXPECT_NEAR(std::abs(arc_b - arc_a), hop, 1e-9);
  r.points = {{2, arc_b + 0.05 * (arc_b > arc_a ? 1 : -1)}};
  const auto p = plcp::shortest_path(r, TurnPolicy::k_turn(2), 4.0);
  ASSERT_TRUE(p.length);
  // either O -> A -> target or O -> B -> back along L1
  const double via_a = s1 + hop + 0.05, via_b = s1p + 0.05;
  EXPECT_NEAR(*p.length, std::min(via_a, via_b), 1e-9);
  EXPECT_NEAR(route_length(p), *p.length, 1e-9);
}

TEST(ShortestPath, Errors) {
  const Realization r = plcp::sample_palm({1.0, 1.0}, PalmScenario::typical_point(), 2.0, 3);
  try {
    plcp::shortest_path(r, TurnPolicy::k_turn(-1), 1.0);
    FAIL();
  } catch (const plcp::Error& e) {
    EXPECT_EQ(e.code(), plcp::Errc::PolicyBudgetNegative);
  }
  try {
    plcp::shortest_path(r, TurnPolicy::one_turn(), 2.5);
    FAIL();
  } catch (const plcp::Error& e) {
    EXPECT_EQ(e.code(), plcp::Errc::TBeyondClip);
  }
}

TEST(ShortestPath, RouteInvariantsOnRandomRealizations) {
  for (std::uint64_t s = 0; s < 300; ++s) {
    const auto sc = s % 2 ? PalmScenario::typical_point() : PalmScenario::typical_intersection();
    const Realization r = plcp::sample_palm({1.5, 0.7}, sc, 3.0, s);
    for (const auto& pol : {TurnPolicy::zero_turn(), TurnPolicy::one_turn(),
                            TurnPolicy::two_turn_directed(), TurnPolicy::k_turn(3)}) {
      const auto p = plcp::shortest_path(r, pol, 3.0);
      if (p.censored()) {
        EXPECT_TRUE(p.route.empty());
        continue;
      }
      EXPECT_LE(p.turns_used, pol.budget());
      EXPECT_NEAR(route_length(p), *p.length, 1e-9);
      EXPECT_LE(*p.length, 3.0);
      ASSERT_FALSE(p.route.empty());
      EXPECT_EQ(p.route.back().line, p.target->line_id);
      EXPECT_EQ(p.route.back().to_arc, p.target->arc_coord);
      EXPECT_EQ(p.route.front().from_arc, 0.0);
      EXPECT_EQ(static_cast<int>(p.route.size()), p.turns_used + 1);
    }
  }
}

TEST(ShortestPath, MonotoneInBudgetAndHorizon) {
  for (std::uint64_t s = 0; s < 300; ++s) {
    const Realization r = plcp::sample_palm({2.0, 0.5}, PalmScenario::typical_point(), 3.0, s);
    const plcp::StreetGraph g(r);
    double prev = INFINITY;
    for (int k = 0; k <= 4; ++k) {
      const auto p = plcp::shortest_path(g, TurnPolicy::k_turn(k), 3.0);
      const double len = p.length.value_or(INFINITY);
      EXPECT_LE(len, prev) << "seed " << s << " k " << k;
      prev = len;
    }
    std::optional<double> last;
    for (double tm : {0.5, 1.0, 2.0, 3.0}) {
      const auto p = plcp::shortest_path(g, TurnPolicy::k_turn(2), tm);
      if (last) {
        ASSERT_TRUE(p.length);
        EXPECT_EQ(*p.length, *last);
      }
      if (p.length) last = p.length;
    }
  }
}

TEST(Search, MatchesEnumerationExactly) {
  int compared = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto sc = s % 2 ? PalmScenario::typical_point() : PalmScenario::typical_intersection();
    const Realization r = plcp::sample_palm({1.0, 1.0}, sc, 2.5, s);
    const plcp::StreetGraph g(r);
    for (int budget = 0; budget <= 2; ++budget) {
      for (bool lower : {true, false}) {
        for (bool directed : {false, true}) {
          const auto a = plcp::detail::enumerate_paths(g, budget, lower, directed, 2.5);
          const auto b = plcp::detail::search_paths(g, budget, lower, directed, 2.5);
          ASSERT_EQ(a.length.has_value(), b.length.has_value()) << "seed " << s;
          if (a.length) {
            ASSERT_EQ(*a.length, *b.length) << "seed " << s << " budget " << budget;
            EXPECT_EQ(a.target, b.target);
            ++compared;
          }
        }
      }
    }
  }
  EXPECT_GT(compared, 5000);
}

double ks_censored(const plcp::Ecdf& e, auto cdf) {
  const auto& x = e.observed();
  const double n = static_cast<double>(e.trials());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, std::abs((i + 1.0) / n - f), std::abs(i / n - f)});
  }
  return std::max(d, std::abs(e(e.t_max()) - cdf(e.t_max())));
}

TEST(SampleD, NoLinesGivesTwoSidedExponential) {
  const plcp::McSpec spec{{0.0, 1.0}, PalmScenario::typical_point(), TurnPolicy::one_turn(),
                          100000, 3.0, 11, 1};
  const auto e = plcp::run_mc_samples(spec);
  EXPECT_LT(ks_censored(e, [](double t) { return -std::expm1(-2.0 * t); }), 0.01);
}

TEST(SampleD, ZeroTurnIntersectionFourSidedExponential) {
  const plcp::McSpec spec{{1.0, 0.8}, PalmScenario::typical_intersection(),
                          TurnPolicy::zero_turn(), 100000, 3.0, 12, 1};
  const auto e = plcp::run_mc_samples(spec);
  EXPECT_LT(ks_censored(e, [](double t) { return -std::expm1(-4.0 * 0.8 * t); }), 0.01);
}

TEST(SampleD, SameSeedSameValue) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto a = plcp::sample_D({1.0, 1.0}, PalmScenario::typical_point(), TurnPolicy::k_turn(2),
                                  2.0, {5, s});
    const auto b = plcp::sample_D({1.0, 1.0}, PalmScenario::typical_point(), TurnPolicy::k_turn(2),
                                  2.0, {5, s});
    EXPECT_EQ(a, b);
  }
}

}  // namespace
