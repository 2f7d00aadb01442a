#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "plcp/oracle.hpp"
#include "plcp/sampler.hpp"
#include "support.hpp"

namespace {

using plcp::AngleLaw;
using plcp::ModelParams;
using plcp::PalmScenario;
using plcp::Realization;

TEST(SamplePalm, NoBackgroundWithoutLambda) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Realization p = plcp::sample_palm({0.0, 1.0}, PalmScenario::typical_point(), 5.0, s);
    EXPECT_EQ(p.lines.size(), 1u);
    const Realization q =
        plcp::sample_palm({0.0, 1.0}, PalmScenario::typical_intersection(), 5.0, s);
    EXPECT_EQ(q.lines.size(), 2u);
    EXPECT_TRUE(plcp::crossings_within(p, 0, 5.0).empty());
  }
}

TEST(SamplePalm, RejectsBadRadius) {
  try {
    plcp::sample_palm({1.0, 1.0}, PalmScenario::typical_point(), 0.0, 1);
    FAIL();
  } catch (const plcp::Error& e) {
    EXPECT_EQ(e.code(), plcp::Errc::NonPositiveRadius);
  }
}

TEST(SamplePalm, Deterministic) {
  const auto a = plcp::sample_palm({1.0, 1.0}, PalmScenario::typical_intersection(), 4.0, {7, 3});
  const auto b = plcp::sample_palm({1.0, 1.0}, PalmScenario::typical_intersection(), 4.0, {7, 3});
  ASSERT_EQ(a.lines.size(), b.lines.size());
  for (std::size_t i = 0; i < a.lines.size(); ++i) {
    EXPECT_EQ(a.lines[i].angle, b.lines[i].angle);
    EXPECT_EQ(a.lines[i].signed_offset, b.lines[i].signed_offset);
  }
  EXPECT_EQ(a.points, b.points);
}

TEST(SamplePalm, StructuralInvariants) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto kind = s % 2 ? PalmScenario::typical_point() : PalmScenario::typical_intersection();
    const double R = 3.0;
    const Realization r = plcp::sample_palm({1.5, 1.0}, kind, R, s);
    std::size_t through = 0;
    for (std::size_t i = 0; i < r.lines.size(); ++i) {
      EXPECT_EQ(r.lines[i].id, i);
      EXPECT_GE(r.lines[i].angle, 0.0);
      EXPECT_LT(r.lines[i].angle, plcp::kPi);
      through += r.lines[i].through_origin;
    }
    EXPECT_EQ(through, r.origin_line_count());
    if (through == 2) { EXPECT_NE(r.lines[0].angle, r.lines[1].angle); }
    for (const auto& p : r.points) {
      EXPECT_TRUE(r.has_line(p.line_id));
      const auto& l = r.lines[p.line_id];
      EXPECT_LE(p.arc_coord * p.arc_coord + l.signed_offset * l.signed_offset, R * R + 1e-9);
      if (l.through_origin) { EXPECT_NE(p.arc_coord, 0.0); }
    }
    for (const auto& in : r.intersections) {
      EXPECT_LE(std::hypot(in.x, in.y), R * (1 + 1e-12));
      for (auto [id, arc] : {std::pair{in.line_a, in.arc_a}, std::pair{in.line_b, in.arc_b}}) {
        const auto& l = r.lines[id];
        EXPECT_LE(std::abs(in.x * l.nx() + in.y * l.ny() - l.signed_offset), 1e-9 * R);
        // the arc coordinate names the same point
        const double px = l.signed_offset * l.nx() + arc * l.dx();
        const double py = l.signed_offset * l.ny() + arc * l.dy();
        EXPECT_LE(std::hypot(px - in.x, py - in.y), 1e-9 * R);
      }
    }
  }
}

// A line at angle phi and offset p crosses the chord |s| <= t of the x-axis
// iff |p| <= t |cos phi|; averaging over phi gives 2t / (pi R). The count
// mean kappa * pi * R * lambda therefore yields 2 kappa lambda t crossings.
TEST(SamplePalm, LineCountCalibrationConstant) {
  const int n = 100000;
  double mean_abs_cos = 0.0;
  for (int i = 0; i < n; ++i) mean_abs_cos += std::abs(std::cos((i + 0.5) * plcp::kPi / n));
  mean_abs_cos /= n;
  const double R = 7.0, t = 2.0, lambda = 1.3;
  const double crossings =
      plcp::kLineCountCalibration * plcp::kPi * R * lambda * (t * mean_abs_cos / R);
  EXPECT_NEAR(crossings, 2.0 * lambda * t, 1e-9);
  EXPECT_DOUBLE_EQ(plcp::kLineCountCalibration, 1.0);
}

TEST(SamplePalm, CrossingCountIsPoissonTwoLambdaT) {
  const int n = 10000;
  std::vector<double> counts;
  for (int s = 0; s < n; ++s) {
    const Realization r = plcp::sample_palm({1.0, 1.0}, PalmScenario::typical_point(), 3.0,
                                            static_cast<std::uint64_t>(s));
    counts.push_back(static_cast<double>(plcp::crossings_within(r, 0, 3.0).size()));
  }
  const auto [mean, var] = support::mean_var(counts);
  EXPECT_NEAR(mean, 6.0, 3.0 * std::sqrt(6.0 / n));
  EXPECT_NEAR(var, 6.0, 0.3);
}

TEST(SamplePalm, PointCountOnLineIsPoissonMuLength) {
  const int n = 10000;
  std::vector<double> counts;
  for (int s = 0; s < n; ++s) {
    const Realization r = plcp::sample_palm({0.5, 2.0}, PalmScenario::typical_point(), 2.0,
                                            static_cast<std::uint64_t>(s));
    counts.push_back(static_cast<double>(std::count_if(
        r.points.begin(), r.points.end(), [](const auto& p) { return p.line_id == 0; })));
  }
  const auto [mean, var] = support::mean_var(counts);
  // the x-axis chord has length 4
  EXPECT_NEAR(mean, 8.0, 3.0 * std::sqrt(8.0 / n));
  EXPECT_NEAR(var, 8.0, 0.4);
}

TEST(CrossingsWithin, HandBuiltFixture) {
  Realization r;
  r.scenario = PalmScenario::typical_point();
  r.clip_radius = 2.0;
  r.lines.push_back({0, plcp::kPi / 2, 0.0, true});
  // direction angle pi/4 through (0.5, 0): normal angle 3 pi / 4
  const double a = 3.0 * plcp::kPi / 4;
  r.lines.push_back({1, a, 0.5 * std::cos(a), false});
  r.intersections = plcp::compute_intersections(r.lines, r.clip_radius);
  const auto c = plcp::crossings_within(r, 0, 1.0);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].other_line, 1u);
  EXPECT_NEAR(c[0].s, 0.5, 1e-12);
  EXPECT_NEAR(c[0].incidence_angle, plcp::kPi / 4, 1e-12);
  EXPECT_TRUE(plcp::crossings_within(r, 0, 0.4).empty());
}

TEST(CrossingsWithin, Errors) {
  const Realization r = plcp::sample_palm({1.0, 1.0}, PalmScenario::typical_point(), 2.0, 1);
  const auto code = [&](plcp::LineId id, double t) {
    try {
      plcp::crossings_within(r, id, t);
    } catch (const plcp::Error& e) {
      return e.code();
    }
    return plcp::Errc::InvalidArgument;
  };
  EXPECT_EQ(code(static_cast<plcp::LineId>(r.lines.size() + 5), 1.0), plcp::Errc::UnknownLine);
  EXPECT_EQ(code(0, 2.5), plcp::Errc::TBeyondClip);
}

TEST(CrossingsWithin, DistancesUniformGivenCount) {
  std::vector<double> u;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const Realization r = plcp::sample_palm(
        {1.0, 1.0}, PalmScenario::typical_intersection(AngleLaw::PaperUniform), 2.0, s);
    for (plcp::LineId line : {0u, 1u}) {
      for (const auto& c : plcp::crossings_within(r, line, 1.5)) {
        if (c.other_line > 1) u.push_back(std::abs(c.s) / 1.5);
      }
    }
  }
  ASSERT_GT(u.size(), 50000u);
  EXPECT_LT(support::ks_uniform(u), support::ks_critical(u.size(), 0.001));
}

TEST(SamplePalm, SinWeightedOriginAngle) {
  // second origin line: direction angle theta has cdf (1 - cos theta) / 2
  std::vector<double> u;
  for (std::uint64_t s = 0; s < 5000; ++s) {
    const Realization r = plcp::sample_palm(
        {0.0, 1.0}, PalmScenario::typical_intersection(AngleLaw::SinWeighted), 1.0, s);
    const double theta = plcp::detail::wrap_angle(r.lines[1].angle - plcp::kPi / 2);
    u.push_back((1.0 - std::cos(theta)) / 2.0);
  }
  EXPECT_LT(support::ks_uniform(u), support::ks_critical(u.size(), 0.001));
}

TEST(SamplePalm, UniformOriginAngle) {
  std::vector<double> u;
  for (std::uint64_t s = 0; s < 5000; ++s) {
    const Realization r = plcp::sample_palm({0.0, 1.0}, PalmScenario::typical_intersection(), 1.0, s);
    u.push_back(plcp::detail::wrap_angle(r.lines[1].angle - plcp::kPi / 2) / plcp::kPi);
  }
  EXPECT_LT(support::ks_uniform(u), support::ks_critical(u.size(), 0.001));
}

TEST(Rotate, ShortestPathLengthsUnchanged) {
  for (std::uint64_t s = 0; s < 300; ++s) {
    const auto sc = s % 2 ? PalmScenario::typical_point() : PalmScenario::typical_intersection();
    const Realization r = plcp::sample_palm({1.0, 1.0}, sc, 3.0, s);
    const Realization q = plcp::rotate(r, 0.37 + 0.9 * static_cast<double>(s % 5));
    for (const auto& pol : {plcp::TurnPolicy::zero_turn(), plcp::TurnPolicy::one_turn(),
                            plcp::TurnPolicy::k_turn(2)}) {
      const auto a = plcp::shortest_path(r, pol, 3.0).length;
      const auto b = plcp::shortest_path(q, pol, 3.0).length;
      ASSERT_EQ(a.has_value(), b.has_value()) << "seed " << s;
      if (a) { EXPECT_NEAR(*a, *b, 1e-9) << "seed " << s; }
    }
  }
}

// Larger clip radii add far-away structure only.
TEST(SamplePalm, ClipSufficiencyForPathLengths) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Realization r = plcp::sample_palm({1.0, 1.0}, PalmScenario::typical_point(), 1.5, s);
    // same lines and points restricted to a smaller disk
    Realization small = r;
    small.clip_radius = 1.0;
    std::erase_if(small.points, [&](const auto& p) {
      const auto& l = r.lines[p.line_id];
      return p.arc_coord * p.arc_coord + l.signed_offset * l.signed_offset > 1.0;
    });
    small.intersections = plcp::compute_intersections(small.lines, 1.0);
    const auto a = plcp::shortest_path(r, plcp::TurnPolicy::k_turn(2), 1.0).length;
    const auto b = plcp::shortest_path(small, plcp::TurnPolicy::k_turn(2), 1.0).length;
    ASSERT_EQ(a.has_value(), b.has_value());
    if (a) { EXPECT_EQ(*a, *b); }
  }
}

}  // namespace
