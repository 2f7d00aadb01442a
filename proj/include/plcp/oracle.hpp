#ifndef PLCP_ORACLE_HPP
#define PLCP_ORACLE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <tuple>
#include <vector>

#include "plcp/error.hpp"
#include "plcp/model.hpp"
#include "plcp/sampler.hpp"

namespace plcp {

/// One straight segment of a route, along `line` from `from_arc` to `to_arc`.
struct Hop {
  LineId line = 0;
  double from_arc = 0.0;
  double to_arc = 0.0;

  double length() const { return std::abs(to_arc - from_arc); }
};

/// Shortest admissible path from the origin. `length` is empty when the trial
/// is censored, i.e. no admissible point lies within t_max.
struct PathResult {
  std::optional<double> length;
  double t_max = 0.0;
  int turns_used = 0;
  std::optional<PointOnLine> target;
  std::vector<Hop> route;

  bool censored() const { return !length.has_value(); }
};

/// Per-line view of a realization: sorted point arcs, sorted crossings, and a
/// merged event list for the generic search. The origin of a typical point is
/// an extra event on line 0.
class StreetGraph {
 public:
  enum class EventKind : std::uint8_t { Point, Crossing, Origin };

  struct Event {
    double arc = 0.0;
    EventKind kind = EventKind::Point;
    LineId other = 0;             // crossing: the other line
    std::uint32_t other_index = 0;  // crossing: index of the same event on `other`
  };

  explicit StreetGraph(const Realization& real) : real_(&real) {
    const std::size_t n = real.lines.size();
    events_.resize(n);
    points_.resize(n);
    for (const PointOnLine& p : real.points) {
      points_[p.line_id].push_back(p.arc_coord);
      events_[p.line_id].push_back(Event{p.arc_coord, EventKind::Point, 0, 0});
    }
    for (const Intersection& in : real.intersections) {
      events_[in.line_a].push_back(Event{in.arc_a, EventKind::Crossing, in.line_b, 0});
      events_[in.line_b].push_back(Event{in.arc_b, EventKind::Crossing, in.line_a, 0});
    }
    if (real.scenario.kind == ScenarioKind::TypicalPoint) {
      events_[0].push_back(Event{0.0, EventKind::Origin, 0, 0});
    }
    for (std::size_t l = 0; l < n; ++l) {
      std::sort(points_[l].begin(), points_[l].end());
      std::stable_sort(events_[l].begin(), events_[l].end(), [](const Event& a, const Event& b) {
        return std::tie(a.arc, a.kind, a.other) < std::tie(b.arc, b.kind, b.other);
      });
    }
    // Link each crossing with its twin on the other line.
    for (std::size_t l = 0; l < n; ++l) {
      for (std::uint32_t i = 0; i < events_[l].size(); ++i) {
        Event& e = events_[l][i];
        if (e.kind != EventKind::Crossing) continue;
        const auto& other = events_[e.other];
        for (std::uint32_t j = 0; j < other.size(); ++j) {
          if (other[j].kind == EventKind::Crossing && other[j].other == l) {
            e.other_index = j;
            break;
          }
        }
      }
    }
    offsets_.resize(n + 1, 0);
    for (std::size_t l = 0; l < n; ++l) offsets_[l + 1] = offsets_[l] + events_[l].size();
  }

  const Realization& realization() const { return *real_; }
  std::size_t line_count() const { return events_.size(); }
  const std::vector<Event>& events(LineId line) const { return events_[line]; }
  const std::vector<double>& points(LineId line) const { return points_[line]; }
  std::size_t event_offset(LineId line) const { return offsets_[line]; }
  std::size_t total_events() const { return offsets_.back(); }

  /// Index of the event at the origin on an origin line.
  std::uint32_t origin_event(LineId line) const {
    const auto& ev = events_[line];
    for (std::uint32_t i = 0; i < ev.size(); ++i) {
      const bool at_origin =
          ev[i].kind == EventKind::Origin ||
          (ev[i].kind == EventKind::Crossing && real_->lines[ev[i].other].through_origin);
      if (at_origin) return i;
    }
    throw Error(Errc::InvalidArgument, "line", "line has no origin event");
  }

 private:
  const Realization* real_;
  std::vector<std::vector<Event>> events_;
  std::vector<std::vector<double>> points_;
  std::vector<std::size_t> offsets_;
};

namespace detail {

struct Candidate {
  double length = std::numeric_limits<double>::infinity();
  LineId line = 0;
  double arc = 0.0;
  int turns = 0;
  std::array<Hop, 3> route{};
  int hops = 0;
};

/// Hops already travelled before the final segment (at most two).
struct Prefix {
  std::array<Hop, 2> hops{};
  int n = 0;

  Prefix then(Hop h) const {
    Prefix p = *this;
    p.hops[static_cast<std::size_t>(p.n++)] = h;
    return p;
  }
};

inline void offer(Candidate& best, double len, LineId line, double arc, int turns,
                  const Prefix& prefix, double entry) {
  if (std::tie(len, line, arc) < std::tie(best.length, best.line, best.arc)) {
    best.length = len;
    best.line = line;
    best.arc = arc;
    best.turns = turns;
    for (int i = 0; i < prefix.n; ++i) best.route[static_cast<std::size_t>(i)] = prefix.hops[static_cast<std::size_t>(i)];
    best.route[static_cast<std::size_t>(prefix.n)] = Hop{line, entry, arc};
    best.hops = prefix.n + 1;
  }
}

/// Nearest points on either side of `entry` along `line`, offered as targets.
inline void offer_line(Candidate& best, const StreetGraph& g, LineId line, double entry,
                       double base, double t_max, int turns, const Prefix& prefix,
                       bool positive_only) {
  const auto& pts = g.points(line);
  auto it = std::lower_bound(pts.begin(), pts.end(), entry);
  if (it != pts.end()) {
    const double len = base + std::abs(*it - entry);
    if (len <= t_max) offer(best, len, line, *it, turns, prefix, entry);
  }
  if (!positive_only && it != pts.begin()) {
    const double a = *std::prev(it);
    const double len = base + std::abs(a - entry);
    if (len <= t_max) offer(best, len, line, a, turns, prefix, entry);
  }
}

inline std::vector<LineId> start_lines(const Realization& real, bool directed) {
  if (directed || real.scenario.kind == ScenarioKind::TypicalPoint) return {0};
  return {0, 1};
}

/// Closed enumeration of all paths with at most `budget` <= 2 turns.
inline PathResult enumerate_paths(const StreetGraph& g, int budget, bool include_lower,
                                  bool directed, double t_max) {
  const Realization& real = g.realization();
  Candidate best;
  const auto counts = [&](int turns) { return include_lower || turns == budget; };
  for (LineId o : start_lines(real, directed)) {
    const bool fwd_only = directed && o == 0;
    if (counts(0)) offer_line(best, g, o, 0.0, 0.0, t_max, 0, {}, fwd_only);
    if (budget < 1) continue;
    const auto& ev_o = g.events(o);
    for (const auto& c : ev_o) {
      if (c.kind != StreetGraph::EventKind::Crossing) continue;
      if (fwd_only && c.arc < 0.0) continue;
      const double len1 = 0.0 + std::abs(c.arc - 0.0);
      if (len1 > t_max) continue;
      const LineId m = c.other;
      const auto& ev_m = g.events(m);
      const double e1 = ev_m[c.other_index].arc;
      const Prefix prefix1 = Prefix{}.then(Hop{o, 0.0, c.arc});
      if (counts(1)) offer_line(best, g, m, e1, len1, t_max, 1, prefix1, false);
      if (budget < 2) continue;
      for (std::uint32_t j = 0; j < ev_m.size(); ++j) {
        const auto& c2 = ev_m[j];
        if (c2.kind != StreetGraph::EventKind::Crossing || j == c.other_index) continue;
        const double len2 = len1 + std::abs(c2.arc - e1);
        if (len2 > t_max) continue;
        const LineId q = c2.other;
        const double e2 = g.events(q)[c2.other_index].arc;
        offer_line(best, g, q, e2, len2, t_max, 2, prefix1.then(Hop{m, e1, c2.arc}), false);
      }
    }
  }
  PathResult out;
  out.t_max = t_max;
  if (std::isfinite(best.length)) {
    out.length = best.length;
    out.turns_used = best.turns;
    out.target = PointOnLine{best.line, best.arc};
    out.route.assign(best.route.begin(), best.route.begin() + best.hops);
  }
  return out;
}

/// Label-constrained Dijkstra over (line, event, turns, direction, fresh).
/// A turn switches lines at a crossing at zero cost; after a turn the path
/// must move before turning again, and it never reverses along a line.
/// Distances are accumulated per line as base + |arc - entry| so they agree
/// bit for bit with the closed enumeration.
inline PathResult search_paths(const StreetGraph& g, int budget, bool include_lower,
                               bool directed, double t_max) {
  using Kind = StreetGraph::EventKind;
  const Realization& real = g.realization();
  const std::size_t layers = static_cast<std::size_t>(budget) + 1;
  const auto key_of = [&](LineId line, std::uint32_t idx, int turns, int dir, int fresh) {
    return (((g.event_offset(line) + idx) * layers + static_cast<std::size_t>(turns)) * 2 +
            static_cast<std::size_t>(dir)) * 2 + static_cast<std::size_t>(fresh);
  };
  struct State {
    LineId line;
    std::uint32_t idx;
    int turns;
    int dir;  // 0: decreasing arc, 1: increasing arc
    int fresh;
    double base;
    double entry;
  };
  struct Item {
    double dist;
    std::size_t key;
    State st;
    std::size_t parent;
    bool operator>(const Item& o) const { return std::tie(dist, key) > std::tie(o.dist, o.key); }
  };
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  const std::size_t nkeys = g.total_events() * layers * 4;
  std::vector<char> settled(nkeys, 0);
  std::vector<std::size_t> parent(nkeys, kNone);
  std::vector<State> state_of(nkeys);
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;

  for (LineId o : start_lines(real, directed)) {
    const std::uint32_t idx = g.origin_event(o);
    for (int dir = 0; dir < 2; ++dir) {
      if (directed && o == 0 && dir == 0) continue;
      State s{o, idx, 0, dir, 0, 0.0, 0.0};
      heap.push(Item{0.0, key_of(o, idx, 0, dir, 0), s, kNone});
    }
  }

  double best_len = std::numeric_limits<double>::infinity();
  std::size_t best_key = kNone;
  LineId best_line = 0;
  double best_arc = 0.0;

  while (!heap.empty()) {
    Item it = heap.top();
    heap.pop();
    if (it.dist > best_len) break;
    if (settled[it.key]) continue;
    settled[it.key] = 1;
    parent[it.key] = it.parent;
    state_of[it.key] = it.st;
    const State& s = it.st;
    const auto& ev = g.events(s.line);
    const auto& e = ev[s.idx];

    if (e.kind == Kind::Point && (include_lower || s.turns == budget)) {
      if (std::tie(it.dist, s.line, e.arc) < std::tie(best_len, best_line, best_arc)) {
        best_len = it.dist;
        best_line = s.line;
        best_arc = e.arc;
        best_key = it.key;
      }
      continue;  // every continuation from here is longer than this target
    }

    // Move one event along the current direction.
    const bool first_hop = directed && s.line == 0 && s.turns == 0;
    const long next = s.dir == 1 ? static_cast<long>(s.idx) + 1 : static_cast<long>(s.idx) - 1;
    if (next >= 0 && next < static_cast<long>(ev.size()) && !(first_hop && s.dir == 0)) {
      const auto nidx = static_cast<std::uint32_t>(next);
      const double d = s.base + std::abs(ev[nidx].arc - s.entry);
      if (d <= t_max) {
        State ns{s.line, nidx, s.turns, s.dir, 0, s.base, s.entry};
        const std::size_t k = key_of(s.line, nidx, s.turns, s.dir, 0);
        if (!settled[k]) heap.push(Item{d, k, ns, it.key});
      }
    }

    // Turn onto the crossing line.
    if (e.kind == Kind::Crossing && s.turns < budget && !s.fresh) {
      const LineId m = e.other;
      const std::uint32_t midx = e.other_index;
      const double entry = g.events(m)[midx].arc;
      for (int dir = 0; dir < 2; ++dir) {
        State ns{m, midx, s.turns + 1, dir, 1, it.dist, entry};
        const std::size_t k = key_of(m, midx, s.turns + 1, dir, 1);
        if (!settled[k]) heap.push(Item{it.dist, k, ns, it.key});
      }
    }
  }

  PathResult out;
  out.t_max = t_max;
  if (best_key == kNone) return out;
  out.length = best_len;
  out.target = PointOnLine{best_line, best_arc};
  // Walk back to the start, opening a new hop at every line change.
  std::vector<State> chain;
  for (std::size_t k = best_key; k != kNone; k = parent[k]) chain.push_back(state_of[k]);
  std::reverse(chain.begin(), chain.end());
  out.turns_used = chain.back().turns;
  for (const State& st : chain) {
    const double arc = g.events(st.line)[st.idx].arc;
    if (out.route.empty() || out.route.back().line != st.line) {
      out.route.push_back(Hop{st.line, arc, arc});
    } else {
      out.route.back().to_arc = arc;
    }
  }
  return out;
}

}  // namespace detail

inline PathResult shortest_path(const StreetGraph& graph, const TurnPolicy& policy,
                                double t_max) {
  const Realization& real = graph.realization();
  if (policy.budget() < 0) {
    throw Error(Errc::PolicyBudgetNegative, "k", "turn budget must be >= 0");
  }
  if (t_max > real.clip_radius) {
    throw Error(Errc::TBeyondClip, "t_max", "t_max exceeds the clip radius");
  }
  const bool directed = policy.directed();
  switch (policy.kind) {
    case PolicyKind::ZeroTurn:
      return detail::enumerate_paths(graph, 0, true, directed, t_max);
    case PolicyKind::OneTurn:
      return detail::enumerate_paths(graph, 1, policy.include_lower_turn_paths, directed, t_max);
    case PolicyKind::TwoTurnDirectedPositiveX:
      return detail::enumerate_paths(graph, 2, policy.include_lower_turn_paths, true, t_max);
    case PolicyKind::KTurn:
      return detail::search_paths(graph, policy.k, policy.include_lower_turn_paths, directed,
                                  t_max);
  }
  return {};
}

inline PathResult shortest_path(const Realization& real, const TurnPolicy& policy,
                                double t_max) {
  return shortest_path(StreetGraph(real), policy, t_max);
}

/// One Monte Carlo trial: sample a realization clipped at t_max and return
/// D, or nothing when censored.
inline std::optional<double> sample_D(const ModelParams& params, const PalmScenario& scenario,
                                      const TurnPolicy& policy, double t_max, SeedRecord seed) {
  const Realization real = sample_palm(params, scenario, t_max, seed);
  return shortest_path(real, policy, t_max).length;
}

}  // namespace plcp

#endif  // PLCP_ORACLE_HPP
