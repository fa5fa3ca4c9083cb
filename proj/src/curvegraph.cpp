#include "qflat/curvegraph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <string>

#include "qflat/error.hpp"
#include "qflat/geom.hpp"

namespace qf {

namespace {

void require_closed(const CurveTrace& t, const char* which) {
  if (t.segments.empty()) fail(ErrorCode::invalid, std::string(which) + " trace is empty");
  const FlowSegment& head = t.segments.front();
  const FlowSegment& tail = t.segments.back();
  if (head.poly != tail.poly || !(head.start == tail.end))
    fail(ErrorCode::invalid, std::string(which) + " trace is not closed");
}

// Polygon edge whose open interior holds p, or -1; p at a corner is rejected
// outright since a regular geodesic stays clear of every vertex class.
int open_edge_at(const Polygon& P, const Scalar& p, const char* which) {
  int n = P.size();
  for (int e = 0; e < n; ++e) {
    if (p == P.vertices[static_cast<size_t>(e)])
      fail(ErrorCode::invalid, std::string(which) + " trace passes through a vertex");
    if (on_segment_open(P.vertices[static_cast<size_t>(e)],
                        P.vertices[static_cast<size_t>((e + 1) % n)], p))
      return e;
  }
  return -1;
}

// p on the segment including its start but not its end. Chaining half-open
// segments makes every point of a closed trace belong to exactly one of them.
bool half_open_contains(const FlowSegment& s, const Scalar& p) {
  return on_segment_closed(s.start, s.end, p) && !(p == s.end);
}

bool collinear_segments_overlap(const FlowSegment& a, const FlowSegment& b) {
  Scalar d = a.end - a.start;
  Scalar t0 = dot(d, b.start - a.start);
  Scalar t1 = dot(d, b.end - a.start);
  Scalar lo = (t1 - t0).sign_real() == Sign::negative ? t1 : t0;
  Scalar hi = (t1 - t0).sign_real() == Sign::negative ? t0 : t1;
  return hi.sign_real() == Sign::positive &&
         (lo - d.norm_sq()).sign_real() == Sign::negative;
}

struct CoeffLess {
  bool operator()(const Scalar& a, const Scalar& b) const {
    return Scalar::cmp_coeffwise(a, b) < 0;
  }
};

}  // namespace

IntersectionReport geometric_intersection(const FlatSurface& S, const CurveTrace& a,
                                          const CurveTrace& b) {
  require_closed(a, "first");
  require_closed(b, "second");
  const std::vector<Polygon>& polys = S.polygons();
  size_t np = polys.size();
  std::vector<std::vector<const FlowSegment*>> A(np), B(np);
  for (const FlowSegment& s : a.segments) A[static_cast<size_t>(s.poly)].push_back(&s);
  for (const FlowSegment& s : b.segments) B[static_cast<size_t>(s.poly)].push_back(&s);

  IntersectionReport rep;
  for (size_t p = 0; p < np; ++p) {
    if (A[p].empty() || B[p].empty()) continue;
    const Polygon& P = polys[p];

    // Crossings away from the polygon boundary live in exactly one chart.
    for (const FlowSegment* sa : A[p])
      for (const FlowSegment* sb : B[p]) {
        Scalar da = sa->end - sa->start;
        Scalar db = sb->end - sb->start;
        if (cross_sign(da, db) == Sign::zero) {
          if (orient(sa->start, sa->end, sb->start) == Sign::zero &&
              collinear_segments_overlap(*sa, *sb))
            rep.parallel_overlap = true;
          continue;
        }
        Scalar X = line_line_intersect(sa->start, da, sb->start, sb->end);
        if (!half_open_contains(*sa, X) || !half_open_contains(*sb, X)) continue;
        if (open_edge_at(P, X, "first") >= 0) continue;  // handled on its owning chart
        rep.crossings.emplace_back(static_cast<int>(p), X);
      }

    // Crossings on a glued edge: both strands break there, and each touches
    // the chart of the gluing's first side exactly once. Pair the touches.
    std::map<Scalar, std::pair<std::vector<Scalar>, std::vector<Scalar>>, CoeffLess> touches;
    auto collect = [&](const std::vector<const FlowSegment*>& segs, bool second_curve,
                       const char* which) {
      for (const FlowSegment* s : segs) {
        Scalar d = s->end - s->start;
        for (const Scalar* end : {&s->start, &s->end}) {
          int e = open_edge_at(P, *end, which);
          if (e < 0) continue;  // interior break where the trace closes up
          int g = S.gluing_at(static_cast<int>(p), e);
          if (g < 0)
            fail(ErrorCode::invalid, std::string(which) + " trace touches the surface boundary");
          const Gluing& G = S.gluings()[static_cast<size_t>(g)];
          if (G.poly_a != static_cast<int>(p) || G.edge_a != e) continue;
          auto& slot = touches[*end];
          (second_curve ? slot.second : slot.first).push_back(d);
        }
      }
    };
    collect(A[p], false, "first");
    collect(B[p], true, "second");
    for (const auto& [X, dirs] : touches)
      for (const Scalar& da : dirs.first)
        for (const Scalar& db : dirs.second) {
          if (cross_sign(da, db) == Sign::zero)
            rep.parallel_overlap = true;  // two geodesics on one line through X
          else
            rep.crossings.emplace_back(static_cast<int>(p), X);
        }
  }

  rep.count = static_cast<long>(rep.crossings.size());
  return rep;
}

DisjointnessGraph disjointness_graph(const FlatSurface& S,
                                     const std::vector<CurveTrace>& curves) {
  int n = static_cast<int>(curves.size());
  DisjointnessGraph G;
  G.canonical_ids.reserve(static_cast<size_t>(n));
  for (const CurveTrace& c : curves) G.canonical_ids.push_back(canonical_cycle_word(c.word));
  G.adjacency.assign(static_cast<size_t>(n), {});

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      IntersectionReport r = geometric_intersection(S, curves[static_cast<size_t>(i)],
                                                    curves[static_cast<size_t>(j)]);
      bool same_geodesic =
          r.parallel_overlap && r.count == 0 && G.canonical_ids[static_cast<size_t>(i)] ==
                                                    G.canonical_ids[static_cast<size_t>(j)];
      if (r.count == 0 && !same_geodesic) {
        G.adjacency[static_cast<size_t>(i)].push_back(j);
        G.adjacency[static_cast<size_t>(j)].push_back(i);
      }
    }
  for (auto& row : G.adjacency) std::sort(row.begin(), row.end());

  std::vector<int> comp(static_cast<size_t>(n), -1);
  auto bfs = [&](int from, int mark, std::vector<int>* dist) {
    std::deque<int> q{from};
    std::vector<int> d(static_cast<size_t>(n), -1);
    d[static_cast<size_t>(from)] = 0;
    int far = 0;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      if (mark >= 0) comp[static_cast<size_t>(v)] = mark;
      far = std::max(far, d[static_cast<size_t>(v)]);
      for (int w : G.adjacency[static_cast<size_t>(v)])
        if (d[static_cast<size_t>(w)] < 0) {
          d[static_cast<size_t>(w)] = d[static_cast<size_t>(v)] + 1;
          q.push_back(w);
        }
    }
    if (dist) *dist = std::move(d);
    return far;
  };
  for (int v = 0; v < n; ++v) {
    if (comp[static_cast<size_t>(v)] >= 0) continue;
    int id = static_cast<int>(G.components.size());
    bfs(v, id, nullptr);
    std::vector<int> members;
    for (int w = 0; w < n; ++w)
      if (comp[static_cast<size_t>(w)] == id) members.push_back(w);
    int diam = 0;
    for (int w : members) diam = std::max(diam, bfs(w, -1, nullptr));
    G.components.push_back(std::move(members));
    G.component_diameter.push_back(diam);
  }
  return G;
}

int distance_upper_bound(long i) {
  if (i < 0) fail(ErrorCode::invalid, "intersection count must be non-negative");
  if (i == 0) return 1;
  unsigned __int128 sq = static_cast<unsigned __int128>(i) * static_cast<unsigned __int128>(i);
  int t = 0;
  while ((static_cast<unsigned __int128>(1) << t) < sq) ++t;
  return t + 2;
}

}  // namespace qf
