#include "qflat/curvegraph.hpp"

#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "qflat/error.hpp"
#include "qflat/format.hpp"

using namespace qf;

namespace {

FlatSurface torus() {
  return surface_from_text(
      "order 4\n"
      "polygon P 0*u(0) 1*u(0) 1*u(0)+1*u(1) 1*u(1)\n"
      "glue P.0 P.2 rot 0\nglue P.1 P.3 rot 0\n");
}

FlatSurface octagon() {
  return surface_from_text(
      "order 8\n"
      "polygon O 1*u(0) 1*u(1) 1*u(2) 1*u(3) 1*u(4) 1*u(5) 1*u(6) 1*u(7)\n"
      "glue O.2 O.4 rot 6\nglue O.3 O.5 rot 6\nglue O.6 O.0 rot 6\nglue O.7 O.1 rot 6\n");
}

Scalar pt(const Field& f, const Rat& x, const Rat& y) {
  return f.from_rat(x) + f.zeta_pow(1).scaled(y);
}

// Core of the torus cylinder in the primitive lattice direction (p, q).
CurveTrace pq_core(const FlatSurface& S, int p, int q) {
  const Field& F = S.field();
  Scalar dir = pt(F, p, q);
  auto [t0, c0] = S.classes()[0].kernel_corners[0];
  auto [idx, d] = canonical_corner_for_ray(S, 0, t0, c0, dir);
  auto hit = shoot_ray(S, 0, idx, d, dir.norm_sq());
  REQUIRE(hit.has_value());
  auto cyl = maximal_cylinder_from(S, {hit->sc, LeafSide::left}, dir.norm_sq());
  REQUIRE(cyl.has_value());
  return cyl->core;
}

}  // namespace

TEST_CASE("torus axis curves cross once") {
  FlatSurface S = torus();
  const Field& F = S.field();
  CurveTrace h = pq_core(S, 1, 0);
  CurveTrace v = pq_core(S, 0, 1);

  IntersectionReport r = geometric_intersection(S, h, v);
  CHECK(r.count == 1);
  CHECK(r.crossings.size() == 1);
  CHECK(!r.parallel_overlap);
  CHECK(r.crossings[0].first == 0);
  CHECK(r.crossings[0].second == pt(F, Rat(1, 2), Rat(1, 2)));

  IntersectionReport rr = geometric_intersection(S, v, h);
  CHECK(rr.count == 1);
  CHECK(rr.crossings == r.crossings);
}

TEST_CASE("parallel leaves of one cylinder") {
  FlatSurface S = torus();
  const Field& F = S.field();
  CurveTrace h = pq_core(S, 1, 0);
  CurveTrace v = pq_core(S, 0, 1);

  // A second closed leaf of the horizontal cylinder at another height.
  Trajectory loop = straight_flow(S, 0, pt(F, Rat(1, 3), Rat(1, 4)), F.one(), F.one());
  REQUIRE(loop.stop == FlowStop::closed);
  CurveTrace offset{loop.segments, F.one(), F.one(), loop.length_sq, loop.word};

  IntersectionReport self = geometric_intersection(S, h, h);
  CHECK(self.count == 0);
  CHECK(self.parallel_overlap);

  IntersectionReport apart = geometric_intersection(S, h, offset);
  CHECK(apart.count == 0);
  CHECK(!apart.parallel_overlap);

  // Counts against a third curve do not depend on the chosen leaf.
  CHECK(geometric_intersection(S, offset, v).count == geometric_intersection(S, h, v).count);
}

TEST_CASE("torus determinant oracle") {
  FlatSurface S = torus();

  auto check_pair = [&](int p, int q, int r, int s) {
    CurveTrace a = pq_core(S, p, q);
    CurveTrace b = pq_core(S, r, s);
    long det = std::labs(static_cast<long>(p) * s - static_cast<long>(q) * r);
    IntersectionReport ab = geometric_intersection(S, a, b);
    CHECK(ab.count == det);
    CHECK(geometric_intersection(S, b, a).count == det);
  };

  // Crossings landing exactly on the glued square edges, both traversals.
  check_pair(1, 0, 1, 1);
  check_pair(1, 1, 1, -1);
  check_pair(1, 0, 2, 3);

  std::mt19937 rng(20240817u);
  std::uniform_int_distribution<int> pick(-5, 5);
  auto primitive = [&] {
    int p = 0, q = 0;
    while (p == 0 && q == 0) {
      p = pick(rng);
      q = pick(rng);
    }
    int g = std::gcd(std::abs(p), std::abs(q));
    return std::make_pair(p / g, q / g);
  };
  for (int it = 0; it < 20; ++it) {
    auto [p, q] = primitive();
    auto [r, s] = primitive();
    check_pair(p, q, r, s);
  }
}

TEST_CASE("octagon disjointness graph") {
  FlatSurface S = octagon();
  const Field& F = S.field();
  Scalar side = F.zeta_pow(1) - F.one();
  std::vector<Cylinder> cyls = enumerate_cylinders(S, side.norm_sq().scaled(16), 4);
  std::vector<CurveTrace> cores;
  for (const Cylinder& c : cyls)
    if (c.embedded) cores.push_back(c.core);
  REQUIRE(cores.size() == 3);

  // The two antiparallel diagonal cylinders are disjoint; the vertical one
  // crosses each of them twice.
  CHECK(geometric_intersection(S, cores[0], cores[1]).count == 0);
  CHECK(geometric_intersection(S, cores[0], cores[2]).count == 2);
  CHECK(geometric_intersection(S, cores[1], cores[2]).count == 2);

  DisjointnessGraph G = disjointness_graph(S, cores);
  REQUIRE(G.adjacency.size() == 3);
  for (size_t v = 0; v < 3; ++v)
    for (int w : G.adjacency[v]) {
      CHECK(w != static_cast<int>(v));
      const std::vector<int>& back = G.adjacency[static_cast<size_t>(w)];
      CHECK(std::count(back.begin(), back.end(), static_cast<int>(v)) == 1);
    }
  REQUIRE(G.components.size() == 2);
  CHECK(G.components[0] == std::vector<int>{0, 1});
  CHECK(G.components[1] == std::vector<int>{2});
  CHECK(G.component_diameter == std::vector<int>{1, 0});

  DisjointnessGraph again = disjointness_graph(S, cores);
  CHECK(again.adjacency == G.adjacency);
  CHECK(again.components == G.components);
  CHECK(again.component_diameter == G.component_diameter);
}

TEST_CASE("torus axis graph has no edge") {
  FlatSurface S = torus();
  std::vector<CurveTrace> curves{pq_core(S, 1, 0), pq_core(S, 0, 1)};
  DisjointnessGraph G = disjointness_graph(S, curves);
  CHECK(G.adjacency[0].empty());
  CHECK(G.adjacency[1].empty());
  CHECK(G.components.size() == 2);
  CHECK(G.component_diameter == std::vector<int>{0, 0});

  DisjointnessGraph one = disjointness_graph(S, {pq_core(S, 2, 1)});
  CHECK(one.components.size() == 1);
  CHECK(one.component_diameter == std::vector<int>{0});
}

TEST_CASE("distance bound formula") {
  CHECK(distance_upper_bound(0) == 1);
  CHECK(distance_upper_bound(1) == 2);
  CHECK(distance_upper_bound(2) == 4);
  CHECK(distance_upper_bound(3) == 6);
  CHECK(distance_upper_bound(4) == 6);
  CHECK(distance_upper_bound(5) == 7);
  CHECK(distance_upper_bound(8) == 8);
  CHECK(distance_upper_bound(16) == 10);
  CHECK(distance_upper_bound(100) == 16);
  for (long i = 1; i < 200; ++i)
    CHECK(distance_upper_bound(i + 1) >= distance_upper_bound(i));
  CHECK_THROWS_AS(distance_upper_bound(-1), Error);
}

TEST_CASE("intersection input validation") {
  FlatSurface S = torus();
  const Field& F = S.field();
  CurveTrace h = pq_core(S, 1, 0);

  CurveTrace empty;
  CHECK_THROWS_AS(geometric_intersection(S, empty, h), Error);

  // An arc cut off mid-chart is not a closed curve.
  Trajectory ray = straight_flow(S, 0, pt(F, Rat(1, 4), Rat(1, 4)), F.one(), F.from_rat(Rat(1, 4)));
  REQUIRE(ray.stop == FlowStop::budget_exhausted);
  CurveTrace open{ray.segments, F.one(), F.one(), ray.length_sq, ray.word};
  CHECK_THROWS_AS(geometric_intersection(S, open, h), Error);
}
