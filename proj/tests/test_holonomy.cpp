#include "qflat/holonomy.hpp"

#include <set>
#include <tuple>

#include "doctest.h"
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

FlatSurface twelve_gon() {
  return surface_from_text(
      "order 12\n"
      "polygon T 0*u(0) 1*u(0) 2*u(0) 3*u(0) 4*u(0)"
      " 4*u(0)+1*u(4) 4*u(0)+2*u(4) 4*u(0)+3*u(4) 4*u(0)+4*u(4)"
      " 4*u(0)+4*u(4)+1*u(8) 4*u(0)+4*u(4)+2*u(8) 4*u(0)+4*u(4)+3*u(8)\n"
      "glue T.1 T.11 rot 2\nglue T.0 T.10 rot 2\nglue T.9 T.7 rot 2\n"
      "glue T.8 T.6 rot 2\nglue T.5 T.3 rot 2\nglue T.4 T.2 rot 2\n");
}

bool all_pass(const std::vector<CoverCheck>& checks) {
  bool ok = !checks.empty();
  for (const CoverCheck& c : checks) {
    INFO(c.name, ": ", c.detail);
    CHECK(c.pass);
    ok = ok && c.pass;
  }
  return ok;
}

}  // namespace

TEST_CASE("holonomy orders of the reference surfaces") {
  HolonomyData ht = holonomy_order(torus());
  CHECK(ht.q == 1);
  CHECK(ht.q0 == 1);

  HolonomyData ho = holonomy_order(octagon());
  CHECK(ho.q == 4);
  CHECK(ho.q0 == 2);
  CHECK(ho.generator == 2);

  HolonomyData hw = holonomy_order(twelve_gon());
  CHECK(hw.q == 6);
  CHECK(hw.q0 == 3);
  CHECK(hw.generator == 2);
  CHECK(hw.q * hw.generator == twelve_gon().order());
}

TEST_CASE("holonomy invariant under chart rotation and edge subdivision") {
  FlatSurface rotated = surface_from_text(
      "order 8\n"
      "polygon Z 1*u(3) 1*u(4) 1*u(5) 1*u(6) 1*u(7) 1*u(0) 1*u(1) 1*u(2)\n"
      "glue Z.2 Z.4 rot 6\nglue Z.3 Z.5 rot 6\nglue Z.6 Z.0 rot 6\nglue Z.7 Z.1 rot 6\n");
  CHECK(holonomy_order(rotated).q == 4);

  // Torus with the glued horizontal edges split into two collinear halves.
  FlatSurface sub = surface_from_text(
      "order 4\n"
      "polygon P 0*u(0) 1/2*u(0) 1*u(0) 1*u(0)+1*u(1) 1/2*u(0)+1*u(1) 1*u(1)\n"
      "glue P.0 P.4 rot 0\nglue P.1 P.3 rot 0\nglue P.2 P.5 rot 0\n");
  CHECK(holonomy_order(sub).q == 1);
  CHECK(sub.genus() == 1);
}

TEST_CASE("torus cover is trivial") {
  FlatSurface S = torus();
  auto [cover, data] = trivializing_cover(S);
  CHECK(data.degree == 1);
  CHECK(cover.polygons().size() == 1);
  CHECK(cover.area() == S.area());
  CHECK(all_pass(verify_cover(S, cover, data)));
  CHECK(holonomy_order(cover).q == 1);
}

TEST_CASE("octagon cover has degree 2") {
  FlatSurface S = octagon();
  auto [cover, data] = trivializing_cover(S);
  CHECK(data.degree == 2);
  CHECK(cover.polygons().size() == 2);
  CHECK(cover.area() == S.area().scaled(2));
  CHECK(holonomy_order(cover).q == 2);
  CHECK(all_pass(verify_cover(S, cover, data)));
}

TEST_CASE("twelve-gon cover has degree 3") {
  FlatSurface S = twelve_gon();
  auto [cover, data] = trivializing_cover(S);
  CHECK(data.degree == 3);
  CHECK(cover.polygons().size() == 3);
  CHECK(cover.area() == S.area().scaled(3));
  CHECK(holonomy_order(cover).q == 2);
  CHECK(all_pass(verify_cover(S, cover, data)));
}

TEST_CASE("punctured Euler characteristic is multiplicative") {
  FlatSurface S = twelve_gon().fully_punctured();
  CHECK(punctured_euler_characteristic(S) == -5);
  auto [cover, data] = trivializing_cover(S);
  CHECK(punctured_euler_characteristic(cover) == -15);
  CHECK(all_pass(verify_cover(S, cover, data)));
}

TEST_CASE("shifting every sheet index is a deck transformation") {
  FlatSurface S = twelve_gon();
  auto [cover, data] = trivializing_cover(S);
  int q0 = data.degree;
  const Field& F = cover.field();
  int g = holonomy_order(S).generator;

  int N = cover.order();
  auto sheet_index = [&](int base_poly, int sheet) { return base_poly * q0 + sheet; };
  // The deck turn rotates each sheet chart by zeta^g, except that wrapping
  // sheet q0-1 back to 0 composes with a half turn (the cover trivializes
  // holonomy only up to -I). delta[cp] is the exact chart rotation applied.
  std::vector<int> delta(cover.polygons().size());
  for (size_t cp = 0; cp < cover.polygons().size(); ++cp) {
    auto [bp, sheet] = data.projection[cp];
    CHECK(sheet_index(bp, sheet) == static_cast<int>(cp));
    size_t np = static_cast<size_t>(sheet_index(bp, (sheet + 1) % q0));
    delta[cp] = ((data.cover_chart_rot[np] - data.cover_chart_rot[cp]) % N + N) % N;
    CHECK((delta[cp] - g) % (N / 2) == 0);
    const auto& cur = cover.polygons()[cp].vertices;
    const auto& nxt = cover.polygons()[np].vertices;
    REQUIRE(cur.size() == nxt.size());
    for (size_t v = 0; v < cur.size(); ++v) CHECK(nxt[v] == cur[v].rotated(delta[cp]));
    (void)F;
  }

  std::set<std::tuple<int, int, int, int, int>> edges;
  auto canon = [](int pa, int ea, int pb, int eb, int rot, int N_) {
    if (std::tie(pb, eb) < std::tie(pa, ea)) {
      std::swap(pa, pb);
      std::swap(ea, eb);
      rot = (N_ - rot) % N_;
    }
    return std::tuple{pa, ea, pb, eb, rot};
  };
  for (const Gluing& G : cover.gluings())
    edges.insert(canon(G.poly_a, G.edge_a, G.poly_b, G.edge_b, G.rot, N));
  for (const Gluing& G : cover.gluings()) {
    auto [pa, sa] = data.projection[static_cast<size_t>(G.poly_a)];
    auto [pb, sb] = data.projection[static_cast<size_t>(G.poly_b)];
    int rot = ((G.rot + delta[static_cast<size_t>(G.poly_b)] -
                delta[static_cast<size_t>(G.poly_a)]) % N + N) % N;
    auto shifted = canon(sheet_index(pa, (sa + 1) % q0), G.edge_a,
                         sheet_index(pb, (sb + 1) % q0), G.edge_b, rot, N);
    CHECK(edges.count(shifted) == 1);
  }
}
