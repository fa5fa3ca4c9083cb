#include "qflat/builders.hpp"

#include <algorithm>
#include <map>
#include <vector>

#include "doctest.h"
#include "qflat/cylinder.hpp"
#include "qflat/error.hpp"
#include "qflat/flow.hpp"
#include "qflat/format.hpp"
#include "qflat/geom.hpp"
#include "qflat/holonomy.hpp"

using namespace qf;

namespace {

std::vector<Rat> cone_angles(const FlatSurface& S) {
  std::vector<Rat> out;
  for (const ConeClass& c : S.classes()) {
    if (c.angle_over_pi != 2) out.push_back(c.angle_over_pi);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int the_class_with_angle(const FlatSurface& S, const Rat& over_pi) {
  int found = -1;
  for (size_t i = 0; i < S.classes().size(); ++i) {
    if (S.classes()[i].angle_over_pi == over_pi) {
      REQUIRE(found < 0);
      found = static_cast<int>(i);
    }
  }
  REQUIRE(found >= 0);
  return found;
}

bool parallel(const Scalar& a, const Scalar& b) { return cross_sign(a, b) == Sign::zero; }

std::map<int, int> gluing_multiset(const std::vector<int>& word) {
  std::map<int, int> m;
  for (int letter : word) ++m[word_gluing(letter)];
  return m;
}

}  // namespace

TEST_CASE("unit square torus") {
  FlatSurface S = square_torus();
  const Field& F = S.field();
  CHECK(F.order() == 4);
  CHECK(S.genus() == 1);
  CHECK(S.cone_count() == 0);
  REQUIRE(S.classes().size() == 1);
  CHECK(S.classes()[0].kind == VertexKind::marked);
  CHECK(S.classes()[0].angle_over_pi == 2);
  CHECK(S.area() == F.one());
  CHECK(S.gauss_bonnet_check());
  HolonomyData h = holonomy_order(S);
  CHECK(h.q == 1);
  CHECK(h.q0 == 1);
}

TEST_CASE("regular 4g-gon reproduces the octagon at g = 2") {
  FlatSurface S = regular_4g_gon(2);
  const Field& F = S.field();
  CHECK(F.order() == 8);
  REQUIRE(S.polygons().size() == 1);
  const Polygon& P = S.polygons()[0];
  REQUIRE(P.size() == 8);
  for (int k = 0; k < 8; ++k) CHECK(P.vertices[static_cast<size_t>(k)] == F.zeta_pow(k));
  std::vector<std::array<int, 3>> expect{{2, 4, 6}, {3, 5, 6}, {6, 0, 6}, {7, 1, 6}};
  REQUIRE(S.gluings().size() == 4);
  for (size_t i = 0; i < 4; ++i) {
    CHECK(S.gluings()[i].poly_a == 0);
    CHECK(S.gluings()[i].poly_b == 0);
    CHECK(S.gluings()[i].edge_a == expect[i][0]);
    CHECK(S.gluings()[i].edge_b == expect[i][1]);
    CHECK(S.gluings()[i].rot == expect[i][2]);
  }
  CHECK(S.genus() == 2);
  CHECK(cone_angles(S) == std::vector<Rat>{Rat(6)});
  CHECK(holonomy_order(S).q == 4);
  Scalar sqrt2 = F.zeta_pow(1) + F.zeta_pow(7);
  CHECK(S.area() == sqrt2.scaled(Rat(2)));
  CHECK(S.gauss_bonnet_check());
}

TEST_CASE("regular 4g-gon family invariants") {
  FlatSurface g3 = regular_4g_gon(3);
  CHECK(g3.field().order() == 12);
  CHECK(g3.genus() == 3);
  CHECK(cone_angles(g3) == std::vector<Rat>{Rat(10)});
  // The single gluing rotation is zeta^(2g+2); its order in Z_4g is
  // 4g / gcd(2g+2, 4g), which is 3 at g = 3, not 2g.
  CHECK(holonomy_order(g3).q == 3);

  FlatSurface g4 = regular_4g_gon(4);
  CHECK(g4.field().order() == 16);
  CHECK(g4.genus() == 4);
  CHECK(cone_angles(g4) == std::vector<Rat>{Rat(14)});
  CHECK(holonomy_order(g4).q == 8);
  CHECK(g4.gauss_bonnet_check());

  CHECK_THROWS_AS(regular_4g_gon(1), Error);
  try {
    regular_4g_gon(1);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::usage);
  }
  try {
    regular_4g_gon(16);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::limit);
  }
}

TEST_CASE("triangular twelve-gon of genus three") {
  FlatSurface S = twelve_gon_genus3();
  const Field& F = S.field();
  CHECK(F.order() == 12);
  CHECK(S.genus() == 3);
  CHECK(cone_angles(S) == std::vector<Rat>{Rat(10)});
  Scalar sqrt3 = F.zeta_pow(1) + F.zeta_pow(11);
  CHECK(S.area() == sqrt3.scaled(Rat(4)));
  CHECK(S.gauss_bonnet_check());
  HolonomyData h = holonomy_order(S);
  CHECK(h.q == 6);
  CHECK(h.q0 == 3);

  auto [cover, data] = trivializing_cover(S);
  CHECK(data.degree == 3);
  for (const CoverCheck& c : verify_cover(S, cover, data)) CHECK(c.pass);
  CHECK(cover.area() == S.area().scaled(Rat(3)));
}

TEST_CASE("bordered building block") {
  FlatSurface S = building_block(4);
  const Field& F = S.field();
  CHECK(F.order() == 12);
  CHECK(S.has_boundary());
  CHECK(S.euler_characteristic() == -1);
  REQUIRE(S.polygons().size() == 1);
  CHECK(S.polygons()[0].size() == 9);

  // One merged boundary class of angle 13pi/3 (triangle corner plus four
  // straight vertices), and one 2pi/3 class per chain vertex.
  std::vector<Rat> angles;
  Rat audit(0);
  for (const ConeClass& c : S.classes()) {
    CHECK(c.on_boundary);
    angles.push_back(c.angle_over_pi);
    audit += Rat(1) - c.angle_over_pi;
  }
  std::sort(angles.begin(), angles.end());
  std::vector<Rat> expect{Rat(2) / Rat(3), Rat(2) / Rat(3), Rat(2) / Rat(3), Rat(2) / Rat(3),
                          Rat(13) / Rat(3)};
  CHECK(angles == expect);
  CHECK(audit == 2 * S.euler_characteristic());

  // Every chain edge is tangent to the buffer circle of squared radius 4/3.
  Scalar sqrt3 = F.zeta_pow(1) + F.zeta_pow(11);
  Scalar center = F.from_rat(Rat(2)) + sqrt3.scaled(Rat(2) / Rat(3)).rotated(3);
  const Polygon& P = S.polygons()[0];
  for (int e = 2; e <= 6; ++e) {
    Scalar A = P.vertices[static_cast<size_t>(e)];
    Scalar B = P.vertices[static_cast<size_t>((e + 1) % P.size())];
    CHECK(dist_sq_point_segment(center, A, B) == F.from_rat(Rat(4) / Rat(3)));
  }
  // The two glued unit arcs survive as closed saddle connections of length 1
  // based at the merged class; the side midpoint adds one interior diagonal.
  int merged = the_class_with_angle(S, Rat(13) / Rat(3));
  int unit_loops = 0;
  for (const SaddleConnection& sc : saddle_connections(S, F.one(), 1)) {
    if (sc.start_class == merged && sc.end_class == merged && sc.length_sq == F.one()) ++unit_loops;
  }
  CHECK(unit_loops == 3);

  FlatSurface S3 = building_block(3);
  CHECK(S3.field().order() == 36);
  CHECK(S3.euler_characteristic() == -1);
  Rat audit3(0);
  for (const ConeClass& c : S3.classes()) audit3 += Rat(1) - c.angle_over_pi;
  CHECK(audit3 == -2);

  try {
    building_block(2);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::usage);
  }
  try {
    building_block(7);  // needs order lcm(12, 21) = 84
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::limit);
  }
}

TEST_CASE("square-tiled staircase surface") {
  FlatSurface S = fig7_square_tiled();
  const Field& F = S.field();
  CHECK(F.order() == 4);
  REQUIRE(S.polygons().size() == 1);
  const Polygon& P = S.polygons()[0];
  REQUIRE(P.size() == 10);
  Scalar i = F.zeta_pow(1);
  std::vector<std::pair<Rat, Rat>> expect{{0, 0}, {3, 0}, {4, 0}, {6, 0}, {8, 0},
                                          {8, 1}, {5, 1}, {4, 1}, {2, 1}, {0, 1}};
  for (size_t v = 0; v < 10; ++v) {
    CHECK(P.vertices[v] == F.from_rat(expect[v].first) + i.scaled(expect[v].second));
  }
  REQUIRE(S.gluings().size() == 5);
  for (size_t g = 0; g < 5; ++g) {
    CHECK(S.gluings()[g].edge_a == static_cast<int>(g));
    CHECK(S.gluings()[g].edge_b == static_cast<int>(g) + 5);
    CHECK(S.gluings()[g].rot == 0);
  }
  CHECK(S.genus() == 2);
  CHECK(cone_angles(S) == std::vector<Rat>{Rat(4), Rat(4)});
  CHECK(holonomy_order(S).q == 1);
  CHECK(S.area() == F.from_rat(Rat(8)));
  CHECK(S.gauss_bonnet_check());

  // One horizontal and one vertical cylinder, each filling the surface.
  auto cyls = enumerate_cylinders(S, F.from_rat(Rat(64)), 4);
  int horizontal = 0, vertical = 0;
  for (const Cylinder& c : cyls) {
    if (parallel(c.core.direction, F.one())) {
      ++horizontal;
      CHECK(c.circumference_sq == F.from_rat(Rat(64)));
      CHECK(c.width_sq == F.one());
      CHECK(c.area == F.from_rat(Rat(8)));
      CHECK(c.embedded);
      CHECK(c.core.word.size() == 1);
    }
    if (parallel(c.core.direction, i)) {
      ++vertical;
      CHECK(c.circumference_sq == F.from_rat(Rat(64)));
      CHECK(c.width_sq == F.one());
      CHECK(c.area == F.from_rat(Rat(8)));
      CHECK(c.embedded);
      // The upward curve crosses the four squares' gluings with the interval
      // multiplicities 3, 1, 2, 2 and never the vertical-side gluing.
      CHECK(gluing_multiset(c.core.word) == std::map<int, int>{{0, 3}, {1, 1}, {2, 2}, {3, 2}});
    }
  }
  CHECK(horizontal == 1);
  CHECK(vertical == 1);
}

TEST_CASE("balanced interval tilt keeps the transverse cylinder") {
  SquareTiledBase base = fig7_base();
  DeformationSpec spec;
  spec.entries = {{2, Rat(1) / Rat(12), Rat(1)}, {3, Rat(-1) / Rat(12), Rat(1)}};
  spec.weights = {2, 2};
  FlatSurface S = deform_square_tiled(base, spec);
  const Field& F = S.field();
  CHECK(F.order() == 24);
  CHECK(S.genus() == 2);
  // The tilt redistributes the 8pi of cone angle: 4pi + 4pi becomes
  // 11pi/3 + 13pi/3, conserving the Gauss-Bonnet total.
  CHECK(cone_angles(S) == std::vector<Rat>{Rat(11) / Rat(3), Rat(13) / Rat(3)});
  CHECK(S.gauss_bonnet_check());
  // Tilting an interval by psi rotates its gluing by 2 psi.
  CHECK(S.gluings()[2].rot == 2);
  CHECK(S.gluings()[3].rot == 22);
  CHECK(holonomy_order(S).q == 12);

  // The original straight-up curve does not survive (the tilted intervals
  // change the return map), but because the weighted rotations cancel, some
  // consistently upward closed curve through the tilted intervals still
  // exists: all word letters odd (every gluing crossed bottom to top), no
  // vertical-side crossings, and equal counts through the two tilted pairs.
  auto cyls = enumerate_cylinders(S, F.from_rat(Rat(80)), 4);
  int upward_tilted = 0;
  bool witness = false;
  for (const Cylinder& c : cyls) {
    auto m = gluing_multiset(c.core.word);
    bool upward = true;
    for (int letter : c.core.word) upward = upward && letter % 2 == 1;
    if (!upward || !(m.count(2) || m.count(3))) continue;
    ++upward_tilted;
    CHECK(m.count(4) == 0);
    CHECK(m[2] == m[3]);
    CHECK(c.embedded);
    // A closed geodesic picks up no net chart rotation along its word.
    int rot = 0;
    for (int letter : c.core.word) {
      const Gluing& G = S.gluings()[static_cast<size_t>(word_gluing(letter))];
      rot += (letter % 2 == 0) ? G.rot : -G.rot;
    }
    CHECK(((rot % 24) + 24) % 24 == 0);
    if (m == std::map<int, int>{{0, 2}, {2, 1}, {3, 1}}) witness = true;
  }
  CHECK(upward_tilted >= 1);
  CHECK(witness);
}

TEST_CASE("unbalanced interval tilt breaks the transverse cylinder") {
  SquareTiledBase base = fig7_base();
  DeformationSpec spec;
  spec.entries = {{2, Rat(1) / Rat(12), Rat(1)}, {3, Rat(-1) / Rat(24), Rat(1)}};
  spec.weights = {2, 2};

  // Without the override the weighted rotation sum -pi/6 is rejected.
  try {
    deform_square_tiled(base, spec);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid);
  }

  spec.allow_nonzero_rotation = true;
  FlatSurface S = deform_square_tiled(base, spec);
  const Field& F = S.field();
  CHECK(F.order() == 48);
  CHECK(S.genus() == 2);
  CHECK(S.gauss_bonnet_check());
  CHECK(holonomy_order(S).q == 24);
  // The first entry's length absorbed the vertical correction 2 sin(7.5 deg) /
  // sin(15 deg) = sec(7.5 deg), so both vertical sides still match.
  Scalar sec = F.from_rat(Rat(2)) * F.zeta_pow(1).im_part() * (F.zeta_pow(2).im_part().inverse());
  Scalar expected_c = S.polygons()[0].vertices[3] - S.polygons()[0].vertices[2];
  CHECK(expected_c.norm_sq() == sec * sec);

  // With a net rotation left over, no consistently upward curve through the
  // tilted intervals can close up; the only all-upward cylinder at this
  // budget stays inside the untilted interval.
  bool upward_untilted = false;
  for (const Cylinder& c : enumerate_cylinders(S, F.from_rat(Rat(80)), 4)) {
    auto m = gluing_multiset(c.core.word);
    bool upward = true;
    for (int letter : c.core.word) upward = upward && letter % 2 == 1;
    if (!upward) continue;
    CHECK(m.count(2) == 0);
    CHECK(m.count(3) == 0);
    if (m == std::map<int, int>{{0, 1}}) upward_untilted = true;
  }
  CHECK(upward_untilted);
}

TEST_CASE("square-tiled deformation input validation") {
  SquareTiledBase base = fig7_base();
  auto expect_invalid = [&](const DeformationSpec& spec) {
    try {
      deform_square_tiled(base, spec);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::invalid);
    }
  };
  DeformationSpec s;
  s.entries = {{7, Rat(1) / Rat(12), Rat(1)}};
  s.weights = {1};
  expect_invalid(s);  // interval out of range
  s.entries = {{1, Rat(0), Rat(1)}};
  expect_invalid(s);  // zero rotation
  s.entries = {{1, Rat(1) / Rat(2), Rat(1)}};
  expect_invalid(s);  // tilt of pi/2
  s.entries = {{1, Rat(1) / Rat(12), Rat(-2)}};
  expect_invalid(s);  // negative length factor
  s.entries = {{1, Rat(1) / Rat(12), Rat(1)}, {1, Rat(-1) / Rat(12), Rat(1)}};
  s.weights = {1, 1};
  expect_invalid(s);  // duplicate interval
  s.entries = {{1, Rat(1) / Rat(12), Rat(1)}};
  s.weights = {1, 2};
  expect_invalid(s);  // weight count mismatch

  SquareTiledBase bad = base;
  bad.top[0].second = Rat(5);
  try {
    square_tiled(bad);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid);  // side lengths disagree
  }
  bad = base;
  bad.top[0].first = "z";
  try {
    square_tiled(bad);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid);  // unmatched label
  }
}

TEST_CASE("centrally symmetric translation decagon") {
  FlatSurface S = fig6_translation();
  const Field& F = S.field();
  CHECK(F.order() == 4);
  CHECK(S.genus() == 2);
  CHECK(cone_angles(S) == std::vector<Rat>{Rat(4), Rat(4)});
  CHECK(holonomy_order(S).q == 1);
  CHECK(S.area() == F.from_rat(Rat(37) / Rat(5)));
  CHECK(S.gauss_bonnet_check());
}

TEST_CASE("slitting a 4pi cone and capping with a square") {
  FlatSurface S = fig6_translation();
  const Field& F = S.field();
  int cls = S.class_at(0, 0);
  REQUIRE(S.classes()[static_cast<size_t>(cls)].angle_over_pi == 4);

  FlatSurface out = slit_and_cap(S, {cls, F.one(), {}});
  CHECK(out.genus() == 2);
  CHECK(out.cone_count() == 5);
  std::vector<Rat> expect{Rat(5) / Rat(2), Rat(5) / Rat(2), Rat(5) / Rat(2), Rat(5) / Rat(2),
                          Rat(4)};
  CHECK(cone_angles(out) == expect);
  CHECK(out.classes().size() == 9);  // four marked 2pi classes from slit corners
  CHECK(out.gauss_bonnet_check());
  // Default slit length 1/8: the cap square adds (2/8)^2 to the area.
  CHECK(out.area() == F.from_rat(Rat(37) / Rat(5) + Rat(1) / Rat(16)));
  HolonomyData h = holonomy_order(out);
  CHECK(h.q == 4);
  CHECK(h.q0 == 2);
  auto [cover, data] = trivializing_cover(out);
  CHECK(data.degree == 2);
  for (const CoverCheck& c : verify_cover(out, cover, data)) CHECK(c.pass);

  // An explicit larger slit still builds; the cap grows accordingly. Length
  // 1 is already rejected: the two opposite slit pairs would meet head on.
  FlatSurface big = slit_and_cap(S, {cls, F.one(), F.from_rat(Rat(1) / Rat(4))});
  CHECK(cone_angles(big) == expect);
  CHECK(big.area() == F.from_rat(Rat(37) / Rat(5) + Rat(1) / Rat(4)));
  CHECK(big.gauss_bonnet_check());
}

TEST_CASE("slit construction rejects bad input") {
  FlatSurface S = fig6_translation();
  const Field& F = S.field();
  int cls = S.class_at(0, 0);
  auto expect_code = [&](const SlitSpec& spec, ErrorCode code) {
    try {
      slit_and_cap(S, spec);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == code);
    }
  };
  // Vertical runs along the decagon's side edges.
  expect_code({cls, F.zeta_pow(1), {}}, ErrorCode::invalid);
  expect_code({cls, F.from_rat(Rat(2)), {}}, ErrorCode::invalid);      // not unit
  expect_code({cls, F.one(), F.from_rat(Rat(-1))}, ErrorCode::invalid);  // negative length
  expect_code({cls, F.one(), F.one()}, ErrorCode::limit);              // tips meet head on
  expect_code({cls, F.one(), F.from_rat(Rat(2))}, ErrorCode::limit);   // opposite slits collide
  expect_code({cls, F.one(), F.from_rat(Rat(10))}, ErrorCode::limit);  // blocked by a vertex
  expect_code({99, F.one(), {}}, ErrorCode::usage);

  FlatSurface oct = regular_4g_gon(2);
  try {
    slit_and_cap(oct, {0, oct.field().one(), {}});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid);  // 6pi cone is not 4pi
  }
  FlatSurface torus = square_torus();
  try {
    slit_and_cap(torus, {0, torus.field().one(), {}});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid);  // marked point is not a cone
  }
}

TEST_CASE("angle defect balances Euler characteristic on every closed builder") {
  SquareTiledBase base = fig7_base();
  DeformationSpec tilt;
  tilt.entries = {{2, Rat(1) / Rat(12), Rat(1)}, {3, Rat(-1) / Rat(12), Rat(1)}};
  tilt.weights = {2, 2};
  FlatSurface fig6 = fig6_translation();
  std::vector<FlatSurface> all;
  all.push_back(square_torus());
  all.push_back(regular_4g_gon(2));
  all.push_back(regular_4g_gon(3));
  all.push_back(twelve_gon_genus3());
  all.push_back(fig7_square_tiled());
  all.push_back(deform_square_tiled(base, tilt));
  all.push_back(fig6_translation());
  all.push_back(slit_and_cap(fig6, {fig6.class_at(0, 0), fig6.field().one(), {}}));
  for (const FlatSurface& S : all) {
    CHECK(S.gauss_bonnet_check());
    CHECK(S.euler_characteristic() == 2 - 2 * S.genus());
  }
}
