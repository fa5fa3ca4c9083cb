#include "qflat/cylinder.hpp"

#include <algorithm>
#include <set>
#include <vector>

#include "doctest.h"
#include "qflat/format.hpp"
#include "qflat/geom.hpp"

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

FlatSurface marked_torus() {
  return surface_from_text(
      "order 4\n"
      "polygon P 0*u(0) 1/2*u(0) 1*u(0) 1*u(0)+1*u(1) 1/2*u(0)+1*u(1) 1*u(1)\n"
      "glue P.0 P.4 rot 0\nglue P.1 P.3 rot 0\nglue P.2 P.5 rot 0\n");
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

Scalar pt(const Field& f, const Rat& x, const Rat& y) {
  return f.from_rat(x) + f.zeta_pow(1).scaled(y);
}

bool real_eq(const Scalar& a, const Scalar& b) { return (a - b).sign_real() == Sign::zero; }

// The cylinder's exact area identity, recomputed from the stored pieces.
void check_area_identity(const Cylinder& c) {
  REQUIRE(!c.pieces.empty());
  Scalar twice = c.area - c.area;
  for (const CylinderPiece& p : c.pieces) {
    REQUIRE(p.corners.size() >= 3);
    twice = twice + polygon_area_twice(p.corners);
  }
  CHECK(twice == c.area + c.area);
  CHECK(c.width_sq * c.circumference_sq == c.area * c.area);
  CHECK(c.area.sign_real() == Sign::positive);
}

// Every boundary connection develops parallel to the core's holonomy.
void check_boundary_parallel(const FlatSurface& S, const Cylinder& c) {
  REQUIRE(!c.boundary_near.empty());
  REQUIRE(!c.boundary_far.empty());
  for (const std::vector<SideTag>* cycle : {&c.boundary_near, &c.boundary_far}) {
    for (const SideTag& st : *cycle) {
      bool aligned = false;
      Scalar w = st.sc.vec;
      for (int k = 0; k < S.order() && !aligned; ++k) {
        aligned = cross_sign(c.core.holonomy, w) == Sign::zero;
        w = w.rotated(1);
      }
      CHECK(aligned);
    }
  }
}

std::vector<int> min_rot(const std::vector<int>& w) {
  std::vector<int> best = w, cand(w.size());
  for (size_t r = 1; r < w.size(); ++r) {
    for (size_t i = 0; i < w.size(); ++i) cand[i] = w[(i + r) % w.size()];
    best = std::min(best, cand);
  }
  return best;
}

std::vector<int> cycle_key(const std::vector<int>& w) {
  std::vector<int> rev;
  for (auto it = w.rbegin(); it != w.rend(); ++it) rev.push_back(*it ^ 1);
  return std::min(min_rot(w), min_rot(rev));
}

const SaddleConnection& find_sc(const std::vector<SaddleConnection>& scs, const Scalar& vec) {
  for (const SaddleConnection& sc : scs)
    if (sc.vec == vec || sc.vec == -vec) return sc;
  REQUIRE(false);
  return scs.front();
}

}  // namespace

TEST_CASE("torus horizontal cylinder") {
  FlatSurface S = torus();
  const Field& F = S.field();
  std::vector<SaddleConnection> scs = saddle_connections(S, F.one());
  const SaddleConnection& sc = find_sc(scs, F.one());

  LeafTrace tr = trace_side_leaf(S, {sc, LeafSide::left}, F.one());
  CHECK(tr.closed);
  CHECK(tr.cycle.size() == 1);

  std::optional<Cylinder> cyl = maximal_cylinder_from(S, {sc, LeafSide::left}, F.one());
  REQUIRE(cyl.has_value());
  CHECK(cyl->circumference_sq == F.one());
  CHECK(cyl->width_sq == F.one());
  CHECK(cyl->area == F.one());
  CHECK(cyl->embedded);
  CHECK(is_embedded_cylinder(S, *cyl));
  CHECK(!cyl->overlap_witness.has_value());
  CHECK(cyl->boundary_near.size() == 1);
  CHECK(cyl->boundary_far.size() == 1);
  CHECK(cyl->pieces.size() == 2);
  CHECK(!cyl->core.word.empty());
  CHECK(cyl->core.circumference_sq == F.one());
  CHECK(cyl->core.direction == cyl->core.holonomy);
  check_area_identity(*cyl);
  check_boundary_parallel(S, *cyl);

  // The same cylinder seen from either side of its single boundary curve.
  std::optional<Cylinder> other = maximal_cylinder_from(S, {sc, LeafSide::right}, F.one());
  REQUIRE(other.has_value());
  CHECK(cycle_key(other->core.word) == cycle_key(cyl->core.word));
  CHECK(other->area == cyl->area);
}

TEST_CASE("torus cylinder enumeration and growth") {
  FlatSurface S = torus();
  const Field& F = S.field();

  std::vector<Cylinder> small = enumerate_cylinders(S, F.one());
  CHECK(small.size() == 2);
  for (const Cylinder& c : small) {
    CHECK(c.embedded);
    CHECK(c.circumference_sq == F.one());
    CHECK(c.area == F.one());
    check_area_identity(c);
  }
  CHECK(cycle_key(small[0].core.word) != cycle_key(small[1].core.word));

  // The diagonal families join at the larger bound; nothing disappears and no
  // flag changes.
  std::vector<Cylinder> big = enumerate_cylinders(S, F.from_rat(2));
  CHECK(big.size() == 4);
  for (const Cylinder& c : small) {
    bool found = false;
    for (const Cylinder& d : big)
      if (cycle_key(d.core.word) == cycle_key(c.core.word)) {
        found = true;
        CHECK(d.embedded == c.embedded);
        CHECK(d.circumference_sq == c.circumference_sq);
        CHECK(d.width_sq == c.width_sq);
      }
    CHECK(found);
  }
  for (const Cylinder& c : big) {
    CHECK(c.embedded);
    CHECK(c.area == F.one());
    check_area_identity(c);
    check_boundary_parallel(S, c);
  }
}

TEST_CASE("marked points bound cylinders") {
  FlatSurface S = marked_torus();
  const Field& F = S.field();
  std::vector<Cylinder> cyls = enumerate_cylinders(S, F.one());
  REQUIRE(cyls.size() == 3);
  int full = 0, half = 0;
  for (const Cylinder& c : cyls) {
    CHECK(c.embedded);
    CHECK(c.circumference_sq == F.one());
    check_area_identity(c);
    if (c.area == F.one()) ++full;
    if (real_eq(c.area, F.from_rat(Rat(1, 2)))) ++half;
  }
  // One horizontal cylinder of width 1; the marked midpoints split the
  // vertical family into two of width 1/2.
  CHECK(full == 1);
  CHECK(half == 2);
}

TEST_CASE("offset leaves replay the core word") {
  FlatSurface S = octagon();
  const Field& F = S.field();
  Scalar side = F.zeta_pow(1) - F.one();
  Scalar s2 = side.norm_sq();

  std::vector<SaddleConnection> scs = saddle_connections(S, s2);
  REQUIRE(!scs.empty());
  const SaddleConnection& sc = scs.front();
  LeafSide tag_side = LeafSide::left;
  std::optional<Cylinder> cyl = maximal_cylinder_from(S, {sc, tag_side}, s2.scaled(16));
  if (!cyl) {
    tag_side = LeafSide::right;
    cyl = maximal_cylinder_from(S, {sc, tag_side}, s2.scaled(16));
  }
  REQUIRE(cyl.has_value());
  check_area_identity(*cyl);

  // An explicitly offset closed leaf: start just inside the tagged side of the
  // connection's start corner and flow one full period. Successive shrinking
  // offsets agree with each other and with the core's cyclic crossing word.
  auto [t0, c0] = S.classes()[static_cast<size_t>(sc.start_class)]
                      .kernel_corners[static_cast<size_t>(sc.start_corner)];
  Scalar corner = S.kernel()[static_cast<size_t>(t0)].v[static_cast<size_t>(c0)];
  int poly = S.kernel()[static_cast<size_t>(t0)].poly;
  std::vector<int> words[2];
  Rat delta(1, 64);
  for (int i = 0; i < 2; ++i, delta /= 2) {
    Scalar perp = sc.vec.rotated(S.order() / 4);
    if (tag_side == LeafSide::right) perp = -perp;
    Scalar start = corner + perp.scaled(delta);
    Trajectory leaf = straight_flow(S, poly, start, sc.vec, cyl->circumference_sq);
    REQUIRE(leaf.stop == FlowStop::closed);
    CHECK(leaf.length_sq == cyl->circumference_sq);
    words[i] = leaf.word;
  }
  CHECK(min_rot(words[0]) == min_rot(words[1]));
  CHECK(min_rot(words[0]) == min_rot(cyl->core.word));
}

TEST_CASE("octagon embedded cylinders") {
  FlatSurface S = octagon();
  const Field& F = S.field();
  Scalar side = F.zeta_pow(1) - F.one();
  Scalar bound = side.norm_sq().scaled(16);  // circumference up to four sides

  std::vector<Cylinder> cyls = enumerate_cylinders(S, bound);
  int embedded = 0;
  for (const Cylinder& c : cyls) {
    check_area_identity(c);
    check_boundary_parallel(S, c);
    if (c.embedded) {
      ++embedded;
      CHECK(!c.overlap_witness.has_value());
    } else {
      REQUIRE(c.overlap_witness.has_value());
      auto [i, j] = *c.overlap_witness;
      CHECK(c.pieces[static_cast<size_t>(i)].poly == c.pieces[static_cast<size_t>(j)].poly);
      Scalar t2 = convex_intersection_area_twice(F, c.pieces[static_cast<size_t>(i)].corners,
                                                 c.pieces[static_cast<size_t>(j)].corners);
      CHECK(t2.sign_real() == Sign::positive);
    }
  }
  CHECK(embedded == 3);

  // Determinism across worker counts.
  std::vector<Cylinder> par = enumerate_cylinders(S, bound, 4);
  REQUIRE(par.size() == cyls.size());
  for (size_t i = 0; i < cyls.size(); ++i) {
    CHECK(par[i].circumference_sq == cyls[i].circumference_sq);
    CHECK(par[i].width_sq == cyls[i].width_sq);
    CHECK(par[i].core.word == cyls[i].core.word);
    CHECK(par[i].embedded == cyls[i].embedded);
    CHECK(par[i].pieces.size() == cyls[i].pieces.size());
  }

  // Re-enumeration at a smaller bound is a prefix family of the larger run.
  std::vector<Cylinder> fewer = enumerate_cylinders(S, side.norm_sq().scaled(4));
  for (const Cylinder& c : fewer) {
    bool found = false;
    for (const Cylinder& d : cyls)
      if (cycle_key(d.core.word) == cycle_key(c.core.word)) {
        found = true;
        CHECK(d.embedded == c.embedded);
        CHECK(d.circumference_sq == c.circumference_sq);
        CHECK(d.width_sq == c.width_sq);
      }
    CHECK(found);
  }
}

TEST_CASE("twelve-gon cylinders are never embedded") {
  FlatSurface S = twelve_gon();
  const Field& F = S.field();
  // Nothing closes up below circumference 3*sqrt(3); the first three
  // cylinders appear exactly there.
  CHECK(enumerate_cylinders(S, F.from_rat(25), 4).empty());
  std::vector<Cylinder> cyls = enumerate_cylinders(S, F.from_rat(36), 4);
  REQUIRE(cyls.size() == 3);
  for (const Cylinder& c : cyls) {
    CHECK(c.circumference_sq == F.from_rat(27));
    check_area_identity(c);
    CHECK(!c.embedded);
    REQUIRE(c.overlap_witness.has_value());
    auto [i, j] = *c.overlap_witness;
    const CylinderPiece& a = c.pieces[static_cast<size_t>(i)];
    const CylinderPiece& b = c.pieces[static_cast<size_t>(j)];
    CHECK(a.poly == b.poly);
    CHECK(convex_intersection_area_twice(F, a.corners, b.corners).sign_real() == Sign::positive);
  }
}

TEST_CASE("convex overlap area") {
  const Field& F = Field::get(4);
  std::vector<Scalar> unit = {pt(F, 0, 0), pt(F, 1, 0), pt(F, 1, 1), pt(F, 0, 1)};
  std::vector<Scalar> shifted = {pt(F, Rat(1, 2), 0), pt(F, Rat(3, 2), 0), pt(F, Rat(3, 2), 1),
                                 pt(F, Rat(1, 2), 1)};
  std::vector<Scalar> touching = {pt(F, 1, 0), pt(F, 2, 0), pt(F, 2, 1), pt(F, 1, 1)};
  CHECK(convex_intersection_area_twice(F, unit, unit) == F.from_rat(2));
  CHECK(convex_intersection_area_twice(F, unit, shifted) == F.one());
  CHECK(convex_intersection_area_twice(F, unit, touching) == F.zero());
}

TEST_CASE("inscribed angle locus") {
  const Field& F4 = Field::get(4);
  Scalar A = F4.zero(), B = F4.one();
  auto [up, down] = inscribed_angle_locus(F4, A, B, Rat(1, 2));
  CHECK(up.center == F4.from_rat(Rat(1, 2)));
  CHECK(down.center == F4.from_rat(Rat(1, 2)));
  CHECK(up.radius_sq == F4.from_rat(Rat(1, 4)));
  CHECK(up.a == A);
  CHECK(up.b == B);

  const Field& F12 = Field::get(12);
  Scalar A2 = F12.zero(), B2 = F12.one();
  auto [arc1, arc2] = inscribed_angle_locus(F12, A2, B2, Rat(1, 3));
  CHECK(arc1.radius_sq == F12.from_rat(Rat(1, 3)));
  CHECK(arc2.radius_sq == F12.from_rat(Rat(1, 3)));
  Scalar mid = F12.from_rat(Rat(1, 2));
  Scalar off = F12.zeta_pow(3) * (F12.zeta_pow(1) + F12.zeta_pow(11)).scaled(Rat(1, 6));
  CHECK(((arc1.center == mid + off) && (arc2.center == mid - off)));

  // The equilateral apex lies on the arc whose center shares its side, and
  // sees the segment under the exact angle.
  Scalar apex = F12.zeta_pow(2);  // cos(pi/3) + i sin(pi/3)
  CHECK((apex - arc1.center).norm_sq() == arc1.radius_sq);
  Scalar u = A2 - apex, w = B2 - apex;
  Scalar e = F12.zeta_pow(2);
  Scalar cos_t = (e + e.conj()).scaled(Rat(1, 2));
  Scalar sin_t = ((e - e.conj()) / F12.zeta_pow(3)).scaled(Rat(1, 2));
  CHECK(cross(u, w) * cos_t == dot(u, w) * sin_t);

  // Swapping the endpoints mirrors the same pair of circles.
  auto [s1, s2] = inscribed_angle_locus(F12, B2, A2, Rat(1, 3));
  CHECK(((s1.center == arc1.center && s2.center == arc2.center) ||
         (s1.center == arc2.center && s2.center == arc1.center)));
}

TEST_CASE("cylinder input validation") {
  FlatSurface S = torus();
  const Field& F = S.field();
  std::vector<SaddleConnection> scs = saddle_connections(S, F.one());
  CHECK_THROWS_AS((void)enumerate_cylinders(S, F.zero()), Error);
  CHECK_THROWS_AS((void)trace_side_leaf(S, {scs.front(), LeafSide::left}, F.zero()), Error);
  CHECK_THROWS_AS((void)inscribed_angle_locus(F, F.one(), F.one(), Rat(1, 2)), Error);
  CHECK_THROWS_AS((void)inscribed_angle_locus(Field::get(12), F.zero(), F.one(), Rat(1, 5)),
                  Error);
  auto [t0, c0] = S.classes()[0].kernel_corners[0];
  const KernelTri& T = S.kernel()[static_cast<size_t>(t0)];
  Scalar e_out = T.v[static_cast<size_t>((c0 + 1) % 3)] - T.v[static_cast<size_t>(c0)];
  CHECK_THROWS_AS((void)shoot_ray(S, 0, 0, -e_out, F.one()), Error);
}
