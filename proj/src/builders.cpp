#include "qflat/builders.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "qflat/flow.hpp"
#include "qflat/geom.hpp"

namespace qf {

namespace {

int nmod(long k, int N) { return static_cast<int>(((k % N) + N) % N); }

Scalar zp(const Field& F, long k) { return F.zeta_pow(nmod(k, F.order())); }

long small_long(const mpz_class& z, const char* what) {
  if (!z.fits_slong_p()) fail(ErrorCode::limit, std::string(what) + " is out of the supported range");
  return z.get_si();
}

// Same direction up to positive scale.
bool dir_eq(const Scalar& u, const Scalar& w) {
  return cross_sign(u, w) == Sign::zero && dot_sign(u, w) == Sign::positive;
}

// w strictly inside the ccw sector from lo to hi; the sector angle lies in
// (0, 2pi), so reflex corners are handled.
bool strictly_inside_corner(const Scalar& lo, const Scalar& hi, const Scalar& w) {
  if (dir_eq(lo, w) || dir_eq(hi, w)) return false;
  Sign a = cross_sign(lo, hi);
  if (a == Sign::positive) {
    return cross_sign(lo, w) == Sign::positive && cross_sign(w, hi) == Sign::positive;
  }
  if (a == Sign::zero) {
    if (dot_sign(lo, hi) != Sign::negative) fail(ErrorCode::internal, "degenerate corner sector");
    return cross_sign(lo, w) == Sign::positive;
  }
  // Reflex: everything outside the closed complementary sector [hi, lo] (< pi).
  bool in_complement = cross_sign(hi, w) == Sign::positive && cross_sign(w, lo) == Sign::positive;
  return !in_complement;
}

// Kernel wedges span strictly less than pi; membership is half-open [out, back).
bool wedge_contains(const Scalar& out, const Scalar& back, const Scalar& w) {
  if (dir_eq(out, w)) return true;
  return cross_sign(out, w) == Sign::positive && cross_sign(w, back) == Sign::positive;
}

}  // namespace

FlatSurface square_torus() {
  const Field& F = Field::get(4);
  Scalar one = F.one();
  Scalar i = F.zeta_pow(1);
  std::vector<PolygonSpec> polys{{"P", {F.zero(), one, one + i, i}}};
  std::vector<GluingSpec> gl{{"P", 0, "P", 2, 0}, {"P", 1, "P", 3, 0}};
  return build_surface(F, polys, gl);
}

FlatSurface regular_4g_gon(int g) {
  if (g < 2) fail(ErrorCode::usage, "regular_4g_gon needs g >= 2");
  int N = 4 * g;
  if (N > kMaxOrder) fail(ErrorCode::limit, "regular_4g_gon needs cyclotomic order 4g <= 60");
  const Field& F = Field::get(N);
  PolygonSpec poly{"G", {}};
  for (int k = 0; k < N; ++k) poly.vertices.push_back(F.zeta_pow(k));
  std::vector<GluingSpec> gl;
  for (int e = 0; e < N; ++e) {
    if (e % 4 == 2 || e % 4 == 3) gl.push_back({"G", e, "G", (e + 2) % N, 2 * g + 2});
  }
  return build_surface(F, {poly}, gl);
}

FlatSurface twelve_gon_genus3() {
  const Field& F = Field::get(12);
  PolygonSpec poly{"T", {}};
  Scalar cur = F.zero();
  for (int side = 0; side < 3; ++side) {
    Scalar step = F.zeta_pow(4 * side);
    for (int k = 0; k < 4; ++k) {
      poly.vertices.push_back(cur);
      cur += step;
    }
  }
  std::vector<GluingSpec> gl{{"T", 1, "T", 11, 2}, {"T", 0, "T", 10, 2}, {"T", 9, "T", 7, 2},
                             {"T", 8, "T", 6, 2}, {"T", 5, "T", 3, 2},  {"T", 4, "T", 2, 2}};
  return build_surface(F, {poly}, gl);
}

FlatSurface building_block(int chords) {
  if (chords < 3) fail(ErrorCode::usage, "building_block needs at least 3 chords");
  long N = std::lcm<long>(12, 3L * chords);
  if (N > kMaxOrder) {
    fail(ErrorCode::limit, "building_block with " + std::to_string(chords) +
                               " chords needs cyclotomic order " + std::to_string(N) + " > 60");
  }
  const Field& F = Field::get(static_cast<int>(N));
  int n = static_cast<int>(N);
  // Triangle (0,0), (2,0), (1, sqrt 3); buffer circle of radius 2/sqrt(3)
  // centered at (2, 2/sqrt(3)) is tangent to the bottom line at (2,0) and to
  // the left line at the apex.
  Scalar sqrt3 = F.zeta_pow(n / 12) + F.zeta_pow(n - n / 12);
  Scalar radius = sqrt3.scaled(Rat(2) / Rat(3));
  Scalar center = F.from_rat(Rat(2)) + radius.rotated(n / 4);
  Scalar cos_half = (F.zeta_pow(n / (3 * chords)) + F.zeta_pow(n - n / (3 * chords))).scaled(Rat(1) / Rat(2));
  Scalar reach = radius * cos_half.inverse();
  Scalar apex = F.one() + F.zeta_pow(n / 6) + F.zeta_pow(n / 3);

  PolygonSpec poly{"B", {F.zero(), F.one(), F.from_rat(Rat(2))}};
  for (int k = 1; k <= chords; ++k) {
    long jk = -(N / 4) + (2L * k - 1) * (N / (3 * chords));
    poly.vertices.push_back(center + reach.rotated(nmod(jk, n)));
  }
  poly.vertices.push_back(apex);
  poly.vertices.push_back(apex.scaled(Rat(1) / Rat(2)));

  std::vector<GluingSpec> gl{{"B", 0, "B", chords + 3, n / 6}, {"B", 1, "B", chords + 4, n / 6}};
  return build_surface(F, {poly}, gl, {}, /*allow_boundary=*/true);
}

SquareTiledBase fig7_base() {
  SquareTiledBase b;
  b.bottom = {{"a", Rat(3)}, {"b", Rat(1)}, {"c", Rat(2)}, {"d", Rat(2)}};
  b.top = {{"d", Rat(2)}, {"c", Rat(2)}, {"b", Rat(1)}, {"a", Rat(3)}};
  return b;
}

FlatSurface square_tiled(const SquareTiledBase& base) { return deform_square_tiled(base, {}); }

FlatSurface fig7_square_tiled() { return square_tiled(fig7_base()); }

FlatSurface deform_square_tiled(const SquareTiledBase& base, const DeformationSpec& spec) {
  size_t k = base.bottom.size();
  if (k == 0 || base.top.size() != k) {
    fail(ErrorCode::invalid, "interval lists must be nonempty and of equal size");
  }
  std::map<std::string, int> bottom_pos, top_pos;
  for (size_t i = 0; i < k; ++i) {
    const auto& [label, len] = base.bottom[i];
    if (!bottom_pos.emplace(label, static_cast<int>(i)).second) {
      fail(ErrorCode::invalid, "duplicate bottom interval label " + label);
    }
    if (sgn(len) <= 0) fail(ErrorCode::invalid, "interval " + label + " must have positive length");
  }
  for (size_t t = 0; t < k; ++t) {
    const auto& [label, len] = base.top[t];
    if (!top_pos.emplace(label, static_cast<int>(t)).second) {
      fail(ErrorCode::invalid, "duplicate top interval label " + label);
    }
    auto it = bottom_pos.find(label);
    if (it == bottom_pos.end()) fail(ErrorCode::invalid, "top interval " + label + " has no bottom copy");
    if (len != base.bottom[static_cast<size_t>(it->second)].second) {
      fail(ErrorCode::invalid, "interval " + label + " has mismatched side lengths");
    }
  }

  if (spec.weights.size() != spec.entries.size()) {
    fail(ErrorCode::invalid, "need exactly one crossing weight per deformation entry");
  }
  std::set<int> used;
  Rat rot_sum(0);
  long N = 4;
  for (size_t e = 0; e < spec.entries.size(); ++e) {
    const DeformationEntry& en = spec.entries[e];
    if (en.interval < 0 || en.interval >= static_cast<int>(k)) {
      fail(ErrorCode::invalid, "deformation entry interval index out of range");
    }
    if (!used.insert(en.interval).second) {
      fail(ErrorCode::invalid, "deformation entries must name distinct intervals");
    }
    if (en.psi_over_pi == 0) fail(ErrorCode::invalid, "deformation rotation must be nonzero");
    if (abs(en.psi_over_pi) >= Rat(1) / Rat(2)) {
      fail(ErrorCode::invalid, "interval tilt must stay strictly below pi/2");
    }
    if (sgn(en.length_factor) <= 0) fail(ErrorCode::invalid, "length factor must be positive");
    if (spec.weights[e] <= 0) fail(ErrorCode::invalid, "crossing weights must be positive");
    rot_sum += Rat(spec.weights[e]) * Rat(-2) * en.psi_over_pi;
    long den = small_long(en.psi_over_pi.get_den(), "rotation denominator");
    N = std::lcm(N, 2 * den);
    if (N > kMaxOrder) {
      fail(ErrorCode::limit, "rotation denominators need cyclotomic order " + std::to_string(N) + " > 60");
    }
  }
  Rat half = rot_sum / 2;
  bool balanced = half.get_den() == 1;
  if (!balanced && !spec.allow_nonzero_rotation) {
    fail(ErrorCode::invalid,
         "weighted crossing rotations sum to " + rat_str(rot_sum) +
             " * pi, not a multiple of 2pi; the tracked transverse curve would not close up");
  }

  const Field& F = Field::get(static_cast<int>(N));
  int n = static_cast<int>(N);
  std::vector<long> j(k, 0);
  std::vector<Scalar> len;
  len.reserve(k);
  for (size_t i = 0; i < k; ++i) len.push_back(F.from_rat(base.bottom[i].second));
  for (const DeformationEntry& en : spec.entries) {
    long num = small_long(en.psi_over_pi.get_num(), "rotation numerator");
    long den = small_long(en.psi_over_pi.get_den(), "rotation denominator");
    j[static_cast<size_t>(en.interval)] = (N / (2 * den)) * num;
    len[static_cast<size_t>(en.interval)] = len[static_cast<size_t>(en.interval)].scaled(en.length_factor);
  }

  // Tilting changes each copy's vertical drop by len*sin(psi); the first entry's
  // length absorbs the exact correction that keeps both vertical sides equal.
  Scalar drop = F.zero();
  for (size_t i = 0; i < k; ++i) {
    if (j[i] != 0) drop += len[i] * zp(F, j[i]).im_part();
  }
  if (!drop.is_zero()) {
    auto a0 = static_cast<size_t>(spec.entries.front().interval);
    Scalar s0 = zp(F, j[a0]).im_part();
    len[a0] = len[a0] - drop * s0.inverse();
    if (len[a0].sign_real() != Sign::positive) {
      fail(ErrorCode::invalid, "vertical correction makes interval " +
                                   base.bottom[a0].first + " degenerate");
    }
  }

  PolygonSpec poly{"P", {}};
  Scalar cur = F.zero();
  poly.vertices.push_back(cur);
  for (size_t i = 0; i < k; ++i) {
    cur += len[i] * zp(F, -j[i]);
    poly.vertices.push_back(cur);
  }
  Scalar iunit = F.zeta_pow(n / 4);
  cur += iunit;
  poly.vertices.push_back(cur);
  for (size_t t = k; t-- > 1;) {
    auto i = static_cast<size_t>(bottom_pos.at(base.top[t].first));
    cur -= len[i] * zp(F, j[i]);
    poly.vertices.push_back(cur);
  }
  {
    auto i = static_cast<size_t>(bottom_pos.at(base.top[0].first));
    if (cur - len[i] * zp(F, j[i]) != iunit) fail(ErrorCode::internal, "top chain fails to close");
  }
  poly.vertices.push_back(iunit);

  std::vector<GluingSpec> gl;
  int kk = static_cast<int>(k);
  for (int i = 0; i < kk; ++i) {
    int p = top_pos.at(base.bottom[static_cast<size_t>(i)].first);
    gl.push_back({"P", i, "P", 2 * kk - p, nmod(2 * j[static_cast<size_t>(i)], n)});
  }
  gl.push_back({"P", kk, "P", 2 * kk + 1, 0});
  return build_surface(F, {poly}, gl);
}

FlatSurface fig6_translation() {
  const Field& F = Field::get(4);
  Scalar i = F.zeta_pow(1);
  auto pt = [&](const Rat& x, const Rat& y) { return F.from_rat(x) + F.from_rat(y) * i; };
  Rat h = Rat(1) / Rat(2);
  Rat b = Rat(6) / Rat(5);
  PolygonSpec poly{"D",
                   {pt(-2, -h), pt(-1, -1), pt(0, -b), pt(1, -1), pt(2, -h), pt(2, h), pt(1, 1),
                    pt(0, b), pt(-1, 1), pt(-2, h)}};
  std::vector<GluingSpec> gl;
  for (int e = 0; e < 5; ++e) gl.push_back({"D", e, "D", e + 5, 0});
  return build_surface(F, {poly}, gl);
}

namespace {

// One slit ray, anchored at a corner copy of the target cone.
struct SlitRay {
  int walk_idx = -1;  // index into the class's kernel-corner cycle
  int poly = -1;
  int vert = -1;
  Scalar anchor;  // polygon-chart corner coordinate
  Scalar dir;     // unit chart direction, hit sign applied
  Scalar exit;    // first boundary contact of the full ray
  int exit_edge = -1;
  int exit_vert = -1;  // >= 0 when the contact is a polygon vertex
};

// A polygon cut: a single slit's chord, or two collinear opposite slits
// sharing one chord.
struct CutRec {
  int poly = -1;
  int slit_a = -1;
  int slit_b = -1;  // -1 for a single chord
  Scalar from;      // slit_a's corner
  Scalar to;        // chord terminus (slit_b's corner when merged)
};

struct BEdge {
  enum Kind { orig, bank, resew };
  Kind kind = orig;
  int orig_edge = -1;
  int piece = 0;
  int slit = -1;
  bool from_v = false;  // bank runs corner -> tip
  int cut = -1;
  int side = 0;
};

struct BPoly {
  int orig = -1;
  std::vector<Scalar> vs;
  std::vector<BEdge> es;
};

int solve_gluing_rot(const Field& F, const Scalar& va, const Scalar& vb) {
  Scalar m = -va;
  for (int r = 0; r < F.order(); ++r) {
    if (m.rotated(r) == vb) return r;
  }
  fail(ErrorCode::internal, "cap edge is not a rotated copy of its hole edge");
}

}  // namespace

FlatSurface slit_and_cap(const FlatSurface& S, const SlitSpec& spec) {
  const Field& F = S.field();
  int N = F.order();
  if (S.has_boundary()) fail(ErrorCode::invalid, "slit construction needs a closed surface");
  if (!S.puncture_specs().empty()) {
    fail(ErrorCode::invalid, "slit construction needs an unpunctured surface");
  }
  if (spec.cone_class < 0 || spec.cone_class >= static_cast<int>(S.classes().size())) {
    fail(ErrorCode::usage, "cone class id out of range");
  }
  const ConeClass& C = S.classes()[static_cast<size_t>(spec.cone_class)];
  if (C.kind != VertexKind::cone || C.angle_over_pi != 4) {
    fail(ErrorCode::invalid, "slit target must be a cone of angle exactly 4pi");
  }
  if (&spec.direction.field() != &F) fail(ErrorCode::usage, "slit direction lives in the wrong field");
  if (spec.direction.norm_sq() != F.one()) {
    fail(ErrorCode::invalid, "slit direction must be a unit vector");
  }

  Scalar eps;
  if (spec.slit_length) {
    eps = *spec.slit_length;
    if (&eps.field() != &F) fail(ErrorCode::usage, "slit length lives in the wrong field");
    if (!eps.is_real() || eps.sign_real() != Sign::positive) {
      fail(ErrorCode::invalid, "slit length must be a positive real field element");
    }
  } else {
    // Largest power of 1/2 at most an eighth of the shortest saddle connection
    // at the cone; incident edges bound the search budget.
    std::optional<Scalar> shortest_edge;
    for (const auto& [p, v] : C.corners) {
      const Polygon& P = S.polygons()[static_cast<size_t>(p)];
      for (const Scalar& ev : {P.edge_vec(v), P.edge_vec((v + P.size() - 1) % P.size())}) {
        if (!shortest_edge || compare_length_sq(ev, *shortest_edge) == Cmp::less) shortest_edge = ev;
      }
    }
    std::optional<Scalar> min_sq;
    for (const SaddleConnection& sc : saddle_connections(S, shortest_edge->norm_sq(), 1)) {
      if (sc.start_class != spec.cone_class && sc.end_class != spec.cone_class) continue;
      if (!min_sq || (sc.length_sq - *min_sq).sign_real() == Sign::negative) min_sq = sc.length_sq;
    }
    if (!min_sq) fail(ErrorCode::internal, "no saddle connection incident to the slit cone");
    Rat bound(64);
    int halvings = 0;
    while (compare_real(*min_sq, bound) == Cmp::less) {
      bound /= 4;
      if (++halvings > 200) fail(ErrorCode::internal, "slit length underflow");
    }
    eps = F.from_rat(Rat(1) / Rat(mpz_class(1) << halvings));
  }
  Scalar eps_sq = eps * eps;

  // Walk the 4pi cone once; the unoriented slit direction lands in exactly four
  // kernel wedges, in ccw order with alternating sign.
  std::vector<SlitRay> rays;
  {
    int n_corners = static_cast<int>(C.kernel_corners.size());
    int t = C.kernel_corners[0].first;
    int c = C.kernel_corners[0].second;
    int acc = 0;
    for (int i = 0; i < n_corners; ++i) {
      if (std::pair(t, c) != C.kernel_corners[static_cast<size_t>(i)]) {
        fail(ErrorCode::internal, "cone class walk out of step");
      }
      const KernelTri& T = S.kernel()[static_cast<size_t>(t)];
      Scalar chart_dir = spec.direction.rotated(nmod(acc, N));
      Scalar out = T.v[static_cast<size_t>((c + 1) % 3)] - T.v[static_cast<size_t>(c)];
      Scalar back = T.v[static_cast<size_t>((c + 2) % 3)] - T.v[static_cast<size_t>(c)];
      for (int sg : {1, -1}) {
        Scalar w = sg > 0 ? chart_dir : -chart_dir;
        if (!wedge_contains(out, back, w)) continue;
        SlitRay ray;
        ray.walk_idx = i;
        ray.poly = T.poly;
        ray.vert = T.vid[static_cast<size_t>(c)];
        ray.anchor = T.v[static_cast<size_t>(c)];
        ray.dir = w;
        rays.push_back(ray);
      }
      auto nx = S.ccw_wedge(t, c, &acc);
      t = nx.first;
      c = nx.second;
      if (t < 0) fail(ErrorCode::internal, "cone class walk reached a boundary edge");
    }
    if (rays.size() != 4) fail(ErrorCode::internal, "4pi cone does not carry four slit sectors");
  }

  // A slit running along a polygon edge cannot be cut open.
  for (const SlitRay& ray : rays) {
    const Polygon& P = S.polygons()[static_cast<size_t>(ray.poly)];
    Scalar oute = P.edge_vec(ray.vert);
    Scalar ine = P.edge_vec((ray.vert + P.size() - 1) % P.size());
    bool along_out = dir_eq(oute, ray.dir);
    bool along_in = cross_sign(ine, ray.dir) == Sign::zero && dot_sign(ine, ray.dir) == Sign::negative;
    if (along_out || along_in) fail(ErrorCode::invalid, "slit direction runs along a polygon edge");
  }

  // No vertex class may sit on a slit (tip included).
  for (const SlitRay& ray : rays) {
    if (auto hit = shoot_ray(S, spec.cone_class, ray.walk_idx, ray.dir, eps_sq)) {
      fail(ErrorCode::limit, "slit blocked by vertex class " + std::to_string(hit->sc.end_class) +
                                 "; shrink the slit");
    }
  }

  // Extend every slit to its chord: the first boundary contact of the ray.
  for (SlitRay& ray : rays) {
    const Polygon& P = S.polygons()[static_cast<size_t>(ray.poly)];
    int nv = P.size();
    std::optional<Scalar> best;
    int best_edge = -1;
    auto consider = [&](const Scalar& cand, int edge) {
      if (!best || compare_length_sq(cand - ray.anchor, *best - ray.anchor) == Cmp::less) {
        best = cand;
        best_edge = edge;
      }
    };
    for (int e = 0; e < nv; ++e) {
      if (e == ray.vert || e == (ray.vert + nv - 1) % nv) continue;
      Scalar A = P.vertices[static_cast<size_t>(e)];
      Scalar B = P.vertices[static_cast<size_t>((e + 1) % nv)];
      if (cross_sign(ray.dir, B - A) == Sign::zero) {
        if (orient(ray.anchor, ray.anchor + ray.dir, A) != Sign::zero) continue;
        for (const Scalar& cand : {A, B}) {
          Scalar d = cand - ray.anchor;
          if (!d.is_zero() && dir_eq(ray.dir, d)) consider(cand, e);
        }
      } else {
        Scalar X = line_line_intersect(ray.anchor, ray.dir, A, B);
        if (!on_segment_closed(A, B, X)) continue;
        Scalar d = X - ray.anchor;
        if (d.is_zero() || !dir_eq(ray.dir, d)) continue;
        consider(X, e);
      }
    }
    if (!best) fail(ErrorCode::internal, "slit ray found no boundary exit");
    if (((*best - ray.anchor).norm_sq() - eps_sq).sign_real() != Sign::positive) {
      fail(ErrorCode::limit, "slit reaches the polygon boundary; shrink it");
    }
    ray.exit = *best;
    ray.exit_edge = best_edge;
    for (int v = 0; v < nv; ++v) {
      if (P.vertices[static_cast<size_t>(v)] == *best) ray.exit_vert = v;
    }
  }

  // Pair up exactly-opposite chords; everything else must stay disjoint.
  std::vector<CutRec> cuts;
  {
    std::array<int, 4> cut_of{-1, -1, -1, -1};
    for (int a = 0; a < 4; ++a) {
      if (cut_of[static_cast<size_t>(a)] >= 0) continue;
      int partner = -1;
      for (int b = a + 1; b < 4; ++b) {
        if (cut_of[static_cast<size_t>(b)] >= 0 || rays[static_cast<size_t>(b)].poly != rays[static_cast<size_t>(a)].poly) continue;
        if (rays[static_cast<size_t>(a)].exit == rays[static_cast<size_t>(b)].anchor &&
            rays[static_cast<size_t>(b)].exit == rays[static_cast<size_t>(a)].anchor) {
          partner = b;
          break;
        }
      }
      CutRec cut;
      cut.poly = rays[static_cast<size_t>(a)].poly;
      cut.slit_a = a;
      cut.from = rays[static_cast<size_t>(a)].anchor;
      if (partner >= 0) {
        if (!dir_eq(rays[static_cast<size_t>(a)].dir, -rays[static_cast<size_t>(partner)].dir)) {
          fail(ErrorCode::internal, "opposite chords are not collinear");
        }
        cut.slit_b = partner;
        cut.to = rays[static_cast<size_t>(partner)].anchor;
        cut_of[static_cast<size_t>(partner)] = static_cast<int>(cuts.size());
        if (((cut.to - cut.from).norm_sq() - eps_sq.scaled(Rat(4))).sign_real() != Sign::positive) {
          fail(ErrorCode::limit, "opposite slits collide; shrink them");
        }
      } else {
        cut.to = rays[static_cast<size_t>(a)].exit;
      }
      cut_of[static_cast<size_t>(a)] = static_cast<int>(cuts.size());
      cuts.push_back(cut);
    }
    for (size_t a = 0; a < cuts.size(); ++a) {
      for (size_t b = a + 1; b < cuts.size(); ++b) {
        if (cuts[a].poly != cuts[b].poly) continue;
        if (segment_relation(cuts[a].from, cuts[a].to, cuts[b].from, cuts[b].to) != SegRel::none) {
          fail(ErrorCode::limit, "slit chords interfere; shrink or reposition the slits");
        }
      }
    }
  }

  // Chord ends landing on edge interiors subdivide that edge and its partner.
  std::map<std::pair<int, int>, std::vector<Scalar>> subdiv;
  for (const CutRec& cut : cuts) {
    if (cut.slit_b >= 0) continue;
    const SlitRay& ray = rays[static_cast<size_t>(cut.slit_a)];
    if (ray.exit_vert >= 0) continue;
    int gid = S.gluing_at(ray.poly, ray.exit_edge);
    if (gid < 0) fail(ErrorCode::internal, "closed surface has an unglued edge");
    const Gluing& G = S.gluings()[static_cast<size_t>(gid)];
    const Polygon& PA = S.polygons()[static_cast<size_t>(G.poly_a)];
    const Polygon& PB = S.polygons()[static_cast<size_t>(G.poly_b)];
    Scalar a_start = PA.vertices[static_cast<size_t>(G.edge_a)];
    Scalar b_end = PB.vertices[static_cast<size_t>((G.edge_b + 1) % PB.size())];
    subdiv[{ray.poly, ray.exit_edge}].push_back(ray.exit);
    if (G.poly_a == ray.poly && G.edge_a == ray.exit_edge) {
      subdiv[{G.poly_b, G.edge_b}].push_back((ray.exit - a_start).rotated(nmod(G.rot, N)) + b_end);
    } else {
      subdiv[{G.poly_a, G.edge_a}].push_back((ray.exit - b_end).rotated(nmod(-G.rot, N)) + a_start);
    }
  }
  for (auto& [key, pts] : subdiv) {
    const Polygon& P = S.polygons()[static_cast<size_t>(key.first)];
    Scalar A = P.vertices[static_cast<size_t>(key.second)];
    Scalar ev = P.edge_vec(key.second);
    std::sort(pts.begin(), pts.end(), [&](const Scalar& x, const Scalar& y) {
      return (dot(ev, x - A) - dot(ev, y - A)).sign_real() == Sign::negative;
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  }

  // Working polygons with subdivision vertices in place.
  std::vector<BPoly> pieces;
  for (size_t p = 0; p < S.polygons().size(); ++p) {
    const Polygon& P = S.polygons()[p];
    BPoly bp;
    bp.orig = static_cast<int>(p);
    for (int e = 0; e < P.size(); ++e) {
      bp.vs.push_back(P.vertices[static_cast<size_t>(e)]);
      BEdge be;
      be.orig_edge = e;
      be.piece = 0;
      bp.es.push_back(be);
      auto it = subdiv.find({static_cast<int>(p), e});
      if (it == subdiv.end()) continue;
      for (size_t q = 0; q < it->second.size(); ++q) {
        bp.vs.push_back(it->second[q]);
        BEdge sub;
        sub.orig_edge = e;
        sub.piece = static_cast<int>(q) + 1;
        bp.es.push_back(sub);
      }
    }
    pieces.push_back(std::move(bp));
  }

  // Split along each cut; the tips become boundary vertices of both pieces.
  for (size_t cid = 0; cid < cuts.size(); ++cid) {
    const CutRec& cut = cuts[cid];
    const SlitRay& ra = rays[static_cast<size_t>(cut.slit_a)];
    int found = -1, iv = -1;
    for (size_t pi = 0; pi < pieces.size(); ++pi) {
      if (pieces[pi].orig != cut.poly) continue;
      int n = static_cast<int>(pieces[pi].vs.size());
      for (int v = 0; v < n; ++v) {
        if (pieces[pi].vs[static_cast<size_t>(v)] != cut.from) continue;
        Scalar lo = pieces[pi].vs[static_cast<size_t>((v + 1) % n)] - pieces[pi].vs[static_cast<size_t>(v)];
        Scalar hi = pieces[pi].vs[static_cast<size_t>((v + n - 1) % n)] - pieces[pi].vs[static_cast<size_t>(v)];
        if (!strictly_inside_corner(lo, hi, ra.dir)) continue;
        if (found >= 0) fail(ErrorCode::internal, "slit corner matched twice");
        found = static_cast<int>(pi);
        iv = v;
      }
    }
    if (found < 0) fail(ErrorCode::internal, "slit corner not found in any piece");
    BPoly& host = pieces[static_cast<size_t>(found)];
    int n = static_cast<int>(host.vs.size());
    int ix = -1;
    for (int v = 0; v < n; ++v) {
      if (host.vs[static_cast<size_t>(v)] == cut.to) ix = v;
    }
    if (ix < 0) fail(ErrorCode::internal, "chord terminus not found in the slit piece");

    std::vector<Scalar> tips{cut.from + rays[static_cast<size_t>(cut.slit_a)].dir * eps};
    std::vector<BEdge> chain1, chain2;
    auto bank_edge = [](int slit, bool from_v) {
      BEdge be;
      be.kind = BEdge::bank;
      be.slit = slit;
      be.from_v = from_v;
      return be;
    };
    auto resew_edge = [&](int side) {
      BEdge be;
      be.kind = BEdge::resew;
      be.cut = static_cast<int>(cid);
      be.side = side;
      return be;
    };
    if (cut.slit_b >= 0) {
      tips.push_back(cut.to + rays[static_cast<size_t>(cut.slit_b)].dir * eps);
      chain1 = {bank_edge(cut.slit_a, true), resew_edge(1), bank_edge(cut.slit_b, false)};
      chain2 = {bank_edge(cut.slit_b, true), resew_edge(2), bank_edge(cut.slit_a, false)};
    } else {
      chain1 = {bank_edge(cut.slit_a, true), resew_edge(1)};
      chain2 = {resew_edge(2), bank_edge(cut.slit_a, false)};
    }

    BPoly p1, p2;
    p1.orig = p2.orig = cut.poly;
    for (int v = ix;; v = (v + 1) % n) {
      p1.vs.push_back(host.vs[static_cast<size_t>(v)]);
      if (v == iv) break;
      p1.es.push_back(host.es[static_cast<size_t>(v)]);
    }
    for (const Scalar& tip : tips) p1.vs.push_back(tip);
    for (const BEdge& be : chain1) p1.es.push_back(be);
    for (int v = iv;; v = (v + 1) % n) {
      p2.vs.push_back(host.vs[static_cast<size_t>(v)]);
      if (v == ix) break;
      p2.es.push_back(host.es[static_cast<size_t>(v)]);
    }
    for (size_t q = tips.size(); q-- > 0;) p2.vs.push_back(tips[q]);
    for (const BEdge& be : chain2) p2.es.push_back(be);
    pieces[static_cast<size_t>(found)] = std::move(p1);
    pieces.push_back(std::move(p2));
  }

  // Deterministic names: unsplit polygons keep theirs, pieces get letter suffixes.
  std::map<int, int> piece_count, piece_seen;
  for (const BPoly& bp : pieces) ++piece_count[bp.orig];
  std::set<std::string> taken;
  std::vector<std::string> names(pieces.size());
  for (size_t i = 0; i < pieces.size(); ++i) {
    std::string nm = S.polygons()[static_cast<size_t>(pieces[i].orig)].name;
    if (piece_count[pieces[i].orig] > 1) {
      int idx = piece_seen[pieces[i].orig]++;
      if (idx >= 26) fail(ErrorCode::internal, "too many pieces of one polygon");
      nm += static_cast<char>('a' + idx);
    }
    while (!taken.insert(nm).second) nm += "x";
    names[i] = nm;
  }
  std::string cap_name = "CAP";
  while (taken.count(cap_name)) cap_name += "x";

  // Locate every tagged edge.
  std::map<std::tuple<int, int, int>, std::pair<int, int>> orig_loc;
  std::array<std::pair<int, int>, 4> bank_v{{{-1, -1}, {-1, -1}, {-1, -1}, {-1, -1}}};
  std::array<std::pair<int, int>, 4> bank_e{{{-1, -1}, {-1, -1}, {-1, -1}, {-1, -1}}};
  std::map<std::pair<int, int>, std::pair<int, int>> resew_loc;  // (cut, side)
  for (size_t i = 0; i < pieces.size(); ++i) {
    for (size_t e = 0; e < pieces[i].es.size(); ++e) {
      const BEdge& be = pieces[i].es[e];
      auto loc = std::pair(static_cast<int>(i), static_cast<int>(e));
      switch (be.kind) {
        case BEdge::orig:
          if (!orig_loc.emplace(std::tuple(pieces[i].orig, be.orig_edge, be.piece), loc).second) {
            fail(ErrorCode::internal, "original edge piece appears twice");
          }
          break;
        case BEdge::bank:
          (be.from_v ? bank_v : bank_e)[static_cast<size_t>(be.slit)] = loc;
          break;
        case BEdge::resew:
          resew_loc[{be.cut, be.side}] = loc;
          break;
      }
    }
  }

  auto edge_vec_of = [&](std::pair<int, int> loc) {
    const BPoly& bp = pieces[static_cast<size_t>(loc.first)];
    size_t n = bp.vs.size();
    return bp.vs[(static_cast<size_t>(loc.second) + 1) % n] - bp.vs[static_cast<size_t>(loc.second)];
  };

  std::vector<GluingSpec> out_gl;
  for (const Gluing& G : S.gluings()) {
    auto ita = subdiv.find({G.poly_a, G.edge_a});
    auto itb = subdiv.find({G.poly_b, G.edge_b});
    int sa = 1 + (ita == subdiv.end() ? 0 : static_cast<int>(ita->second.size()));
    int sb = 1 + (itb == subdiv.end() ? 0 : static_cast<int>(itb->second.size()));
    if (sa != sb) fail(ErrorCode::internal, "subdivision counts disagree across a gluing");
    for (int i = 0; i < sa; ++i) {
      auto la = orig_loc.at(std::tuple(G.poly_a, G.edge_a, i));
      auto lb = orig_loc.at(std::tuple(G.poly_b, G.edge_b, sa - 1 - i));
      out_gl.push_back({names[static_cast<size_t>(la.first)], la.second,
                        names[static_cast<size_t>(lb.first)], lb.second, G.rot});
    }
  }
  for (size_t cid = 0; cid < cuts.size(); ++cid) {
    auto l1 = resew_loc.at({static_cast<int>(cid), 1});
    auto l2 = resew_loc.at({static_cast<int>(cid), 2});
    out_gl.push_back({names[static_cast<size_t>(l1.first)], l1.second,
                      names[static_cast<size_t>(l2.first)], l2.second, 0});
  }

  // Cap square in the chart of slit 0: corners on the tips, midpoints on the
  // cone copies.
  Scalar u = rays[0].dir * eps;
  Scalar iu = u.rotated(N / 4);
  std::vector<Scalar> cap_vs{F.zero(),          u,
                             u.scaled(Rat(2)),  u.scaled(Rat(2)) + iu,
                             (u + iu).scaled(Rat(2)), u + iu.scaled(Rat(2)),
                             iu.scaled(Rat(2)), iu};
  std::array<std::pair<int, int>, 8> hole{bank_v[0], bank_e[0], bank_v[3], bank_e[3],
                                          bank_v[2], bank_e[2], bank_v[1], bank_e[1]};
  for (int k = 0; k < 8; ++k) {
    auto loc = hole[static_cast<size_t>(k)];
    if (loc.first < 0) fail(ErrorCode::internal, "missing slit bank edge");
    int cap_edge = (8 - k) % 8;
    Scalar vh = edge_vec_of(loc);
    Scalar vq = cap_vs[static_cast<size_t>((cap_edge + 1) % 8)] - cap_vs[static_cast<size_t>(cap_edge)];
    int rot = solve_gluing_rot(F, vh, vq);
    out_gl.push_back({names[static_cast<size_t>(loc.first)], loc.second, cap_name, cap_edge, rot});
  }

  std::vector<PolygonSpec> out_polys;
  for (size_t i = 0; i < pieces.size(); ++i) out_polys.push_back({names[i], pieces[i].vs});
  out_polys.push_back({cap_name, cap_vs});
  return build_surface(F, out_polys, out_gl);
}

}  // namespace qf
