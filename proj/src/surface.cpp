#include "qflat/surface.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "qflat/geom.hpp"

namespace qf {

namespace {

// Deterministic ear clipping, no new vertices: always clips the lowest-index
// strictly convex corner whose closed triangle contains no other vertex (a vertex
// on the chord blocks, so triangles only ever meet along full shared edges).
std::vector<std::array<int, 3>> ear_clip(const std::vector<Scalar>& V, const std::string& pname) {
  std::vector<int> idx(V.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::array<int, 3>> out;
  while (idx.size() > 3) {
    int m = static_cast<int>(idx.size());
    int found = -1;
    for (int pos = 0; pos < m && found < 0; ++pos) {
      int ip = idx[static_cast<size_t>((pos + m - 1) % m)];
      int ic = idx[static_cast<size_t>(pos)];
      int in2 = idx[static_cast<size_t>((pos + 1) % m)];
      if (orient(V[static_cast<size_t>(ip)], V[static_cast<size_t>(ic)], V[static_cast<size_t>(in2)]) != Sign::positive)
        continue;
      bool blocked = false;
      for (int q : idx) {
        if (q == ip || q == ic || q == in2) continue;
        if (in_triangle_closed(V[static_cast<size_t>(ip)], V[static_cast<size_t>(ic)],
                               V[static_cast<size_t>(in2)], V[static_cast<size_t>(q)])) {
          blocked = true;
          break;
        }
      }
      if (!blocked) found = pos;
    }
    if (found < 0) fail(ErrorCode::internal, "ear clipping stuck on polygon " + pname);
    int m2 = static_cast<int>(idx.size());
    out.push_back({idx[static_cast<size_t>((found + m2 - 1) % m2)], idx[static_cast<size_t>(found)],
                   idx[static_cast<size_t>((found + 1) % m2)]});
    idx.erase(idx.begin() + found);
  }
  if (orient(V[static_cast<size_t>(idx[0])], V[static_cast<size_t>(idx[1])], V[static_cast<size_t>(idx[2])]) != Sign::positive)
    fail(ErrorCode::internal, "degenerate final triangle in polygon " + pname);
  out.push_back({idx[0], idx[1], idx[2]});
  return out;
}

// The unique angle base + 2t (in units of pi, t >= 0) matched by the rigorous
// enclosure of the wedge-angle sum; base in [0, 2) is the exact value mod 2.
Rat pin_angle_over_pi(const Rat& base, const std::vector<std::pair<Scalar, Scalar>>& wedges) {
  Rat width(1, 4);
  for (int round = 0; round < 12; ++round, width /= 64) {
    Rat per = width / static_cast<int>(wedges.size() + 1);
    Rat slo(0), shi(0);
    for (const auto& [out_dir, back_dir] : wedges) {
      auto [lo, hi] = arg_enclosure(out_dir.conj() * back_dir, per);
      slo += lo;
      shi += hi;
    }
    auto [plo, phi] = pi_enclosure(per);
    std::vector<Rat> hits;
    for (Rat c = base;; c += 2) {
      if (c > 0 && c * plo <= shi && c * phi >= slo) hits.push_back(c);
      if (c * plo > shi) break;
    }
    if (hits.size() == 1) return hits[0];
  }
  fail(ErrorCode::internal, "cone angle pinning did not converge");
}

bool orig_edge_key(const std::pair<int, int>& key, int n) {
  return key.second == key.first + 1 || (key.first == 0 && key.second == n - 1);
}

}  // namespace

FlatSurface build_surface(const Field& F0, std::vector<PolygonSpec> polygons,
                          std::vector<GluingSpec> gluings, std::vector<PunctureSpec> punctures,
                          bool allow_boundary) {
  // Lift to a field with 4 | N so that Re/Im parts, cross products and areas are
  // exact field elements. Pure re-coordinatization; all invariants are unchanged.
  int N0 = F0.order();
  const Field* Fp = &F0;
  if (N0 % 4 != 0) {
    int N = std::lcm(N0, 4);
    Fp = &Field::get(N);
    int scale = N / N0;
    for (auto& ps : polygons)
      for (auto& v : ps.vertices) v = v.embedded_into(*Fp);
    for (auto& g : gluings) g.rot *= scale;
  }

  FlatSurface S;
  S.F_ = Fp;
  S.allow_boundary_ = allow_boundary;
  S.punctures_ = std::move(punctures);
  for (auto& ps : polygons) S.polys_.push_back(Polygon{ps.name, std::move(ps.vertices)});
  for (auto& gs : gluings) {
    int pa = -1, pb = -1;
    for (size_t i = 0; i < S.polys_.size(); ++i) {
      if (S.polys_[i].name == gs.poly_a) pa = static_cast<int>(i);
      if (S.polys_[i].name == gs.poly_b) pb = static_cast<int>(i);
    }
    if (pa < 0) fail(ErrorCode::invalid, "gluing names unknown polygon " + gs.poly_a);
    if (pb < 0) fail(ErrorCode::invalid, "gluing names unknown polygon " + gs.poly_b);
    int N = Fp->order();
    int rot = ((gs.rot % N) + N) % N;
    S.gluings_.push_back(Gluing{pa, gs.edge_a, pb, gs.edge_b, rot});
  }
  S.derive();
  return S;
}

void FlatSurface::derive() {
  const Field& F = *F_;
  const int N = F.order();
  if (polys_.empty()) fail(ErrorCode::invalid, "surface has no polygons");

  // Polygon-level validation.
  for (size_t p = 0; p < polys_.size(); ++p) {
    const Polygon& P = polys_[p];
    if (P.name.empty() || P.name.find_first_of(" \t.#") != std::string::npos)
      fail(ErrorCode::invalid, "bad polygon name '" + P.name + "'");
    for (size_t q = p + 1; q < polys_.size(); ++q)
      if (polys_[q].name == P.name) fail(ErrorCode::invalid, "duplicate polygon name " + P.name);
    int n = P.size();
    if (n < 3) fail(ErrorCode::invalid, "polygon " + P.name + " needs at least 3 vertices");
    for (int e = 0; e < n; ++e)
      if (P.edge_vec(e).is_zero())
        fail(ErrorCode::invalid, "zero-length edge " + P.name + "." + std::to_string(e));
    Sign area_sign = polygon_area_twice(P.vertices).sign_re();
    if (area_sign == Sign::negative)
      fail(ErrorCode::invalid, "negative orientation: polygon " + P.name);
    if (area_sign == Sign::zero)
      fail(ErrorCode::invalid, "non-simple polygon " + P.name + " (zero area)");
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
        SegRel rel = segment_relation(P.vertices[static_cast<size_t>(i)], P.vertices[static_cast<size_t>((i + 1) % n)],
                                      P.vertices[static_cast<size_t>(j)], P.vertices[static_cast<size_t>((j + 1) % n)]);
        if (adjacent ? (rel != SegRel::touch) : (rel != SegRel::none))
          fail(ErrorCode::invalid, "non-simple polygon " + P.name + " (edges " + std::to_string(i) +
                                       " and " + std::to_string(j) + ")");
      }
    }
  }

  // Gluing validation and the per-edge table.
  edge_gluing_.clear();
  for (const Polygon& P : polys_) edge_gluing_.push_back(std::vector<int>(static_cast<size_t>(P.size()), -1));
  for (size_t g = 0; g < gluings_.size(); ++g) {
    Gluing& G = gluings_[g];
    auto side_ok = [&](int poly, int edge) {
      if (edge < 0 || edge >= polys_[static_cast<size_t>(poly)].size())
        fail(ErrorCode::invalid, "edge index out of range: " + polys_[static_cast<size_t>(poly)].name + "." +
                                     std::to_string(edge));
    };
    side_ok(G.poly_a, G.edge_a);
    side_ok(G.poly_b, G.edge_b);
    if (G.poly_a == G.poly_b && G.edge_a == G.edge_b)
      fail(ErrorCode::invalid, "edge glued to itself: " + polys_[static_cast<size_t>(G.poly_a)].name + "." +
                                   std::to_string(G.edge_a));
    for (auto [p, e] : {std::pair{G.poly_a, G.edge_a}, std::pair{G.poly_b, G.edge_b}}) {
      if (edge_gluing_[static_cast<size_t>(p)][static_cast<size_t>(e)] != -1)
        fail(ErrorCode::invalid,
             "edge glued twice: " + polys_[static_cast<size_t>(p)].name + "." + std::to_string(e));
      edge_gluing_[static_cast<size_t>(p)][static_cast<size_t>(e)] = static_cast<int>(g);
    }
    Scalar av = polys_[static_cast<size_t>(G.poly_a)].edge_vec(G.edge_a);
    Scalar bv = polys_[static_cast<size_t>(G.poly_b)].edge_vec(G.edge_b);
    if (bv != -(av.rotated(G.rot))) {
      std::string where = polys_[static_cast<size_t>(G.poly_a)].name + "." + std::to_string(G.edge_a) + " <-> " +
                          polys_[static_cast<size_t>(G.poly_b)].name + "." + std::to_string(G.edge_b);
      if (compare_length_sq(av, bv) != Cmp::equal)
        fail(ErrorCode::invalid, "length mismatch in gluing " + where);
      fail(ErrorCode::invalid, "rotation mismatch in gluing " + where + " rot " + std::to_string(G.rot));
    }
  }

  // Boundary policy.
  has_boundary_ = false;
  for (size_t p = 0; p < polys_.size(); ++p)
    for (size_t e = 0; e < edge_gluing_[p].size(); ++e)
      if (edge_gluing_[p][e] == -1) {
        if (!allow_boundary_)
          fail(ErrorCode::invalid, "unmatched edge " + polys_[p].name + "." + std::to_string(e));
        has_boundary_ = true;
      }

  // Connectivity of the polygon adjacency graph.
  {
    std::vector<char> seen(polys_.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      int p = stack.back();
      stack.pop_back();
      for (int e = 0; e < polys_[static_cast<size_t>(p)].size(); ++e) {
        int g = edge_gluing_[static_cast<size_t>(p)][static_cast<size_t>(e)];
        if (g < 0) continue;
        const Gluing& G = gluings_[static_cast<size_t>(g)];
        int other = (G.poly_a == p && G.edge_a == e) ? G.poly_b : G.poly_a;
        if (!seen[static_cast<size_t>(other)]) {
          seen[static_cast<size_t>(other)] = 1;
          stack.push_back(other);
        }
      }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
      fail(ErrorCode::invalid, "disconnected polygon complex");
  }

  // Kernel triangulation.
  tris_.clear();
  poly_tris_.assign(polys_.size(), {});
  edge_tri_.clear();
  edge_tri_edge_.clear();
  for (size_t p = 0; p < polys_.size(); ++p) {
    const Polygon& P = polys_[p];
    int n = P.size();
    edge_tri_.push_back(std::vector<int>(static_cast<size_t>(n), -1));
    edge_tri_edge_.push_back(std::vector<int>(static_cast<size_t>(n), -1));
    auto ears = ear_clip(P.vertices, P.name);
    std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> by_pair;
    for (const auto& tri : ears) {
      int t = static_cast<int>(tris_.size());
      KernelTri kt;
      kt.poly = static_cast<int>(p);
      kt.vid = tri;
      for (int j = 0; j < 3; ++j) kt.v[static_cast<size_t>(j)] = P.vertices[static_cast<size_t>(tri[static_cast<size_t>(j)])];
      tris_.push_back(std::move(kt));
      poly_tris_[p].push_back(t);
      for (int j = 0; j < 3; ++j) {
        int a = tri[static_cast<size_t>(j)], b = tri[static_cast<size_t>((j + 1) % 3)];
        by_pair[{std::min(a, b), std::max(a, b)}].push_back({t, j});
      }
    }
    for (const auto& [key, lst] : by_pair) {
      if (orig_edge_key(key, n)) {
        if (lst.size() != 1) fail(ErrorCode::internal, "polygon edge covered by several triangles");
        int e = (key.second == key.first + 1) ? key.first : key.second;
        edge_tri_[p][static_cast<size_t>(e)] = lst[0].first;
        edge_tri_edge_[p][static_cast<size_t>(e)] = lst[0].second;
      } else {
        if (lst.size() != 2) fail(ErrorCode::internal, "chord not shared by exactly two triangles");
        auto [t1, j1] = lst[0];
        auto [t2, j2] = lst[1];
        KernelLink l1{t2, j2, 0, -1, F.zero()};
        KernelLink l2{t1, j1, 0, -1, F.zero()};
        tris_[static_cast<size_t>(t1)].link[static_cast<size_t>(j1)] = l1;
        tris_[static_cast<size_t>(t2)].link[static_cast<size_t>(j2)] = l2;
      }
    }
  }
  // Links across gluings: crossing A -> B maps x to zeta^rot * x + trans.
  for (size_t g = 0; g < gluings_.size(); ++g) {
    const Gluing& G = gluings_[g];
    int ta = edge_tri_[static_cast<size_t>(G.poly_a)][static_cast<size_t>(G.edge_a)];
    int ja = edge_tri_edge_[static_cast<size_t>(G.poly_a)][static_cast<size_t>(G.edge_a)];
    int tb = edge_tri_[static_cast<size_t>(G.poly_b)][static_cast<size_t>(G.edge_b)];
    int jb = edge_tri_edge_[static_cast<size_t>(G.poly_b)][static_cast<size_t>(G.edge_b)];
    const Polygon& PA = polys_[static_cast<size_t>(G.poly_a)];
    const Polygon& PB = polys_[static_cast<size_t>(G.poly_b)];
    Scalar a0 = PA.vertices[static_cast<size_t>(G.edge_a)];
    Scalar a1 = PA.vertices[static_cast<size_t>((G.edge_a + 1) % PA.size())];
    Scalar b0 = PB.vertices[static_cast<size_t>(G.edge_b)];
    Scalar b1 = PB.vertices[static_cast<size_t>((G.edge_b + 1) % PB.size())];
    int back_rot = (N - G.rot) % N;
    tris_[static_cast<size_t>(ta)].link[static_cast<size_t>(ja)] =
        KernelLink{tb, jb, G.rot, static_cast<int>(g), b1 - a0.rotated(G.rot)};
    tris_[static_cast<size_t>(tb)].link[static_cast<size_t>(jb)] =
        KernelLink{ta, ja, back_rot, static_cast<int>(g), a1 - b0.rotated(back_rot)};
  }

  // Vertex classes by wedge walks around each identified vertex.
  corner_class_.assign(tris_.size(), {-1, -1, -1});
  classes_.clear();
  for (size_t t0 = 0; t0 < tris_.size(); ++t0) {
    for (int j0 = 0; j0 < 3; ++j0) {
      if (corner_class_[t0][static_cast<size_t>(j0)] >= 0) continue;
      // Find the walk start: interior classes close up; boundary classes start
      // just after an unglued edge, found by walking clockwise.
      int st = static_cast<int>(t0), sj = j0;
      bool interior = false;
      {
        int ct = st, cj = sj;
        for (size_t guard = 0; guard <= 3 * tris_.size(); ++guard) {
          int unused = 0;
          auto [pt, pj] = cw_wedge(ct, cj, &unused);
          if (pt < 0) {
            st = ct;
            sj = cj;
            break;
          }
          if (pt == static_cast<int>(t0) && pj == j0) {
            interior = true;
            break;
          }
          ct = pt;
          cj = pj;
        }
        if (!interior && st == static_cast<int>(t0) && sj == j0) {
          // Either we broke immediately at a boundary, or the guard tripped.
          int unused = 0;
          auto [pt, pj] = cw_wedge(st, sj, &unused);
          if (pt >= 0 && !(pt == st && pj == sj))
            fail(ErrorCode::internal, "vertex walk did not close");
        }
      }
      ConeClass cls;
      cls.id = static_cast<int>(classes_.size());
      cls.on_boundary = !interior;
      int K = 0;
      int ct = st, cj = sj;
      for (;;) {
        cls.kernel_corners.push_back({ct, cj});
        corner_class_[static_cast<size_t>(ct)][static_cast<size_t>(cj)] = cls.id;
        auto [nt, nj] = ccw_wedge(ct, cj, &K);
        if (nt < 0) break;
        if (nt == st && nj == sj) break;
        ct = nt;
        cj = nj;
      }
      // Wedge boundary directions for the angle enclosure.
      std::vector<std::pair<Scalar, Scalar>> wedges;
      for (auto [tt, jj] : cls.kernel_corners) {
        const KernelTri& T = tris_[static_cast<size_t>(tt)];
        Scalar out_dir = T.v[static_cast<size_t>((jj + 1) % 3)] - T.v[static_cast<size_t>(jj)];
        Scalar back_dir = T.v[static_cast<size_t>((jj + 2) % 3)] - T.v[static_cast<size_t>(jj)];
        wedges.push_back({out_dir, back_dir});
      }
      Rat base;
      if (interior) {
        int r = ((-K) % N + N) % N;
        base = Rat(2 * r, N);
        base.canonicalize();
      } else {
        // Developed angle between the first outgoing ray and the last incoming ray.
        const auto [lt, lj] = cls.kernel_corners.back();
        const KernelTri& LT = tris_[static_cast<size_t>(lt)];
        Scalar w = LT.v[static_cast<size_t>((lj + 2) % 3)] - LT.v[static_cast<size_t>(lj)];
        Scalar rho = wedges.front().first.conj() * w.rotated(-K);
        Scalar rho2 = rho * rho;
        int pfound = -1;
        for (int p = 0; p < N && pfound < 0; ++p) {
          Scalar x = rho2.rotated(-p);
          if (x.is_real() && x.sign_re() == Sign::positive) pfound = p;
        }
        if (pfound < 0)
          fail(ErrorCode::invalid, "boundary vertex angle is not a rational multiple of pi/" +
                                       std::to_string(N));
        auto [alo, ahi] = arg_enclosure(rho, Rat(1, 2));
        auto [plo, phi] = pi_enclosure(Rat(1, 64));
        base = Rat(pfound, N);
        base.canonicalize();
        bool hit0 = base * plo <= ahi && base * phi >= alo;
        Rat base1 = base + 1;
        bool hit1 = base1 * plo <= ahi && base1 * phi >= alo;
        if (hit0 == hit1) fail(ErrorCode::internal, "boundary angle branch ambiguous");
        if (hit1) base = base1;
      }
      cls.angle_over_pi = pin_angle_over_pi(base, wedges);
      cls.kind = (cls.angle_over_pi == 2 && interior) ? VertexKind::marked : VertexKind::cone;
      if (interior && cls.angle_over_pi < 2)
        fail(ErrorCode::invalid, "illegal cone angle " + cls.angle_over_pi.get_str() +
                                     "*pi (< 2*pi and not a marked point)");
      // Original-corner cycle: each polygon corner's wedge fan is contiguous.
      for (auto [tt, jj] : cls.kernel_corners) {
        std::pair<int, int> oc{tris_[static_cast<size_t>(tt)].poly, tris_[static_cast<size_t>(tt)].vid[static_cast<size_t>(jj)]};
        if (cls.corners.empty() || cls.corners.back() != oc) cls.corners.push_back(oc);
      }
      if (interior && cls.corners.size() > 1 && cls.corners.front() == cls.corners.back())
        cls.corners.pop_back();
      classes_.push_back(std::move(cls));
    }
  }

  // Per original corner lookup.
  vertex_class_.clear();
  for (const Polygon& P : polys_) vertex_class_.push_back(std::vector<int>(static_cast<size_t>(P.size()), -1));
  for (size_t t = 0; t < tris_.size(); ++t)
    for (int j = 0; j < 3; ++j)
      vertex_class_[static_cast<size_t>(tris_[t].poly)][static_cast<size_t>(tris_[t].vid[static_cast<size_t>(j)])] =
          corner_class_[t][static_cast<size_t>(j)];

  // Punctures: normalize to one canonical corner per punctured class.
  {
    std::vector<char> punctured(classes_.size(), 0);
    for (const PunctureSpec& ps : punctures_) {
      int p = poly_index(ps.poly);
      if (p < 0) fail(ErrorCode::invalid, "puncture names unknown polygon " + ps.poly);
      if (ps.vertex < 0 || ps.vertex >= polys_[static_cast<size_t>(p)].size())
        fail(ErrorCode::invalid, "puncture vertex out of range: " + ps.poly + "." + std::to_string(ps.vertex));
      punctured[static_cast<size_t>(class_at(p, ps.vertex))] = 1;
    }
    punctures_.clear();
    for (size_t c = 0; c < classes_.size(); ++c) {
      if (!punctured[c]) continue;
      classes_[c].kind = VertexKind::puncture;
      auto best = classes_[c].corners.front();
      for (auto oc : classes_[c].corners)
        if (polys_[static_cast<size_t>(oc.first)].name < polys_[static_cast<size_t>(best.first)].name ||
            (oc.first == best.first && oc.second < best.second))
          best = oc;
      punctures_.push_back({polys_[static_cast<size_t>(best.first)].name, best.second});
    }
    std::sort(punctures_.begin(), punctures_.end(), [](const PunctureSpec& a, const PunctureSpec& b) {
      return a.poly != b.poly ? a.poly < b.poly : a.vertex < b.vertex;
    });
  }

  // Euler characteristic and area.
  int boundary_edges = 0;
  for (size_t p = 0; p < polys_.size(); ++p)
    for (int e : edge_gluing_[p])
      if (e == -1) ++boundary_edges;
  int E = static_cast<int>(gluings_.size()) + boundary_edges;
  chi_ = static_cast<int>(classes_.size()) - E + static_cast<int>(polys_.size());
  if (!has_boundary_ && (chi_ % 2 != 0)) fail(ErrorCode::internal, "odd Euler characteristic on a closed surface");
  area_ = F.zero();
  for (const Polygon& P : polys_) area_ += polygon_area_twice(P.vertices);
  area_ = area_.scaled(Rat(1, 2));
}

int FlatSurface::poly_index(const std::string& name) const {
  for (size_t i = 0; i < polys_.size(); ++i)
    if (polys_[i].name == name) return static_cast<int>(i);
  return -1;
}

int FlatSurface::class_at(int poly, int vertex) const {
  return vertex_class_[static_cast<size_t>(poly)][static_cast<size_t>(vertex)];
}

int FlatSurface::gluing_at(int poly, int edge) const {
  return edge_gluing_[static_cast<size_t>(poly)][static_cast<size_t>(edge)];
}

int FlatSurface::genus() const {
  if (has_boundary_) fail(ErrorCode::usage, "genus of a surface with boundary");
  return (2 - chi_) / 2;
}

int FlatSurface::cone_count() const {
  int c = 0;
  for (const ConeClass& cls : classes_)
    if (cls.angle_over_pi != 2) ++c;
  return c;
}

bool FlatSurface::gauss_bonnet_check() const {
  if (has_boundary_) fail(ErrorCode::usage, "Gauss-Bonnet check needs a closed surface");
  Rat acc(0);
  for (const ConeClass& cls : classes_) acc += cls.angle_over_pi - 2;
  return acc == Rat(-2 * chi_);
}

int FlatSurface::kernel_class(int tri, int corner) const {
  return corner_class_[static_cast<size_t>(tri)][static_cast<size_t>(corner)];
}

int FlatSurface::kernel_tri_of_edge(int poly, int edge) const {
  return edge_tri_[static_cast<size_t>(poly)][static_cast<size_t>(edge)];
}

int FlatSurface::kernel_edge_of_edge(int poly, int edge) const {
  return edge_tri_edge_[static_cast<size_t>(poly)][static_cast<size_t>(edge)];
}

std::pair<int, int> FlatSurface::ccw_wedge(int tri, int corner, int* rot) const {
  const KernelLink& L = tris_[static_cast<size_t>(tri)].link[static_cast<size_t>((corner + 2) % 3)];
  if (L.tri < 0) return {-1, -1};
  *rot += L.rot;
  return {L.tri, L.edge};
}

std::pair<int, int> FlatSurface::cw_wedge(int tri, int corner, int* rot) const {
  const KernelLink& L = tris_[static_cast<size_t>(tri)].link[static_cast<size_t>(corner)];
  if (L.tri < 0) return {-1, -1};
  *rot += L.rot;
  return {L.tri, (L.edge + 1) % 3};
}

int FlatSurface::locate(int poly, const Scalar& point) const {
  for (int t : poly_tris_[static_cast<size_t>(poly)]) {
    const KernelTri& T = tris_[static_cast<size_t>(t)];
    if (in_triangle_closed(T.v[0], T.v[1], T.v[2], point)) return t;
  }
  return -1;
}

FlatSurface FlatSurface::fully_punctured() const {
  FlatSurface S(*this);
  S.punctures_.clear();
  for (size_t c = 0; c < S.classes_.size(); ++c) {
    ConeClass& cls = S.classes_[c];
    if (cls.angle_over_pi == 2) continue;
    cls.kind = VertexKind::puncture;
    auto best = cls.corners.front();
    for (auto oc : cls.corners)
      if (S.polys_[static_cast<size_t>(oc.first)].name < S.polys_[static_cast<size_t>(best.first)].name ||
          (oc.first == best.first && oc.second < best.second))
        best = oc;
    S.punctures_.push_back({S.polys_[static_cast<size_t>(best.first)].name, best.second});
  }
  std::sort(S.punctures_.begin(), S.punctures_.end(), [](const PunctureSpec& a, const PunctureSpec& b) {
    return a.poly != b.poly ? a.poly < b.poly : a.vertex < b.vertex;
  });
  return S;
}

}  // namespace qf
