#include "qflat/flow.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "qflat/geom.hpp"

namespace qf {

namespace {

Sign real_sign(const Scalar& x) { return x.sign_real(); }

// x -> zeta^rot * x + trans, used both for gluing crossings and developing maps.
struct Map {
  int rot = 0;
  Scalar trans;
};

Scalar apply(const Map& m, const Scalar& x) { return x.rotated(m.rot) + m.trans; }

// Crossing data for leaving triangle t through its edge e.
struct Crossing {
  int tri = -1;
  int edge = -1;      // entry edge on the far triangle
  Map into;           // current chart -> far chart
  Map back;           // far chart -> current chart (for developing)
  int letter = -1;    // crossing-word letter, -1 for internal chords
};

Crossing cross_link(const FlatSurface& S, int t, int e) {
  const KernelLink& L = S.kernel()[static_cast<size_t>(t)].link[static_cast<size_t>(e)];
  Crossing c;
  if (L.tri < 0) return c;
  c.tri = L.tri;
  c.edge = L.edge;
  c.into = {L.rot, L.trans};
  const KernelLink& R = S.kernel()[static_cast<size_t>(L.tri)].link[static_cast<size_t>(L.edge)];
  c.back = {R.rot, R.trans};
  if (L.gluing >= 0) {
    const Gluing& G = S.gluings()[static_cast<size_t>(L.gluing)];
    bool a_side = S.kernel_tri_of_edge(G.poly_a, G.edge_a) == t &&
                  S.kernel_edge_of_edge(G.poly_a, G.edge_a) == e;
    c.letter = word_letter(L.gluing, a_side);
  }
  return c;
}

// The wedge of corner (tri, c) spans ccw from E_out to E_back, angle < pi.
Scalar wedge_out(const FlatSurface& S, int tri, int c) {
  const KernelTri& T = S.kernel()[static_cast<size_t>(tri)];
  return T.v[static_cast<size_t>((c + 1) % 3)] - T.v[static_cast<size_t>(c)];
}
Scalar wedge_back(const FlatSurface& S, int tri, int c) {
  const KernelTri& T = S.kernel()[static_cast<size_t>(tri)];
  return T.v[static_cast<size_t>((c + 2) % 3)] - T.v[static_cast<size_t>(c)];
}

// Half-open wedge sector [E_out, E_back); hi_closed admits the E_back ray too
// (used for the last wedge of a boundary vertex fan).
bool wedge_contains(const Scalar& e_out, const Scalar& e_back, const Scalar& d, bool hi_closed) {
  Sign lo = cross_sign(e_out, d);
  if (lo == Sign::negative) return false;
  if (lo == Sign::zero) return dot_sign(e_out, d) == Sign::positive;
  Sign hi = cross_sign(d, e_back);
  if (hi == Sign::positive) return true;
  if (hi == Sign::zero && hi_closed) return dot_sign(e_back, d) == Sign::positive;
  return false;
}

struct FlowState {
  int tri;
  Scalar p;
  Scalar d;
  int at_vertex = -1;  // corner index if p is that corner of tri
};

// Flow bookkeeping shared by the public entry points.
struct FlowRun {
  const FlatSurface& S;
  Trajectory out;
  Scalar seg_start;
  int seg_poly;
  Scalar cum;                 // sum of chart parameters t; length^2 = cum^2 * |d|^2
  Scalar d_norm_sq;
  const Scalar* budget_sq;    // length^2 <= *budget_sq enforced at events
  bool all_vertices_terminal = false;  // saddle replays stop at marked points too
  bool closure_enabled = false;
  int poly0 = -1;
  Scalar p0, d0;
  int final_tri = -1, final_corner = -1;  // arrival corner of a vertex stop
  Scalar final_dir;                       // direction in the arrival chart

  explicit FlowRun(const FlatSurface& s) : S(s) {}

  bool within_budget(const Scalar& total_t) const {
    Scalar len_sq = total_t * total_t * d_norm_sq;
    return real_sign(len_sq - *budget_sq) != Sign::positive;
  }
  void push_segment(const Scalar& end) {
    if (end != seg_start) out.segments.push_back({seg_poly, seg_start, end});
  }
  void finish(FlowStop stop, const Scalar& end, int end_class) {
    push_segment(end);
    out.stop = stop;
    out.end_class = end_class;
    out.length_sq = cum * cum * d_norm_sq;
  }
};

int poly_of(const FlatSurface& S, int tri) { return S.kernel()[static_cast<size_t>(tri)].poly; }

// Continue straight through a marked regular vertex: pick the wedge of the
// class whose sector contains the outgoing ray, crossing the star ccw.
// Returns false on an internal walk failure.
bool pass_through_vertex(FlowRun& R, FlowState& st) {
  const FlatSurface& S = R.S;
  int cls = S.kernel_class(st.tri, st.at_vertex);
  size_t cycle = S.classes()[static_cast<size_t>(cls)].kernel_corners.size();
  Scalar entry_point = st.p;
  int entry_poly = poly_of(S, st.tri);
  std::vector<int> letters;
  int t = st.tri, c = st.at_vertex;
  Scalar p = st.p, d = st.d;
  for (size_t step = 0; step <= cycle; ++step) {
    if (wedge_contains(wedge_out(S, t, c), wedge_back(S, t, c), d, false)) {
      if (!letters.empty()) {
        R.push_segment(entry_point);
        for (int l : letters) R.out.word.push_back(l);
        R.seg_start = p;
        R.seg_poly = poly_of(S, t);
      } else if (poly_of(S, t) != entry_poly) {
        return false;  // chord-only walk cannot change polygon
      }
      st = {t, p, d, c};
      return true;
    }
    Crossing cr = cross_link(S, t, (c + 2) % 3);
    if (cr.tri < 0) return false;
    if (cr.letter >= 0) letters.push_back(cr.letter);
    p = apply(cr.into, p);
    d = d.rotated(cr.into.rot);
    t = cr.tri;
    c = cr.edge;
  }
  return false;
}

// Main exact flow loop. st.p must lie in the closed triangle st.tri; if
// st.at_vertex >= 0 and skip_initial_vertex, the vertex rule is not applied to
// the starting point (the caller has already chosen the wedge).
void run_flow(FlowRun& R, FlowState st, bool skip_initial_vertex) {
  const FlatSurface& S = R.S;
  const Scalar zero = S.field().zero();
  R.seg_start = st.p;
  R.seg_poly = poly_of(S, st.tri);
  R.cum = zero;
  R.d_norm_sq = st.d.norm_sq();

  for (long guard = 0;; ++guard) {
    if (guard > 2000000) fail(ErrorCode::limit, "flow exceeded the step limit");
    const KernelTri& T = S.kernel()[static_cast<size_t>(st.tri)];

    if (st.at_vertex >= 0 && !skip_initial_vertex) {
      const ConeClass& C = S.classes()[static_cast<size_t>(S.kernel_class(st.tri, st.at_vertex))];
      R.final_tri = st.tri;
      R.final_corner = st.at_vertex;
      R.final_dir = st.d;
      if (C.on_boundary) return R.finish(FlowStop::hit_boundary, st.p, C.id);
      if (R.all_vertices_terminal || C.kind != VertexKind::marked || C.angle_over_pi != 2)
        return R.finish(FlowStop::hit_cone, st.p, C.id);
      if (!pass_through_vertex(R, st)) fail(ErrorCode::internal, "vertex wedge walk failed");
    }
    skip_initial_vertex = false;

    // If p sits on an edge with the flow leaving the triangle (or running along
    // the edge with this triangle on the travel direction's right), hop across.
    bool hopped = false;
    if (st.at_vertex < 0) {
      for (int e = 0; e < 3; ++e) {
        const Scalar& a = T.v[static_cast<size_t>(e)];
        const Scalar& b = T.v[static_cast<size_t>((e + 1) % 3)];
        if (!on_segment_open(a, b, st.p)) continue;
        Scalar ev = b - a;
        Sign s = cross_sign(ev, st.d);
        bool leave = s == Sign::negative ||
                     (s == Sign::zero && dot_sign(ev, st.d) == Sign::negative);
        if (!leave) break;
        Crossing cr = cross_link(S, st.tri, e);
        if (cr.tri < 0) return R.finish(FlowStop::hit_boundary, st.p, -1);
        Scalar np = apply(cr.into, st.p);
        if (cr.letter >= 0) {
          R.push_segment(st.p);
          R.out.word.push_back(cr.letter);
          R.seg_start = np;
          R.seg_poly = poly_of(S, cr.tri);
        }
        st.p = np;
        st.d = st.d.rotated(cr.into.rot);
        st.tri = cr.tri;
        hopped = true;
        break;
      }
    }
    if (hopped) continue;
    st.at_vertex = -1;

    // Exit of the ray p + t*d from the closed triangle: smallest positive t.
    bool have = false;
    Scalar t_exit, hit;
    int e_exit = -1;
    for (int e = 0; e < 3; ++e) {
      const Scalar& a = T.v[static_cast<size_t>(e)];
      const Scalar& b = T.v[static_cast<size_t>((e + 1) % 3)];
      Scalar ev = b - a;
      Scalar den = cross(st.d, ev);
      if (den.is_zero()) continue;
      Scalar t = cross(a - st.p, ev) / den;
      if (real_sign(t) != Sign::positive) continue;
      Scalar q = st.p + st.d * t;
      if (!on_segment_closed(a, b, q)) continue;
      if (!have || real_sign(t - t_exit) == Sign::negative) {
        have = true;
        t_exit = t;
        hit = q;
        e_exit = e;
      }
    }
    if (!have) fail(ErrorCode::internal, "flow found no exit from a triangle");

    // Closure strictly inside the current straight run.
    if (R.closure_enabled && R.seg_poly == R.poly0 && st.d == R.d0 && st.p != R.p0) {
      Scalar r = (R.p0 - st.p) / st.d;
      if (r.is_real() && real_sign(r) == Sign::positive &&
          real_sign(r - t_exit) != Sign::positive && R.within_budget(R.cum + r)) {
        R.cum += r;
        return R.finish(FlowStop::closed, R.p0, -1);
      }
    }

    if (!R.within_budget(R.cum + t_exit)) {
      Scalar end = st.p;
      R.out.stop = FlowStop::budget_exhausted;
      R.push_segment(end);
      R.out.length_sq = R.cum * R.cum * R.d_norm_sq;
      return;
    }
    R.cum += t_exit;

    const Scalar& va = T.v[static_cast<size_t>(e_exit)];
    const Scalar& vb = T.v[static_cast<size_t>((e_exit + 1) % 3)];
    if (hit == va || hit == vb) {
      st.p = hit;
      st.at_vertex = hit == va ? e_exit : (e_exit + 1) % 3;
      continue;
    }
    Crossing cr = cross_link(S, st.tri, e_exit);
    if (cr.tri < 0) return R.finish(FlowStop::hit_boundary, hit, -1);
    Scalar np = apply(cr.into, hit);
    if (cr.letter >= 0) {
      R.push_segment(hit);
      R.out.word.push_back(cr.letter);
      R.seg_start = np;
      R.seg_poly = poly_of(S, cr.tri);
    }
    st.p = np;
    st.d = st.d.rotated(cr.into.rot);
    st.tri = cr.tri;
    if (R.closure_enabled && R.seg_poly == R.poly0 && st.p == R.p0 && st.d == R.d0)
      return R.finish(FlowStop::closed, st.p, -1);
  }
}

}  // namespace

Trajectory straight_flow(const FlatSurface& S, int poly, const Scalar& start,
                         const Scalar& direction, const Scalar& budget_sq) {
  if (direction.is_zero()) fail(ErrorCode::invalid, "zero flow direction");
  if (real_sign(budget_sq) != Sign::positive) fail(ErrorCode::invalid, "flow budget must be positive");
  if (poly < 0 || static_cast<size_t>(poly) >= S.polygons().size())
    fail(ErrorCode::invalid, "no such polygon");
  int tri = S.locate(poly, start);
  if (tri < 0) fail(ErrorCode::invalid, "flow start lies outside the polygon");

  FlowRun R(S);
  R.budget_sq = &budget_sq;
  R.closure_enabled = true;
  R.poly0 = poly;
  R.p0 = start;
  R.d0 = direction;

  FlowState st{tri, start, direction, -1};
  const KernelTri& T = S.kernel()[static_cast<size_t>(tri)];
  for (int c = 0; c < 3; ++c)
    if (T.v[static_cast<size_t>(c)] == start) st.at_vertex = c;
  run_flow(R, st, false);
  return std::move(R.out);
}

std::vector<Trajectory> separatrices(const FlatSurface& S, int class_id, const Scalar& direction,
                                     const Scalar& budget_sq, bool oriented) {
  if (class_id < 0 || static_cast<size_t>(class_id) >= S.classes().size())
    fail(ErrorCode::invalid, "no such vertex class");
  if (direction.is_zero()) fail(ErrorCode::invalid, "zero flow direction");
  if (real_sign(budget_sq) != Sign::positive) fail(ErrorCode::invalid, "flow budget must be positive");
  const ConeClass& C = S.classes()[static_cast<size_t>(class_id)];

  std::vector<Trajectory> out;
  std::vector<Scalar> dirs{direction};
  if (!oriented) dirs.push_back(-direction);
  for (const Scalar& d0 : dirs) {
    auto [t, c] = C.kernel_corners.front();
    Scalar d = d0;
    for (size_t i = 0; i < C.kernel_corners.size(); ++i) {
      bool last = i + 1 == C.kernel_corners.size();
      bool hi_closed = C.on_boundary && last;
      if (wedge_contains(wedge_out(S, t, c), wedge_back(S, t, c), d, hi_closed)) {
        FlowRun R(S);
        R.budget_sq = &budget_sq;
        run_flow(R, {t, S.kernel()[static_cast<size_t>(t)].v[static_cast<size_t>(c)], d, c}, true);
        out.push_back(std::move(R.out));
      }
      if (last) break;
      Crossing cr = cross_link(S, t, (c + 2) % 3);
      if (cr.tri < 0) break;  // boundary fan exhausted
      d = d.rotated(cr.into.rot);
      t = cr.tri;
      c = cr.edge;
    }
  }
  return out;
}

std::pair<int, Scalar> canonical_corner_for_ray(const FlatSurface& S, int class_id, int tri,
                                                int corner, const Scalar& dir) {
  const ConeClass& C = S.classes()[static_cast<size_t>(class_id)];
  size_t n = C.kernel_corners.size();
  size_t i0 = 0;
  for (size_t i = 0; i < n; ++i)
    if (C.kernel_corners[i] == std::pair{tri, corner}) {
      i0 = i;
      break;
    }
  int t = tri, c = corner;
  Scalar d = dir;
  // Wedge membership of a plane vector is only defined modulo a full turn, so
  // the scan must start at the anchoring corner: a ray anchored in the closed
  // wedge of (tri, corner) is owned by that wedge or a ccw-later one, and the
  // test then hits before the transported walk can wrap past 2 pi (a fan whose
  // total angle exceeds 2 pi repeats plane directions on later sheets).
  for (size_t step = 0; step < n; ++step) {
    size_t idx = (i0 + step) % n;
    bool hi_closed = C.on_boundary && idx + 1 == n;
    if (wedge_contains(wedge_out(S, t, c), wedge_back(S, t, c), d, hi_closed))
      return {static_cast<int>(idx), d};
    Crossing cr = cross_link(S, t, (c + 2) % 3);
    if (cr.tri < 0) break;
    d = d.rotated(cr.into.rot);
    t = cr.tri;
    c = cr.edge;
  }
  fail(ErrorCode::internal, "no wedge sector contains the ray");
}

namespace {

// Direction sector of a saddle-connection search branch: ccw from lo to hi,
// span < pi (or a single closed ray), lo included unless lo_strict, hi excluded
// unless hi_closed.
struct Sector {
  Scalar lo, hi;
  bool lo_strict = false;
  bool hi_closed = false;

  bool contains(const Scalar& d) const {
    Sign cl = cross_sign(lo, d);
    if (cl == Sign::negative) return false;
    if (cl == Sign::zero) return !lo_strict && dot_sign(lo, d) == Sign::positive;
    Sign ch = cross_sign(d, hi);
    if (ch == Sign::positive) return true;
    if (ch == Sign::zero) return hi_closed && dot_sign(hi, d) == Sign::positive;
    return false;
  }
};

// Intersect with the open interval of directions subtended by the segment
// [P, Q] as seen from the origin (origin not on the segment's line).
std::optional<Sector> clip_sector(const Sector& s, Scalar P, Scalar Q) {
  Sign o = cross_sign(P, Q);
  if (o == Sign::zero) return std::nullopt;
  if (o == Sign::negative) std::swap(P, Q);
  Sector r = s;
  Sign c = cross_sign(r.lo, P);
  if (c == Sign::positive) {
    r.lo = P;
    r.lo_strict = true;
  } else if (c == Sign::zero && dot_sign(r.lo, P) == Sign::positive) {
    r.lo_strict = true;
  }
  Sign c2 = cross_sign(Q, r.hi);
  if (c2 == Sign::positive) {
    r.hi = Q;
    r.hi_closed = false;
  } else if (c2 == Sign::zero && dot_sign(Q, r.hi) == Sign::positive) {
    r.hi_closed = false;
  }
  Sign span = cross_sign(r.lo, r.hi);
  if (span == Sign::negative) return std::nullopt;
  if (span == Sign::zero) {
    if (dot_sign(r.lo, r.hi) != Sign::positive) return std::nullopt;
    if (r.lo_strict || !r.hi_closed) return std::nullopt;
  }
  return r;
}

// Oriented saddle-connection identity: start data plus the exact vector.
struct ScKey {
  int cls;
  int corner;
  std::vector<Rat> coeffs;

  bool operator<(const ScKey& o) const {
    if (cls != o.cls) return cls < o.cls;
    if (corner != o.corner) return corner < o.corner;
    for (size_t i = 0; i < coeffs.size() && i < o.coeffs.size(); ++i) {
      int c = mpq_cmp(coeffs[i].get_mpq_t(), o.coeffs[i].get_mpq_t());
      if (c != 0) return c < 0;
    }
    return coeffs.size() < o.coeffs.size();
  }
  bool operator==(const ScKey& o) const {
    return cls == o.cls && corner == o.corner && coeffs == o.coeffs;
  }
};

struct DfsNode {
  int tri;
  int entry_edge;
  Map dev;  // triangle chart -> development plane (root corner at origin)
  Sector sec;
  std::vector<int> word;
};

struct ScSearch {
  const FlatSurface& S;
  const Scalar& max_len_sq;
  std::vector<SaddleConnection> found;
  long nodes = 0;

  ScSearch(const FlatSurface& s, const Scalar& L2) : S(s), max_len_sq(L2) {}

  bool in_budget(const Scalar& w) {
    return real_sign(w.norm_sq() - max_len_sq) != Sign::positive;
  }

  // Record the oriented connection ending at corner (tri, corner) with
  // developed vector w, keeping it only in its canonical orientation.
  void record(int root_cls, int root_corner, int tri, int corner, const Map& dev,
              const Scalar& w, const std::vector<int>& word) {
    int end_cls = S.kernel_class(tri, corner);
    Scalar back = (-w).rotated(((-dev.rot) % S.order() + S.order()) % S.order());
    auto [rev_corner, rev_vec] = canonical_corner_for_ray(S, end_cls, tri, corner, back);
    ScKey fwd{root_cls, root_corner, w.coeffs()};
    ScKey rev{end_cls, rev_corner, rev_vec.coeffs()};
    if (rev < fwd) return;  // the reversed orientation is canonical
    SaddleConnection sc;
    sc.start_class = root_cls;
    sc.start_corner = root_corner;
    sc.end_class = end_cls;
    sc.end_corner = rev_corner;
    sc.vec = w;
    sc.length_sq = w.norm_sq();
    sc.word = word;
    found.push_back(std::move(sc));
  }

  void search_root(int cls, int corner_idx) {
    const ConeClass& C = S.classes()[static_cast<size_t>(cls)];
    auto [tri, corner] = C.kernel_corners[static_cast<size_t>(corner_idx)];
    const KernelTri& T = S.kernel()[static_cast<size_t>(tri)];
    Map dev{0, -T.v[static_cast<size_t>(corner)]};
    Scalar e_out = wedge_out(S, tri, corner);
    Scalar e_back = wedge_back(S, tri, corner);
    bool hi_closed = C.on_boundary && static_cast<size_t>(corner_idx) + 1 == C.kernel_corners.size();
    Sector sec{e_out, e_back, false, hi_closed};

    if (in_budget(e_out))
      record(cls, corner_idx, tri, (corner + 1) % 3, dev, e_out, {});
    if (hi_closed && in_budget(e_back))
      record(cls, corner_idx, tri, (corner + 2) % 3, dev, e_back, {});

    std::vector<DfsNode> stack;
    expand(cls, corner_idx, {tri, -1, dev, sec, {}}, (corner + 1) % 3, stack);
    while (!stack.empty()) {
      DfsNode node = std::move(stack.back());
      stack.pop_back();
      if (++nodes > 10000000) fail(ErrorCode::limit, "saddle-connection search exceeded the node limit");
      int apex = (node.entry_edge + 2) % 3;
      const KernelTri& NT = S.kernel()[static_cast<size_t>(node.tri)];
      Scalar w = apply(node.dev, NT.v[static_cast<size_t>(apex)]);
      if (!w.is_zero() && node.sec.contains(w) && in_budget(w))
        record(cls, corner_idx, node.tri, apex, node.dev, w, node.word);
      expand(cls, corner_idx, node, (node.entry_edge + 1) % 3, stack);
      expand(cls, corner_idx, node, (node.entry_edge + 2) % 3, stack);
    }
  }

  // Try to continue through edge e of the node's triangle.
  void expand(int cls, int corner_idx, const DfsNode& node, int e, std::vector<DfsNode>& stack) {
    (void)cls;
    (void)corner_idx;
    const KernelTri& T = S.kernel()[static_cast<size_t>(node.tri)];
    Scalar P = apply(node.dev, T.v[static_cast<size_t>(e)]);
    Scalar Q = apply(node.dev, T.v[static_cast<size_t>((e + 1) % 3)]);
    auto sec = clip_sector(node.sec, P, Q);
    if (!sec) return;
    if (real_sign(dist_sq_point_segment(S.field().zero(), P, Q) - max_len_sq) == Sign::positive)
      return;
    Crossing cr = cross_link(S, node.tri, e);
    if (cr.tri < 0) return;
    Map dev2{(node.dev.rot + cr.back.rot) % S.order(),
             apply(node.dev, cr.back.trans)};
    std::vector<int> word2 = node.word;
    if (cr.letter >= 0) word2.push_back(cr.letter);
    stack.push_back({cr.tri, cr.edge, dev2, *sec, std::move(word2)});
  }
};

int compare_scalars_real(const Scalar& a, const Scalar& b) {
  return static_cast<int>((a - b).sign_real());
}

bool sc_before(const SaddleConnection& a, const SaddleConnection& b) {
  int c = compare_scalars_real(a.length_sq, b.length_sq);
  if (c != 0) return c < 0;
  if (a.word != b.word) return a.word < b.word;
  if (a.start_class != b.start_class) return a.start_class < b.start_class;
  if (a.start_corner != b.start_corner) return a.start_corner < b.start_corner;
  return Scalar::cmp_coeffwise(a.vec, b.vec) < 0;
}

}  // namespace

std::vector<SaddleConnection> saddle_connections(const FlatSurface& S, const Scalar& max_length_sq,
                                                 int workers) {
  if (real_sign(max_length_sq) != Sign::positive)
    fail(ErrorCode::invalid, "saddle-connection length bound must be positive");
  if (workers < 1) workers = 1;

  std::vector<std::pair<int, int>> roots;
  for (const ConeClass& C : S.classes())
    for (size_t i = 0; i < C.kernel_corners.size(); ++i)
      roots.emplace_back(C.id, static_cast<int>(i));

  std::vector<std::vector<SaddleConnection>> buckets(static_cast<size_t>(workers));
  auto run_bucket = [&](int wi) {
    ScSearch search(S, max_length_sq);
    for (size_t r = static_cast<size_t>(wi); r < roots.size(); r += static_cast<size_t>(workers))
      search.search_root(roots[r].first, roots[r].second);
    buckets[static_cast<size_t>(wi)] = std::move(search.found);
  };
  if (workers == 1) {
    run_bucket(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_bucket, w);
    for (auto& th : pool) th.join();
  }

  std::vector<SaddleConnection> all;
  for (auto& b : buckets)
    for (auto& sc : b) all.push_back(std::move(sc));
  std::sort(all.begin(), all.end(), sc_before);
  return all;
}

std::optional<RayHit> shoot_ray(const FlatSurface& S, int class_id, int corner_idx,
                                const Scalar& dir, const Scalar& budget_sq) {
  if (class_id < 0 || class_id >= static_cast<int>(S.classes().size()))
    fail(ErrorCode::invalid, "no such vertex class");
  const ConeClass& C = S.classes()[static_cast<size_t>(class_id)];
  if (corner_idx < 0 || corner_idx >= static_cast<int>(C.kernel_corners.size()))
    fail(ErrorCode::invalid, "corner index out of range for the class");
  if (dir.is_zero()) fail(ErrorCode::invalid, "ray direction must be nonzero");
  auto [tri, corner] = C.kernel_corners[static_cast<size_t>(corner_idx)];
  bool hi_closed = C.on_boundary && corner_idx + 1 == static_cast<int>(C.kernel_corners.size());
  if (!wedge_contains(wedge_out(S, tri, corner), wedge_back(S, tri, corner), dir, hi_closed))
    fail(ErrorCode::invalid, "ray direction outside the corner's sector");

  FlowRun R(S);
  R.budget_sq = &budget_sq;
  R.all_vertices_terminal = true;
  run_flow(R, {tri, S.kernel()[static_cast<size_t>(tri)].v[static_cast<size_t>(corner)], dir, corner},
           true);
  if (R.out.stop != FlowStop::hit_cone) return std::nullopt;

  RayHit h;
  h.tri = R.final_tri;
  h.corner = R.final_corner;
  h.dir = R.final_dir;
  h.sc.start_class = class_id;
  h.sc.start_corner = corner_idx;
  h.sc.vec = dir * R.cum;
  h.sc.length_sq = h.sc.vec.norm_sq();
  h.sc.word = std::move(R.out.word);
  h.sc.end_class = R.out.end_class;
  h.sc.end_corner = canonical_corner_for_ray(S, h.sc.end_class, h.tri, h.corner, -h.dir).first;
  return h;
}

SaddleConnection reversed_saddle(const FlatSurface& S, const SaddleConnection& sc) {
  std::optional<RayHit> hit = shoot_ray(S, sc.start_class, sc.start_corner, sc.vec, sc.length_sq);
  if (!hit || hit->sc.end_class != sc.end_class || hit->sc.vec != sc.vec)
    fail(ErrorCode::invalid, "connection does not replay on this surface");
  auto [idx, rvec] = canonical_corner_for_ray(S, sc.end_class, hit->tri, hit->corner, -hit->dir);
  SaddleConnection r;
  r.start_class = sc.end_class;
  r.start_corner = idx;
  r.end_class = sc.start_class;
  r.end_corner = sc.start_corner;
  r.vec = rvec;
  r.length_sq = sc.length_sq;
  r.word.reserve(sc.word.size());
  for (auto it = sc.word.rbegin(); it != sc.word.rend(); ++it) r.word.push_back(*it ^ 1);
  return r;
}

std::vector<FlowSegment> saddle_segments(const FlatSurface& S, const SaddleConnection& sc) {
  const ConeClass& C = S.classes()[static_cast<size_t>(sc.start_class)];
  auto [tri, corner] = C.kernel_corners[static_cast<size_t>(sc.start_corner)];
  FlowRun R(S);
  Scalar budget = sc.length_sq;
  R.budget_sq = &budget;
  R.all_vertices_terminal = true;
  run_flow(R, {tri, S.kernel()[static_cast<size_t>(tri)].v[static_cast<size_t>(corner)], sc.vec, corner},
           true);
  if (R.out.stop != FlowStop::hit_cone && R.out.stop != FlowStop::hit_boundary)
    fail(ErrorCode::internal, "saddle-connection replay did not reach a vertex");
  if (R.out.word != sc.word) fail(ErrorCode::internal, "saddle-connection replay diverged");
  return std::move(R.out.segments);
}

bool is_embedded_saddle(const FlatSurface& S, const SaddleConnection& sc) {
  std::vector<FlowSegment> segs = saddle_segments(S, sc);
  size_t n = segs.size();
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      if (segs[i].poly != segs[j].poly) continue;
      SegRel rel = segment_relation(segs[i].start, segs[i].end, segs[j].start, segs[j].end);
      if (rel == SegRel::none) continue;
      if (rel == SegRel::cross || rel == SegRel::overlap) return false;
      // A touch is harmless only at the trajectory's own two endpoints.
      auto allowed = [&](const Scalar& pt) {
        return (i == 0 && pt == segs.front().start) || (j == n - 1 && pt == segs.back().end);
      };
      const Scalar* ends_i[2] = {&segs[i].start, &segs[i].end};
      const Scalar* ends_j[2] = {&segs[j].start, &segs[j].end};
      bool bad = false;
      for (const Scalar* p : ends_i)
        if (on_segment_closed(segs[j].start, segs[j].end, *p) && !allowed(*p)) bad = true;
      for (const Scalar* p : ends_j)
        if (on_segment_closed(segs[i].start, segs[i].end, *p) && !allowed(*p)) bad = true;
      if (bad) return false;
    }
  }
  return true;
}

}  // namespace qf
