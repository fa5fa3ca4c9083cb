#include "qflat/cylinder.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <thread>

#include "qflat/geom.hpp"

namespace qf {

namespace {

Sign real_sign(const Scalar& x) { return x.sign_real(); }

// x -> zeta^rot * x + trans, the developing map of a triangle copy.
struct Map {
  int rot = 0;
  Scalar trans;
};

Scalar apply(const Map& m, const Scalar& x) { return x.rotated(m.rot) + m.trans; }

Scalar wedge_out(const FlatSurface& S, int tri, int c) {
  const KernelTri& T = S.kernel()[static_cast<size_t>(tri)];
  return T.v[static_cast<size_t>((c + 1) % 3)] - T.v[static_cast<size_t>(c)];
}
Scalar wedge_back(const FlatSurface& S, int tri, int c) {
  const KernelTri& T = S.kernel()[static_cast<size_t>(tri)];
  return T.v[static_cast<size_t>((c + 2) % 3)] - T.v[static_cast<size_t>(c)];
}

// Half-open wedge sector [E_out, E_back); hi_closed admits the E_back ray too.
bool wedge_contains(const Scalar& e_out, const Scalar& e_back, const Scalar& d, bool hi_closed) {
  Sign lo = cross_sign(e_out, d);
  if (lo == Sign::negative) return false;
  if (lo == Sign::zero) return dot_sign(e_out, d) == Sign::positive;
  Sign hi = cross_sign(d, e_back);
  if (hi == Sign::positive) return true;
  if (hi == Sign::zero && hi_closed) return dot_sign(e_back, d) == Sign::positive;
  return false;
}

// The rotation aligning v with the ray of ref: v.rotated(k) positively
// parallel to ref. Unique for nonzero vectors when it exists.
int parallel_rot(int order, const Scalar& ref, const Scalar& v) {
  Scalar w = v;
  for (int k = 0; k < order; ++k) {
    if (cross_sign(ref, w) == Sign::zero && dot_sign(ref, w) == Sign::positive) return k;
    w = w.rotated(1);
  }
  fail(ErrorCode::internal, "boundary chain does not develop onto one line");
}

// Sweep the ray a around its vertex by exactly pi, clockwise for the left
// side of a path arriving along -a, counterclockwise for the right side.
// Returns the corner index reached and the swept ray in its chart; nothing
// when the sweep leaves through the surface boundary.
std::optional<std::pair<int, Scalar>> sweep_half_turn(const FlatSurface& S, int cls, int idx,
                                                      const Scalar& a, LeafSide side) {
  const ConeClass& C = S.classes()[static_cast<size_t>(cls)];
  size_t n = C.kernel_corners.size();
  auto [t, c] = C.kernel_corners[static_cast<size_t>(idx)];
  int rot = 0;
  int order = S.order();
  for (size_t step = 0; step <= 2 * n + 2; ++step) {
    auto [nt, nc] = side == LeafSide::left ? S.cw_wedge(t, c, &rot) : S.ccw_wedge(t, c, &rot);
    if (nt < 0) return std::nullopt;
    t = nt;
    c = nc;
    Scalar b = (-a).rotated(((rot % order) + order) % order);
    int dummy = 0;
    bool last_ccw = C.on_boundary && S.ccw_wedge(t, c, &dummy).first < 0;
    if (wedge_contains(wedge_out(S, t, c), wedge_back(S, t, c), b, last_ccw)) {
      for (size_t i = 0; i < n; ++i)
        if (C.kernel_corners[i] == std::make_pair(t, c)) return std::make_pair(static_cast<int>(i), b);
      fail(ErrorCode::internal, "swept wedge missing from its class cycle");
    }
  }
  fail(ErrorCode::internal, "half-turn sweep did not land in any wedge");
}

// From a strip-facing wedge at a width-attaining vertex, rotate toward the
// ray the far boundary chain leaves along: clockwise when the strip lies on
// the left of its near boundary, counterclockwise otherwise.  Staying inside
// the half turn the chain subtends keeps the search in the cone copy that
// actually touches the strip.  Returns the corner index and the ray in its
// chart, expressed so the leading edge of the corner carries aligned rays.
std::pair<int, Scalar> far_chain_corner(const FlatSurface& S, int cls, int t, int c,
                                        const Scalar& ray, LeafSide side) {
  const ConeClass& C = S.classes()[static_cast<size_t>(cls)];
  size_t n = C.kernel_corners.size();
  int order = S.order();
  int rot = 0;
  for (size_t step = 0; step <= 2 * n + 2; ++step) {
    Scalar b = ray.rotated(((rot % order) + order) % order);
    int dummy = 0;
    bool hi_ok = side == LeafSide::right ||
                 (C.on_boundary && S.ccw_wedge(t, c, &dummy).first < 0);
    if (wedge_contains(wedge_out(S, t, c), wedge_back(S, t, c), b, hi_ok)) {
      if (side == LeafSide::right && cross_sign(wedge_back(S, t, c), b) == Sign::zero &&
          dot_sign(wedge_back(S, t, c), b) == Sign::positive) {
        // Along the trailing edge: unless that edge is the surface boundary,
        // hand the ray to the next wedge so it leaves along a leading edge.
        int probe_rot = rot;
        auto nxt = S.ccw_wedge(t, c, &probe_rot);
        if (nxt.first >= 0) {
          rot = probe_rot;
          t = nxt.first;
          c = nxt.second;
          b = ray.rotated(((rot % order) + order) % order);
        }
      }
      for (size_t i = 0; i < n; ++i)
        if (C.kernel_corners[i] == std::make_pair(t, c))
          return std::make_pair(static_cast<int>(i), b);
      fail(ErrorCode::internal, "far chain wedge missing from its class cycle");
    }
    auto [nt, nc] = side == LeafSide::left ? S.cw_wedge(t, c, &rot) : S.ccw_wedge(t, c, &rot);
    if (nt < 0) fail(ErrorCode::internal, "far boundary chain leaves the surface");
    t = nt;
    c = nc;
  }
  fail(ErrorCode::internal, "far chain sweep did not land in any wedge");
}

bool same_connection(const SaddleConnection& a, const SaddleConnection& b) {
  return a.start_class == b.start_class && a.start_corner == b.start_corner && a.vec == b.vec;
}

// Clip a convex ccw polygon to {lam >= 0} for a linear functional with real
// values; crossing points are exact.
template <class Lam>
std::vector<Scalar> clip_linear(const std::vector<Scalar>& pts, Lam&& lam) {
  std::vector<Scalar> out;
  size_t n = pts.size();
  for (size_t i = 0; i < n; ++i) {
    const Scalar& P = pts[i];
    const Scalar& Q = pts[(i + 1) % n];
    Scalar fp = lam(P), fq = lam(Q);
    Sign sp = real_sign(fp), sq = real_sign(fq);
    if (sp != Sign::negative) out.push_back(P);
    if ((sp == Sign::negative && sq == Sign::positive) ||
        (sp == Sign::positive && sq == Sign::negative))
      out.push_back(P + (Q - P) * (fp / (fp - fq)));
  }
  return out;
}

std::optional<std::pair<int, int>> first_overlap(const Field& F,
                                                 const std::vector<CylinderPiece>& pieces) {
  for (size_t i = 0; i < pieces.size(); ++i)
    for (size_t j = i + 1; j < pieces.size(); ++j) {
      if (pieces[i].poly != pieces[j].poly) continue;
      Scalar t2 = convex_intersection_area_twice(F, pieces[i].corners, pieces[j].corners);
      if (real_sign(t2) == Sign::positive)
        return std::make_pair(static_cast<int>(i), static_cast<int>(j));
    }
  return std::nullopt;
}

std::vector<int> min_rotation(const std::vector<int>& w) {
  std::vector<int> best = w;
  std::vector<int> cand(w.size());
  for (size_t r = 1; r < w.size(); ++r) {
    for (size_t i = 0; i < w.size(); ++i) cand[i] = w[(i + r) % w.size()];
    if (cand < best) best = cand;
  }
  return best;
}

}  // namespace

std::vector<int> canonical_cycle_word(const std::vector<int>& w) {
  std::vector<int> rev;
  rev.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) rev.push_back(*it ^ 1);
  return std::min(min_rotation(w), min_rotation(rev));
}

namespace {

// A developed triangle copy, identified modulo translation by the period.
struct NodeKey {
  int tri = -1;
  int rot = 0;
  Scalar trans;
};
struct NodeLess {
  bool operator()(const NodeKey& a, const NodeKey& b) const {
    if (a.tri != b.tri) return a.tri < b.tri;
    if (a.rot != b.rot) return a.rot < b.rot;
    return Scalar::cmp_coeffwise(a.trans, b.trans) < 0;
  }
};

}  // namespace

LeafTrace trace_side_leaf(const FlatSurface& S, const SideTag& tag, const Scalar& leg_budget_sq) {
  if (real_sign(leg_budget_sq) != Sign::positive)
    fail(ErrorCode::invalid, "leaf budget must be positive");
  LeafTrace out;
  out.cycle.push_back(tag);
  SaddleConnection cur = tag.sc;
  for (long steps = 0; steps < 100000; ++steps) {
    SaddleConnection rev = reversed_saddle(S, cur);
    auto swept = sweep_half_turn(S, cur.end_class, rev.start_corner, rev.vec, tag.side);
    if (!swept) return out;
    auto hit = shoot_ray(S, cur.end_class, swept->first, swept->second, leg_budget_sq);
    if (!hit) return out;
    if (same_connection(hit->sc, tag.sc)) {
      out.closed = true;
      return out;
    }
    out.cycle.push_back({hit->sc, tag.side});
    cur = std::move(hit->sc);
  }
  return out;
}

std::optional<Cylinder> maximal_cylinder_from(const FlatSurface& S, const SideTag& tag,
                                              const Scalar& leg_budget_sq) {
  LeafTrace tr = trace_side_leaf(S, tag, leg_budget_sq);
  if (!tr.closed) return std::nullopt;
  const Field& F = S.field();
  int order = S.order();

  // One period of the boundary develops onto a single line; its translation.
  const Scalar& ref = tr.cycle.front().sc.vec;
  Scalar period = F.zero();
  for (const SideTag& st : tr.cycle)
    period = period + st.sc.vec.rotated(parallel_rot(order, ref, st.sc.vec));
  Scalar circ_sq = period.norm_sq();

  int sigma = tag.side == LeafSide::left ? 1 : -1;
  auto flux = [&](const Scalar& x) {
    Scalar cr = cross(period, x);
    return sigma > 0 ? cr : -cr;
  };
  auto canonicalize = [&](Scalar& trans) {
    Scalar along = dot(period, trans);
    while (real_sign(along) == Sign::negative) {
      trans = trans + period;
      along = along + circ_sq;
    }
    while (real_sign(along - circ_sq) != Sign::negative) {
      trans = trans - period;
      along = along - circ_sq;
    }
  };
  auto dev_vertex = [&](const NodeKey& k, int c) {
    return apply({k.rot, k.trans}, S.kernel()[static_cast<size_t>(k.tri)].v[static_cast<size_t>(c)]);
  };
  auto min_flux_of = [&](const NodeKey& k) {
    Scalar m = flux(dev_vertex(k, 0));
    for (int c = 1; c < 3; ++c) {
      Scalar f = flux(dev_vertex(k, c));
      if (real_sign(f - m) == Sign::negative) m = f;
    }
    return m;
  };

  // Grow the strip on the open side of the line, one triangle copy at a time
  // in order of least perpendicular flux, until the nearest vertex strictly
  // above the line bounds everything still pending.
  struct QEntry {
    Scalar min_flux;
    NodeKey key;
  };
  auto qless = [](const QEntry& a, const QEntry& b) {
    Sign s = real_sign(a.min_flux - b.min_flux);
    if (s != Sign::zero) return s == Sign::negative;
    return NodeLess{}(a.key, b.key);
  };
  std::set<QEntry, decltype(qless)> queue(qless);
  std::map<NodeKey, char, NodeLess> visited;

  // Seed at the start vertex of the first leg: the wedge flush against the
  // strip side of the outgoing ray, developed so that ray points along the
  // period translation from the origin.
  auto [t0, c0] = S.classes()[static_cast<size_t>(tag.sc.start_class)]
                      .kernel_corners[static_cast<size_t>(tag.sc.start_corner)];
  int ts = t0, cs = c0;
  Scalar ds = tag.sc.vec;
  if (sigma < 0 && cross_sign(wedge_out(S, ts, cs), ds) == Sign::zero) {
    // The ray runs along this wedge's leading edge; the strip hugs the wedge
    // one step clockwise of it.
    int rstep = 0;
    auto nxt = S.cw_wedge(ts, cs, &rstep);
    if (nxt.first < 0) fail(ErrorCode::internal, "cylinder strip leaves the surface");
    ts = nxt.first;
    cs = nxt.second;
    ds = ds.rotated(rstep % order);
  }
  int dev_rot = parallel_rot(order, period, ds);
  NodeKey seed{ts, dev_rot,
               -S.kernel()[static_cast<size_t>(ts)].v[static_cast<size_t>(cs)].rotated(dev_rot)};
  canonicalize(seed.trans);
  visited.emplace(seed, 0);
  queue.insert({min_flux_of(seed), seed});

  std::optional<Scalar> best;
  long nodes = 0;
  while (!queue.empty()) {
    QEntry q = *queue.begin();
    queue.erase(queue.begin());
    if (best && real_sign(q.min_flux - *best) != Sign::negative) break;
    if (++nodes > 2000000) fail(ErrorCode::limit, "cylinder strip search exceeded the node limit");
    const KernelTri& T = S.kernel()[static_cast<size_t>(q.key.tri)];
    Scalar f[3];
    for (int c = 0; c < 3; ++c) {
      f[c] = flux(dev_vertex(q.key, c));
      if (real_sign(f[c]) == Sign::positive && (!best || real_sign(f[c] - *best) == Sign::negative))
        best = f[c];
    }
    for (int e = 0; e < 3; ++e) {
      const Scalar& f1 = f[e];
      const Scalar& f2 = f[(e + 1) % 3];
      Sign c12 = real_sign(f1 - f2);
      const Scalar& lo = c12 == Sign::positive ? f2 : f1;
      const Scalar& hi = c12 == Sign::positive ? f1 : f2;
      if (c12 == Sign::zero) {
        // The open edge runs at constant height: inside the open strip only.
        if (real_sign(f1) != Sign::positive) continue;
        if (best && real_sign(f1 - *best) != Sign::negative) continue;
      } else {
        if (real_sign(hi) != Sign::positive) continue;
        if (best && real_sign(lo - *best) != Sign::negative) continue;
      }
      const KernelLink& L = T.link[static_cast<size_t>(e)];
      if (L.tri < 0) continue;
      const KernelLink& B = S.kernel()[static_cast<size_t>(L.tri)].link[static_cast<size_t>(L.edge)];
      NodeKey nk{L.tri, (q.key.rot + B.rot) % order, B.trans.rotated(q.key.rot) + q.key.trans};
      canonicalize(nk.trans);
      if (!visited.emplace(nk, 0).second) continue;
      queue.insert({min_flux_of(nk), nk});
    }
  }
  if (!best) fail(ErrorCode::internal, "cylinder strip found no bounding vertex");
  Scalar width_flux = *best;  // = circumference * width: the strip area

  // Pieces: each visited copy clipped to the closed strip, back in its chart.
  Cylinder cyl;
  Scalar piece_sum = F.zero();
  for (const auto& [key, unused] : visited) {
    (void)unused;
    std::vector<Scalar> tri_pts;
    for (int c = 0; c < 3; ++c) tri_pts.push_back(dev_vertex(key, c));
    std::vector<Scalar> cut = clip_linear(tri_pts, [&](const Scalar& x) { return flux(x); });
    if (cut.size() >= 3)
      cut = clip_linear(cut, [&](const Scalar& x) { return width_flux - flux(x); });
    if (cut.size() < 3) continue;
    Scalar a2 = polygon_area_twice(cut);
    if (real_sign(a2) != Sign::positive) continue;
    piece_sum = piece_sum + a2;
    CylinderPiece piece;
    piece.poly = S.kernel()[static_cast<size_t>(key.tri)].poly;
    int inv = (order - key.rot % order) % order;
    for (const Scalar& x : cut) piece.corners.push_back((x - key.trans).rotated(inv));
    cyl.pieces.push_back(std::move(piece));
  }
  if (piece_sum != width_flux + width_flux)
    fail(ErrorCode::internal, "cylinder pieces do not tile the strip");

  // Core: a straight closed leaf at half the width, traced from the interior
  // chord of some strip triangle.
  Scalar half = width_flux.scaled(Rat(1, 2));
  bool core_done = false;
  for (const auto& [key, unused] : visited) {
    (void)unused;
    Scalar pts[3];
    for (int c = 0; c < 3; ++c) pts[c] = dev_vertex(key, c);
    std::vector<Scalar> chord;
    for (int e = 0; e < 3; ++e) {
      Scalar fp = flux(pts[e]) - half, fq = flux(pts[(e + 1) % 3]) - half;
      if ((real_sign(fp) == Sign::negative && real_sign(fq) == Sign::positive) ||
          (real_sign(fp) == Sign::positive && real_sign(fq) == Sign::negative))
        chord.push_back(pts[e] + (pts[(e + 1) % 3] - pts[e]) * (fp / (fp - fq)));
    }
    if (chord.size() != 2) continue;
    Scalar mid = (chord[0] + chord[1]).scaled(Rat(1, 2));
    if (!in_triangle_open(pts[0], pts[1], pts[2], mid)) continue;
    int inv = (order - key.rot % order) % order;
    Scalar mid_chart = (mid - key.trans).rotated(inv);
    Scalar dir_chart = period.rotated(inv);
    Trajectory core = straight_flow(S, S.kernel()[static_cast<size_t>(key.tri)].poly, mid_chart,
                                    dir_chart, circ_sq);
    if (core.stop != FlowStop::closed || core.length_sq != circ_sq)
      fail(ErrorCode::internal, "cylinder core leaf does not close");
    cyl.core.segments = std::move(core.segments);
    cyl.core.direction = dir_chart;
    cyl.core.holonomy = dir_chart;
    cyl.core.circumference_sq = circ_sq;
    cyl.core.word = std::move(core.word);
    core_done = true;
    break;
  }
  if (!core_done) fail(ErrorCode::internal, "no strip triangle carries the core chord");

  // Far boundary: the chain through a vertex attaining the width, traced
  // against the period with the strip still on the tagged side.  Only a
  // sector reaching strictly below that vertex faces the strip; rotating from
  // it to the outgoing ray pins the right cone copy.
  bool far_done = false;
  for (const auto& [key, unused] : visited) {
    (void)unused;
    for (int c = 0; c < 3 && !far_done; ++c) {
      if (real_sign(flux(dev_vertex(key, c)) - width_flux) != Sign::zero) continue;
      if (real_sign(flux(dev_vertex(key, (c + 1) % 3)) - width_flux) != Sign::negative &&
          real_sign(flux(dev_vertex(key, (c + 2) % 3)) - width_flux) != Sign::negative)
        continue;
      int cls = S.kernel_class(key.tri, c);
      int inv = (order - key.rot % order) % order;
      Scalar back_dir = (-period).rotated(inv);
      auto [fidx, fvec] = far_chain_corner(S, cls, key.tri, c, back_dir, tag.side);
      auto first = shoot_ray(S, cls, fidx, fvec, circ_sq);
      if (!first) fail(ErrorCode::internal, "far boundary leg escaped the surface");
      LeafTrace far = trace_side_leaf(S, {first->sc, tag.side}, circ_sq);
      if (!far.closed) fail(ErrorCode::internal, "far boundary leaf does not close");
      cyl.boundary_far = std::move(far.cycle);
      far_done = true;
    }
    if (far_done) break;
  }
  if (!far_done) fail(ErrorCode::internal, "width-attaining vertex not found");

  cyl.circumference_sq = circ_sq;
  cyl.area = width_flux;
  cyl.width_sq = (width_flux * width_flux) / circ_sq;
  cyl.boundary_near = std::move(tr.cycle);
  cyl.overlap_witness = first_overlap(F, cyl.pieces);
  cyl.embedded = !cyl.overlap_witness;
  return cyl;
}

bool is_embedded_cylinder(const FlatSurface& S, const Cylinder& c) {
  return !first_overlap(S.field(), c.pieces);
}

Scalar convex_intersection_area_twice(const Field& F, const std::vector<Scalar>& a,
                                      const std::vector<Scalar>& b) {
  std::vector<Scalar> out = a;
  for (size_t i = 0; i < b.size() && out.size() >= 3; ++i) {
    const Scalar& p = b[i];
    const Scalar& q = b[(i + 1) % b.size()];
    out = clip_linear(out, [&](const Scalar& x) { return cross(q - p, x - p); });
  }
  if (out.size() < 3) return F.zero();
  return polygon_area_twice(out);
}

std::vector<Cylinder> enumerate_cylinders(const FlatSurface& S, const Scalar& max_circumference_sq,
                                          int workers) {
  if (real_sign(max_circumference_sq) != Sign::positive)
    fail(ErrorCode::invalid, "cylinder circumference bound must be positive");
  if (workers < 1) workers = 1;

  std::vector<SaddleConnection> scs = saddle_connections(S, max_circumference_sq, workers);
  std::vector<SideTag> tags;
  tags.reserve(2 * scs.size());
  for (const SaddleConnection& sc : scs) {
    tags.push_back({sc, LeafSide::left});
    tags.push_back({sc, LeafSide::right});
  }

  std::vector<std::vector<Cylinder>> buckets(static_cast<size_t>(workers));
  auto run_bucket = [&](int wi) {
    for (size_t i = static_cast<size_t>(wi); i < tags.size(); i += static_cast<size_t>(workers)) {
      std::optional<Cylinder> cyl = maximal_cylinder_from(S, tags[i], max_circumference_sq);
      if (cyl && real_sign(cyl->circumference_sq - max_circumference_sq) != Sign::positive)
        buckets[static_cast<size_t>(wi)].push_back(std::move(*cyl));
    }
  };
  if (workers == 1) {
    run_bucket(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_bucket, w);
    for (auto& th : pool) th.join();
  }

  std::vector<std::pair<std::vector<int>, Cylinder>> keyed;
  for (auto& b : buckets)
    for (Cylinder& c : b) keyed.emplace_back(canonical_cycle_word(c.core.word), std::move(c));
  std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) {
    Sign s = real_sign(x.second.circumference_sq - y.second.circumference_sq);
    if (s != Sign::zero) return s == Sign::negative;
    if (x.first != y.first) return x.first < y.first;
    if (x.second.core.word != y.second.core.word) return x.second.core.word < y.second.core.word;
    int c = Scalar::cmp_coeffwise(x.second.core.direction, y.second.core.direction);
    if (c != 0) return c < 0;
    return Scalar::cmp_coeffwise(x.second.core.segments.front().start,
                                 y.second.core.segments.front().start) < 0;
  });

  std::vector<Cylinder> out;
  for (auto& [key, cyl] : keyed)
    if (out.empty() || key != canonical_cycle_word(out.back().core.word))
      out.push_back(std::move(cyl));
  return out;
}

std::pair<CircularArc, CircularArc> inscribed_angle_locus(const Field& F, const Scalar& A,
                                                          const Scalar& B,
                                                          const Rat& theta_over_pi) {
  if (A == B) fail(ErrorCode::invalid, "inscribed-angle locus needs distinct endpoints");
  if (!(theta_over_pi > 0) || !(theta_over_pi < 1))
    fail(ErrorCode::invalid, "inscribed angle must be strictly between 0 and pi");
  Rat steps = theta_over_pi * F.order();
  steps /= 2;
  if (steps.get_den() != 1)
    fail(ErrorCode::invalid, "inscribed angle is not a multiple of the field's sector");
  int k = static_cast<int>(mpz_class(steps.get_num() % F.order()).get_si());
  Scalar e = F.zeta_pow(k);
  Scalar cos_t = (e + e.conj()).scaled(Rat(1, 2));
  Scalar i_unit = F.zeta_pow(F.order() / 4);
  Scalar sin_t = ((e - e.conj()) / i_unit).scaled(Rat(1, 2));

  Scalar mid = (A + B).scaled(Rat(1, 2));
  Scalar d = B - A;
  Scalar off = (i_unit * d) * cos_t / sin_t.scaled(Rat(2));
  Scalar r_sq = d.norm_sq() / (sin_t * sin_t).scaled(Rat(4));
  CircularArc up{mid + off, r_sq, A, B};
  CircularArc down{mid - off, r_sq, A, B};
  return {up, down};
}

}  // namespace qf
