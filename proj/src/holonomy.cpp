#include "qflat/holonomy.hpp"

#include <numeric>
#include <queue>

namespace qf {

HolonomyData holonomy_order(const FlatSurface& S) {
  int N = S.order();
  size_t np = S.polygons().size();
  HolonomyData h;
  h.chart_rot.assign(np, 0);

  // Spanning tree of the polygon-adjacency graph; chart_rot makes tree gluings
  // rotation-free. Crossing a->b turns directions by rot, so in rotated charts
  // the effective index is rot + chart_rot[b] - chart_rot[a].
  std::vector<char> seen(np, 0);
  seen[0] = 1;
  std::queue<int> bfs;
  bfs.push(0);
  while (!bfs.empty()) {
    int p = bfs.front();
    bfs.pop();
    for (const Gluing& G : S.gluings()) {
      for (auto [from, efrom, to, rot] :
           {std::tuple{G.poly_a, G.edge_a, G.poly_b, G.rot}, std::tuple{G.poly_b, G.edge_b, G.poly_a, (N - G.rot) % N}}) {
        (void)efrom;
        if (from != p || seen[static_cast<size_t>(to)]) continue;
        seen[static_cast<size_t>(to)] = 1;
        h.chart_rot[static_cast<size_t>(to)] = ((h.chart_rot[static_cast<size_t>(p)] - rot) % N + N) % N;
        bfs.push(to);
      }
    }
  }

  int g = N;  // gcd of N and all residuals; the subgroup is <g>
  h.residual.reserve(S.gluings().size());
  for (const Gluing& G : S.gluings()) {
    int r = ((G.rot + h.chart_rot[static_cast<size_t>(G.poly_b)] -
              h.chart_rot[static_cast<size_t>(G.poly_a)]) % N + N) % N;
    h.residual.push_back(r);
    g = std::gcd(g, r);
  }
  h.generator = g;
  h.q = N / g;
  h.q0 = h.q % 2 == 1 ? h.q : h.q / 2;
  return h;
}

std::pair<FlatSurface, CoveringData> trivializing_cover(const FlatSurface& S) {
  const Field& F = S.field();
  int N = F.order();
  HolonomyData h = holonomy_order(S);
  int g = h.generator, q0 = h.q0;

  CoveringData data;
  data.degree = q0;
  for (int r : h.residual) data.sheet_shift.push_back((r / g) % q0);

  // Sheet i of polygon p lives in the chart rotated by chart_rot[p] + i*g. A
  // base gluing with residual m*g then connects sheet i to sheet i - m with a
  // rotation that collapses to 0 or a half turn (t*q0*g = t*N/2 for even q).
  std::vector<PolygonSpec> polys;
  std::vector<GluingSpec> glus;
  std::vector<PunctureSpec> punct;
  auto sheet_name = [&](int p, int i) {
    return S.polygons()[static_cast<size_t>(p)].name + "@" + std::to_string(i);
  };
  for (size_t p = 0; p < S.polygons().size(); ++p) {
    for (int i = 0; i < q0; ++i) {
      int rot = (h.chart_rot[p] + i * g) % N;
      PolygonSpec ps{sheet_name(static_cast<int>(p), i), {}};
      for (const Scalar& v : S.polygons()[p].vertices) ps.vertices.push_back(v.rotated(rot));
      polys.push_back(std::move(ps));
      data.projection.emplace_back(static_cast<int>(p), i);
      data.cover_chart_rot.push_back(rot);
    }
  }
  for (size_t gi = 0; gi < S.gluings().size(); ++gi) {
    const Gluing& G = S.gluings()[gi];
    int m = data.sheet_shift[gi];
    for (int i = 0; i < q0; ++i) {
      int j = ((i - m) % q0 + q0) % q0;
      int rot = ((h.residual[gi] + (j - i) * g) % N + N) % N;
      glus.push_back({sheet_name(G.poly_a, i), G.edge_a, sheet_name(G.poly_b, j), G.edge_b, rot});
    }
  }
  for (const PunctureSpec& ps : S.puncture_specs()) {
    int p = S.poly_index(ps.poly);
    for (int i = 0; i < q0; ++i) punct.push_back({sheet_name(p, i), ps.vertex});
  }
  FlatSurface cover = build_surface(F, std::move(polys), std::move(glus), std::move(punct),
                                    S.has_boundary());
  return {std::move(cover), std::move(data)};
}

int punctured_euler_characteristic(const FlatSurface& S) {
  int punctured = 0;
  for (const ConeClass& c : S.classes())
    if (c.kind == VertexKind::puncture) ++punctured;
  return S.euler_characteristic() - punctured;
}

std::vector<CoverCheck> verify_cover(const FlatSurface& base, const FlatSurface& cover,
                                     const CoveringData& data) {
  std::vector<CoverCheck> out;
  auto add = [&](const std::string& name, bool pass, const std::string& detail) {
    out.push_back({name, pass, detail});
  };

  HolonomyData hc = holonomy_order(cover);
  add("cover holonomy order <= 2", hc.q <= 2, "order " + std::to_string(hc.q));

  HolonomyData hb = holonomy_order(base);
  bool deg_ok = data.degree == hb.q0 &&
                cover.polygons().size() == base.polygons().size() * static_cast<size_t>(data.degree);
  add("degree", deg_ok,
      "degree " + std::to_string(data.degree) + ", expected " + std::to_string(hb.q0));

  Scalar scaled = base.area().scaled(data.degree);
  add("area multiplicativity", cover.area() == scaled,
      "cover area " + cover.area().re_decimal(6) + " vs " + std::to_string(data.degree) + " x base");

  bool fully = true;
  for (const ConeClass& c : base.classes())
    if (c.angle_over_pi != 2 && c.kind != VertexKind::puncture) fully = false;
  if (fully && !base.has_boundary()) {
    int cb = punctured_euler_characteristic(base);
    int cc = punctured_euler_characteristic(cover);
    add("punctured Euler characteristic multiplicativity", cc == data.degree * cb,
        "cover " + std::to_string(cc) + " vs " + std::to_string(data.degree) + " x " + std::to_string(cb));
  }
  return out;
}

}  // namespace qf
