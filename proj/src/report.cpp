#include "qflat/report.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <vector>

#include "qflat/curvegraph.hpp"
#include "qflat/cylinder.hpp"
#include "qflat/error.hpp"
#include "qflat/flow.hpp"
#include "qflat/format.hpp"
#include "qflat/holonomy.hpp"

namespace qf {

namespace {

std::string angle_str(const Rat& over_pi) {
  return over_pi.get_str() + "pi";
}

std::string word_str(const std::vector<int>& word) {
  if (word.empty()) return "-";
  std::string s;
  for (size_t i = 0; i < word.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(word[i]);
  }
  return s;
}

// Embedded-cylinder cores at the budget, in enumeration order.
std::vector<Cylinder> embedded_cylinders(const FlatSurface& S, const Scalar& max_length_sq,
                                         int workers) {
  std::vector<Cylinder> out;
  for (Cylinder& c : enumerate_cylinders(S, max_length_sq, workers))
    if (c.embedded) out.push_back(std::move(c));
  return out;
}

}  // namespace

Scalar parse_length_budget(const FlatSurface& S, const std::string& expr) {
  Scalar len = parse_scalar_terms(S.field(), expr);
  if (!len.is_real() || len.sign_real() != Sign::positive)
    fail(ErrorCode::usage, "length bound must be a positive real, got '" + expr + "'");
  return len * len;
}

std::string info_report(const FlatSurface& S) {
  std::ostringstream out;
  std::vector<Rat> cones;
  for (const ConeClass& c : S.classes())
    if (c.angle_over_pi != 2) cones.push_back(c.angle_over_pi);
  std::sort(cones.begin(), cones.end());
  out << "cone-angles";
  if (cones.empty()) out << " -";
  for (const Rat& a : cones) out << ' ' << angle_str(a);
  out << '\n';
  out << "chi " << S.euler_characteristic() << '\n';
  if (S.has_boundary())
    out << "boundary yes\n";
  else
    out << "genus " << S.genus() << '\n';
  out << "area " << scalar_to_terms(S.area()) << '\n';
  HolonomyData h = holonomy_order(S);
  out << "holonomy-order " << h.q << '\n';
  out << "cover-degree " << h.q0 << '\n';
  return out.str();
}

std::string cover_report(const FlatSurface& S) {
  auto [cover, data] = trivializing_cover(S);
  std::map<std::string, std::string> comment;
  for (size_t p = 0; p < data.projection.size(); ++p) {
    auto [base_poly, sheet] = data.projection[p];
    comment[cover.polygons()[p].name] =
        "sheet " + std::to_string(sheet) + " of " +
        S.polygons()[static_cast<size_t>(base_poly)].name;
  }
  return surface_to_text(cover, [&](const std::string& name) {
    auto it = comment.find(name);
    return it == comment.end() ? std::string() : it->second;
  });
}

std::string saddles_report(const FlatSurface& S, const Scalar& max_length_sq, bool with_embedded,
                           bool with_words, int workers) {
  std::ostringstream out;
  for (const SaddleConnection& sc : saddle_connections(S, max_length_sq, workers)) {
    out << "len2 " << scalar_to_terms(sc.length_sq) << " from " << sc.start_class << '.'
        << sc.start_corner << " to " << sc.end_class << '.' << sc.end_corner << " vec "
        << scalar_to_terms(sc.vec);
    if (with_embedded) out << " embedded " << (is_embedded_saddle(S, sc) ? "yes" : "no");
    if (with_words) out << " word " << word_str(sc.word);
    out << '\n';
  }
  return out.str();
}

std::string cylinders_report(const FlatSurface& S, const Scalar& max_length_sq, bool embedded_only,
                             int workers) {
  std::ostringstream out;
  for (const Cylinder& c : enumerate_cylinders(S, max_length_sq, workers)) {
    if (embedded_only && !c.embedded) continue;
    out << "circ2 " << scalar_to_terms(c.circumference_sq) << " width2 "
        << scalar_to_terms(c.width_sq) << " area " << scalar_to_terms(c.area) << " embedded "
        << (c.embedded ? "yes" : "no") << " direction " << scalar_to_terms(c.core.direction)
        << " word " << word_str(c.core.word) << '\n';
  }
  return out.str();
}

std::string intersections_report(const FlatSurface& S, const Scalar& max_length_sq, int workers) {
  std::vector<Cylinder> cyls = embedded_cylinders(S, max_length_sq, workers);
  std::ostringstream out;
  out << "curves " << cyls.size() << '\n';
  for (size_t i = 0; i < cyls.size(); ++i)
    out << "curve " << i << " circ2 " << scalar_to_terms(cyls[i].circumference_sq) << " word "
        << word_str(cyls[i].core.word) << '\n';
  std::vector<std::pair<size_t, size_t>> overlaps;
  for (size_t i = 0; i < cyls.size(); ++i) {
    out << "row " << i;
    for (size_t j = 0; j < cyls.size(); ++j) {
      if (i == j) {
        out << " 0";
        continue;
      }
      IntersectionReport r = geometric_intersection(S, cyls[i].core, cyls[j].core);
      out << ' ' << r.count;
      if (r.parallel_overlap && i < j) overlaps.emplace_back(i, j);
    }
    out << '\n';
  }
  for (auto [i, j] : overlaps) out << "overlap " << i << ' ' << j << '\n';
  return out.str();
}

std::string graph_report(const FlatSurface& S, const Scalar& max_length_sq, int workers) {
  std::vector<Cylinder> cyls = embedded_cylinders(S, max_length_sq, workers);
  std::vector<CurveTrace> curves;
  for (const Cylinder& c : cyls) curves.push_back(c.core);
  DisjointnessGraph g = disjointness_graph(S, curves);
  std::ostringstream out;
  out << "vertices " << curves.size() << '\n';
  for (size_t i = 0; i < g.canonical_ids.size(); ++i)
    out << "vertex " << i << " word " << word_str(g.canonical_ids[i]) << '\n';
  for (size_t i = 0; i < g.adjacency.size(); ++i)
    for (int j : g.adjacency[i])
      if (static_cast<size_t>(j) > i) out << "edge " << i << ' ' << j << '\n';
  for (size_t k = 0; k < g.components.size(); ++k) {
    out << "component " << k << " size " << g.components[k].size() << " diameter "
        << g.component_diameter[k] << " members";
    for (int v : g.components[k]) out << ' ' << v;
    out << '\n';
  }
  for (size_t i = 0; i < curves.size(); ++i)
    for (size_t j = i + 1; j < curves.size(); ++j) {
      IntersectionReport r = geometric_intersection(S, curves[i], curves[j]);
      int lower = r.count > 0 ? 2 : 1;
      out << "bound " << i << ' ' << j << " intersections " << r.count << " lower " << lower
          << " upper " << distance_upper_bound(r.count) << '\n';
    }
  return out.str();
}

}  // namespace qf
