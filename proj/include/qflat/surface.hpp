#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qflat/cyclotomic.hpp"

namespace qf {

struct PolygonSpec {
  std::string name;
  std::vector<Scalar> vertices;  // ccw, simple
};

struct GluingSpec {
  std::string poly_a;
  int edge_a;
  std::string poly_b;
  int edge_b;
  int rot;  // edge vector of B == -zeta^rot * (edge vector of A)
};

// Selects the vertex class containing a given polygon corner.
struct PunctureSpec {
  std::string poly;
  int vertex;
};

enum class VertexKind { cone, marked, puncture };

struct ConeClass {
  int id;
  std::vector<std::pair<int, int>> corners;         // (poly, vertex), in ccw cycle order
  std::vector<std::pair<int, int>> kernel_corners;  // (tri, corner), ccw cycle order
  Rat angle_over_pi;                                // exact cone angle / pi
  VertexKind kind;
  bool on_boundary;  // touches an unglued edge; angle is then a boundary angle
};

struct Polygon {
  std::string name;
  std::vector<Scalar> vertices;
  int size() const { return static_cast<int>(vertices.size()); }
  Scalar edge_vec(int e) const {
    return vertices[static_cast<size_t>((e + 1) % size())] - vertices[static_cast<size_t>(e)];
  }
};

struct Gluing {
  int poly_a;
  int edge_a;
  int poly_b;
  int edge_b;
  int rot;
};

// One triangle of the kernel complex: the polygons ear-clipped into triangles
// sharing their polygon's chart. Links cross either an original gluing (carrying
// its rotation) or an internal chord (identity, invisible to crossing words).
struct KernelLink {
  int tri = -1;   // -1: unglued boundary edge
  int edge = -1;
  int rot = 0;
  int gluing = -1;  // original gluing id, -1 for internal chords
  Scalar trans;     // crossing map: x' = zeta^rot * x + trans
};

struct KernelTri {
  int poly;
  std::array<int, 3> vid;    // original vertex indices, ccw
  std::array<Scalar, 3> v;   // their coordinates (polygon chart)
  std::array<KernelLink, 3> link;  // edge j runs v[j] -> v[(j+1)%3]
};

class FlatSurface {
 public:
  const Field& field() const { return *F_; }
  int order() const { return F_->order(); }

  const std::vector<Polygon>& polygons() const { return polys_; }
  const std::vector<Gluing>& gluings() const { return gluings_; }
  const std::vector<ConeClass>& classes() const { return classes_; }
  const std::vector<PunctureSpec>& puncture_specs() const { return punctures_; }

  int poly_index(const std::string& name) const;  // -1 if absent
  int class_at(int poly, int vertex) const;
  int gluing_at(int poly, int edge) const;  // -1 for boundary edge
  bool has_boundary() const { return has_boundary_; }

  int euler_characteristic() const { return chi_; }
  int genus() const;          // errors if the surface has boundary
  int cone_count() const;     // classes with angle != 2pi (punctured or not)
  Scalar area() const { return area_; }           // exact real element
  bool gauss_bonnet_check() const;                // closed surfaces only

  // Kernel complex.
  const std::vector<KernelTri>& kernel() const { return tris_; }
  int kernel_class(int tri, int corner) const;
  int kernel_tri_of_edge(int poly, int edge) const;   // tri whose edge covers it
  int kernel_edge_of_edge(int poly, int edge) const;  // that tri's edge index
  // Wedge steps around a vertex: ccw crosses the corner's incoming edge, cw the
  // outgoing one. Returns (tri, corner) and adds the crossing's rotation index to
  // *rot; returns {-1, -1} at an unglued boundary edge.
  std::pair<int, int> ccw_wedge(int tri, int corner, int* rot) const;
  std::pair<int, int> cw_wedge(int tri, int corner, int* rot) const;
  // Kernel triangle containing the point (closed test); -1 if outside the polygon.
  int locate(int poly, const Scalar& point) const;

  // Identical geometry with every class of angle != 2pi flagged puncture.
  FlatSurface fully_punctured() const;

  friend FlatSurface build_surface(const Field& F, std::vector<PolygonSpec> polygons,
                                   std::vector<GluingSpec> gluings,
                                   std::vector<PunctureSpec> punctures, bool allow_boundary);

 private:
  FlatSurface() = default;
  void derive();  // kernel, classes, chi, area; validates

  const Field* F_ = nullptr;
  std::vector<Polygon> polys_;
  std::vector<Gluing> gluings_;
  std::vector<PunctureSpec> punctures_;
  bool allow_boundary_ = false;
  bool has_boundary_ = false;

  std::vector<std::vector<int>> edge_gluing_;  // [poly][edge] -> gluing id or -1
  std::vector<KernelTri> tris_;
  std::vector<std::vector<int>> poly_tris_;    // [poly] -> kernel tri ids
  std::vector<std::vector<int>> edge_tri_;     // [poly][edge] -> kernel tri
  std::vector<std::vector<int>> edge_tri_edge_;
  std::vector<std::array<int, 3>> corner_class_;  // [tri][corner] -> class id
  std::vector<std::vector<int>> vertex_class_;    // [poly][vertex] -> class id
  std::vector<ConeClass> classes_;
  int chi_ = 0;
  Scalar area_;
};

// Validates and derives everything; distinct error messages for: unmatched edge,
// length mismatch, non-simple polygon, negative orientation, disconnected complex,
// illegal cone angle. Lifts the field so that 4 | N (exact Re/Im split, areas).
FlatSurface build_surface(const Field& F, std::vector<PolygonSpec> polygons,
                          std::vector<GluingSpec> gluings,
                          std::vector<PunctureSpec> punctures = {}, bool allow_boundary = false);

}  // namespace qf
