#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qflat/flow.hpp"

namespace qf {

enum class LeafSide { left, right };

// A saddle connection together with a chosen side of its line; the parallel
// leaves infinitesimally offset to that side are traced combinatorially.
struct SideTag {
  SaddleConnection sc;
  LeafSide side = LeafSide::left;
};

struct LeafTrace {
  bool closed = false;
  std::vector<SideTag> cycle;  // consecutive connections along the leaf
};

// A closed regular geodesic, one chart segment per polygon visit.
struct CurveTrace {
  std::vector<FlowSegment> segments;
  Scalar direction;  // chart direction of the first segment
  Scalar holonomy;   // development period of one loop, in the first chart
  Scalar circumference_sq;
  std::vector<int> word;  // gluing crossing word of one period
};

struct CylinderPiece {
  int poly = -1;
  std::vector<Scalar> corners;  // ccw convex polygon in the polygon chart
};

struct Cylinder {
  CurveTrace core;
  Scalar circumference_sq;
  Scalar width_sq;  // real subfield; width itself is area / circumference
  Scalar area;      // = circumference * width, exact in the field
  std::vector<SideTag> boundary_near;  // the traced side's cycle
  std::vector<SideTag> boundary_far;
  std::vector<CylinderPiece> pieces;  // one strip period, mapped to charts
  bool embedded = false;
  std::optional<std::pair<int, int>> overlap_witness;  // offending piece pair
};

// Follow the leaf offset on tag.side of the connection: at each vertex the
// continuation is the unique ray spanning angle exactly pi on that side.
// leg_budget_sq bounds each connection of the cycle; a leg over budget or an
// escape through the surface boundary leaves the trace unterminated.
LeafTrace trace_side_leaf(const FlatSurface& S, const SideTag& tag, const Scalar& leg_budget_sq);

// Grow the closed leaf cycle through tag into the maximal open cylinder on
// that side: both boundary cycles, exact width and area, and the strip's
// polygon pieces. Nothing when the leaf fails to close within the budget.
std::optional<Cylinder> maximal_cylinder_from(const FlatSurface& S, const SideTag& tag,
                                              const Scalar& leg_budget_sq);

// True iff the open cylinder embeds: no two pieces from distinct strip
// locations overlap with positive area (shared boundary is allowed).
bool is_embedded_cylinder(const FlatSurface& S, const Cylinder& c);

// Every maximal cylinder of squared circumference <= max_circumference_sq,
// each flagged embedded or not, deduplicated by the canonical core crossing
// word and deterministically ordered. workers > 1 partitions the boundary
// tags across threads; the result is identical for any worker count.
std::vector<Cylinder> enumerate_cylinders(const FlatSurface& S, const Scalar& max_circumference_sq,
                                          int workers = 1);

// Doubled exact area of the overlap of two convex ccw polygons.
Scalar convex_intersection_area_twice(const Field& F, const std::vector<Scalar>& a,
                                      const std::vector<Scalar>& b);

// Canonical form of a closed crossing word: the lesser traversal orientation,
// each taken at its lexicographically least rotation. Identifies a free
// homotopy class of geodesic cores independently of start point and direction.
std::vector<int> canonical_cycle_word(const std::vector<int>& word);

// Locus of apexes that see the segment AB under the fixed angle
// pi * theta_over_pi: the two mirrored circular arcs of central angle
// 2*(pi - theta), each running from a to b on its circle's center side.
struct CircularArc {
  Scalar center;
  Scalar radius_sq;
  Scalar a, b;  // arc endpoints
};
std::pair<CircularArc, CircularArc> inscribed_angle_locus(const Field& F, const Scalar& A,
                                                          const Scalar& B,
                                                          const Rat& theta_over_pi);

}  // namespace qf
