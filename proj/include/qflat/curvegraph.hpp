#pragma once

#include <utility>
#include <vector>

#include "qflat/cylinder.hpp"
#include "qflat/surface.hpp"

namespace qf {

// Transverse crossings of two closed regular geodesics. For curves of
// distinct directions in a nonpositively curved cone metric the straight
// representatives are in minimal position, so the count is the geometric
// intersection number; curves sharing a line segment are reported through
// the overlap flag instead, with only the transverse crossings counted.
struct IntersectionReport {
  long count = 0;
  std::vector<std::pair<int, Scalar>> crossings;  // (polygon, chart point)
  bool parallel_overlap = false;
};

IntersectionReport geometric_intersection(const FlatSurface& S, const CurveTrace& a,
                                          const CurveTrace& b);

// Curves as vertices, joined when their traces are disjoint and not the same
// geodesic. Components and breadth-first diameters are reported per run and
// depend only on the input order of the curves.
struct DisjointnessGraph {
  std::vector<std::vector<int>> canonical_ids;  // canonical crossing word per vertex
  std::vector<std::vector<int>> adjacency;      // sorted neighbor lists, symmetric
  std::vector<std::vector<int>> components;     // sorted vertex indices
  std::vector<int> component_diameter;
};

DisjointnessGraph disjointness_graph(const FlatSurface& S, const std::vector<CurveTrace>& curves);

// 1 when the curves are disjoint, else ceil(2*log2(i)) + 2: the elementary
// logarithmic bound on curve-graph distance in terms of intersection number.
int distance_upper_bound(long i);

}  // namespace qf
