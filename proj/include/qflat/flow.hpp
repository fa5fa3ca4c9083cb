#pragma once

#include <optional>
#include <vector>

#include "qflat/surface.hpp"

namespace qf {

enum class FlowStop { hit_cone, hit_boundary, budget_exhausted, closed };

// One straight run inside a single polygon chart. Internal chords do not break
// segments; every boundary between consecutive segments is an original gluing.
struct FlowSegment {
  int poly;
  Scalar start;
  Scalar end;
};

// Crossing word letters: 2*gluing_id + 0 crossing from side a to side b,
// 2*gluing_id + 1 the other way.
inline int word_letter(int gluing, bool a_to_b) { return 2 * gluing + (a_to_b ? 0 : 1); }
inline int word_gluing(int letter) { return letter / 2; }

struct Trajectory {
  std::vector<FlowSegment> segments;
  FlowStop stop = FlowStop::budget_exhausted;
  int end_class = -1;  // set for hit_cone
  std::vector<int> word;
  Scalar length_sq;  // exact: the development is a straight line
};

// Maximal straight-line flow from a point of the closed polygon. Exact vertex
// hits terminate at cone/puncture/boundary classes and continue straight through
// marked regular (2pi) points. A run along a glued edge stays in the polygon on
// its left. The budget is enforced at crossings: the trajectory ends at the last
// event (crossing, vertex, closure) of squared length <= budget_sq.
Trajectory straight_flow(const FlatSurface& S, int poly, const Scalar& start,
                         const Scalar& direction, const Scalar& budget_sq);

// One trajectory per sector of the class whose half-open direction span
// contains the ray; oriented=false also flows the reversed ray.
std::vector<Trajectory> separatrices(const FlatSurface& S, int class_id, const Scalar& direction,
                                     const Scalar& budget_sq, bool oriented = true);

struct SaddleConnection {
  int start_class = -1;
  int start_corner = -1;  // index into classes()[start_class].kernel_corners
  int end_class = -1;
  int end_corner = -1;    // index into classes()[end_class].kernel_corners
  Scalar vec;             // in the start corner's polygon chart
  Scalar length_sq;
  std::vector<int> word;
  std::optional<bool> embedded;
};

// All saddle connections of squared length <= max_length_sq, one per
// orientation-reversal pair, canonically ordered (squared length, then crossing
// word, then start data). Every vertex class may serve as an endpoint, and every
// vertex class blocks trajectory interiors. workers > 1 partitions the search
// roots across threads; the result is identical for any worker count.
std::vector<SaddleConnection> saddle_connections(const FlatSurface& S, const Scalar& max_length_sq,
                                                 int workers = 1);

// The unique class corner whose half-open sector contains the ray, walking ccw
// from corner (tri, corner); returns the corner's index in the class cycle and
// the ray rewritten in that corner's chart.
std::pair<int, Scalar> canonical_corner_for_ray(const FlatSurface& S, int class_id, int tri,
                                                int corner, const Scalar& dir);

// First vertex hit along the ray from a class corner (every vertex class is
// terminal). dir must lie in the corner's half-open sector. Returns nothing
// when the budget runs out or the ray escapes through a boundary edge.
struct RayHit {
  SaddleConnection sc;
  int tri = -1;
  int corner = -1;  // arrival corner; dir is rewritten into its chart
  Scalar dir;
};
std::optional<RayHit> shoot_ray(const FlatSurface& S, int class_id, int corner_idx,
                                const Scalar& dir, const Scalar& budget_sq);

// The same connection traversed the other way: start and end swapped, vector
// developed backwards, word reversed with each crossing side flipped.
SaddleConnection reversed_saddle(const FlatSurface& S, const SaddleConnection& sc);

// The saddle connection's straight trajectory, one segment per polygon visit.
std::vector<FlowSegment> saddle_segments(const FlatSurface& S, const SaddleConnection& sc);

// True iff the open trajectory is injective: no two of its polygon segments
// meet except consecutive hand-offs and the shared start/end vertex.
bool is_embedded_saddle(const FlatSurface& S, const SaddleConnection& sc);

}  // namespace qf
