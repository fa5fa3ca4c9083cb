#pragma once

#include "qflat/cyclotomic.hpp"

namespace qf {

// Orientation of the triple (a, b, c): sign of cross(b - a, c - a).
inline Sign orient(const Scalar& a, const Scalar& b, const Scalar& c) {
  return cross_sign(b - a, c - a);
}

// p lies on the closed segment [a, b] (a == b allowed: reduces to p == a).
inline bool on_segment_closed(const Scalar& a, const Scalar& b, const Scalar& p) {
  if (orient(a, b, p) != Sign::zero) return false;
  Scalar ab = b - a;
  if (ab.is_zero()) return p == a;
  Sign s0 = dot_sign(ab, p - a);
  Sign s1 = dot_sign(ab, b - p);
  return s0 != Sign::negative && s1 != Sign::negative;
}

// p lies strictly inside the open segment (a, b).
inline bool on_segment_open(const Scalar& a, const Scalar& b, const Scalar& p) {
  if (orient(a, b, p) != Sign::zero) return false;
  Scalar ab = b - a;
  if (ab.is_zero()) return false;
  return dot_sign(ab, p - a) == Sign::positive && dot_sign(ab, b - p) == Sign::positive;
}

enum class SegRel { none, touch, cross, overlap };

// Relation of closed segments [a,b] and [c,d]: disjoint; touching in exactly one
// point that is an endpoint of at least one of them; properly crossing in one
// interior-interior point; or collinear with a full subsegment in common.
SegRel segment_relation(const Scalar& a, const Scalar& b, const Scalar& c, const Scalar& d);

// p inside the closed / open triangle (a, b, c), which must be ccw.
inline bool in_triangle_closed(const Scalar& a, const Scalar& b, const Scalar& c, const Scalar& p) {
  return orient(a, b, p) != Sign::negative && orient(b, c, p) != Sign::negative &&
         orient(c, a, p) != Sign::negative;
}
inline bool in_triangle_open(const Scalar& a, const Scalar& b, const Scalar& c, const Scalar& p) {
  return orient(a, b, p) == Sign::positive && orient(b, c, p) == Sign::positive &&
         orient(c, a, p) == Sign::positive;
}

// Twice the signed area of the ccw polygon, as an exact real element (needs 4 | N).
Scalar polygon_area_twice(const std::vector<Scalar>& vertices);

// Intersection point of the line through p with direction d and the line through
// a and b; requires the lines not parallel (cross(d, b - a) != 0).
Scalar line_line_intersect(const Scalar& p, const Scalar& d, const Scalar& a, const Scalar& b);

// Squared distance from point p to the closed segment [a, b], as an exact real element.
Scalar dist_sq_point_segment(const Scalar& p, const Scalar& a, const Scalar& b);

}  // namespace qf
