#include "qflat/geom.hpp"

namespace qf {

SegRel segment_relation(const Scalar& a, const Scalar& b, const Scalar& c, const Scalar& d) {
  if (a == b && c == d) return (a == c) ? SegRel::touch : SegRel::none;
  if (a == b) return on_segment_closed(c, d, a) ? SegRel::touch : SegRel::none;
  if (c == d) return on_segment_closed(a, b, c) ? SegRel::touch : SegRel::none;
  Sign o1 = orient(a, b, c), o2 = orient(a, b, d);
  Sign o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 == Sign::zero && o2 == Sign::zero) {
    // Collinear: compare parameter intervals along ab.
    Scalar ab = b - a;
    Scalar len = dot(ab, ab);
    Scalar tc = dot(ab, c - a), td = dot(ab, d - a);
    Scalar lo = tc, hi = td;
    if ((hi - lo).sign_re() == Sign::negative) std::swap(lo, hi);
    // Common interval with [0, len]:
    Scalar clo = (lo.sign_re() == Sign::negative) ? lo.field().zero() : lo;
    Scalar chi = ((hi - len).sign_re() == Sign::positive) ? len : hi;
    Sign w = (chi - clo).sign_re();
    if (w == Sign::positive) return SegRel::overlap;
    if (w == Sign::zero) return SegRel::touch;
    return SegRel::none;
  }
  if (o1 == opposite(o2) && o1 != Sign::zero && o3 == opposite(o4) && o3 != Sign::zero)
    return SegRel::cross;
  if (on_segment_closed(a, b, c) || on_segment_closed(a, b, d) || on_segment_closed(c, d, a) ||
      on_segment_closed(c, d, b))
    return SegRel::touch;
  return SegRel::none;
}

Scalar polygon_area_twice(const std::vector<Scalar>& vertices) {
  if (vertices.empty()) fail(ErrorCode::usage, "area of empty polygon");
  const Field& F = vertices[0].field();
  Scalar acc = F.zero();
  for (size_t i = 0; i < vertices.size(); ++i)
    acc += cross(vertices[i], vertices[(i + 1) % vertices.size()]);
  return acc;
}

Scalar line_line_intersect(const Scalar& p, const Scalar& d, const Scalar& a, const Scalar& b) {
  Scalar denom = cross(d, b - a);
  if (denom.is_zero()) fail(ErrorCode::usage, "line_line_intersect: parallel lines");
  Scalar t = cross(a - p, b - a) / denom;
  return p + d * t;
}

Scalar dist_sq_point_segment(const Scalar& p, const Scalar& a, const Scalar& b) {
  Scalar ab = b - a;
  if (ab.is_zero()) return (p - a).norm_sq();
  if (dot_sign(ab, p - a) != Sign::positive) return (p - a).norm_sq();
  if (dot_sign(ab, p - b) != Sign::negative) return (p - b).norm_sq();
  Scalar cr = cross(ab, p - a);
  return cr * cr / ab.norm_sq();
}

}  // namespace qf
