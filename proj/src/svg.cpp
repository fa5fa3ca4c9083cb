#include "qflat/svg.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace qf {

namespace {

double display(const Scalar& x, bool imag) {
  return std::stod(imag ? x.im_decimal(12) : x.re_decimal(12));
}

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  // Avoid the two spellings of zero.
  if (std::string(buf) == "-0.00") return "0.00";
  return buf;
}

constexpr const char* kPalette[] = {
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
    "#b07aa1", "#ff9da7", "#9c755f", "#bab0ab", "#86bcb6", "#d37295",
};
constexpr size_t kPaletteSize = sizeof kPalette / sizeof kPalette[0];

// Per-polygon placement: charts overlap between polygons, so each polygon is
// shifted into its own slot of a shared row.
struct Layout {
  std::vector<double> dx, top;  // chart -> screen: X = (x + dx)*s + m, Y = (top - y)*s + m
  double scale = 1, margin = 20, width = 0, height = 0;

  double X(int poly, double x) const { return (x + dx[static_cast<size_t>(poly)]) * scale + margin; }
  double Y(int poly, double y) const { return (top[static_cast<size_t>(poly)] - y) * scale + margin; }
};

Layout plan_layout(const FlatSurface& S) {
  Layout L;
  double cursor = 0, max_h = 0, gap = 0;
  std::vector<std::array<double, 4>> box;
  for (const Polygon& P : S.polygons()) {
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    bool first = true;
    for (const Scalar& v : P.vertices) {
      double x = display(v, false), y = display(v, true);
      if (first || x < x0) x0 = x;
      if (first || x > x1) x1 = x;
      if (first || y < y0) y0 = y;
      if (first || y > y1) y1 = y;
      first = false;
    }
    box.push_back({x0, x1, y0, y1});
    gap = std::max(gap, 0.08 * std::max(x1 - x0, y1 - y0));
  }
  for (const auto& b : box) {
    L.dx.push_back(cursor - b[0]);
    L.top.push_back(b[3]);
    cursor += (b[1] - b[0]) + gap;
    max_h = std::max(max_h, b[3] - b[2]);
  }
  double row_w = cursor - gap;
  L.scale = row_w > 0 ? 900.0 / row_w : 1.0;
  if (max_h * L.scale > 900.0 && max_h > 0) L.scale = 900.0 / max_h;
  L.width = row_w * L.scale + 2 * L.margin;
  L.height = max_h * L.scale + 2 * L.margin;
  return L;
}

void emit_ring(std::ostringstream& out, const Layout& L, int poly,
               const std::vector<Scalar>& ring, const std::string& attrs) {
  out << "<path d=\"";
  for (size_t i = 0; i < ring.size(); ++i) {
    out << (i ? "L" : "M") << num(L.X(poly, display(ring[i], false))) << ' '
        << num(L.Y(poly, display(ring[i], true)));
  }
  out << "Z\" " << attrs << "/>\n";
}

}  // namespace

std::string svg_document(const FlatSurface& S, const SvgOverlays& overlays) {
  Layout L = plan_layout(S);
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(L.width)
      << "\" height=\"" << num(L.height) << "\" viewBox=\"0 0 " << num(L.width) << ' '
      << num(L.height) << "\">\n";
  out << "<rect width=\"" << num(L.width) << "\" height=\"" << num(L.height)
      << "\" fill=\"#ffffff\"/>\n";

  for (size_t p = 0; p < S.polygons().size(); ++p)
    emit_ring(out, L, static_cast<int>(p), S.polygons()[p].vertices,
              "fill=\"none\" stroke=\"#333333\" stroke-width=\"1.5\"");

  if (overlays.cylinders) {
    for (size_t c = 0; c < overlays.cylinders->size(); ++c) {
      const char* color = kPalette[c % kPaletteSize];
      for (const CylinderPiece& piece : (*overlays.cylinders)[c].pieces)
        emit_ring(out, L, piece.poly, piece.corners,
                  std::string("fill=\"") + color + "\" fill-opacity=\"0.45\" stroke=\"none\"");
    }
  }

  if (overlays.saddles) {
    for (size_t i = 0; i < overlays.saddles->size(); ++i) {
      std::vector<FlowSegment> segs = saddle_segments(S, (*overlays.saddles)[i]);
      for (const FlowSegment& seg : segs) {
        out << "<line x1=\"" << num(L.X(seg.poly, display(seg.start, false))) << "\" y1=\""
            << num(L.Y(seg.poly, display(seg.start, true))) << "\" x2=\""
            << num(L.X(seg.poly, display(seg.end, false))) << "\" y2=\""
            << num(L.Y(seg.poly, display(seg.end, true)))
            << "\" stroke=\"#222222\" stroke-width=\"2\"/>\n";
      }
      if (!segs.empty()) {
        double mx = (display(segs[0].start, false) + display(segs[0].end, false)) / 2;
        double my = (display(segs[0].start, true) + display(segs[0].end, true)) / 2;
        out << "<text x=\"" << num(L.X(segs[0].poly, mx) + 4) << "\" y=\""
            << num(L.Y(segs[0].poly, my) - 4)
            << "\" font-family=\"monospace\" font-size=\"12\" fill=\"#222222\">s" << i
            << "</text>\n";
      }
    }
  }

  out << "</svg>\n";
  return out.str();
}

}  // namespace qf
