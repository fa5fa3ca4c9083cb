#pragma once

#include <string>
#include <vector>

#include "qflat/cylinder.hpp"
#include "qflat/flow.hpp"
#include "qflat/surface.hpp"

namespace qf {

struct SvgOverlays {
  const std::vector<Cylinder>* cylinders = nullptr;
  const std::vector<SaddleConnection>* saddles = nullptr;
};

// SVG 1.1 document: polygons to scale in a left-to-right row (each in its own
// chart), cylinder pieces shaded one color per cylinder, saddle connections as
// labeled segments. The only floating-point conversion in the library lives
// here and is display-only; element order is deterministic.
std::string svg_document(const FlatSurface& S, const SvgOverlays& overlays);

}  // namespace qf
