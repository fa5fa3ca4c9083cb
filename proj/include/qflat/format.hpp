#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qflat/surface.hpp"

namespace qf {

// Parsed but not yet validated surface description.
struct SurfaceData {
  const Field* field = nullptr;
  std::vector<PolygonSpec> polygons;
  std::vector<GluingSpec> gluings;
  std::vector<PunctureSpec> punctures;
};

// Line-oriented format:
//   order N
//   polygon <name> <vertex> <vertex> ...   vertex = r*u(k) terms joined by +/-
//   glue <name>.<edge> <name>.<edge> rot <k>
//   puncture <name>.<vertex>
// '#' starts a comment. Errors carry the 1-based line number.
SurfaceData parse_surface_text(const std::string& text);

FlatSurface surface_from_text(const std::string& text, bool allow_boundary = false);

// Canonical form: polygons sorted by name, gluings sorted with their lesser
// (name, edge) side first (rotation index flipped when sides swap), punctures
// sorted. Parsing the output reproduces the surface exactly.
// polygon_comment, when set, may supply a comment line printed above a polygon.
std::string surface_to_text(const FlatSurface& S,
                            const std::function<std::string(const std::string&)>& polygon_comment = {});

std::string scalar_to_terms(const Scalar& x);  // the vertex grammar, canonical

Scalar parse_scalar_terms(const Field& F, const std::string& text);  // inverse grammar

}  // namespace qf
