#pragma once

#include <string>

#include "qflat/surface.hpp"

namespace qf {

// Exact squared budget from a length expression in the vertex-term grammar
// (rational or u(k) sum); the value must be a positive real of the surface's
// field. Rejection is a usage error.
Scalar parse_length_budget(const FlatSurface& S, const std::string& expr);

// Deterministic plain-text reports, one record per line, exact values in the
// vertex-term grammar. Output is independent of the worker count.
std::string info_report(const FlatSurface& S);
std::string cover_report(const FlatSurface& S);
std::string saddles_report(const FlatSurface& S, const Scalar& max_length_sq, bool with_embedded,
                           bool with_words, int workers);
std::string cylinders_report(const FlatSurface& S, const Scalar& max_length_sq, bool embedded_only,
                             int workers);
std::string intersections_report(const FlatSurface& S, const Scalar& max_length_sq, int workers);
std::string graph_report(const FlatSurface& S, const Scalar& max_length_sq, int workers);

}  // namespace qf
