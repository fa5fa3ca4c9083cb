#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qflat/surface.hpp"

namespace qf {

// Unit square with both side pairs glued by translation; the corner class is a
// regular marked point.
FlatSurface square_torus();

// Regular 4g-gon with vertices at the (4g)-th roots of unity. Every edge e with
// e mod 4 in {2, 3} is glued to edge e+2 by the rotation zeta^(2g+2), giving a
// single cone of angle (4g-2)pi.
FlatSurface regular_4g_gon(int g);

// Equilateral triangle of side 4 read as a 12-gon with unit edges, glued in
// pairs around its corners: genus 3, one cone of angle 10pi, holonomy order 6.
FlatSurface twelve_gon_genus3();

// Bordered block: a side-2 equilateral triangle whose bottom and left sides are
// cut into unit arcs and glued to each other by +-pi/3 rotations, padded by a
// buffer up to a polygonal arc circumscribing the circle of radius 2/sqrt(3)
// tangent to those sides at the two free corners. The arc uses chords+1 tangent
// chords, so the exact circular buffer stays inside the block; the unglued
// chords are surface boundary.
FlatSurface building_block(int chords);

// Horizontal cylinder of height 1: labeled intervals along the bottom and top
// (left to right, exact rational lengths) are glued label-to-label, and the two
// vertical sides are glued to each other.
struct SquareTiledBase {
  std::vector<std::pair<std::string, Rat>> bottom;
  std::vector<std::pair<std::string, Rat>> top;
};

// The 8x1 base with bottom a,b,c,d of lengths 3,1,2,2 and top d,c,b,a.
SquareTiledBase fig7_base();

FlatSurface square_tiled(const SquareTiledBase& base);

// square_tiled(fig7_base()): genus 2, two 4pi cones, trivial holonomy, one
// horizontal and one vertical cylinder.
FlatSurface fig7_square_tiled();

// Tilt one glued interval pair: the top copy rotates by psi, the bottom copy by
// -psi, so crossing the pair rotates directions by 2*psi (by -2*psi in the
// upward crossing sense). length_factor rescales both copies.
struct DeformationEntry {
  int interval;          // index into base.bottom
  Rat psi_over_pi;       // top rotation as a fraction of pi; nonzero
  Rat length_factor{1};  // rational rescaling, positive
};

struct DeformationSpec {
  std::vector<DeformationEntry> entries;
  std::vector<long> weights;  // upward-curve crossing count per entry, positive
  // Build even when the weighted crossing rotations do not sum to 0 mod 2pi
  // (the upward curve then has nontrivial holonomy and stops being a cylinder
  // curve).
  bool allow_nonzero_rotation = false;
};

// Deformed square-tiled polygon. The first entry's length absorbs the exact
// correction that keeps the two vertical sides vertical and of equal length;
// a degenerate or self-crossing polygon is rejected.
FlatSurface deform_square_tiled(const SquareTiledBase& base, const DeformationSpec& spec);

// Centrally symmetric lattice decagon with opposite sides glued by translation:
// genus 2, trivial holonomy, two cones of angle 4pi.
FlatSurface fig6_translation();

// Cut four slits of length eps from a 4pi cone along the unoriented direction
// dir (it occurs twice per orientation around the cone) and close the wound
// with a square of side 2*eps whose corners land on the slit tips. The cone
// splits into four 5pi/2 cones; its copies at the square side midpoints become
// regular, so the area grows by exactly (2*eps)^2.
struct SlitSpec {
  int cone_class;
  Scalar direction;  // unit vector in the chart of the class's first corner
  // Positive real slit length; default: the largest power of 1/2 that is at
  // most 1/8 of the shortest saddle connection at the cone.
  std::optional<Scalar> slit_length;
};

FlatSurface slit_and_cap(const FlatSurface& S, const SlitSpec& spec);

}  // namespace qf
