#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qflat/surface.hpp"

namespace qf {

// Rotation part of parallel transport. After rotating polygon charts so that
// spanning-tree gluings carry rotation 0, every loop's rotation is a sum of the
// remaining residuals, so the holonomy group is the subgroup of Z_N they generate.
struct HolonomyData {
  int q = 1;                  // holonomy order
  int q0 = 1;                 // trivializing-cover degree: q odd ? q : q/2
  int generator = 0;          // N/q; the residual subgroup is <generator> in Z_N
  std::vector<int> chart_rot; // per polygon: normalizing chart rotation index
  std::vector<int> residual;  // per gluing: rotation index in normalized charts
};

HolonomyData holonomy_order(const FlatSurface& S);

struct CoveringData {
  int degree = 1;
  std::vector<int> sheet_shift;                 // per base gluing: crossing a->b sends sheet i to i - shift (mod degree)
  std::vector<std::pair<int, int>> projection;  // per cover polygon: (base polygon, sheet)
  std::vector<int> cover_chart_rot;             // per cover polygon: chart rotation index vs base chart
};

// Degree-q0 cover from q0 rotated copies of each polygon; its holonomy is
// contained in {1, -1}. Branched over non-punctured cone points.
std::pair<FlatSurface, CoveringData> trivializing_cover(const FlatSurface& S);

struct CoverCheck {
  std::string name;
  bool pass;
  std::string detail;
};

// Exact checks: cover holonomy order <= 2; degree; area multiplicativity; for
// fully punctured bases, multiplicativity of the punctured Euler characteristic.
std::vector<CoverCheck> verify_cover(const FlatSurface& base, const FlatSurface& cover,
                                     const CoveringData& data);

// Euler characteristic of the surface minus its punctures.
int punctured_euler_characteristic(const FlatSurface& S);

}  // namespace qf
