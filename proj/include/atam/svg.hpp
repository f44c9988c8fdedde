#pragma once
// Deterministic SVG rendering of assemblies and protocol lattice states.
// Identical inputs always produce byte-identical documents.

#include "atam/core.hpp"
#include "atam/engine.hpp"

#include <string>

namespace atam {

// Color assigned to a tile type (fixed golden-angle palette).
std::string tile_color(int tile_index);

// One cell per occupied position, colored by tile type, with a tile legend.
// Seed positions get a heavier outline. y grows upward.
std::string render_svg(const TAS& sys, const Assembly& a);

// One cell per lattice site, colored by resolution state: resolved sites by
// their tile, finalized-but-unresolved frames in a neutral tone, other
// touched sites lighter still. Includes the tile legend plus state swatches.
std::string render_svg(const TAS& sys, const LatticeState& st);

}  // namespace atam
