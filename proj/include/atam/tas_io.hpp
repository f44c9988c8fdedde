#pragma once

#include "atam/core.hpp"

#include <iosfwd>
#include <string>

namespace atam {

// Parses the line-oriented TAS text format:
//   temperature <t>
//   glue <label> <strength>
//   tile <name> N=<label|null> E=<label|null> S=<label|null> W=<label|null>
//   seed <x> <y> <tilename>
// '#' starts a comment; blank lines are ignored.
// Throws std::runtime_error with a line number on any syntax or
// validation failure.
TAS parse_tas(const std::string& text);
TAS load_tas(const std::string& path);

// One line per tile, "<x> <y> <tilename>", sorted by (y,x).
std::string dump_assembly(const TAS& sys, const Assembly& a);

// Round-trip serialization of a TAS back into the text format.
std::string dump_tas(const TAS& sys);

}  // namespace atam
