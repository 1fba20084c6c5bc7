#pragma once

// Extended-XYZ structure files. One frame per structure:
//
//   <atom count>
//   lattice="ax ay az bx by bz cx cy cz" energy=<eV/atom>
//   <species> <x> <y> <z>        (Cartesian Angstrom, one line per atom)
//
// Keys are matched case-insensitively; `energy` is optional, other keys are
// ignored. Blank lines between frames are allowed.

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "eelm/crystal.hpp"

namespace eelm::rdf {

/// Throws ParseError with the offending 1-based line number.
std::vector<CrystalStructure> parseExtendedXyz(std::istream& in);
std::vector<CrystalStructure> readExtendedXyz(const std::filesystem::path& path);

void writeExtendedXyz(std::ostream& out, const std::vector<CrystalStructure>& structures);

}  // namespace eelm::rdf
