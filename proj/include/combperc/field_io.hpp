#pragma once

// Field serialization.
//
// Text format, version 1:
//
//   combperc-field 1
//   dim <d>
//   range <axis> <lo> <hi>        (one line per axis)
//   padding <P>
//   p <probability, %.17g>
//   seed <uint64>
//   data
//   <one line per row: '1' open / '0' closed, last coordinate fastest>
//   end
//
// Rows are emitted in row-major order, so the body is the row-major
// bitmask of the window split at every multiple of the last extent.

#include <iosfwd>
#include <string>

#include "combperc/lattice.hpp"
#include "json.hpp"

namespace combperc {

void write_field_text(std::ostream& os, const PercolationField& field);
PercolationField read_field_text(std::istream& is);

// JSON export for small windows; throws std::length_error above kMaxJsonSites.
inline constexpr std::size_t kMaxJsonSites = std::size_t{1} << 20;
nlohmann::json field_to_json(const PercolationField& field);
PercolationField field_from_json(const nlohmann::json& doc);

}  // namespace combperc
