#pragma once

#include <iosfwd>
#include <string>

#include "choquard/grid.hpp"

namespace choquard {

// Binary layout, little-endian: "CHQF", u32 version = 1, u32 N, u32 M, f64 L,
// then M^N f64 values in row-major order with axis 0 slowest.
inline constexpr std::uint32_t kFieldFormatVersion = 1;

void write_field(std::ostream& os, const Field& u);
Field read_field(std::istream& is);

void write_field_file(const std::string& path, const Field& u);
Field read_field_file(const std::string& path);

}  // namespace choquard
