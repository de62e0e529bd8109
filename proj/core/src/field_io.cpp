#include "choquard/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "choquard/params.hpp"

namespace choquard {

namespace {

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

template <class T>
void put(std::ostream& os, T v) {
  v = to_little(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw DomainError("truncated field file");
  return to_little(v);
}

}  // namespace

void write_field(std::ostream& os, const Field& u) {
  os.write("CHQF", 4);
  put<std::uint32_t>(os, kFieldFormatVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(u.grid.dim()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(u.grid.points_per_axis()));
  put<double>(os, u.grid.half_length());
  for (double v : u.values) put<double>(os, v);
  if (!os) throw DomainError("failed to write field");
}

Field read_field(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "CHQF", 4) != 0) throw DomainError("not a field file (bad magic)");
  const auto version = get<std::uint32_t>(is);
  if (version != kFieldFormatVersion) throw DomainError("unsupported field file version " + std::to_string(version));
  const auto N = get<std::uint32_t>(is);
  const auto M = get<std::uint32_t>(is);
  const auto L = get<double>(is);
  Grid g(static_cast<int>(N), static_cast<int>(M), L);
  Field u(g);
  for (double& v : u.values) v = get<double>(is);
  return u;
}

void write_field_file(const std::string& path, const Field& u) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DomainError("cannot open " + path + " for writing");
  write_field(os, u);
}

Field read_field_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DomainError("cannot open " + path);
  return read_field(is);
}

}  // namespace choquard
