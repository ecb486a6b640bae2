#pragma once

// CQNLS1 snapshot files.
//
// Layout (all values little-endian, 48-byte header):
//   offset  0  magic   8 bytes  "CQNLS1" followed by two NUL bytes
//   offset  8  Nx      uint64
//   offset 16  Ny      uint64
//   offset 24  Lx      float64
//   offset 32  Ly      float64
//   offset 40  t       float64
//   offset 48  Nx*Ny interleaved (re, im) float64 pairs, row-major, x fastest

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "cqnls/grid.hpp"

namespace cqnls {

inline constexpr std::array<char, 8> snapshot_magic{'C', 'Q', 'N', 'L', 'S', '1', '\0', '\0'};
inline constexpr std::size_t snapshot_header_bytes = 48;

struct Snapshot {
  Field field;
  double t;
};

namespace detail {

inline std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
}

inline void put_u64(std::ostream& os, std::uint64_t v) {
  v = to_little_endian(v);
  os.write(reinterpret_cast<const char*>(&v), 8);
}

inline void put_f64(std::ostream& os, double d) { put_u64(os, std::bit_cast<std::uint64_t>(d)); }

inline std::uint64_t get_u64(std::istream& is, const std::string& path) {
  std::uint64_t v = 0;
  const auto offset = static_cast<long long>(is.tellg());
  if (!is.read(reinterpret_cast<char*>(&v), 8)) {
    throw Error(ErrorCode::parse_error,
                path + ": truncated snapshot at byte offset " + std::to_string(offset));
  }
  return to_little_endian(v);
}

inline double get_f64(std::istream& is, const std::string& path) {
  return std::bit_cast<double>(get_u64(is, path));
}

}  // namespace detail

inline void write_snapshot(const std::filesystem::path& path, const Field& u, double t) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::io_error, "cannot open " + path.string() + " for writing");
  const auto& g = u.grid();
  os.write(snapshot_magic.data(), snapshot_magic.size());
  detail::put_u64(os, g.Nx());
  detail::put_u64(os, g.Ny());
  detail::put_f64(os, g.Lx());
  detail::put_f64(os, g.Ly());
  detail::put_f64(os, t);
  for (const auto& z : u.values()) {
    detail::put_f64(os, z.real());
    detail::put_f64(os, z.imag());
  }
  if (!os) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

inline Snapshot read_snapshot(const std::filesystem::path& path) {
  const std::string name = path.string();
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::io_error, "cannot open " + name);
  std::array<char, 8> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != snapshot_magic) {
    throw Error(ErrorCode::parse_error, name + ": bad magic at byte offset 0");
  }
  const auto nx = detail::get_u64(is, name);
  const auto ny = detail::get_u64(is, name);
  const double lx = detail::get_f64(is, name);
  const double ly = detail::get_f64(is, name);
  const double t = detail::get_f64(is, name);
  Field u(Grid2D(lx, ly, nx, ny));
  for (auto& z : u.values()) {
    const double re = detail::get_f64(is, name);
    const double im = detail::get_f64(is, name);
    z = {re, im};
  }
  if (is.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorCode::parse_error,
                name + ": trailing bytes after payload at byte offset " +
                    std::to_string(snapshot_header_bytes + 16 * u.size()));
  }
  return {std::move(u), t};
}

}  // namespace cqnls
