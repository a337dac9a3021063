#include "aqx/field_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "aqx/errors.hpp"
#include "aqx/twoscale_field.hpp"

namespace aqx {

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xffu);
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw ConfigError("BadFieldFile", "field_io: truncated header");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8))
    throw ConfigError("BadFieldFile", "field_io: truncated value block");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

}  // namespace

void write_aqxf(std::ostream& out, const std::vector<int>& dims, int components,
                std::span<const double> values) {
  out.write("AQXF", 4);
  put_u32(out, 1);
  put_u32(out, static_cast<std::uint32_t>(dims.size()));
  put_u32(out, static_cast<std::uint32_t>(components));
  for (int m : dims) put_u32(out, static_cast<std::uint32_t>(m));
  for (double v : values) put_f64(out, v);
}

RawAqxf read_aqxf(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "AQXF", 4) != 0)
    throw ConfigError("BadFieldFile", "field_io: missing AQXF magic");
  if (get_u32(in) != 1) throw ConfigError("BadFieldFile", "field_io: unsupported version");
  const auto n = get_u32(in);
  const auto d = get_u32(in);
  if (n == 0 || n > 6 || d == 0 || d > 64)
    throw ConfigError("BadFieldFile", "field_io: implausible N or d");
  RawAqxf raw;
  raw.components = static_cast<int>(d);
  std::size_t count = d;
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto m = get_u32(in);
    if (m == 0 || m > (1u << 16)) throw ConfigError("BadFieldFile", "field_io: implausible dims");
    raw.dims.push_back(static_cast<int>(m));
    count *= m;
  }
  raw.values.resize(count);
  for (auto& v : raw.values) v = get_f64(in);
  return raw;
}

void save_field(const std::string& path, const PeriodicField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("IoError", "field_io: cannot open " + path + " for writing");
  write_aqxf(out, field.grid().dims(), field.components(), field.values());
}

PeriodicField load_field(const std::string& path, Domain domain) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("IoError", "field_io: cannot open " + path);
  auto raw = read_aqxf(in);
  return PeriodicField(Grid(raw.dims, domain), raw.components, std::move(raw.values));
}

void save_two_scale(const std::string& path, const TwoScaleField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("IoError", "field_io: cannot open " + path + " for writing");
  std::vector<int> dims = field.macro().dims();
  dims.insert(dims.end(), field.micro().dims().begin(), field.micro().dims().end());
  write_aqxf(out, dims, field.components(), field.values());
}

TwoScaleField load_two_scale(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("IoError", "field_io: cannot open " + path);
  auto raw = read_aqxf(in);
  if (raw.dims.size() % 2 != 0 || raw.dims.size() > 6)
    throw ConfigError("InvalidField", "field_io: two-scale file needs 2N axes, got " +
                                          std::to_string(raw.dims.size()));
  const auto n = raw.dims.size() / 2;
  TwoScaleField field(Grid(std::vector<int>(raw.dims.begin(), raw.dims.begin() + n), Domain::macro),
                      Grid(std::vector<int>(raw.dims.begin() + n, raw.dims.end()), Domain::cell),
                      raw.components);
  std::copy(raw.values.begin(), raw.values.end(), field.values().begin());
  return field;
}

}  // namespace aqx
