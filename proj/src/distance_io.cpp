#include "ffp/distance_io.hpp"

#include <bit>
#include <cstring>

#include "ffp/error.hpp"
#include "ffp/image_io.hpp"

namespace ffp {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

void put_f32(std::vector<std::uint8_t>& out, double v) {
  put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::vector<std::uint8_t> header(const char* magic, std::uint32_t w, std::uint32_t h, std::size_t floats) {
  std::vector<std::uint8_t> out(magic, magic + 4);
  out.reserve(12 + 4 * floats);
  put_u32(out, w);
  put_u32(out, h);
  return out;
}

std::pair<std::uint32_t, std::uint32_t> parse_header(std::span<const std::uint8_t> b, const char* magic,
                                                     std::size_t floats_per_pixel) {
  if (b.size() < 4 || std::memcmp(b.data(), magic, 4) != 0) {
    throw DataError(std::string("bad magic: expected ") + magic);
  }
  if (b.size() < 12) throw DataError("size mismatch: header truncated");
  const std::uint32_t w = get_u32(b.data() + 4), h = get_u32(b.data() + 8);
  const std::uint64_t expected = 12 + 4 * floats_per_pixel * static_cast<std::uint64_t>(w) * h;
  if (b.size() != expected) {
    throw DataError("size mismatch: " + std::to_string(b.size()) + " bytes, header implies " +
                    std::to_string(expected));
  }
  return {w, h};
}

Grid2D field_grid(std::uint32_t w, std::uint32_t h) {
  if (w < 2 || h < 2 || w > (1u << 20) || h > (1u << 20)) {
    throw DataError("stored field is " + std::to_string(w) + "x" + std::to_string(h) + ", fields need at least 2x2");
  }
  return Grid2D(static_cast<int>(w), static_cast<int>(h));
}

float get_f32(const std::uint8_t* p) { return std::bit_cast<float>(get_u32(p)); }

}  // namespace

std::vector<std::uint8_t> encode_ffd1(const RawDistanceMap& m) {
  if (m.values.size() != static_cast<std::size_t>(m.width) * m.height) {
    throw DataError("size mismatch: value count differs from width*height");
  }
  auto out = header("FFD1", m.width, m.height, m.values.size());
  for (const float v : m.values) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

RawDistanceMap decode_ffd1(std::span<const std::uint8_t> bytes) {
  const auto [w, h] = parse_header(bytes, "FFD1", 1);
  RawDistanceMap m{w, h, std::vector<float>(static_cast<std::size_t>(w) * h)};
  for (std::size_t i = 0; i < m.values.size(); ++i) m.values[i] = get_f32(bytes.data() + 12 + 4 * i);
  return m;
}

std::vector<std::uint8_t> encode_distance_map(const ScalarField& u) {
  auto out = header("FFD1", static_cast<std::uint32_t>(u.width()), static_cast<std::uint32_t>(u.height()), u.size());
  for (const double v : u) put_f32(out, v);
  return out;
}

ScalarField decode_distance_map(std::span<const std::uint8_t> bytes) {
  const RawDistanceMap m = decode_ffd1(bytes);
  ScalarField u(field_grid(m.width, m.height));
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = m.values[i];
  return u;
}

void write_distance_map(const ScalarField& u, const std::string& path) { write_file(path, encode_distance_map(u)); }

ScalarField read_distance_map(const std::string& path) { return decode_distance_map(read_file(path)); }

std::vector<std::uint8_t> encode_vector_field(const VectorField2& h) {
  auto out = header("FFV1", static_cast<std::uint32_t>(h.width()), static_cast<std::uint32_t>(h.height()),
                    2 * h.size());
  for (const Vec2 v : h) {
    put_f32(out, v.x);
    put_f32(out, v.y);
  }
  return out;
}

VectorField2 decode_vector_field(std::span<const std::uint8_t> bytes) {
  const auto [w, hh] = parse_header(bytes, "FFV1", 2);
  VectorField2 h(field_grid(w, hh));
  for (std::size_t i = 0; i < h.size(); ++i) {
    h[i] = {get_f32(bytes.data() + 12 + 8 * i), get_f32(bytes.data() + 16 + 8 * i)};
  }
  return h;
}

}  // namespace ffp
