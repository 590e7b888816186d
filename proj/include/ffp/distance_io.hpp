#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ffp/grid.hpp"

namespace ffp {

/// Raw contents of an FFD1 file; any size including 1x1.
struct RawDistanceMap {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<float> values;
};

std::vector<std::uint8_t> encode_ffd1(const RawDistanceMap& m);
RawDistanceMap decode_ffd1(std::span<const std::uint8_t> bytes);

/// "FFD1", width and height as u32 little endian, then row-major f32 little endian.
std::vector<std::uint8_t> encode_distance_map(const ScalarField& u);
/// Throws DataError on a bad magic or a payload whose size disagrees with the header.
ScalarField decode_distance_map(std::span<const std::uint8_t> bytes);

void write_distance_map(const ScalarField& u, const std::string& path);
ScalarField read_distance_map(const std::string& path);

/// "FFV1", width and height as u32 little endian, then interleaved (x, y) f32 pairs.
std::vector<std::uint8_t> encode_vector_field(const VectorField2& h);
VectorField2 decode_vector_field(std::span<const std::uint8_t> bytes);

}  // namespace ffp
