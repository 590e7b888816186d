#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ffp/edge_features.hpp"

namespace ffp {

/// Decodes 8-bit gray/RGB PNG (alpha dropped, palettes expanded, 16-bit reduced)
/// or PGM/PPM (P2, P3, P5, P6). Throws DataError on anything else.
ImageBuffer decode_image(std::span<const std::uint8_t> bytes);
ImageBuffer load_image(const std::string& path);

/// 8-bit gray PGM (P5) or RGB PPM (P6).
std::vector<std::uint8_t> encode_pnm(const ImageBuffer& img);

/// Palette PNG with one index per pixel; label k uses palette entry k.
std::vector<std::uint8_t> encode_label_png(const Field<int>& labels);
void write_label_png(const Field<int>& labels, const std::string& path);

/// Fixed palette color of a label (0 is black).
std::array<std::uint8_t, 3> label_color(int label);

std::vector<std::uint8_t> read_file(const std::string& path);
std::string load_text(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);
void write_file(const std::string& path, const std::string& text);

}  // namespace ffp
