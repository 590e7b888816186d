#include "ffp/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "ffp/error.hpp"

namespace ffp {

namespace {

bool is_png(std::span<const std::uint8_t> b) {
  return b.size() >= 8 && png_sig_cmp(b.data(), 0, 8) == 0;
}

struct PngReader {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;
};

void png_read_cb(png_structp png, png_bytep out, png_size_t n) {
  auto* r = static_cast<PngReader*>(png_get_io_ptr(png));
  if (r->pos + n > r->bytes.size()) png_error(png, "truncated PNG data");
  std::memcpy(out, r->bytes.data() + r->pos, n);
  r->pos += n;
}

[[noreturn]] void png_error_cb(png_structp png, png_const_charp msg) {
  auto* buf = static_cast<std::string*>(png_get_error_ptr(png));
  if (buf) *buf = msg;
  png_longjmp(png, 1);
}

void png_warning_cb(png_structp, png_const_charp) {}

struct PngHeader {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int channels = 0;
  png_size_t stride = 0;
};

// Only trivially destructible locals may live across setjmp in these helpers.
bool png_read_header(png_structp png, png_infop info, PngReader* reader, PngHeader* out) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_set_read_fn(png, reader, png_read_cb);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (depth == 16) png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);
  out->width = png_get_image_width(png, info);
  out->height = png_get_image_height(png, info);
  out->channels = png_get_channels(png, info);
  out->stride = png_get_rowbytes(png, info);
  return true;
}

bool png_read_pixels(png_structp png, png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_read_image(png, rows);
  png_read_end(png, nullptr);
  return true;
}

ImageBuffer decode_png(std::span<const std::uint8_t> bytes) {
  std::string err;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_cb, png_warning_cb);
  if (!png) throw DataError("cannot initialise PNG decoder");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw DataError("cannot initialise PNG decoder");
  }
  PngReader reader{bytes, 0};
  PngHeader hdr;
  if (!png_read_header(png, info, &reader, &hdr)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("corrupt PNG: " + err);
  }
  if (hdr.width < 2 || hdr.height < 2 || hdr.width > (1u << 16) || hdr.height > (1u << 16) ||
      (hdr.channels != 1 && hdr.channels != 3)) {
    png_destroy_read_struct(&png, &info, nullptr);
    if (hdr.width == 0 || hdr.height == 0) throw DataError("image has zero dimensions");
    if (hdr.channels != 1 && hdr.channels != 3) throw DataError("unsupported PNG channel layout");
    throw DataError("image must be between 2x2 and 65536x65536");
  }
  std::vector<png_byte> data(hdr.stride * hdr.height);
  std::vector<png_bytep> rows(hdr.height);
  for (png_uint_32 y = 0; y < hdr.height; ++y) rows[y] = data.data() + y * hdr.stride;
  const bool ok = png_read_pixels(png, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);
  if (!ok) throw DataError("corrupt PNG: " + err);

  const std::size_t w = hdr.width, h = hdr.height, c = static_cast<std::size_t>(hdr.channels);
  std::vector<double> samples(w * h * c);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t k = 0; k < w * c; ++k) samples[y * w * c + k] = rows[y][k] / 255.0;
  }
  return ImageBuffer(Grid2D(static_cast<int>(w), static_cast<int>(h)), hdr.channels, std::move(samples));
}

class PnmParser {
 public:
  explicit PnmParser(std::span<const std::uint8_t> b) : b_(b) {}

  long header_int() {
    skip_space_and_comments();
    if (pos_ >= b_.size() || !std::isdigit(b_[pos_])) throw DataError("corrupt PNM header");
    long v = 0;
    while (pos_ < b_.size() && std::isdigit(b_[pos_])) {
      v = v * 10 + (b_[pos_++] - '0');
      if (v > 1'000'000'000) throw DataError("corrupt PNM header");
    }
    return v;
  }

  long ascii_sample() {
    skip_space_and_comments();
    if (pos_ >= b_.size()) throw DataError("truncated PNM data");
    if (!std::isdigit(b_[pos_])) throw DataError("corrupt PNM data");
    return header_int();
  }

  // Exactly one whitespace byte separates the header from binary data.
  void end_header() {
    if (pos_ >= b_.size() || !std::isspace(b_[pos_])) throw DataError("corrupt PNM header");
    ++pos_;
  }

  std::span<const std::uint8_t> take(std::size_t n) {
    if (b_.size() - pos_ < n) throw DataError("truncated PNM data");
    auto s = b_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t pos_ = 2;

 private:
  void skip_space_and_comments() {
    while (pos_ < b_.size()) {
      if (std::isspace(b_[pos_])) {
        ++pos_;
      } else if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> b_;
};

ImageBuffer decode_pnm(std::span<const std::uint8_t> bytes) {
  const char kind = static_cast<char>(bytes[1]);
  const int channels = (kind == '3' || kind == '6') ? 3 : 1;
  const bool binary = kind == '5' || kind == '6';
  PnmParser p(bytes);
  const long w = p.header_int();
  const long h = p.header_int();
  const long maxval = p.header_int();
  if (w <= 0 || h <= 0) throw DataError("image has zero dimensions");
  if (w < 2 || h < 2) throw DataError("image must be at least 2x2");
  if (maxval <= 0 || maxval > 65535) throw DataError("corrupt PNM header: bad maximum value");
  if (w * h > 100'000'000L) throw DataError("image too large");
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * channels;
  std::vector<double> samples(n);
  const double scale = 1.0 / static_cast<double>(maxval);
  if (binary) {
    p.end_header();
    const std::size_t bps = maxval > 255 ? 2 : 1;
    auto raw = p.take(n * bps);
    for (std::size_t i = 0; i < n; ++i) {
      const unsigned v = bps == 1 ? raw[i] : (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
      samples[i] = std::min(1.0, v * scale);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) samples[i] = std::min(1.0, static_cast<double>(p.ascii_sample()) * scale);
  }
  if (w > std::numeric_limits<int>::max() || h > std::numeric_limits<int>::max()) throw DataError("image too large");
  return ImageBuffer(Grid2D(static_cast<int>(w), static_cast<int>(h)), channels, std::move(samples));
}

void png_write_cb(png_structp png, png_bytep data, png_size_t n) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + n);
}

void png_flush_cb(png_structp) {}

// Only trivially destructible locals may live across setjmp here.
bool write_indexed_png(std::vector<std::uint8_t>& out, std::string& err, const png_byte* pixels, png_uint_32 w,
                       png_uint_32 h, png_color* palette, int palette_size) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_cb, png_warning_cb);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, &out, png_write_cb, png_flush_cb);
  png_set_IHDR(png, info, w, h, 8, PNG_COLOR_TYPE_PALETTE, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_PLTE(png, info, palette, palette_size);
  png_write_info(png, info);
  for (png_uint_32 y = 0; y < h; ++y) png_write_row(png, pixels + static_cast<std::size_t>(y) * w);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

}  // namespace

ImageBuffer decode_image(std::span<const std::uint8_t> bytes) {
  if (is_png(bytes)) return decode_png(bytes);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] >= '2' && bytes[1] <= '6' && bytes[1] != '4') {
    return decode_pnm(bytes);
  }
  throw DataError("unsupported image format (expected PNG, PGM or PPM)");
}

ImageBuffer load_image(const std::string& path) { return decode_image(read_file(path)); }

std::vector<std::uint8_t> encode_pnm(const ImageBuffer& img) {
  const std::string header = std::string(img.channels() == 3 ? "P6\n" : "P5\n") + std::to_string(img.width()) + " " +
                             std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  for (const double v : img.samples()) out.push_back(static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
  return out;
}

std::array<std::uint8_t, 3> label_color(int label) {
  static constexpr std::array<std::array<std::uint8_t, 3>, 8> base{{{0, 0, 0},
                                                                     {230, 25, 75},
                                                                     {60, 180, 75},
                                                                     {0, 130, 200},
                                                                     {255, 225, 25},
                                                                     {145, 30, 180},
                                                                     {70, 240, 240},
                                                                     {245, 130, 48}}};
  if (label <= 0) return base[0];
  if (label < static_cast<int>(base.size())) return base[static_cast<std::size_t>(label)];
  // Deterministic hash for labels beyond the hand-picked colors.
  const auto h = static_cast<std::uint32_t>(label) * 2654435761u;
  return {static_cast<std::uint8_t>(64 + (h >> 24) % 192), static_cast<std::uint8_t>(64 + (h >> 16) % 192),
          static_cast<std::uint8_t>(64 + (h >> 8) % 192)};
}

std::vector<std::uint8_t> encode_label_png(const Field<int>& labels) {
  for (const int v : labels) {
    if (v < 0 || v > 255) throw DataError("label " + std::to_string(v) + " does not fit an 8-bit palette");
  }
  const int max_label = std::max(1, *std::max_element(labels.begin(), labels.end()));
  std::vector<png_color> palette(static_cast<std::size_t>(max_label) + 1);
  for (int k = 0; k <= max_label; ++k) {
    const auto c = label_color(k);
    palette[static_cast<std::size_t>(k)] = {c[0], c[1], c[2]};
  }
  std::vector<png_byte> pixels(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) pixels[i] = static_cast<png_byte>(labels[i]);
  std::vector<std::uint8_t> out;
  std::string err;
  if (!write_indexed_png(out, err, pixels.data(), static_cast<png_uint_32>(labels.width()),
                         static_cast<png_uint_32>(labels.height()), palette.data(), static_cast<int>(palette.size()))) {
    throw DataError("PNG encoding failed: " + err);
  }
  return out;
}

void write_label_png(const Field<int>& labels, const std::string& path) { write_file(path, encode_label_png(labels)); }

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string load_text(const std::string& path) {
  const auto bytes = read_file(path);
  return {bytes.begin(), bytes.end()};
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed: " + path);
}

void write_file(const std::string& path, const std::string& text) {
  write_file(path, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace ffp
