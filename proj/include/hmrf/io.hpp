#ifndef HMRF_IO_HPP
#define HMRF_IO_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#ifdef HMRF_HAVE_PNG
#include <png.h>
#endif

#include "hmrf/error.hpp"
#include "hmrf/grid.hpp"

namespace hmrf {

namespace detail {

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
  }
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

inline void write_file_bytes(const std::filesystem::path& path,
                             const std::string& header,
                             std::span<const std::uint8_t> body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::io, "cannot write '" + path.string() + "'");
  }
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(body.data()),
            static_cast<std::streamsize>(body.size()));
  if (!out) {
    throw Error(ErrorKind::io, "write failed for '" + path.string() + "'");
  }
}

// Cursor over a PNM header: whitespace separated ASCII integers with '#'
// comments running to end of line.
class PnmHeader {
 public:
  explicit PnmHeader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  long next_int() {
    skip_space_and_comments();
    long value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) {
        throw Error(ErrorKind::format, "malformed header");
      }
      ++pos_;
      ++digits;
    }
    if (digits == 0) {
      throw Error(ErrorKind::format, "malformed header");
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t body_offset() {
    if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) {
      throw Error(ErrorKind::format, "malformed header");
    }
    return pos_ + 1;
  }

 private:
  static bool is_space(std::uint8_t c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
           c == '\f';
  }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

struct RawGray {
  Grid<std::uint8_t> pixels;
  int maxval = 255;
};

inline RawGray parse_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw Error(ErrorKind::format, "malformed header");
  }
  PnmHeader header(bytes);
  const long width = header.next_int();
  const long height = header.next_int();
  const long maxval = header.next_int();
  if (width == 0 || height == 0) {
    throw Error(ErrorKind::format, "zero-dimension image");
  }
  if (maxval < 1 || maxval > 255) {
    throw Error(ErrorKind::format, "malformed header");
  }
  const std::size_t offset = header.body_offset();
  const auto count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() - std::min(offset, bytes.size()) < count) {
    throw Error(ErrorKind::format, "malformed image body");
  }
  std::vector<std::uint8_t> body(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                                 bytes.begin() + static_cast<std::ptrdiff_t>(offset + count));
  for (std::uint8_t v : body) {
    if (v > maxval) throw Error(ErrorKind::format, "malformed image body");
  }
  return {Grid<std::uint8_t>(static_cast<std::size_t>(width),
                             static_cast<std::size_t>(height), std::move(body)),
          static_cast<int>(maxval)};
}

inline bool is_png(std::span<const std::uint8_t> bytes) {
  static constexpr std::array<std::uint8_t, 8> signature{0x89, 'P', 'N', 'G',
                                                         '\r', '\n', 0x1a, '\n'};
  return bytes.size() >= signature.size() &&
         std::equal(signature.begin(), signature.end(), bytes.begin());
}

#ifdef HMRF_HAVE_PNG
// Color input is reduced to the mean of its R, G and B channels.
inline GrayImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(ErrorKind::format, std::string("malformed header: ") + image.message);
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (image.width == 0 || image.height == 0) {
    png_image_free(&image);
    throw Error(ErrorKind::format, "zero-dimension image");
  }
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorKind::format, "malformed image body: " + msg);
  }
  GrayImage out(image.width, image.height);
  const std::size_t channels = color ? 3 : 1;
  for (std::size_t i = 0; i < out.size(); ++i) {
    unsigned sum = 0;
    for (std::size_t c = 0; c < channels; ++c) sum += buffer[i * channels + c];
    out[i] = static_cast<double>(sum) / (255.0 * static_cast<double>(channels));
  }
  return out;
}
#endif

}  // namespace detail

/// Reads an 8-bit P5 PGM or (when built with libpng) a PNG file.
/// Intensities are scaled to [0, 1].
inline GrayImage load_image(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  if (detail::is_png(bytes)) {
#ifdef HMRF_HAVE_PNG
    return detail::decode_png(bytes);
#else
    throw Error(ErrorKind::format, "PNG support not compiled in");
#endif
  }
  const auto raw = detail::parse_pgm(bytes);
  GrayImage out(raw.pixels.width(), raw.pixels.height());
  const double scale = static_cast<double>(raw.maxval);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = raw.pixels[i] / scale;
  return out;
}

/// Reads a P5 PGM as raw bytes, without scaling.
inline Grid<std::uint8_t> load_pgm_bytes(const std::filesystem::path& path) {
  return detail::parse_pgm(detail::read_file_bytes(path)).pixels;
}

inline void save_pgm(const Grid<std::uint8_t>& pixels,
                     const std::filesystem::path& path) {
  const std::string header = "P5\n" + std::to_string(pixels.width()) + " " +
                             std::to_string(pixels.height()) + "\n255\n";
  detail::write_file_bytes(path, header, pixels.data());
}

/// Writes intensities as round(255 * v), clamped to [0, 255].
inline void save_gray_image(const GrayImage& img, const std::filesystem::path& path) {
  Grid<std::uint8_t> bytes(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) {
    bytes[i] = static_cast<std::uint8_t>(std::lround(std::clamp(img[i], 0.0, 1.0) * 255.0));
  }
  save_pgm(bytes, path);
}

/// Label l maps to round(255 * l / (k - 1)); k == 1 maps everything to 0.
inline void save_label_image(const LabelField& labels, int k,
                             const std::filesystem::path& path) {
  if (k < 1) {
    throw Error(ErrorKind::config, "number of classes must be at least 1");
  }
  Grid<std::uint8_t> bytes(labels.width(), labels.height());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Label l = labels[i];
    if (l < 0 || l >= k) {
      throw Error(ErrorKind::config, "label outside [0, k)");
    }
    bytes[i] = k == 1 ? std::uint8_t{0}
                      : static_cast<std::uint8_t>(std::lround(255.0 * l / (k - 1)));
  }
  save_pgm(bytes, path);
}

}  // namespace hmrf

#endif  // HMRF_IO_HPP
