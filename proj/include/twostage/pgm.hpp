#pragma once

// Portable graymap (PGM) reading and writing. Both the binary "P5" and the
// plain "P2" variants are accepted, with maxval up to 255. Samples are
// rescaled to 0..255 when maxval is smaller.

#include <cctype>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "twostage/error.hpp"
#include "twostage/image.hpp"

namespace twostage::pgm {

namespace detail {

class HeaderReader {
 public:
  explicit HeaderReader(const std::string& bytes) : bytes_(bytes) {}

  int next_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(static_cast<unsigned char>(bytes_[pos_])))
      fail(ErrorCode::BadImage, "expected integer in PGM header");
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > (1L << 24)) fail(ErrorCode::BadImage, "PGM header value too large");
      ++pos_;
    }
    return static_cast<int>(value);
  }

  std::size_t pos() const noexcept { return pos_; }
  void advance(std::size_t n) noexcept { pos_ += n; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      char ch = bytes_[pos_];
      if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline GrayImage decode(const std::string& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2'))
    fail(ErrorCode::BadImage, "not a PGM file (expected magic P5 or P2)");
  const bool binary = bytes[1] == '5';
  detail::HeaderReader reader(bytes);
  reader.advance(2);
  const int width = reader.next_int();
  const int height = reader.next_int();
  const int maxval = reader.next_int();
  if (width < 1 || height < 1) fail(ErrorCode::BadImage, "PGM dimensions must be positive");
  if (maxval < 1 || maxval > 255) fail(ErrorCode::BadImage, "PGM maxval must be in 1..255");

  const auto count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<std::uint8_t> pixels(count);
  auto rescale = [maxval](int v) { return static_cast<std::uint8_t>(maxval == 255 ? v : (v * 255 + maxval / 2) / maxval); };

  if (binary) {
    // Exactly one whitespace byte separates maxval from the raster.
    reader.advance(1);
    if (reader.pos() + count > bytes.size()) fail(ErrorCode::BadImage, "PGM raster truncated");
    for (std::size_t i = 0; i < count; ++i) {
      int v = static_cast<unsigned char>(bytes[reader.pos() + i]);
      if (v > maxval) fail(ErrorCode::BadImage, "PGM sample exceeds maxval");
      pixels[i] = rescale(v);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      int v = reader.next_int();
      if (v > maxval) fail(ErrorCode::BadImage, "PGM sample exceeds maxval");
      pixels[i] = rescale(v);
    }
  }
  return GrayImage(width, height, std::move(pixels));
}

inline GrayImage read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode(bytes);
  } catch (const Error& e) {
    throw e.with_context(path.string());
  }
}

inline std::string encode(const GrayImage& img, bool ascii = false) {
  std::ostringstream out;
  out << (ascii ? "P2" : "P5") << '\n' << img.width() << ' ' << img.height() << "\n255\n";
  if (ascii) {
    int col = 0;
    for (auto v : img.pixels()) {
      out << static_cast<int>(v);
      out << (++col == img.width() ? '\n' : ' ');
      if (col == img.width()) col = 0;
    }
  } else {
    for (auto v : img.pixels()) out.put(static_cast<char>(v));
  }
  return out.str();
}

inline void write(const std::filesystem::path& path, const GrayImage& img, bool ascii = false) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  const std::string bytes = encode(img, ascii);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::Io, "write failed: " + path.string());
}

}  // namespace twostage::pgm
