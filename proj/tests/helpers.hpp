#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "twostage/twostage.hpp"

namespace testing_util {

using namespace twostage;

// Raster from rows of '#' (ink) and '.' (paper).
inline BinaryRaster raster(const std::vector<std::string>& rows) {
  BinaryRaster r(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()));
  for (int y = 0; y < r.height(); ++y)
    for (int x = 0; x < r.width(); ++x) r.at(y, x) = rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] == '#';
  return r;
}

inline BinaryRaster filled_rect(int w, int h, int top, int left, int rh, int rw) {
  BinaryRaster r(w, h);
  for (int y = top; y < top + rh; ++y)
    for (int x = left; x < left + rw; ++x) r.at(y, x) = 1;
  return r;
}

inline GrayImage to_gray(const BinaryRaster& r, std::uint8_t ink = 0, std::uint8_t paper = 255) {
  GrayImage img(r.width(), r.height());
  for (int y = 0; y < r.height(); ++y)
    for (int x = 0; x < r.width(); ++x) img.at(y, x) = r.at(y, x) ? ink : paper;
  return img;
}

template <typename T>
Grid<T> rotate90(const Grid<T>& g) {  // counterclockwise
  Grid<T> out(g.height(), g.width());
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x) out.at(g.width() - 1 - x, y) = g.at(y, x);
  return out;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("twostage_" + tag + "_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Error code thrown by f, or nullopt.
template <typename F>
std::optional<ErrorCode> code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace testing_util
