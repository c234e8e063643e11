#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "twostage/error.hpp"

namespace twostage {

// Row-major 2D grid. Rows are y, columns are x.
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height), data_(checked_size(width, height), fill) {}
  Grid(int width, int height, std::vector<T> data) : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != checked_size(width, height)) fail(ErrorCode::ShapeMismatch, "grid data size does not match width*height");
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& at(int row, int col) { return data_[index(row, col)]; }
  const T& at(int row, int col) const { return data_[index(row, col)]; }

  bool contains(int row, int col) const noexcept { return row >= 0 && col >= 0 && row < height_ && col < width_; }

  // Zero outside the grid.
  T get_or_zero(int row, int col) const noexcept { return contains(row, col) ? data_[index(row, col)] : T{}; }

  std::span<T> pixels() noexcept { return data_; }
  std::span<const T> pixels() const noexcept { return data_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  static std::size_t checked_size(int width, int height) {
    if (width < 1 || height < 1) fail(ErrorCode::BadShape, "grid dimensions must be positive");
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

// Grayscale intensities 0..255, 0 = black.
struct GrayImage : Grid<std::uint8_t> {
  using Grid::Grid;
};

// {0,1} raster of arbitrary shape, 1 = ink.
struct BinaryRaster : Grid<std::uint8_t> {
  using Grid::Grid;

  std::size_t foreground_count() const noexcept {
    std::size_t n = 0;
    for (auto v : pixels()) n += v != 0;
    return n;
  }
};

// Normalized square character raster, side x side, 1 = ink.
struct BinaryGlyph : BinaryRaster {
  BinaryGlyph() = default;
  explicit BinaryGlyph(BinaryRaster raster) : BinaryRaster(std::move(raster)) {
    if (width() != height()) fail(ErrorCode::BadShape, "glyph must be square");
    if (width() % 5 != 0) fail(ErrorCode::BadSide, "glyph side must be divisible by 5");
  }
  int side() const noexcept { return width(); }
};

// Contour points of a glyph, 1 = contour.
struct ContourMask : BinaryRaster {
  ContourMask() = default;
  explicit ContourMask(BinaryRaster raster) : BinaryRaster(std::move(raster)) {}
  int side() const noexcept { return width(); }
};

using RealMap = Grid<double>;

inline RealMap to_real(const BinaryRaster& raster) {
  RealMap out(raster.width(), raster.height());
  auto src = raster.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] ? 1.0 : 0.0;
  return out;
}

}  // namespace twostage
