#pragma once

// Raw grayscale image -> normalized binary glyph -> contour mask.

#include <algorithm>
#include <array>
#include <cstdint>

#include "twostage/error.hpp"
#include "twostage/image.hpp"

namespace twostage {

constexpr int kDefaultSide = 100;

// Otsu's method over the 256-bin histogram. Returns the threshold t such that
// pixels with intensity < t are ink. t ranges over 1..255; the smallest t
// attaining the maximal between-class variance wins. Returns 0 when every
// threshold has zero between-class variance (single-level image).
inline int otsu_threshold(const GrayImage& img) {
  std::array<double, 256> hist{};
  for (auto v : img.pixels()) hist[v] += 1.0;
  const double total = static_cast<double>(img.size());

  double sum_all = 0.0;
  for (int i = 0; i < 256; ++i) sum_all += i * hist[i];

  double best = 0.0;
  int best_t = 0;
  double w0 = 0.0, sum0 = 0.0;
  for (int t = 1; t < 256; ++t) {
    w0 += hist[t - 1];
    sum0 += (t - 1) * hist[t - 1];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double mu0 = sum0 / w0;
    const double mu1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  return best_t;
}

inline BinaryRaster binarize(const GrayImage& img) {
  if (img.empty()) fail(ErrorCode::BadImage, "empty image");
  const int t = otsu_threshold(img);
  BinaryRaster out(img.width(), img.height());
  auto src = img.pixels();
  auto dst = out.pixels();
  bool any = false;
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = src[i] < t ? 1 : 0;
    any = any || dst[i];
  }
  if (!any) fail(ErrorCode::EmptyForeground, "image contains no ink");
  return out;
}

struct BoundingBox {
  int top = 0, left = 0, bottom = 0, right = 0;  // inclusive
  int width() const noexcept { return right - left + 1; }
  int height() const noexcept { return bottom - top + 1; }
};

inline BoundingBox foreground_bbox(const BinaryRaster& r) {
  BoundingBox box{r.height(), r.width(), -1, -1};
  for (int y = 0; y < r.height(); ++y)
    for (int x = 0; x < r.width(); ++x)
      if (r.at(y, x)) {
        box.top = std::min(box.top, y);
        box.bottom = std::max(box.bottom, y);
        box.left = std::min(box.left, x);
        box.right = std::max(box.right, x);
      }
  if (box.bottom < 0) fail(ErrorCode::EmptyForeground, "raster contains no foreground");
  return box;
}

inline BinaryRaster crop_to_bbox(const BinaryRaster& r) {
  const BoundingBox box = foreground_bbox(r);
  BinaryRaster out(box.width(), box.height());
  for (int y = 0; y < box.height(); ++y)
    for (int x = 0; x < box.width(); ++x) out.at(y, x) = r.at(box.top + y, box.left + x);
  return out;
}

// Nearest-neighbor resampling to side x side; the aspect ratio is not kept.
inline BinaryGlyph scale(const BinaryRaster& r, int side = kDefaultSide) {
  if (side < 5 || side % 5 != 0) fail(ErrorCode::BadSide, "side must be a positive multiple of 5");
  BinaryRaster out(side, side);
  const long w = r.width(), h = r.height();
  for (int y = 0; y < side; ++y) {
    const int sy = static_cast<int>(y * h / side);
    for (int x = 0; x < side; ++x) out.at(y, x) = r.at(sy, static_cast<int>(x * w / side));
  }
  if (out.foreground_count() == 0) fail(ErrorCode::EmptyForeground, "all ink lost while resampling");
  return BinaryGlyph(std::move(out));
}

inline BinaryGlyph normalize(const GrayImage& img, int side = kDefaultSide) {
  return scale(crop_to_bbox(binarize(img)), side);
}

// A foreground pixel is a contour point when any 4-neighbor is background;
// pixels outside the raster count as background.
inline ContourMask extract_contour(const BinaryRaster& g) {
  BinaryRaster out(g.width(), g.height());
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x) {
      if (!g.at(y, x)) continue;
      const bool interior = g.get_or_zero(y - 1, x) && g.get_or_zero(y + 1, x) && g.get_or_zero(y, x - 1) &&
                            g.get_or_zero(y, x + 1);
      out.at(y, x) = interior ? 0 : 1;
    }
  return ContourMask(std::move(out));
}

}  // namespace twostage
