#pragma once

// Harris corner detection with an extra diagonal term: the off-diagonal entry
// of the autocorrelation matrix is C + D, where C pairs the horizontal and
// vertical variations and D pairs the two diagonal ones.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "twostage/error.hpp"
#include "twostage/image.hpp"

namespace twostage {

// 5x5 Gaussian window, row-major.
inline constexpr std::array<double, 25> kGaussian5 = {
    0.004, 0.015, 0.026, 0.015, 0.004,  //
    0.015, 0.059, 0.095, 0.059, 0.015,  //
    0.026, 0.095, 0.150, 0.095, 0.026,  //
    0.015, 0.059, 0.095, 0.059, 0.015,  //
    0.004, 0.015, 0.026, 0.015, 0.004,
};

// Width of the band along the raster edge where cornerness is forced to 0.
inline constexpr int kCornerBorder = 3;

struct CornerConfig {
  double k = 0.04;
  double t_rel = 0.01;
  int nms_radius = 1;
  std::array<double, 25> gaussian = kGaussian5;

  friend bool operator==(const CornerConfig&, const CornerConfig&) = default;
};

struct Gradients {
  RealMap ix, iy, iu, iv;
};

struct StructureTerms {
  RealMap a, b, c, d;
};

struct CornerPoint {
  int x = 0;
  int y = 0;
  friend bool operator==(const CornerPoint&, const CornerPoint&) = default;
};

struct CornerString {
  std::array<int, 25> counts{};

  int total() const noexcept {
    int n = 0;
    for (int c : counts) n += c;
    return n;
  }
  friend bool operator==(const CornerString&, const CornerString&) = default;
};

// Central differences with zero padding. Iu runs along the up-right diagonal,
// Iv along the down-right diagonal (y grows downward).
inline Gradients gradients(const RealMap& img) {
  if (img.width() < 5 || img.height() < 5) fail(ErrorCode::TooSmall, "corner detection needs at least 5x5 pixels");
  const int w = img.width(), h = img.height();
  Gradients g{RealMap(w, h), RealMap(w, h), RealMap(w, h), RealMap(w, h)};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      g.ix.at(y, x) = (img.get_or_zero(y, x + 1) - img.get_or_zero(y, x - 1)) / 2.0;
      g.iy.at(y, x) = (img.get_or_zero(y + 1, x) - img.get_or_zero(y - 1, x)) / 2.0;
      g.iu.at(y, x) = (img.get_or_zero(y - 1, x + 1) - img.get_or_zero(y + 1, x - 1)) / 2.0;
      g.iv.at(y, x) = (img.get_or_zero(y + 1, x + 1) - img.get_or_zero(y - 1, x - 1)) / 2.0;
    }
  return g;
}

// 5x5 convolution with zero padding. The window is symmetric, so this is also
// the correlation.
inline RealMap convolve5(const RealMap& src, const std::array<double, 25>& window) {
  const int w = src.width(), h = src.height();
  RealMap out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int dy = -2; dy <= 2; ++dy)
        for (int dx = -2; dx <= 2; ++dx)
          acc += window[static_cast<std::size_t>((dy + 2) * 5 + (dx + 2))] * src.get_or_zero(y - dy, x - dx);
      out.at(y, x) = acc;
    }
  return out;
}

inline StructureTerms structure_terms(const Gradients& g, const std::array<double, 25>& window = kGaussian5) {
  const int w = g.ix.width(), h = g.ix.height();
  RealMap xx(w, h), yy(w, h), xy(w, h), uv(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double gx = g.ix.at(y, x), gy = g.iy.at(y, x);
      xx.at(y, x) = gx * gx;
      yy.at(y, x) = gy * gy;
      xy.at(y, x) = gx * gy;
      uv.at(y, x) = g.iu.at(y, x) * g.iv.at(y, x);
    }
  return {convolve5(xx, window), convolve5(yy, window), convolve5(xy, window), convolve5(uv, window)};
}

// C(x,y) = A*B - (C+D)^2 - k*(A+B)^2, zero on the border band.
inline RealMap cornerness(const StructureTerms& t, double k) {
  const int w = t.a.width(), h = t.a.height();
  RealMap out(w, h);
  for (int y = kCornerBorder; y < h - kCornerBorder; ++y)
    for (int x = kCornerBorder; x < w - kCornerBorder; ++x) {
      const double a = t.a.at(y, x), b = t.b.at(y, x), off = t.c.at(y, x) + t.d.at(y, x);
      out.at(y, x) = a * b - off * off - k * (a + b) * (a + b);
    }
  return out;
}

inline RealMap cornerness_map(const RealMap& img, const CornerConfig& cfg = {}) {
  return cornerness(structure_terms(gradients(img), cfg.gaussian), cfg.k);
}

// Threshold at t_rel * max, then non-maximal suppression over the
// (2r+1)x(2r+1) neighborhood. A kept pixel must beat every earlier neighbor
// in raster order strictly and every later one weakly, so exactly-equal
// plateaus keep their first pixel.
inline std::vector<CornerPoint> detect_corners(const RealMap& map, const CornerConfig& cfg = {}) {
  std::vector<CornerPoint> out;
  if (map.empty()) return out;
  const double peak = *std::max_element(map.pixels().begin(), map.pixels().end());
  if (!(peak > 0.0)) return out;
  const double threshold = cfg.t_rel * peak;
  const int r = std::max(1, cfg.nms_radius);
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x) {
      const double v = map.at(y, x);
      if (v < threshold || !(v > 0.0)) continue;
      bool keep = true;
      for (int dy = -r; dy <= r && keep; ++dy)
        for (int dx = -r; dx <= r && keep; ++dx) {
          if ((dy == 0 && dx == 0) || !map.contains(y + dy, x + dx)) continue;
          const double n = map.at(y + dy, x + dx);
          const bool earlier = dy < 0 || (dy == 0 && dx < 0);
          keep = earlier ? v > n : v >= n;
        }
      if (keep) out.push_back({x, y});
    }
  return out;
}

// Counts corners per cell of a 5x5 grid; cell index floor(coord * 5 / side).
inline CornerString corner_string(const std::vector<CornerPoint>& corners, int side) {
  if (side < 5) fail(ErrorCode::TooSmall, "side must be at least 5");
  CornerString s;
  for (const auto& p : corners) {
    if (p.x < 0 || p.y < 0 || p.x >= side || p.y >= side)
      fail(ErrorCode::OutOfBounds, "corner (" + std::to_string(p.x) + "," + std::to_string(p.y) + ") outside raster");
    const int cell = (p.y * 5 / side) * 5 + (p.x * 5 / side);
    ++s.counts[static_cast<std::size_t>(cell)];
  }
  return s;
}

inline CornerString glyph_corner_string(const BinaryGlyph& glyph, const CornerConfig& cfg = {}) {
  return corner_string(detect_corners(cornerness_map(to_real(glyph), cfg), cfg), glyph.side());
}

}  // namespace twostage
