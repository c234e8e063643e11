#pragma once

// Stage-1 feature extraction: 24 shadow (octant projection) features and the
// 200-bin zoned Freeman chain-code histogram.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "twostage/error.hpp"
#include "twostage/image.hpp"

namespace twostage {

enum class FeatureKind : std::uint8_t { Shadow24, ChainCode200 };

constexpr std::size_t feature_length(FeatureKind kind) { return kind == FeatureKind::Shadow24 ? 24 : 200; }

struct FeatureVector {
  FeatureKind kind = FeatureKind::Shadow24;
  std::vector<double> values;
};

// ---------------------------------------------------------------------------
// Shadow features
// ---------------------------------------------------------------------------

namespace detail {

struct Segment {
  double x0, y0, x1, y1;
  double length() const { return std::hypot(x1 - x0, y1 - y0); }
};

struct Point {
  double x, y;
};

// Sutherland-Hodgman clip of a convex polygon to the counterclockwise
// triangle (a, b, c).
inline std::vector<Point> clip_to_triangle(std::vector<Point> poly, Point a, Point b, Point c) {
  const Point tri[3] = {a, b, c};
  for (int e = 0; e < 3 && !poly.empty(); ++e) {
    const Point u = tri[e], v = tri[(e + 1) % 3];
    auto inside = [&](const Point& q) { return (v.x - u.x) * (q.y - u.y) - (v.y - u.y) * (q.x - u.x) >= 0.0; };
    std::vector<Point> out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point& cur = poly[i];
      const Point& nxt = poly[(i + 1) % poly.size()];
      const bool ci = inside(cur), ni = inside(nxt);
      if (ci) out.push_back(cur);
      if (ci != ni) {
        const double dc = (v.x - u.x) * (cur.y - u.y) - (v.y - u.y) * (cur.x - u.x);
        const double dn = (v.x - u.x) * (nxt.y - u.y) - (v.y - u.y) * (nxt.x - u.x);
        const double t = dc / (dc - dn);
        out.push_back({cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)});
      }
    }
    poly = std::move(out);
  }
  return poly;
}

inline double area(const std::vector<Point>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % poly.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return std::abs(a) / 2.0;
}

// Length of the union of [lo, hi] intervals.
inline double union_length(std::vector<std::pair<double, double>>& intervals) {
  if (intervals.empty()) return 0.0;
  std::sort(intervals.begin(), intervals.end());
  double total = 0.0;
  double lo = intervals.front().first, hi = intervals.front().second;
  for (const auto& [a, b] : intervals) {
    if (a > hi) {
      total += hi - lo;
      lo = a;
      hi = b;
    } else {
      hi = std::max(hi, b);
    }
  }
  return total + (hi - lo);
}

}  // namespace detail

// Octant k is the triangle (center, P_k, P_{k+1}) where P_k is the point of the
// bounding square at angle k*45 degrees (edge midpoints for even k, corners
// for odd k), counting counterclockwise from east. For every octant the three
// features are emitted as: the side on the square boundary, then the interior
// side toward P_{k+1}, then the interior side toward P_k. Each pixel is a unit
// square; the part of it inside the octant is projected on each side, clipped
// to the side and unioned.
inline FeatureVector shadow_features(const BinaryGlyph& g) {
  const int side = g.side();
  const double h = side / 2.0;

  std::array<detail::Point, 9> p{};
  for (int k = 0; k <= 8; ++k) {
    const int kk = k % 8;
    static constexpr int ux[8] = {1, 1, 0, -1, -1, -1, 0, 1};
    static constexpr int uy[8] = {0, 1, 1, 1, 0, -1, -1, -1};
    p[k] = {ux[kk] * h, uy[kk] * h};
  }

  std::array<std::array<detail::Segment, 3>, 8> sides{};
  for (int k = 0; k < 8; ++k) {
    sides[k][0] = {p[k].x, p[k].y, p[k + 1].x, p[k + 1].y};
    sides[k][1] = {0.0, 0.0, p[k + 1].x, p[k + 1].y};
    sides[k][2] = {0.0, 0.0, p[k].x, p[k].y};
  }

  std::array<std::array<std::vector<std::pair<double, double>>, 3>, 8> shadows;
  std::vector<detail::Point> piece;
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      if (!g.at(y, x)) continue;
      const double x0 = x - h, y0 = h - y - 1.0;
      const std::vector<detail::Point> square{{x0, y0}, {x0 + 1, y0}, {x0 + 1, y0 + 1}, {x0, y0 + 1}};
      for (int k = 0; k < 8; ++k) {
        piece = detail::clip_to_triangle(square, {0.0, 0.0}, p[k], p[k + 1]);
        if (detail::area(piece) <= 1e-12) continue;
        for (int s = 0; s < 3; ++s) {
          const auto& seg = sides[k][s];
          const double len = seg.length();
          const double ux = (seg.x1 - seg.x0) / len, uy = (seg.y1 - seg.y0) / len;
          double lo = len, hi = 0.0;
          for (const auto& q : piece) {
            const double t = (q.x - seg.x0) * ux + (q.y - seg.y0) * uy;
            lo = std::min(lo, t);
            hi = std::max(hi, t);
          }
          lo = std::max(0.0, lo);
          hi = std::min(len, hi);
          if (hi > lo) shadows[k][s].emplace_back(lo, hi);
        }
      }
    }
  }

  FeatureVector out{FeatureKind::Shadow24, std::vector<double>(24, 0.0)};
  for (int k = 0; k < 8; ++k)
    for (int s = 0; s < 3; ++s) {
      const double v = detail::union_length(shadows[k][s]) / sides[k][s].length();
      out.values[static_cast<std::size_t>(k * 3 + s)] = std::clamp(v, 0.0, 1.0);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Chain codes
// ---------------------------------------------------------------------------

// Freeman directions, 0 = E counterclockwise to 7 = SE, with rows growing down.
inline constexpr std::array<int, 8> kChainDRow = {0, -1, -1, -1, 0, 1, 1, 1};
inline constexpr std::array<int, 8> kChainDCol = {1, 1, 0, -1, -1, -1, 0, 1};

struct ChainCode {
  int start_row = 0;
  int start_col = 0;
  std::vector<std::uint8_t> codes;

  friend bool operator==(const ChainCode&, const ChainCode&) = default;
};

namespace detail {

// 8-connected components of the mask, each as its pixel list, ordered by the
// raster position of their first (topmost, then leftmost) pixel.
inline std::vector<std::vector<std::pair<int, int>>> contour_components(const BinaryRaster& mask) {
  std::vector<std::vector<std::pair<int, int>>> comps;
  std::vector<std::uint8_t> seen(mask.size(), 0);
  const int w = mask.width(), h = mask.height();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!mask.at(y, x) || seen[static_cast<std::size_t>(y) * w + x]) continue;
      std::vector<std::pair<int, int>> comp;
      std::vector<std::pair<int, int>> stack{{y, x}};
      seen[static_cast<std::size_t>(y) * w + x] = 1;
      while (!stack.empty()) {
        auto [r, c] = stack.back();
        stack.pop_back();
        comp.emplace_back(r, c);
        for (int d = 0; d < 8; ++d) {
          const int nr = r + kChainDRow[d], nc = c + kChainDCol[d];
          if (!mask.contains(nr, nc) || !mask.at(nr, nc)) continue;
          auto& s = seen[static_cast<std::size_t>(nr) * w + nc];
          if (s) continue;
          s = 1;
          stack.emplace_back(nr, nc);
        }
      }
      comps.push_back(std::move(comp));
    }
  return comps;
}

}  // namespace detail

// Clockwise contour following, one chain per 8-connected contour component,
// starting at the component's topmost-leftmost pixel. After arriving with
// direction d the neighbors are swept clockwise beginning next to the pixel
// we came from (d+3, d+2, ..., d-3, d+4 mod 8); the first one that is either
// unvisited or the start pixel is taken. The sweep starts as if the previous
// move were east, so the first move prefers E, then SE, S, SW. Tracing ends on
// return to the start pixel or when no eligible neighbor remains.
inline std::vector<ChainCode> trace_chain(const BinaryRaster& mask) {
  std::vector<ChainCode> chains;
  std::vector<std::uint8_t> visited(mask.size(), 0);
  const int w = mask.width();
  auto idx = [w](int r, int c) { return static_cast<std::size_t>(r) * w + c; };

  for (const auto& comp : detail::contour_components(mask)) {
    ChainCode chain{comp.front().first, comp.front().second, {}};
    int r = chain.start_row, c = chain.start_col;
    visited[idx(r, c)] = 1;
    int dir = 0;
    for (;;) {
      int next = -1;
      for (int step = 0; step < 8; ++step) {
        const int d = ((dir + 3 - step) % 8 + 8) % 8;
        const int nr = r + kChainDRow[d], nc = c + kChainDCol[d];
        if (!mask.contains(nr, nc) || !mask.at(nr, nc)) continue;
        const bool is_start = nr == chain.start_row && nc == chain.start_col;
        if (is_start ? chain.codes.empty() : visited[idx(nr, nc)]) continue;
        next = d;
        break;
      }
      if (next < 0) break;
      chain.codes.push_back(static_cast<std::uint8_t>(next));
      r += kChainDRow[next];
      c += kChainDCol[next];
      if (r == chain.start_row && c == chain.start_col) break;
      visited[idx(r, c)] = 1;
      dir = next;
    }
    chains.push_back(std::move(chain));
  }
  return chains;
}

// Histogram of chain moves over a 5x5 grid of blocks; a move belongs to the
// block of its origin pixel. Normalized by the total number of moves.
inline FeatureVector chain_histogram_features(const BinaryRaster& mask, const std::vector<ChainCode>& chains) {
  if (mask.width() != mask.height() || mask.width() % 5 != 0)
    fail(ErrorCode::BadSide, "contour mask must be square with side divisible by 5");
  const int side = mask.width();
  FeatureVector out{FeatureKind::ChainCode200, std::vector<double>(200, 0.0)};
  std::size_t total = 0;
  for (const auto& chain : chains) {
    int r = chain.start_row, c = chain.start_col;
    for (auto code : chain.codes) {
      const int block = (r * 5 / side) * 5 + (c * 5 / side);
      out.values[static_cast<std::size_t>(block * 8 + code)] += 1.0;
      ++total;
      r += kChainDRow[code];
      c += kChainDCol[code];
    }
  }
  if (total > 0)
    for (auto& v : out.values) v /= static_cast<double>(total);
  return out;
}

}  // namespace twostage
