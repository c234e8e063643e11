#pragma once

// Synthetic glyph corpus: a fixed family of stroke/curve/loop shapes drawn on
// a 100x100 canvas, with per-instance shift, stroke jitter and boundary noise.
// Everything except the shift scales with the noise rate, so noise = 0 yields
// instances that differ only by translation.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "twostage/error.hpp"
#include "twostage/image.hpp"
#include "twostage/pgm.hpp"
#include "twostage/rng.hpp"

namespace twostage::synth {

struct Point {
  double x = 0.0, y = 0.0;
};

// Either an open polyline through `points`, or a circular arc (y down,
// angle 0 = right, pi/2 = down) from a0 to a1 radians.
struct Stroke {
  std::vector<Point> points;
  bool is_arc = false;
  Point center;
  double radius = 0.0;
  double a0 = 0.0, a1 = 0.0;
};

struct Shape {
  std::string name;
  std::vector<Stroke> strokes;
};

namespace detail {

inline Stroke line(std::vector<Point> pts) { return Stroke{std::move(pts), false, {}, 0.0, 0.0, 0.0}; }
inline Stroke arc(double cx, double cy, double r, double a0, double a1) {
  return Stroke{{}, true, {cx, cy}, r, a0, a1};
}

constexpr double kPi = std::numbers::pi;

}  // namespace detail

// Shapes in unit-box coordinates (y down). Names are prefixed with their index
// so the lexicographic label order matches this list.
inline const std::vector<Shape>& base_shapes() {
  using detail::arc;
  using detail::kPi;
  using detail::line;
  static const std::vector<Shape> shapes = {
      {"ring", {arc(0.5, 0.5, 0.45, 0.0, 2 * kPi)}},
      {"xcross", {line({{0.05, 0.05}, {0.95, 0.95}}), line({{0.95, 0.05}, {0.05, 0.95}})}},
      {"plus", {line({{0.5, 0.05}, {0.5, 0.95}}), line({{0.05, 0.5}, {0.95, 0.5}})}},
      {"square", {line({{0.05, 0.05}, {0.95, 0.05}, {0.95, 0.95}, {0.05, 0.95}, {0.05, 0.05}})}},
      {"triangle", {line({{0.5, 0.05}, {0.95, 0.95}, {0.05, 0.95}, {0.5, 0.05}})}},
      {"ell", {line({{0.15, 0.05}, {0.15, 0.95}, {0.9, 0.95}})}},
      {"tee", {line({{0.05, 0.1}, {0.95, 0.1}}), line({{0.5, 0.1}, {0.5, 0.95}})}},
      {"aitch", {line({{0.1, 0.05}, {0.1, 0.95}}), line({{0.9, 0.05}, {0.9, 0.95}}), line({{0.1, 0.5}, {0.9, 0.5}})}},
      {"zed", {line({{0.05, 0.1}, {0.95, 0.1}, {0.05, 0.9}, {0.95, 0.9}})}},
      {"cee", {arc(0.55, 0.5, 0.45, kPi / 4, 7 * kPi / 4)}},
      {"eee",
       {line({{0.1, 0.05}, {0.1, 0.95}}), line({{0.1, 0.05}, {0.9, 0.05}}), line({{0.1, 0.5}, {0.75, 0.5}}),
        line({{0.1, 0.95}, {0.9, 0.95}})}},
      {"you", {line({{0.1, 0.05}, {0.1, 0.55}}), line({{0.9, 0.05}, {0.9, 0.55}}), arc(0.5, 0.55, 0.4, 0.0, kPi)}},
      {"vee", {line({{0.05, 0.05}, {0.5, 0.95}, {0.95, 0.05}})}},
      {"phi", {arc(0.5, 0.5, 0.35, 0.0, 2 * kPi), line({{0.5, 0.0}, {0.5, 1.0}})}},
      {"ess", {arc(0.5, 0.27, 0.24, kPi / 2, 11 * kPi / 6), arc(0.5, 0.73, 0.24, -kPi / 2, 5 * kPi / 6)}},
      {"hash",
       {line({{0.35, 0.0}, {0.35, 1.0}}), line({{0.65, 0.0}, {0.65, 1.0}}), line({{0.0, 0.35}, {1.0, 0.35}}),
        line({{0.0, 0.65}, {1.0, 0.65}})}},
  };
  return shapes;
}

inline std::string class_name(std::size_t index) {
  const auto& name = base_shapes().at(index).name;
  return (index < 10 ? "0" : "") + std::to_string(index) + "_" + name;
}

struct SynthConfig {
  int n_classes = 10;
  int n_per_class = 100;
  double noise = 0.05;
  std::uint64_t seed = 42;
};

inline constexpr int kCanvas = 100;
inline constexpr double kBox = 60.0;        // shape extent in pixels
inline constexpr int kMaxShift = 15;        // +- translation in pixels
inline constexpr double kBaseThickness = 7.0;

namespace detail {

inline double segment_distance(Point p, Point a, Point b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = p.x - (a.x + t * vx), dy = p.y - (a.y + t * vy);
  return std::sqrt(dx * dx + dy * dy);
}

inline std::vector<Point> polyline(const Stroke& s) {
  if (!s.is_arc) return s.points;
  const int n = std::max(8, static_cast<int>(std::ceil(std::abs(s.a1 - s.a0) / (kPi / 32))));
  std::vector<Point> pts;
  for (int i = 0; i <= n; ++i) {
    const double a = s.a0 + (s.a1 - s.a0) * i / n;
    pts.push_back({s.center.x + s.radius * std::cos(a), s.center.y + s.radius * std::sin(a)});
  }
  return pts;
}

}  // namespace detail

// One instance of a shape as a grayscale image (dark ink on light paper).
inline GrayImage render(const Shape& shape, double noise, Rng& rng) {
  const double jitter = noise * kCanvas;  // control-point jitter, pixels
  const int dx = rng.range(-kMaxShift, kMaxShift);
  const int dy = rng.range(-kMaxShift, kMaxShift);
  const double origin_x = (kCanvas - kBox) / 2.0 + dx, origin_y = (kCanvas - kBox) / 2.0 + dy;
  const int thick_jitter = static_cast<int>(std::lround(noise * 40.0));
  const double thickness = kBaseThickness + (thick_jitter > 0 ? rng.range(-thick_jitter, thick_jitter) : 0);

  auto place = [&](Point p) { return Point{origin_x + p.x * kBox, origin_y + p.y * kBox}; };
  auto wiggle = [&]() { return jitter > 0.0 ? rng.uniform(-jitter, jitter) : 0.0; };

  std::vector<std::vector<Point>> lines;
  for (const auto& stroke : shape.strokes) {
    Stroke s = stroke;
    if (s.is_arc) {
      s.center = place(s.center);
      s.center.x += wiggle();
      s.center.y += wiggle();
      s.radius = s.radius * kBox + wiggle() / 2.0;
    } else {
      for (auto& p : s.points) {
        p = place(p);
        p.x += wiggle();
        p.y += wiggle();
      }
    }
    lines.push_back(detail::polyline(s));
  }

  BinaryRaster ink(kCanvas, kCanvas);
  const double half = thickness / 2.0;
  for (int y = 0; y < kCanvas; ++y)
    for (int x = 0; x < kCanvas; ++x) {
      const Point p{x + 0.5, y + 0.5};
      bool hit = false;
      for (const auto& pl : lines) {
        for (std::size_t i = 0; i + 1 < pl.size() && !hit; ++i) hit = detail::segment_distance(p, pl[i], pl[i + 1]) <= half;
        if (hit) break;
      }
      ink.at(y, x) = hit ? 1 : 0;
    }

  // Boundary noise: pixels on either side of the ink edge flip with
  // probability `noise`.
  if (noise > 0.0) {
    BinaryRaster noisy = ink;
    for (int y = 0; y < kCanvas; ++y)
      for (int x = 0; x < kCanvas; ++x) {
        const auto v = ink.at(y, x);
        const bool edge = ink.get_or_zero(y - 1, x) != v || ink.get_or_zero(y + 1, x) != v ||
                          ink.get_or_zero(y, x - 1) != v || ink.get_or_zero(y, x + 1) != v;
        if (edge && rng.uniform() < noise) noisy.at(y, x) = v ? 0 : 1;
      }
    ink = std::move(noisy);
  }

  const int level_jitter = static_cast<int>(std::lround(noise * 400.0));
  GrayImage img(kCanvas, kCanvas);
  for (int y = 0; y < kCanvas; ++y)
    for (int x = 0; x < kCanvas; ++x) {
      const int base = ink.at(y, x) ? 30 : 220;
      const int j = level_jitter > 0 ? rng.range(-level_jitter, level_jitter) : 0;
      img.at(y, x) = static_cast<std::uint8_t>(std::clamp(base + j, 0, 255));
    }
  return img;
}

struct SynthSample {
  std::string label;
  GrayImage image;
};

// In-memory corpus, class-major order.
inline std::vector<SynthSample> generate(const SynthConfig& cfg) {
  const auto& shapes = base_shapes();
  if (cfg.n_classes < 1 || static_cast<std::size_t>(cfg.n_classes) > shapes.size())
    fail(ErrorCode::InvalidArgument, "n_classes must be in 1.." + std::to_string(shapes.size()));
  if (cfg.n_per_class < 1) fail(ErrorCode::InvalidArgument, "n_per_class must be >= 1");
  if (!(cfg.noise >= 0.0 && cfg.noise <= 0.5)) fail(ErrorCode::InvalidArgument, "noise must be in [0, 0.5]");
  std::vector<SynthSample> out;
  out.reserve(static_cast<std::size_t>(cfg.n_classes) * cfg.n_per_class);
  for (int c = 0; c < cfg.n_classes; ++c) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(c)));
    for (int i = 0; i < cfg.n_per_class; ++i) out.push_back({class_name(c), render(shapes[c], cfg.noise, rng)});
  }
  return out;
}

// Writes DIR/<label>/<label>_NNNN.pgm; returns the number of files written.
inline std::size_t write_corpus(const SynthConfig& cfg, const std::filesystem::path& dir) {
  const auto samples = generate(cfg);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
  std::size_t i = 0;
  for (const auto& s : samples) {
    const auto sub = dir / s.label;
    std::filesystem::create_directories(sub, ec);
    if (ec) fail(ErrorCode::Io, "cannot create " + sub.string() + ": " + ec.message());
    char name[32];
    std::snprintf(name, sizeof name, "_%04zu.pgm", i % static_cast<std::size_t>(cfg.n_per_class));
    pgm::write(sub / (s.label + name), s.image);
    ++i;
  }
  return samples.size();
}

}  // namespace twostage::synth
