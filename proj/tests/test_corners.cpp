#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"

using namespace twostage;
using namespace testing_util;

namespace {

RealMap white_square_canvas() {
  RealMap img(60, 60);
  for (int y = 20; y < 40; ++y)
    for (int x = 20; x < 40; ++x) img.at(y, x) = 1.0;
  return img;
}

RealMap random_map(Rng& rng, int w, int h) {
  RealMap m(w, h);
  for (auto& v : m.pixels()) v = rng.uniform() < 0.5 ? 1.0 : 0.0;
  return m;
}

}  // namespace

TEST(Gradients, ConstantInteriorIsZero) {
  const RealMap img(12, 12, 1.0);
  const auto g = gradients(img);
  for (int y = 1; y < 11; ++y)
    for (int x = 1; x < 11; ++x) {
      EXPECT_EQ(g.ix.at(y, x), 0.0);
      EXPECT_EQ(g.iy.at(y, x), 0.0);
      EXPECT_EQ(g.iu.at(y, x), 0.0);
      EXPECT_EQ(g.iv.at(y, x), 0.0);
    }
  // Zero padding makes the raster edge an intensity step.
  EXPECT_EQ(g.ix.at(5, 0), 0.5);
  EXPECT_EQ(g.iy.at(11, 5), -0.5);
}

TEST(Gradients, VerticalEdgeBand) {
  RealMap img(10, 10);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 5; ++x) img.at(y, x) = 1.0;
  const auto g = gradients(img);
  for (int y = 1; y < 9; ++y)
    for (int x = 1; x < 9; ++x) {
      EXPECT_EQ(g.ix.at(y, x), (x == 4 || x == 5) ? -0.5 : 0.0) << y << "," << x;
      EXPECT_EQ(g.iy.at(y, x), 0.0);
    }
}

TEST(Gradients, SinglePixelDiagonals) {
  RealMap img(7, 7);
  img.at(3, 3) = 1.0;
  const auto g = gradients(img);
  EXPECT_EQ(g.iu.at(4, 2), 0.5);   // pixel lies up-right
  EXPECT_EQ(g.iu.at(2, 4), -0.5);  // pixel lies down-left
  EXPECT_EQ(g.iv.at(2, 2), 0.5);   // pixel lies down-right
  EXPECT_EQ(g.iv.at(4, 4), -0.5);
  EXPECT_EQ(g.iu.at(2, 2), 0.0);
  EXPECT_EQ(g.iv.at(4, 2), 0.0);
  EXPECT_EQ(g.ix.at(3, 2), 0.5);
  EXPECT_EQ(g.iy.at(2, 3), 0.5);
  EXPECT_EQ(code_of([] { gradients(RealMap(4, 9)); }), ErrorCode::TooSmall);
}

TEST(Gradients, DiagonalStepAlongDownRight) {
  // Ink strictly below the main diagonal; the edge runs down-right.
  RealMap img(7, 7);
  for (int y = 0; y < 7; ++y)
    for (int x = 0; x < y; ++x) img.at(y, x) = 1.0;
  const auto g = gradients(img);
  for (int i = 1; i < 6; ++i) {
    EXPECT_EQ(g.iv.at(i, i), 0.0);
    EXPECT_EQ(g.iu.at(i, i), -0.5);
  }
  for (int i = 2; i < 6; ++i) {
    EXPECT_EQ(g.iv.at(i, i - 1), 0.0);
    EXPECT_EQ(g.iu.at(i, i - 1), -0.5);
  }
}

TEST(StructureTerms, ConstantRasterInteriorIsZero) {
  const auto t = structure_terms(gradients(RealMap(15, 15, 1.0)));
  for (int y = 3; y < 12; ++y)
    for (int x = 3; x < 12; ++x) {
      EXPECT_EQ(t.a.at(y, x), 0.0);
      EXPECT_EQ(t.b.at(y, x), 0.0);
      EXPECT_EQ(t.c.at(y, x), 0.0);
      EXPECT_EQ(t.d.at(y, x), 0.0);
    }
}

TEST(StructureTerms, MatchBruteForceWindowSums) {
  Rng rng(3);
  const auto img = random_map(rng, 9, 9);
  const auto g = gradients(img);
  const auto t = structure_terms(g);
  auto at = [](const RealMap& m, int y, int x) { return m.contains(y, x) ? m.at(y, x) : 0.0; };
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 9; ++x) {
      double a = 0, b = 0, c = 0, d = 0;
      for (int wy = 0; wy < 5; ++wy)
        for (int wx = 0; wx < 5; ++wx) {
          const double w = kGaussian5[static_cast<std::size_t>(wy * 5 + wx)];
          const int sy = y + wy - 2, sx = x + wx - 2;
          a += w * at(g.ix, sy, sx) * at(g.ix, sy, sx);
          b += w * at(g.iy, sy, sx) * at(g.iy, sy, sx);
          c += w * at(g.ix, sy, sx) * at(g.iy, sy, sx);
          d += w * at(g.iu, sy, sx) * at(g.iv, sy, sx);
        }
      EXPECT_NEAR(t.a.at(y, x), a, 1e-14);
      EXPECT_NEAR(t.b.at(y, x), b, 1e-14);
      EXPECT_NEAR(t.c.at(y, x), c, 1e-14);
      EXPECT_NEAR(t.d.at(y, x), d, 1e-14);
      EXPECT_GE(t.a.at(y, x), 0.0);
      EXPECT_GE(t.b.at(y, x), 0.0);
    }
}

TEST(Cornerness, FormulaAndBorder) {
  Rng rng(4);
  const auto img = random_map(rng, 15, 12);
  const auto t = structure_terms(gradients(img));
  const auto map0 = cornerness(t, 0.0);
  const auto map = cornerness(t, 0.04);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 15; ++x) {
      const bool border = y < 3 || x < 3 || y >= 9 || x >= 12;
      if (border) {
        EXPECT_EQ(map.at(y, x), 0.0);
        continue;
      }
      const double a = t.a.at(y, x), b = t.b.at(y, x), off = t.c.at(y, x) + t.d.at(y, x);
      EXPECT_NEAR(map0.at(y, x), a * b - off * off, 1e-14);
      EXPECT_NEAR(map.at(y, x), a * b - off * off - 0.04 * (a + b) * (a + b), 1e-14);
    }
}

TEST(Cornerness, StraightEdgeIsNegative) {
  RealMap img(20, 20);
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 10; ++x) img.at(y, x) = 1.0;
  const auto map = cornerness_map(img);
  for (int y = 6; y < 14; ++y) EXPECT_LT(map.at(y, 10), 0.0);
}

TEST(Cornerness, FlatImageHasNoCorners) {
  const RealMap img(20, 20, 1.0);
  const auto map = cornerness_map(img);
  for (double v : map.pixels()) EXPECT_EQ(v, 0.0);
  EXPECT_TRUE(detect_corners(map).empty());
}

TEST(Cornerness, ScalesWithFourthPowerOfContrast) {
  Rng rng(5);
  const auto img = random_map(rng, 20, 20);
  RealMap scaled = img;
  for (auto& v : scaled.pixels()) v *= 3.0;
  const auto m1 = cornerness_map(img), m3 = cornerness_map(scaled);
  for (std::size_t i = 0; i < m1.size(); ++i) EXPECT_NEAR(m3.pixels()[i], 81.0 * m1.pixels()[i], 1e-9);
  EXPECT_EQ(detect_corners(m3), detect_corners(m1));
}

TEST(Cornerness, RotationEquivariant) {
  Rng rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const auto img = random_map(rng, 25, 25);
    const auto rotated_map = cornerness_map(rotate90(img));
    const auto map_rotated = rotate90(cornerness_map(img));
    for (std::size_t i = 0; i < rotated_map.size(); ++i)
      EXPECT_NEAR(rotated_map.pixels()[i], map_rotated.pixels()[i], 1e-12);
  }
}

TEST(Detect, SquareHasFourCorners) {
  const auto img = white_square_canvas();
  const auto corners = detect_corners(cornerness_map(img));
  ASSERT_EQ(corners.size(), 4u);
  const CornerPoint truth[] = {{20, 20}, {39, 20}, {20, 39}, {39, 39}};
  for (const auto& t : truth) {
    const bool near = std::any_of(corners.begin(), corners.end(), [&](const CornerPoint& c) {
      return std::abs(c.x - t.x) <= 2 && std::abs(c.y - t.y) <= 2;
    });
    EXPECT_TRUE(near) << t.x << "," << t.y;
  }
  const auto s = corner_string(corners, 60);
  EXPECT_EQ(s.total(), 4);
  for (int cell : {6, 8, 16, 18}) EXPECT_EQ(s.counts[static_cast<std::size_t>(cell)], 1) << cell;
}

TEST(Detect, AllZeroAndSingleMaximum) {
  RealMap map(10, 10);
  EXPECT_TRUE(detect_corners(map).empty());
  map.at(4, 6) = 2.0;
  EXPECT_EQ(detect_corners(map), (std::vector<CornerPoint>{{6, 4}}));
}

TEST(Detect, ThresholdAndPlateau) {
  RealMap map(10, 10);
  map.at(2, 2) = 100.0;
  map.at(7, 7) = 0.5;   // below 1% of the peak
  map.at(7, 2) = 1.0;   // exactly 1% of the peak
  map.at(5, 5) = 3.0;   // plateau of two equal neighbors
  map.at(5, 6) = 3.0;
  const auto corners = detect_corners(map);
  EXPECT_EQ(corners, (std::vector<CornerPoint>{{2, 2}, {5, 5}, {2, 7}}));
}

TEST(CornerString, EmptyIsAllZero) {
  const auto s = corner_string({}, 100);
  EXPECT_EQ(s, CornerString{});
  EXPECT_EQ(s.total(), 0);
}

TEST(CornerString, CellsAndBounds) {
  const std::vector<CornerPoint> pts{{0, 0}, {19, 19}, {20, 0}, {99, 99}, {50, 50}};
  const auto s = corner_string(pts, 100);
  EXPECT_EQ(s.counts[0], 2);
  EXPECT_EQ(s.counts[1], 1);
  EXPECT_EQ(s.counts[12], 1);
  EXPECT_EQ(s.counts[24], 1);
  EXPECT_EQ(s.total(), 5);
  EXPECT_EQ(code_of([] { corner_string({{100, 0}}, 100); }), ErrorCode::OutOfBounds);
  EXPECT_EQ(code_of([] { corner_string({{0, -1}}, 100); }), ErrorCode::OutOfBounds);
}

TEST(CornerString, TotalEqualsCornerCount) {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    BinaryRaster r(50, 50);
    for (auto& v : r.pixels()) v = rng.uniform() < 0.3;
    const BinaryGlyph g(r);
    const auto corners = detect_corners(cornerness_map(to_real(g)));
    EXPECT_EQ(glyph_corner_string(g).total(), static_cast<int>(corners.size()));
  }
}
