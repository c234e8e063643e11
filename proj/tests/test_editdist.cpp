#include <gtest/gtest.h>

#include <string>

#include "helpers.hpp"
#include "oracles.hpp"

#include <algorithm>

using namespace twostage;
using namespace testing_util;

namespace {

CornerString with_ones(std::initializer_list<int> cells) {
  CornerString s;
  for (int c : cells) s.counts[static_cast<std::size_t>(c)] = 1;
  return s;
}

}  // namespace

TEST(EditDistance, BasicCases) {
  const std::vector<int> a{1, 2, 3}, b{1, 3}, empty;
  EXPECT_EQ(edit_distance(a, a), 0u);
  EXPECT_EQ(edit_distance(a, b), 1u);
  EXPECT_EQ(edit_distance(a, empty), 3u);
  EXPECT_EQ(edit_distance(empty, b), 2u);
  EXPECT_EQ(edit_distance(empty, empty), 0u);
  EXPECT_EQ(edit_distance(std::string("kitten"), std::string("sitting")), 3u);
}

TEST(EditDistance, MatchesRecursionUpToLengthFive) {
  // The full length-6 sweep lives in the acceptance suite.
  const auto all = oracles::all_strings(3, 5);
  for (const auto& a : all)
    for (const auto& b : all)
      ASSERT_EQ(edit_distance(a, b), static_cast<std::size_t>(oracles::naive_edit_distance(a, b)));
}

TEST(EditDistance, MetricAxiomsAndBounds) {
  const auto all = oracles::all_strings(3, 3);
  for (const auto& a : all)
    for (const auto& b : all) {
      const auto dab = edit_distance(a, b);
      EXPECT_EQ(dab == 0, a == b);
      EXPECT_EQ(dab, edit_distance(b, a));
      EXPECT_LE(dab, std::max(a.size(), b.size()));
      EXPECT_GE(dab, a.size() > b.size() ? a.size() - b.size() : b.size() - a.size());
      for (const auto& c : all) EXPECT_LE(edit_distance(a, c), dab + edit_distance(b, c));
    }
}

TEST(EditDistance, CornerStrings) {
  EXPECT_EQ(edit_distance(CornerString{}, with_ones({0, 5, 24})), 3u);
  EXPECT_EQ(edit_distance(with_ones({3}), with_ones({3})), 0u);
}

TEST(Templates, StoresEveryGlyph) {
  std::vector<LabeledGlyph> training;
  for (int i = 0; i < 6; ++i)
    training.push_back({i % 2, BinaryGlyph(filled_rect(50, 50, 5 + i, 5, 20 + i, 30))});
  const auto store = build_templates(training);
  EXPECT_EQ(store.size(), 6u);
  EXPECT_TRUE(store.has_label(0));
  EXPECT_TRUE(store.has_label(1));
  EXPECT_FALSE(store.has_label(2));
  EXPECT_EQ(store.entries_for(1).size(), 3u);
  for (std::size_t i = 0; i < training.size(); ++i)
    EXPECT_EQ(store.entries()[i].corners, glyph_corner_string(training[i].glyph));
  EXPECT_EQ(code_of([] { build_templates({}); }), ErrorCode::EmptyTrainingSet);

  const BinaryGlyph g(filled_rect(50, 50, 10, 10, 20, 20));
  const std::vector<LabeledGlyph> dup{{0, g}, {0, g}, {1, g}};
  const auto d = build_templates(dup);
  EXPECT_EQ(d.size(), 3u);
  EXPECT_EQ(d.entries()[0], d.entries()[1]);
  EXPECT_EQ(build_templates(dup), d);
}

TEST(ClassifyConfused, NearestCandidateWins) {
  const TemplateStore store({{0, with_ones({0, 1, 2, 3, 4, 5, 6})},
                             {1, with_ones({0, 1})},
                             {1, with_ones({0, 1, 2, 3, 4, 5, 6, 7, 8})},
                             {2, with_ones({0, 1, 2, 3, 4})},
                             {3, CornerString{}}});
  const int candidates[] = {0, 1, 2};
  const std::vector<double> scores{0.9, 0.5, 0.4, 0.1};
  const auto r = classify_confused(CornerString{}, candidates, store, scores);
  EXPECT_EQ(r.label, 1);
  ASSERT_EQ(r.distances.size(), 3u);
  EXPECT_EQ(r.distances[0].distance, 7u);
  EXPECT_EQ(r.distances[1].distance, 2u);
  EXPECT_EQ(r.distances[1].template_index, 1u);
  EXPECT_EQ(r.distances[2].distance, 5u);
  // Label 3 would match exactly but is not a candidate.
  EXPECT_NE(r.label, 3);
}

TEST(ClassifyConfused, ExactMatchAndSingleCandidate) {
  const TemplateStore store({{0, with_ones({1, 2})}, {1, with_ones({7})}, {2, with_ones({9, 10, 11})}});
  const int three[] = {0, 1, 2};
  EXPECT_EQ(classify_confused(with_ones({9, 10, 11}), three, store, std::vector<double>{0.9, 0.5, 0.1}).label, 2);
  const int one[] = {0};
  EXPECT_EQ(classify_confused(with_ones({20, 21, 22, 23}), one, store, std::vector<double>{}).label, 0);
}

TEST(ClassifyConfused, AlwaysReturnsACandidate) {
  Rng rng(4);
  std::vector<Template> entries;
  for (int i = 0; i < 40; ++i) {
    CornerString s;
    for (auto& c : s.counts) c = static_cast<int>(rng.below(3));
    entries.push_back({i % 8, s});
  }
  const TemplateStore store(entries);
  for (int trial = 0; trial < 50; ++trial) {
    CornerString q;
    for (auto& c : q.counts) c = static_cast<int>(rng.below(3));
    const int cand[] = {static_cast<int>(rng.below(8)), static_cast<int>(rng.below(8)), static_cast<int>(rng.below(8))};
    const auto r = classify_confused(q, cand, store, std::vector<double>(8, 0.5));
    EXPECT_TRUE(r.label == cand[0] || r.label == cand[1] || r.label == cand[2]);
    // The winner's distance is the minimum over every candidate template.
    std::size_t best = 1000;
    for (int l : cand)
      for (auto id : store.entries_for(l)) best = std::min(best, edit_distance(q, store.entries()[id].corners));
    std::size_t winner = 1000;
    for (const auto& d : r.distances)
      if (d.label == r.label) winner = d.distance;
    EXPECT_EQ(winner, best);
  }
}

TEST(ClassifyConfused, TiesPreferStageOneScoreThenIndex) {
  const TemplateStore store({{0, with_ones({1})}, {1, with_ones({2})}, {2, with_ones({3})}});
  const int candidates[] = {0, 1, 2};
  EXPECT_EQ(classify_confused(CornerString{}, candidates, store, std::vector<double>{0.2, 0.7, 0.5}).label, 1);
  EXPECT_EQ(classify_confused(CornerString{}, candidates, store, std::vector<double>{0.5, 0.5, 0.5}).label, 0);
}

TEST(ClassifyConfused, MissingTemplatesFail) {
  const TemplateStore store({{0, CornerString{}}});
  const int candidates[] = {0, 4};
  EXPECT_EQ(code_of([&] { classify_confused(CornerString{}, candidates, store, std::vector<double>{}); }),
            ErrorCode::NoTemplates);
}
