#pragma once

// Score-level fusion of the per-feature classifiers and the confidence gate
// that separates certain decisions from confused ones.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "twostage/error.hpp"
#include "twostage/mlp.hpp"

namespace twostage {

enum class RelDiffStrategy : std::uint8_t {
  TopTwoMargin = 0,   // (s1 - s2) / s1
  TopThreeSpread = 1, // (s1 - (s2 + s3) / 2) / s1
};

struct VotingConfig {
  std::vector<double> weights;   // fusion weights, sum to 1
  double theta = 0.10;           // relative-difference threshold
  double reject_floor = 0.05;    // absolute floor on the top combined score
  double k_of_d = 0.0;           // additional voting constraint, added to the floor
  RelDiffStrategy strategy = RelDiffStrategy::TopTwoMargin;

  friend bool operator==(const VotingConfig&, const VotingConfig&) = default;
};

struct RankedClass {
  int label = 0;
  double score = 0.0;

  friend bool operator==(const RankedClass&, const RankedClass&) = default;
};

enum class DecisionKind : std::uint8_t { Certain, Confused, Rejected };

inline const char* to_string(DecisionKind k) {
  switch (k) {
    case DecisionKind::Certain: return "certain";
    case DecisionKind::Confused: return "confused";
    case DecisionKind::Rejected: return "rejected";
  }
  return "?";
}

struct Decision {
  DecisionKind kind = DecisionKind::Rejected;
  // Top-3 combined candidates, descending. For Certain the first entry is the
  // decided label; Confused and Rejected samples use all three in stage 2.
  std::vector<RankedClass> candidates;
  double relative_difference = 0.0;

  int label() const { return candidates.front().label; }
};

inline std::vector<double> fusion_weights(std::span<const double> accuracies) {
  if (accuracies.empty()) fail(ErrorCode::InvalidArgument, "no classifier accuracies");
  double total = 0.0;
  for (double p : accuracies) {
    if (!(p > 0.0) || !std::isfinite(p)) fail(ErrorCode::NonPositiveAccuracy, "classifier accuracy must be > 0");
    total += p;
  }
  std::vector<double> w;
  w.reserve(accuracies.size());
  for (double p : accuracies) w.push_back(p / total);
  return w;
}

inline ClassScores combine(std::span<const ClassScores> scores, std::span<const double> weights) {
  if (scores.empty() || scores.size() != weights.size())
    fail(ErrorCode::ShapeMismatch, "one weight per classifier required");
  const std::size_t n = scores.front().size();
  ClassScores out(n, 0.0);
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (scores[k].size() != n) fail(ErrorCode::ShapeMismatch, "classifier score vectors differ in length");
    for (std::size_t c = 0; c < n; ++c) out[c] += weights[k] * scores[k][c];
  }
  return out;
}

// Three best classes by descending score, equal scores ordered by label index.
inline std::vector<RankedClass> top3(std::span<const double> scores) {
  if (scores.size() < 3) fail(ErrorCode::TooFewClasses, "top-3 needs at least 3 classes");
  std::vector<int> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + 3, idx.end(), [&](int a, int b) {
    return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
  });
  return {{idx[0], scores[idx[0]]}, {idx[1], scores[idx[1]]}, {idx[2], scores[idx[2]]}};
}

inline double relative_difference(std::span<const RankedClass> top,
                                  RelDiffStrategy strategy = RelDiffStrategy::TopTwoMargin) {
  if (top.size() < 3) fail(ErrorCode::TooFewClasses, "relative difference needs the top three scores");
  const double s1 = top[0].score, s2 = top[1].score, s3 = top[2].score;
  if (!(s1 > 0.0)) fail(ErrorCode::DegenerateScores, "top score must be positive");
  switch (strategy) {
    case RelDiffStrategy::TopTwoMargin: return (s1 - s2) / s1;
    case RelDiffStrategy::TopThreeSpread: return (s1 - 0.5 * (s2 + s3)) / s1;
  }
  fail(ErrorCode::InvalidArgument, "unknown relative-difference strategy");
}

// Rejected when the top score is below reject_floor + k_of_d; otherwise
// Certain iff the relative difference exceeds theta.
inline Decision gate(std::span<const double> combined, const VotingConfig& cfg) {
  Decision d;
  d.candidates = top3(combined);
  if (d.candidates[0].score < cfg.reject_floor + cfg.k_of_d || !(d.candidates[0].score > 0.0)) {
    d.kind = DecisionKind::Rejected;
    d.relative_difference = 0.0;
    return d;
  }
  d.relative_difference = relative_difference(d.candidates, cfg.strategy);
  d.kind = d.relative_difference > cfg.theta ? DecisionKind::Certain : DecisionKind::Confused;
  return d;
}

}  // namespace twostage
