#pragma once

// Minimum edit distance and nearest-template classification of the samples
// the stage-1 gate could not decide.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <ranges>
#include <span>
#include <string>
#include <vector>

#include "twostage/corners.hpp"
#include "twostage/error.hpp"

namespace twostage {

// Unit-cost insertions, deletions and substitutions. Works for any pair of
// random-access ranges with equality-comparable elements.
template <std::ranges::random_access_range A, std::ranges::random_access_range B>
std::size_t edit_distance(const A& s1, const B& s2) {
  const std::size_t n = std::ranges::size(s1), m = std::ranges::size(s2);
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t t = std::ranges::begin(s1)[i - 1] == std::ranges::begin(s2)[j - 1] ? 0 : 1;
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + t});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

inline std::size_t edit_distance(const CornerString& a, const CornerString& b) {
  return edit_distance(a.counts, b.counts);
}

struct Template {
  int label = 0;
  CornerString corners;
  friend bool operator==(const Template&, const Template&) = default;
};

// Every training sample's corner string, kept as is.
class TemplateStore {
 public:
  TemplateStore() = default;
  explicit TemplateStore(std::vector<Template> entries) : entries_(std::move(entries)) { reindex(); }

  const std::vector<Template>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool has_label(int label) const { return index_.contains(label); }

  // Indices into entries() for one label.
  std::span<const std::size_t> entries_for(int label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return {};
    return it->second;
  }

  friend bool operator==(const TemplateStore& a, const TemplateStore& b) { return a.entries_ == b.entries_; }

 private:
  void reindex() {
    index_.clear();
    for (std::size_t i = 0; i < entries_.size(); ++i) index_[entries_[i].label].push_back(i);
  }

  std::vector<Template> entries_;
  std::map<int, std::vector<std::size_t>> index_;
};

struct LabeledGlyph {
  int label = 0;
  BinaryGlyph glyph;
};

inline TemplateStore build_templates(std::span<const LabeledGlyph> training, const CornerConfig& cfg = {}) {
  if (training.empty()) fail(ErrorCode::EmptyTrainingSet, "no training glyphs for templates");
  std::vector<Template> entries;
  entries.reserve(training.size());
  for (const auto& s : training) entries.push_back({s.label, glyph_corner_string(s.glyph, cfg)});
  return TemplateStore(std::move(entries));
}

struct CandidateDistance {
  int label = 0;
  std::size_t distance = 0;      // best distance over the label's templates
  std::size_t template_index = 0;
};

struct ConfusedResult {
  int label = 0;
  std::vector<CandidateDistance> distances;  // one per candidate, input order
};

// 1-nearest-neighbor over the candidates' templates. Distance ties across
// labels go to the higher stage-1 combined score, then the lower label index.
inline ConfusedResult classify_confused(const CornerString& query, std::span<const int> candidates,
                                        const TemplateStore& store, std::span<const double> stage1_scores) {
  if (candidates.empty()) fail(ErrorCode::InvalidArgument, "no candidate labels");
  ConfusedResult result;
  for (int label : candidates) {
    const auto ids = store.entries_for(label);
    if (ids.empty()) fail(ErrorCode::NoTemplates, "no templates for label index " + std::to_string(label));
    CandidateDistance best{label, std::numeric_limits<std::size_t>::max(), 0};
    for (std::size_t id : ids) {
      const std::size_t d = edit_distance(query, store.entries()[id].corners);
      if (d < best.distance) best = {label, d, id};
    }
    result.distances.push_back(best);
  }
  auto score_of = [&](int label) {
    return label >= 0 && static_cast<std::size_t>(label) < stage1_scores.size() ? stage1_scores[label]
                                                                                : -std::numeric_limits<double>::infinity();
  };
  const auto winner = std::min_element(result.distances.begin(), result.distances.end(), [&](const auto& a, const auto& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (score_of(a.label) != score_of(b.label)) return score_of(a.label) > score_of(b.label);
    return a.label < b.label;
  });
  result.label = winner->label;
  return result;
}

}  // namespace twostage
