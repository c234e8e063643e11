#pragma once

// End-to-end recognizer: dataset ingestion, two-stage training, prediction
// with a full trace, and cross-validated evaluation.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "twostage/bundle.hpp"
#include "twostage/corners.hpp"
#include "twostage/editdist.hpp"
#include "twostage/ensemble.hpp"
#include "twostage/error.hpp"
#include "twostage/features.hpp"
#include "twostage/mlp.hpp"
#include "twostage/pgm.hpp"
#include "twostage/preprocess.hpp"
#include "twostage/rng.hpp"

namespace twostage {

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

struct Sample {
  std::string label;
  GrayImage image;
  std::filesystem::path source;
};

struct Dataset {
  std::vector<std::string> labels;  // sorted
  std::vector<Sample> samples;      // labels ascending, files ascending within a label
  std::vector<std::string> warnings;

  std::size_t skipped() const noexcept { return warnings.size(); }
};

// One directory per class under root; every regular file in it is read as a
// PGM. Unreadable files are skipped and reported in Dataset::warnings.
inline Dataset load_dataset(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) fail(ErrorCode::Io, root.string() + " is not a directory");

  std::vector<fs::path> class_dirs;
  bool any_entry = false;
  for (const auto& entry : fs::directory_iterator(root, ec)) {
    any_entry = true;
    if (entry.is_directory()) class_dirs.push_back(entry.path());
  }
  if (ec) fail(ErrorCode::Io, "cannot list " + root.string() + ": " + ec.message());
  if (!any_entry) fail(ErrorCode::EmptyDataset, root.string() + " is empty");
  if (class_dirs.empty()) fail(ErrorCode::NoClasses, root.string() + " has no class directories");
  std::sort(class_dirs.begin(), class_dirs.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });

  Dataset ds;
  for (const auto& dir : class_dirs) {
    const std::string label = dir.filename().string();
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir, ec))
      if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    bool any = false;
    for (const auto& file : files) {
      try {
        ds.samples.push_back({label, pgm::read(file), file});
        any = true;
      } catch (const Error& e) {
        ds.warnings.push_back(e.what());
      }
    }
    if (any) ds.labels.push_back(label);
  }
  if (ds.samples.empty()) fail(ErrorCode::EmptyDataset, "no readable images under " + root.string());
  return ds;
}

// ---------------------------------------------------------------------------
// Per-sample feature preparation
// ---------------------------------------------------------------------------

struct PreparedSample {
  int label = -1;  // -1 when unknown
  BinaryGlyph glyph;
  FeatureVector shadow;
  FeatureVector chain;
  CornerString corners;
};

inline PreparedSample prepare(const BinaryGlyph& glyph, int label, const CornerConfig& corner_cfg) {
  PreparedSample p;
  p.label = label;
  p.glyph = glyph;
  p.shadow = shadow_features(glyph);
  const auto contour = extract_contour(glyph);
  p.chain = chain_histogram_features(contour, trace_chain(contour));
  p.corners = glyph_corner_string(glyph, corner_cfg);
  return p;
}

inline PreparedSample prepare(const GrayImage& img, int label, int side, const CornerConfig& corner_cfg) {
  return prepare(normalize(img, side), label, corner_cfg);
}

struct PipelineConfig {
  int side = kDefaultSide;
  std::uint64_t seed = 1;
  int epochs = 150;
  int hidden_shadow = 30;
  int hidden_chain = 70;
  double learning_rate = 0.8;
  double momentum = 0.7;
  double train_fraction = 0.65;
  std::vector<double> theta_grid = {0.02, 0.05, 0.10, 0.15, 0.20};
  std::optional<double> fixed_theta;  // skips the grid search
  double reject_floor = 0.05;
  double k_of_d = 0.0;
  RelDiffStrategy strategy = RelDiffStrategy::TopTwoMargin;
  CornerConfig corners;
};

// Images -> prepared samples with label indices into `labels`.
inline std::vector<PreparedSample> prepare_dataset(const Dataset& ds, const PipelineConfig& cfg) {
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < ds.labels.size(); ++i) index[ds.labels[i]] = static_cast<int>(i);
  std::vector<PreparedSample> out;
  out.reserve(ds.samples.size());
  for (const auto& s : ds.samples) {
    try {
      out.push_back(prepare(s.image, index.at(s.label), cfg.side, cfg.corners));
    } catch (const Error& e) {
      throw e.with_context(s.source.string());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Prediction
// ---------------------------------------------------------------------------

struct PredictionTrace {
  ClassScores shadow_scores;
  ClassScores chain_scores;
  ClassScores combined;
  Decision decision;
  std::optional<ConfusedResult> stage2;  // set when stage 2 ran
};

struct Prediction {
  int label = 0;
  PredictionTrace trace;
};

inline Prediction predict_prepared(const ModelBundle& b, const PreparedSample& s) {
  Prediction p;
  p.trace.shadow_scores = mlp::forward(b.shadow_mlp, s.shadow.values);
  p.trace.chain_scores = mlp::forward(b.chain_mlp, s.chain.values);
  const ClassScores both[] = {p.trace.shadow_scores, p.trace.chain_scores};
  p.trace.combined = combine(both, b.voting.weights);
  p.trace.decision = gate(p.trace.combined, b.voting);
  if (p.trace.decision.kind == DecisionKind::Certain) {
    p.label = p.trace.decision.label();
    return p;
  }
  std::vector<int> candidates;
  for (const auto& c : p.trace.decision.candidates) candidates.push_back(c.label);
  p.trace.stage2 = classify_confused(s.corners, candidates, b.templates, p.trace.combined);
  p.label = p.trace.stage2->label;
  return p;
}

struct ImagePrediction {
  std::string label;
  Prediction prediction;
  PreparedSample sample;
};

inline ImagePrediction predict(const ModelBundle& b, const GrayImage& img) {
  ImagePrediction out;
  out.sample = prepare(img, -1, b.side, b.corners);
  out.prediction = predict_prepared(b, out.sample);
  out.label = b.labels.at(static_cast<std::size_t>(out.prediction.label));
  return out;
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

inline constexpr std::size_t kMinPerClass = 3;

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

// Stratified, seeded split of sample indices (fraction per class to train).
inline Split stratified_split(std::span<const int> labels, int n_classes, double train_fraction, std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(n_classes));
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  Rng rng(seed);
  Split split;
  for (auto& members : by_class) {
    if (members.empty()) continue;
    rng.shuffle(members);
    auto n_train = static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(members.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, std::max<std::size_t>(1, members.size() - 1));
    split.train.insert(split.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.validation.insert(split.validation.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train), members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.validation.begin(), split.validation.end());
  return split;
}

inline void check_class_sizes(std::span<const int> labels, int n_classes, std::size_t min_count) {
  if (n_classes < 3) fail(ErrorCode::TooFewClasses, "at least 3 classes are required");
  std::vector<std::size_t> counts(static_cast<std::size_t>(n_classes), 0);
  for (int l : labels) {
    if (l < 0 || l >= n_classes) fail(ErrorCode::LabelOutOfRange, "sample label outside the label table");
    ++counts[static_cast<std::size_t>(l)];
  }
  for (std::size_t c = 0; c < counts.size(); ++c)
    if (counts[c] < min_count)
      fail(ErrorCode::ClassTooSmall, "class " + std::to_string(c) + " has " + std::to_string(counts[c]) +
                                         " samples, need at least " + std::to_string(min_count));
}

struct TrainingReport {
  double shadow_accuracy = 0.0;
  double chain_accuracy = 0.0;
  std::vector<std::pair<double, double>> theta_scores;  // (theta, validation two-stage accuracy)
};

inline int argmax(std::span<const double> v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

// Trains on `train_fraction` of the samples (stratified), measures each
// classifier's accuracy on the rest to derive the fusion weights, picks theta
// on the same validation portion, and stores the training portion's corner
// strings as stage-2 templates.
inline ModelBundle train_bundle(std::span<const PreparedSample> data, const std::vector<std::string>& labels,
                                const PipelineConfig& cfg, TrainingReport* report = nullptr) {
  const int n_classes = static_cast<int>(labels.size());
  std::vector<int> sample_labels;
  sample_labels.reserve(data.size());
  for (const auto& s : data) sample_labels.push_back(s.label);
  if (data.empty()) fail(ErrorCode::EmptyTrainingSet, "no training samples");
  check_class_sizes(sample_labels, n_classes, kMinPerClass);

  const Split split = stratified_split(sample_labels, n_classes, cfg.train_fraction, mix_seed(cfg.seed, 1));

  std::vector<LabeledVector> shadow_train, chain_train;
  for (std::size_t i : split.train) {
    shadow_train.push_back({data[i].shadow.values, data[i].label});
    chain_train.push_back({data[i].chain.values, data[i].label});
  }

  TrainConfig tc;
  tc.learning_rate = cfg.learning_rate;
  tc.momentum = cfg.momentum;
  tc.epochs = cfg.epochs;

  ModelBundle b;
  b.labels = labels;
  b.side = cfg.side;
  b.corners = cfg.corners;

  tc.seed = mix_seed(cfg.seed, 2);
  b.shadow_mlp = mlp::train(mlp::init(24, cfg.hidden_shadow, n_classes, tc.seed), shadow_train, tc).model;
  tc.seed = mix_seed(cfg.seed, 3);
  b.chain_mlp = mlp::train(mlp::init(200, cfg.hidden_chain, n_classes, tc.seed), chain_train, tc).model;

  std::vector<Template> entries;
  entries.reserve(split.train.size());
  for (std::size_t i : split.train) entries.push_back({data[i].label, data[i].corners});
  b.templates = TemplateStore(std::move(entries));

  // Validation accuracies -> fusion weights. A classifier that gets nothing
  // right still needs a positive weight, so its accuracy is floored at half a
  // sample.
  std::vector<LabeledVector> shadow_val, chain_val;
  for (std::size_t i : split.validation) {
    shadow_val.push_back({data[i].shadow.values, data[i].label});
    chain_val.push_back({data[i].chain.values, data[i].label});
  }
  const double n_val = static_cast<double>(split.validation.size());
  b.shadow_mlp.meta.validation_accuracy = mlp::accuracy(b.shadow_mlp, shadow_val);
  b.chain_mlp.meta.validation_accuracy = mlp::accuracy(b.chain_mlp, chain_val);
  const double p_shadow = std::max(0.5 / n_val, b.shadow_mlp.meta.validation_accuracy);
  const double p_chain = std::max(0.5 / n_val, b.chain_mlp.meta.validation_accuracy);
  const double accuracies[] = {p_shadow, p_chain};
  b.voting.weights = fusion_weights(accuracies);
  b.voting.reject_floor = cfg.reject_floor;
  b.voting.k_of_d = cfg.k_of_d;
  b.voting.strategy = cfg.strategy;

  TrainingReport local;
  local.shadow_accuracy = b.shadow_mlp.meta.validation_accuracy;
  local.chain_accuracy = b.chain_mlp.meta.validation_accuracy;

  if (cfg.fixed_theta) {
    b.voting.theta = *cfg.fixed_theta;
  } else {
    if (cfg.theta_grid.empty()) fail(ErrorCode::InvalidArgument, "empty theta grid");
    double best_acc = -1.0;
    for (double theta : cfg.theta_grid) {
      b.voting.theta = theta;
      std::size_t hits = 0;
      for (std::size_t v = 0; v < split.validation.size(); ++v) {
        const auto& s = data[split.validation[v]];
        hits += predict_prepared(b, s).label == s.label;
      }
      const double acc = static_cast<double>(hits) / n_val;
      local.theta_scores.emplace_back(theta, acc);
      if (acc > best_acc) best_acc = acc;
    }
    for (const auto& [theta, acc] : local.theta_scores)
      if (acc == best_acc) {
        b.voting.theta = theta;
        break;
      }
  }
  check_bundle(b);
  if (report) *report = std::move(local);
  return b;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct FoldSummary {
  double accuracy = 0.0;
  std::size_t samples = 0;
  std::vector<double> fusion_weights;
  double theta = 0.0;
  double shadow_accuracy = 0.0;
  double chain_accuracy = 0.0;
};

struct EvalReport {
  std::vector<std::string> labels;
  std::size_t total = 0;
  double overall_accuracy = 0.0;
  double stage1_accuracy = 0.0;                  // combined argmax, no stage 2
  std::optional<double> certain_accuracy;        // over Certain decisions
  std::optional<double> stage2_accuracy;         // over Confused + Rejected
  std::size_t certain = 0, confused = 0, rejected = 0;
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
  std::vector<FoldSummary> folds;
  double reject_floor = 0.0;
};

// Stratified fold assignment: within each class, shuffled members are dealt
// round-robin so every sample lands in exactly one fold.
inline std::vector<int> stratified_folds(std::span<const int> labels, int n_classes, int folds, std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(n_classes));
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  Rng rng(seed);
  std::vector<int> fold_of(labels.size(), 0);
  std::size_t dealt = 0;
  for (auto& members : by_class) {
    rng.shuffle(members);
    for (std::size_t i : members) fold_of[i] = static_cast<int>(dealt++ % static_cast<std::size_t>(folds));
  }
  return fold_of;
}

inline EvalReport evaluate(std::span<const PreparedSample> data, const std::vector<std::string>& labels,
                           const PipelineConfig& cfg, int folds = 3) {
  if (folds < 2) fail(ErrorCode::InvalidArgument, "at least 2 folds are required");
  const int n_classes = static_cast<int>(labels.size());
  std::vector<int> sample_labels;
  for (const auto& s : data) sample_labels.push_back(s.label);
  if (data.empty()) fail(ErrorCode::EmptyDataset, "no samples to evaluate");
  // Each training partition must keep kMinPerClass samples of every class.
  {
    std::vector<std::size_t> counts(static_cast<std::size_t>(std::max(n_classes, 0)), 0);
    for (int l : sample_labels)
      if (l >= 0 && l < n_classes) ++counts[static_cast<std::size_t>(l)];
    std::size_t need = static_cast<std::size_t>(folds);
    for (std::size_t n = need;; ++n)
      if (n - (n + folds - 1) / folds >= kMinPerClass) {
        need = n;
        break;
      }
    check_class_sizes(sample_labels, n_classes, need);
  }

  const auto fold_of = stratified_folds(sample_labels, n_classes, folds, mix_seed(cfg.seed, 10));

  EvalReport rep;
  rep.labels = labels;
  rep.total = data.size();
  rep.reject_floor = cfg.reject_floor;
  rep.confusion.assign(static_cast<std::size_t>(n_classes), std::vector<std::size_t>(static_cast<std::size_t>(n_classes), 0));
  std::size_t hits = 0, stage1_hits = 0, certain_hits = 0, stage2_hits = 0;

  for (int f = 0; f < folds; ++f) {
    std::vector<PreparedSample> train;
    std::vector<std::size_t> test;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (fold_of[i] == f)
        test.push_back(i);
      else
        train.push_back(data[i]);
    }
    PipelineConfig fold_cfg = cfg;
    fold_cfg.seed = mix_seed(cfg.seed, 100 + static_cast<std::uint64_t>(f));
    TrainingReport tr;
    const ModelBundle b = train_bundle(train, labels, fold_cfg, &tr);

    FoldSummary fs;
    fs.samples = test.size();
    fs.fusion_weights = b.voting.weights;
    fs.theta = b.voting.theta;
    fs.shadow_accuracy = tr.shadow_accuracy;
    fs.chain_accuracy = tr.chain_accuracy;
    std::size_t fold_hits = 0;
    for (std::size_t i : test) {
      const auto& s = data[i];
      const Prediction p = predict_prepared(b, s);
      const bool ok = p.label == s.label;
      fold_hits += ok;
      stage1_hits += argmax(p.trace.combined) == s.label;
      ++rep.confusion[static_cast<std::size_t>(s.label)][static_cast<std::size_t>(p.label)];
      switch (p.trace.decision.kind) {
        case DecisionKind::Certain:
          ++rep.certain;
          certain_hits += ok;
          break;
        case DecisionKind::Confused:
          ++rep.confused;
          stage2_hits += ok;
          break;
        case DecisionKind::Rejected:
          ++rep.rejected;
          stage2_hits += ok;
          break;
      }
    }
    hits += fold_hits;
    fs.accuracy = test.empty() ? 0.0 : static_cast<double>(fold_hits) / static_cast<double>(test.size());
    rep.folds.push_back(std::move(fs));
  }

  const double n = static_cast<double>(data.size());
  rep.overall_accuracy = static_cast<double>(hits) / n;
  rep.stage1_accuracy = static_cast<double>(stage1_hits) / n;
  if (rep.certain) rep.certain_accuracy = static_cast<double>(certain_hits) / static_cast<double>(rep.certain);
  if (rep.confused + rep.rejected)
    rep.stage2_accuracy = static_cast<double>(stage2_hits) / static_cast<double>(rep.confused + rep.rejected);
  if (rep.certain + rep.confused + rep.rejected != data.size())
    fail(ErrorCode::InvariantViolation, "decision counts do not add up to the sample count");
  return rep;
}

}  // namespace twostage
