// twostage-glyph: train, apply and evaluate the two-stage glyph recognizer.
//
// Exit status: 0 on success, 1 on bad input (arguments, files, data),
// 2 when an internal invariant is violated.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "twostage/twostage.hpp"

namespace fs = std::filesystem;
using namespace twostage;

namespace {

std::string csv_row(const std::string& label, const std::vector<double>& values) {
  std::string row = label;
  char buf[32];
  for (double v : values) {
    std::snprintf(buf, sizeof buf, ",%.9g", v);
    row += buf;
  }
  return row + "\n";
}

void write_text(const fs::path& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  io::write_file(path, text);
}

GrayImage cornerness_image(const RealMap& map) {
  const auto px = map.pixels();
  const auto [lo, hi] = std::minmax_element(px.begin(), px.end());
  GrayImage img(map.width(), map.height());
  auto out = img.pixels();
  const double span = *hi - *lo;
  for (std::size_t i = 0; i < px.size(); ++i)
    out[i] = span > 0.0 ? static_cast<std::uint8_t>(std::lround(255.0 * (px[i] - *lo) / span)) : 0;
  return img;
}

struct TrainArgs {
  fs::path data, out, dump_features;
  std::uint64_t seed = 1;
  int epochs = PipelineConfig{}.epochs;
  int side = kDefaultSide;
};

int run_train(const TrainArgs& a) {
  PipelineConfig cfg;
  cfg.seed = a.seed;
  cfg.epochs = a.epochs;
  cfg.side = a.side;
  const Dataset ds = load_dataset(a.data);
  for (const auto& w : ds.warnings) std::cerr << "warning: skipped " << w << "\n";
  const auto prepared = prepare_dataset(ds, cfg);
  if (!a.dump_features.empty()) {
    std::string csv;
    for (const auto& s : prepared) {
      csv += csv_row(ds.labels[static_cast<std::size_t>(s.label)], s.shadow.values);
      csv += csv_row(ds.labels[static_cast<std::size_t>(s.label)], s.chain.values);
    }
    write_text(a.dump_features, csv);
  }
  TrainingReport report;
  const ModelBundle bundle = train_bundle(prepared, ds.labels, cfg, &report);
  save_bundle(bundle, a.out);
  std::cout << "classes                 " << ds.labels.size() << "\n"
            << "samples                 " << prepared.size() << " (" << ds.skipped() << " skipped)\n"
            << "shadow validation acc   " << report.shadow_accuracy << "\n"
            << "chain validation acc    " << report.chain_accuracy << "\n"
            << "fusion weights          " << bundle.voting.weights[0] << " " << bundle.voting.weights[1] << "\n"
            << "theta                   " << bundle.voting.theta << "\n"
            << "rejection floor         " << bundle.voting.reject_floor << "\n"
            << "templates               " << bundle.templates.size() << "\n"
            << "bundle written to       " << a.out.string() << "\n";
  return 0;
}

struct PredictArgs {
  fs::path bundle, image, dump_features, dump_cornerness, dump_corners;
  bool explain = false;
};

int run_predict(const PredictArgs& a) {
  const ModelBundle bundle = load_bundle(a.bundle);
  const GrayImage img = pgm::read(a.image);
  ImagePrediction p;
  try {
    p = predict(bundle, img);
  } catch (const Error& e) {
    throw e.with_context(a.image.string());
  }
  if (!a.dump_features.empty())
    write_text(a.dump_features, csv_row(p.label, p.sample.shadow.values) + csv_row(p.label, p.sample.chain.values));
  if (!a.dump_cornerness.empty() || !a.dump_corners.empty()) {
    const RealMap map = cornerness_map(to_real(p.sample.glyph), bundle.corners);
    if (!a.dump_cornerness.empty()) pgm::write(a.dump_cornerness, cornerness_image(map), /*ascii=*/true);
    if (!a.dump_corners.empty()) {
      std::string csv = "x,y\n";
      for (const auto& c : detect_corners(map, bundle.corners))
        csv += std::to_string(c.x) + "," + std::to_string(c.y) + "\n";
      write_text(a.dump_corners, csv);
    }
  }
  if (a.explain)
    std::cout << to_json(p, bundle).dump(2) << "\n";
  else
    std::cout << p.label << "\n";
  return 0;
}

struct EvaluateArgs {
  fs::path data;
  std::string json;
  std::uint64_t seed = 1;
  int folds = 3;
  int epochs = PipelineConfig{}.epochs;
  int side = kDefaultSide;
  std::optional<double> theta;
  double reject_floor = PipelineConfig{}.reject_floor;
};

int run_evaluate(const EvaluateArgs& a) {
  PipelineConfig cfg;
  cfg.seed = a.seed;
  cfg.epochs = a.epochs;
  cfg.side = a.side;
  cfg.fixed_theta = a.theta;
  cfg.reject_floor = a.reject_floor;
  const Dataset ds = load_dataset(a.data);
  for (const auto& w : ds.warnings) std::cerr << "warning: skipped " << w << "\n";
  const auto prepared = prepare_dataset(ds, cfg);
  const EvalReport report = evaluate(prepared, ds.labels, cfg, a.folds);
  if (a.json != "-") std::cout << format_text(report);
  if (!a.json.empty()) write_text(a.json, to_json(report).dump(2) + "\n");
  return 0;
}

struct SynthArgs {
  synth::SynthConfig cfg;
  fs::path out;
};

int run_synth(const SynthArgs& a) {
  const auto n = synth::write_corpus(a.cfg, a.out);
  std::cout << "wrote " << n << " images in " << a.cfg.n_classes << " classes to " << a.out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage handwritten glyph recognizer"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a model bundle from a directory-per-class PGM dataset");
  train_cmd->add_option("--data", train.data, "Dataset root")->required();
  train_cmd->add_option("--out", train.out, "Output bundle path")->required();
  train_cmd->add_option("--seed", train.seed, "Random seed");
  train_cmd->add_option("--epochs", train.epochs, "Training epochs per MLP")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--side", train.side, "Normalized glyph side (multiple of 5)")->check(CLI::PositiveNumber);
  train_cmd->add_option("--dump-features", train.dump_features, "Write feature vectors as CSV ('-' = stdout)");

  PredictArgs predict_args;
  auto* predict_cmd = app.add_subcommand("predict", "Classify one PGM image");
  predict_cmd->add_option("--bundle", predict_args.bundle, "Model bundle")->required();
  predict_cmd->add_option("--image", predict_args.image, "PGM image")->required();
  predict_cmd->add_flag("--explain", predict_args.explain, "Print the full decision trace as JSON");
  predict_cmd->add_option("--dump-features", predict_args.dump_features, "Write both feature vectors as CSV");
  predict_cmd->add_option("--dump-cornerness", predict_args.dump_cornerness, "Write the cornerness map as ASCII PGM");
  predict_cmd->add_option("--dump-corners", predict_args.dump_corners, "Write detected corners as CSV");

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Stratified k-fold cross-validation");
  eval_cmd->add_option("--data", eval.data, "Dataset root")->required();
  eval_cmd->add_option("--seed", eval.seed, "Random seed");
  eval_cmd->add_option("--folds", eval.folds, "Number of folds")->check(CLI::Range(2, 100));
  eval_cmd->add_option("--epochs", eval.epochs, "Training epochs per MLP")->check(CLI::NonNegativeNumber);
  eval_cmd->add_option("--side", eval.side, "Normalized glyph side (multiple of 5)")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--theta", eval.theta, "Fixed relative-difference threshold (skips the grid search)")
      ->check(CLI::Range(0.0, 1.0));
  eval_cmd->add_option("--reject-floor", eval.reject_floor, "Absolute floor on the top combined score")
      ->check(CLI::Range(0.0, 1.0));
  eval_cmd->add_option("--json", eval.json, "Also write the report as JSON ('-' = stdout only)");

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic PGM corpus");
  synth_cmd->add_option("--classes", synth_args.cfg.n_classes, "Number of classes")->required();
  synth_cmd->add_option("--per-class", synth_args.cfg.n_per_class, "Samples per class")->required();
  synth_cmd->add_option("--noise", synth_args.cfg.noise, "Noise rate")->required();
  synth_cmd->add_option("--seed", synth_args.cfg.seed, "Random seed")->required();
  synth_cmd->add_option("--out", synth_args.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*train_cmd) return run_train(train);
    if (*predict_cmd) return run_predict(predict_args);
    if (*eval_cmd) return run_evaluate(eval);
    if (*synth_cmd) return run_synth(synth_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::InvariantViolation ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
