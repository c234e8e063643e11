// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "twostage/twostage.hpp"

using namespace twostage;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s  %2d  %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), seconds_since(t0));
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

template <typename T>
Grid<T> rotate90(const Grid<T>& g) {
  Grid<T> out(g.height(), g.width());
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x) out.at(g.width() - 1 - x, y) = g.at(y, x);
  return out;
}

struct Corpus {
  std::vector<std::string> labels;
  std::vector<PreparedSample> samples;
};

Corpus synthetic_corpus() {
  const synth::SynthConfig sc{10, 100, 0.05, 42};
  Corpus c;
  for (int i = 0; i < sc.n_classes; ++i) c.labels.push_back(synth::class_name(static_cast<std::size_t>(i)));
  int index = 0;
  for (const auto& s : synth::generate(sc))
    c.samples.push_back(prepare(s.image, index++ / sc.n_per_class, kDefaultSide, {}));
  return c;
}

}  // namespace

int main() {
  Corpus corpus;
  std::string first_report_json;

  report(1, "synthetic 10x100 corpus, 3-fold accuracy >= 0.90 in < 600 s", [&] {
    const auto t0 = Clock::now();
    corpus = synthetic_corpus();
    const auto r = evaluate(corpus.samples, corpus.labels, PipelineConfig{}, 3);
    first_report_json = to_json(r).dump();
    const double elapsed = seconds_since(t0);
    return Outcome{r.overall_accuracy >= 0.90 && elapsed < 600.0,
                   fmt("accuracy %.4f (stage-1 %.4f), %.1f s", r.overall_accuracy, r.stage1_accuracy, elapsed)};
  });

  report(2, "fusion weights for accuracies 0.7333 / 0.6810", [] {
    const double p[] = {0.7333, 0.6810};
    const auto w = fusion_weights(p);
    const bool ok = std::abs(w[0] - 0.51849) <= 1e-4 && std::abs(w[1] - 0.48151) <= 1e-4;
    return Outcome{ok, fmt("(%.5f, %.5f)", w[0], w[1])};
  });

  report(3, "gradient check on 20 + 20 random models, max rel. error < 1e-4", [] {
    Rng rng(2024);
    double worst = 0.0;
    for (const auto& [n_in, n_hidden] : {std::pair{24, 30}, std::pair{200, 70}})
      for (int i = 0; i < 20; ++i) {
        const auto m = mlp::init(n_in, n_hidden, 49, rng.next());
        std::vector<double> x(static_cast<std::size_t>(n_in));
        for (auto& v : x) v = rng.uniform();
        worst = std::max(worst, mlp::gradient_check(m, x, static_cast<int>(rng.below(49))));
      }
    return Outcome{worst < 1e-4, fmt("max relative error %.3g", worst)};
  });

  report(4, "edit distance vs. recursion (len <= 6) and metric axioms (len <= 4) in < 60 s", [] {
    const auto t0 = Clock::now();
    const auto all6 = oracles::all_strings(3, 6);
    std::size_t mismatches = 0, pairs = 0;
    for (const auto& a : all6)
      for (const auto& b : all6) {
        ++pairs;
        mismatches += edit_distance(a, b) != static_cast<std::size_t>(oracles::naive_edit_distance(a, b));
      }
    const auto all4 = oracles::all_strings(3, 4);
    std::vector<std::size_t> d(all4.size() * all4.size());
    for (std::size_t i = 0; i < all4.size(); ++i)
      for (std::size_t j = 0; j < all4.size(); ++j) d[i * all4.size() + j] = edit_distance(all4[i], all4[j]);
    std::size_t violations = 0;
    const std::size_t n = all4.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        violations += (d[i * n + j] == 0) != (i == j);
        violations += d[i * n + j] != d[j * n + i];
        for (std::size_t k = 0; k < n; ++k) violations += d[i * n + k] > d[i * n + j] + d[j * n + k];
      }
    const double elapsed = seconds_since(t0);
    return Outcome{mismatches == 0 && violations == 0 && elapsed < 60.0,
                   std::to_string(pairs) + " pairs, " + std::to_string(mismatches) + " mismatches, " +
                       std::to_string(violations) + " axiom violations"};
  });

  report(5, "20x20 square on 60x60 canvas gives exactly 4 corners", [] {
    RealMap img(60, 60);
    for (int y = 20; y < 40; ++y)
      for (int x = 20; x < 40; ++x) img.at(y, x) = 1.0;
    const auto corners = detect_corners(cornerness_map(img));
    bool near_all = corners.size() == 4;
    for (const auto& t : {CornerPoint{20, 20}, CornerPoint{39, 20}, CornerPoint{20, 39}, CornerPoint{39, 39}}) {
      bool near = false;
      for (const auto& c : corners) near = near || (std::abs(c.x - t.x) <= 2 && std::abs(c.y - t.y) <= 2);
      near_all = near_all && near;
    }
    const auto s = corner_string(corners, 60);
    int ones = 0;
    for (int v : s.counts) ones += v == 1;
    std::string where;
    for (const auto& c : corners) where += " (" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
    return Outcome{near_all && ones == 4 && s.total() == 4, std::to_string(corners.size()) + " corners:" + where};
  });

  report(6, "cornerness map commutes with 90-degree rotation on 50 glyphs", [] {
    Rng rng(6);
    const auto& shapes = synth::base_shapes();
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const auto img = synth::render(shapes[rng.below(shapes.size())], 0.05, rng);
      const auto g = to_real(normalize(img));
      const auto a = cornerness_map(rotate90(g));
      const auto b = rotate90(cornerness_map(g));
      for (int y = kCornerBorder; y < a.height() - kCornerBorder; ++y)
        for (int x = kCornerBorder; x < a.width() - kCornerBorder; ++x)
          worst = std::max(worst, std::abs(a.at(y, x) - b.at(y, x)));
    }
    return Outcome{worst <= 1e-9, fmt("max abs difference %.3g", worst)};
  });

  report(7, "feature contracts on every corpus sample; 2x2 block chain", [&] {
    if (corpus.samples.empty()) corpus = synthetic_corpus();
    std::size_t bad = 0;
    for (const auto& s : corpus.samples) {
      bool ok = s.shadow.values.size() == 24 && s.chain.values.size() == 200;
      for (const auto* v : {&s.shadow.values, &s.chain.values})
        for (double x : *v) ok = ok && x >= 0.0 && x <= 1.0;
      const double sum = std::accumulate(s.chain.values.begin(), s.chain.values.end(), 0.0);
      const bool any_move = sum > 0.0;
      ok = ok && (!any_move || std::abs(sum - 1.0) < 1e-9);
      bad += !ok;
    }
    BinaryRaster block(2, 2, 1);
    const auto chains = trace_chain(block);
    const bool chain_ok = chains.size() == 1 && chains[0].codes == std::vector<std::uint8_t>{0, 6, 4, 2};
    return Outcome{bad == 0 && chain_ok, std::to_string(corpus.samples.size()) + " samples, " + std::to_string(bad) +
                                             " violations; 2x2 chain " + (chain_ok ? "[0,6,4,2]" : "wrong")};
  });

  report(8, "XOR with a 2-4-1 MLP (lr 0.8, momentum 0.7) reaches SSE < 0.05", [] {
    const std::vector<TargetedVector> data{{{0, 0}, {0}}, {{0, 1}, {1}}, {{1, 0}, {1}}, {{1, 1}, {0}}};
    TrainConfig cfg;
    cfg.epochs = 10000;
    const auto r = mlp::train(mlp::init(2, 4, 1, 1), std::span<const TargetedVector>(data), cfg);
    double sse = 0.0;
    for (const auto& s : data) sse += std::pow(mlp::forward(r.model, s.x)[0] - s.target[0], 2);
    return Outcome{sse < 0.05, fmt("SSE %.5f after %.0f epochs", sse, cfg.epochs)};
  });

  report(9, "identical seeds give identical reports; bundle round trip keeps predictions", [&] {
    if (corpus.samples.empty()) corpus = synthetic_corpus();
    if (first_report_json.empty())
      first_report_json = to_json(evaluate(corpus.samples, corpus.labels, PipelineConfig{}, 3)).dump();
    const auto second = to_json(evaluate(corpus.samples, corpus.labels, PipelineConfig{}, 3)).dump();
    const bool same_report = second == first_report_json;

    std::vector<int> labels;
    for (const auto& s : corpus.samples) labels.push_back(s.label);
    const auto split = stratified_split(labels, 10, 0.65, 99);
    std::vector<PreparedSample> train;
    for (auto i : split.train) train.push_back(corpus.samples[i]);
    const auto bundle = train_bundle(train, corpus.labels, PipelineConfig{});
    const auto loaded = deserialize(serialize(bundle));
    std::size_t differ = 0;
    for (auto i : split.validation) {
      const auto a = predict_prepared(bundle, corpus.samples[i]);
      const auto b = predict_prepared(loaded, corpus.samples[i]);
      differ += a.label != b.label || a.trace.combined != b.trace.combined;
    }
    return Outcome{same_report && differ == 0 && loaded == bundle,
                   std::string("reports ") + (same_report ? "identical" : "differ") + ", " +
                       std::to_string(differ) + " of " + std::to_string(split.validation.size()) +
                       " test predictions changed after reload"};
  });

  report(10, "theta = 0 and rejection floor 0 reduce to stage-1 accuracy", [&] {
    if (corpus.samples.empty()) corpus = synthetic_corpus();
    PipelineConfig cfg;
    cfg.fixed_theta = 0.0;
    cfg.reject_floor = 0.0;
    const auto r = evaluate(corpus.samples, corpus.labels, cfg, 3);
    return Outcome{r.overall_accuracy == r.stage1_accuracy && r.confused + r.rejected == 0,
                   fmt("two-stage %.4f, stage-1 %.4f, stage-2 samples %.0f", r.overall_accuracy, r.stage1_accuracy,
                       static_cast<double>(r.confused + r.rejected))};
  });

  std::printf("%s: %d of 10 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
