#pragma once

// EvalReport and prediction-trace rendering: aligned text and JSON.

#include <cstdio>
#include <iomanip>
#include <sstream>
#include <string>

#include <json.hpp>

#include "twostage/pipeline.hpp"

namespace twostage {

inline nlohmann::ordered_json to_json(const EvalReport& r) {
  using nlohmann::ordered_json;
  auto opt = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
  ordered_json folds = ordered_json::array();
  for (const auto& f : r.folds)
    folds.push_back({{"accuracy", f.accuracy},
                     {"samples", f.samples},
                     {"theta", f.theta},
                     {"fusion_weights", f.fusion_weights},
                     {"shadow_validation_accuracy", f.shadow_accuracy},
                     {"chain_validation_accuracy", f.chain_accuracy}});
  return {{"labels", r.labels},
          {"total", r.total},
          {"overall_accuracy", r.overall_accuracy},
          {"stage1_accuracy", r.stage1_accuracy},
          {"certain_accuracy", opt(r.certain_accuracy)},
          {"stage2_accuracy", opt(r.stage2_accuracy)},
          {"counts", {{"certain", r.certain}, {"confused", r.confused}, {"rejected", r.rejected}}},
          {"reject_floor", r.reject_floor},
          {"folds", folds},
          {"confusion_matrix", r.confusion}};
}

inline std::string format_text(const EvalReport& r) {
  std::ostringstream out;
  auto pct = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%7.2f%%", 100.0 * v);
    return std::string(buf);
  };
  auto opt_pct = [&](const std::optional<double>& v) { return v ? pct(*v) : std::string("     n/a"); };
  out << "samples                 " << r.total << "\n";
  out << "overall accuracy        " << pct(r.overall_accuracy) << "\n";
  out << "stage-1 only accuracy   " << pct(r.stage1_accuracy) << "\n";
  out << "certain accuracy        " << opt_pct(r.certain_accuracy) << "  (" << r.certain << " samples)\n";
  out << "stage-2 accuracy        " << opt_pct(r.stage2_accuracy) << "  (" << r.confused << " confused, "
      << r.rejected << " rejected)\n";
  out << "rejection floor         " << r.reject_floor << "\n\n";
  out << "fold  samples  accuracy     theta   w_shadow   w_chain\n";
  for (std::size_t i = 0; i < r.folds.size(); ++i) {
    const auto& f = r.folds[i];
    char line[128];
    std::snprintf(line, sizeof line, "%4zu  %7zu  %s  %8.3f  %9.5f  %8.5f\n", i, f.samples, pct(f.accuracy).c_str(),
                  f.theta, f.fusion_weights.size() > 0 ? f.fusion_weights[0] : 0.0,
                  f.fusion_weights.size() > 1 ? f.fusion_weights[1] : 0.0);
    out << line;
  }
  out << "\nconfusion matrix (rows = true, columns = predicted)\n";
  std::size_t width = 4;
  for (const auto& l : r.labels) width = std::max(width, l.size() + 1);
  out << std::setw(static_cast<int>(width)) << "";
  for (std::size_t c = 0; c < r.labels.size(); ++c) out << std::setw(6) << c;
  out << "\n";
  for (std::size_t t = 0; t < r.labels.size(); ++t) {
    out << std::left << std::setw(static_cast<int>(width)) << r.labels[t] << std::right;
    for (auto n : r.confusion[t]) out << std::setw(6) << n;
    out << "\n";
  }
  return out.str();
}

inline nlohmann::ordered_json to_json(const ImagePrediction& p, const ModelBundle& b) {
  using nlohmann::ordered_json;
  const auto& t = p.prediction.trace;
  ordered_json candidates = ordered_json::array();
  for (const auto& c : t.decision.candidates)
    candidates.push_back({{"label", b.labels.at(static_cast<std::size_t>(c.label))}, {"score", c.score}});
  ordered_json j{{"label", p.label},
                 {"decision", to_string(t.decision.kind)},
                 {"relative_difference", t.decision.relative_difference},
                 {"theta", b.voting.theta},
                 {"candidates", candidates},
                 {"shadow_features", p.sample.shadow.values},
                 {"chain_features", p.sample.chain.values},
                 {"shadow_scores", t.shadow_scores},
                 {"chain_scores", t.chain_scores},
                 {"combined_scores", t.combined},
                 {"corner_string", p.sample.corners.counts}};
  if (t.stage2) {
    ordered_json dist = ordered_json::array();
    for (const auto& d : t.stage2->distances)
      dist.push_back({{"label", b.labels.at(static_cast<std::size_t>(d.label))},
                      {"distance", d.distance},
                      {"template", d.template_index}});
    j["edit_distances"] = dist;
  }
  return j;
}

}  // namespace twostage
