#pragma once

// The trained two-stage recognizer and its on-disk form.
//
// Layout (integers u32 little-endian, reals f64 little-endian, strings u32
// length + UTF-8 bytes):
//   "TSGB" magic, u8 format version
//   label table:      u32 count, count strings
//   preprocessing:    u32 glyph side
//   shadow MLP:       embedded model record ("TSG1" ...)
//   chain-code MLP:   embedded model record
//   fusion weights:   u32 count, count reals
//   theta:            real
//   rejection floor:  real
//   voting extras:    real k_of_d, u8 relative-difference strategy
//   corner config:    real k, real t_rel, u32 nms radius, 25 reals window
//   template store:   u32 count, per entry: label string, 25 bytes of counts

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "twostage/binary_io.hpp"
#include "twostage/corners.hpp"
#include "twostage/editdist.hpp"
#include "twostage/ensemble.hpp"
#include "twostage/error.hpp"
#include "twostage/mlp.hpp"
#include "twostage/preprocess.hpp"

namespace twostage {

inline constexpr std::uint8_t kBundleVersion = 1;

struct ModelBundle {
  std::vector<std::string> labels;  // index -> label, lexicographic
  int side = kDefaultSide;
  MlpModel shadow_mlp;
  MlpModel chain_mlp;
  VotingConfig voting;
  CornerConfig corners;
  TemplateStore templates;
  std::uint8_t version = kBundleVersion;

  friend bool operator==(const ModelBundle&, const ModelBundle&) = default;
};

inline void check_bundle(const ModelBundle& b) {
  const auto n = static_cast<int>(b.labels.size());
  if (b.shadow_mlp.n_out != n || b.chain_mlp.n_out != n)
    fail(ErrorCode::InvariantViolation, "classifier outputs do not match the label table");
  if (b.shadow_mlp.n_in != 24 || b.chain_mlp.n_in != 200)
    fail(ErrorCode::InvariantViolation, "classifier inputs must be 24 (shadow) and 200 (chain code)");
  double sum = 0.0;
  for (double w : b.voting.weights) sum += w;
  if (b.voting.weights.size() != 2 || std::abs(sum - 1.0) > 1e-9)
    fail(ErrorCode::InvariantViolation, "fusion weights must be two values summing to 1");
  for (const auto& t : b.templates.entries())
    if (t.label < 0 || t.label >= n) fail(ErrorCode::InvariantViolation, "template label outside the label table");
}

inline std::string serialize(const ModelBundle& b) {
  check_bundle(b);
  io::ByteWriter w;
  w.bytes("TSGB");
  w.u8(b.version);
  w.u32(static_cast<std::uint32_t>(b.labels.size()));
  for (const auto& l : b.labels) w.str(l);
  w.u32(static_cast<std::uint32_t>(b.side));
  mlp::write_model(w, b.shadow_mlp);
  mlp::write_model(w, b.chain_mlp);
  w.u32(static_cast<std::uint32_t>(b.voting.weights.size()));
  w.f64s(b.voting.weights);
  w.f64(b.voting.theta);
  w.f64(b.voting.reject_floor);
  w.f64(b.voting.k_of_d);
  w.u8(static_cast<std::uint8_t>(b.voting.strategy));
  w.f64(b.corners.k);
  w.f64(b.corners.t_rel);
  w.u32(static_cast<std::uint32_t>(b.corners.nms_radius));
  w.f64s(b.corners.gaussian);
  w.u32(static_cast<std::uint32_t>(b.templates.size()));
  for (const auto& t : b.templates.entries()) {
    w.str(b.labels[static_cast<std::size_t>(t.label)]);
    for (int c : t.corners.counts) {
      if (c < 0 || c > 255) fail(ErrorCode::ValueOutOfRange, "corner count " + std::to_string(c) + " does not fit a byte");
      w.u8(static_cast<std::uint8_t>(c));
    }
  }
  return w.take();
}

inline ModelBundle deserialize(std::string_view bytes) {
  io::ByteReader r(bytes);
  if (bytes.size() < 4 || r.bytes(4) != "TSGB") fail(ErrorCode::BadMagic, "not a model bundle");
  ModelBundle b;
  b.version = r.u8();
  if (b.version != kBundleVersion)
    fail(ErrorCode::VersionMismatch, "bundle version " + std::to_string(b.version) + " is not supported");
  const auto n_labels = r.u32();
  if (n_labels > r.remaining()) fail(ErrorCode::TruncatedFile, "label table larger than file");
  std::unordered_map<std::string, int> label_index;
  for (std::uint32_t i = 0; i < n_labels; ++i) {
    b.labels.push_back(r.str());
    label_index.emplace(b.labels.back(), static_cast<int>(i));
  }
  b.side = static_cast<int>(r.u32());
  if (b.side < 5 || b.side % 5 != 0 || b.side > 4000) fail(ErrorCode::BadFormat, "invalid glyph side in bundle");
  b.shadow_mlp = mlp::read_model(r);
  b.chain_mlp = mlp::read_model(r);
  const auto n_weights = r.u32();
  if (n_weights > r.remaining() / 8) fail(ErrorCode::TruncatedFile, "fusion weights truncated");
  b.voting.weights.resize(n_weights);
  r.f64s(b.voting.weights);
  b.voting.theta = r.f64();
  b.voting.reject_floor = r.f64();
  b.voting.k_of_d = r.f64();
  const auto strategy = r.u8();
  if (strategy > 1) fail(ErrorCode::BadFormat, "unknown relative-difference strategy");
  b.voting.strategy = static_cast<RelDiffStrategy>(strategy);
  b.corners.k = r.f64();
  b.corners.t_rel = r.f64();
  b.corners.nms_radius = static_cast<int>(r.u32());
  r.f64s(b.corners.gaussian);
  const auto n_templates = r.u32();
  if (n_templates > r.remaining()) fail(ErrorCode::TruncatedFile, "template store larger than file");
  std::vector<Template> entries;
  entries.reserve(n_templates);
  for (std::uint32_t i = 0; i < n_templates; ++i) {
    Template t;
    const auto label = r.str();
    auto it = label_index.find(label);
    if (it == label_index.end()) fail(ErrorCode::BadFormat, "template label '" + label + "' not in label table");
    t.label = it->second;
    for (auto& c : t.corners.counts) c = r.u8();
    entries.push_back(t);
  }
  b.templates = TemplateStore(std::move(entries));
  if (!r.at_end()) fail(ErrorCode::BadFormat, "trailing bytes after bundle");
  try {
    check_bundle(b);
  } catch (const Error& e) {
    fail(ErrorCode::BadFormat, e.detail());
  }
  return b;
}

inline void save_bundle(const ModelBundle& b, const std::filesystem::path& path) { io::write_file(path, serialize(b)); }

inline ModelBundle load_bundle(const std::filesystem::path& path) {
  try {
    return deserialize(io::read_file(path));
  } catch (const Error& e) {
    throw e.with_context(path.string());
  }
}

}  // namespace twostage
