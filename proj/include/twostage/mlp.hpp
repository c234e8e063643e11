#pragma once

// Three-layer sigmoid perceptron trained by online backpropagation with
// momentum on the summed squared error E = sum_c (out_c - target_c)^2.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "twostage/binary_io.hpp"
#include "twostage/error.hpp"
#include "twostage/rng.hpp"

namespace twostage {

using ClassScores = std::vector<double>;

struct TrainMeta {
  double learning_rate = 0.0;
  double momentum = 0.0;
  int epochs = 0;
  std::uint64_t seed = 0;
  double validation_accuracy = 0.0;

  friend bool operator==(const TrainMeta&, const TrainMeta&) = default;
};

struct MlpModel {
  int n_in = 0;
  int n_hidden = 0;
  int n_out = 0;
  std::vector<double> weights_ih;  // n_hidden x n_in, row-major
  std::vector<double> bias_h;
  std::vector<double> weights_ho;  // n_out x n_hidden, row-major
  std::vector<double> bias_o;
  TrainMeta meta;

  std::size_t parameter_count() const noexcept {
    return weights_ih.size() + bias_h.size() + weights_ho.size() + bias_o.size();
  }

  // Parameter k in the fixed order weights_ih, bias_h, weights_ho, bias_o.
  double& parameter(std::size_t k) {
    for (auto* v : {&weights_ih, &bias_h, &weights_ho, &bias_o}) {
      if (k < v->size()) return (*v)[k];
      k -= v->size();
    }
    fail(ErrorCode::OutOfBounds, "parameter index out of range");
  }

  friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

struct TrainConfig {
  double learning_rate = 0.8;
  double momentum = 0.7;
  int epochs = 100;
  std::uint64_t seed = 1;
  bool shuffle = true;
};

struct LabeledVector {
  std::vector<double> x;
  int label = 0;
};

// Sample with an explicit target vector of length n_out, entries in [0,1].
struct TargetedVector {
  std::vector<double> x;
  std::vector<double> target;
};

namespace mlp {

template <typename Real>
inline Real sigmoid(Real z) {
  return Real(1) / (Real(1) + std::exp(-z));
}

inline MlpModel init(int n_in, int n_hidden, int n_out, std::uint64_t seed) {
  if (n_in < 1 || n_hidden < 1 || n_out < 1) fail(ErrorCode::BadShape, "layer sizes must be >= 1");
  MlpModel m;
  m.n_in = n_in;
  m.n_hidden = n_hidden;
  m.n_out = n_out;
  Rng rng(seed);
  m.weights_ih.resize(static_cast<std::size_t>(n_hidden) * n_in);
  m.weights_ho.resize(static_cast<std::size_t>(n_out) * n_hidden);
  for (auto& w : m.weights_ih) w = rng.uniform(-0.5, 0.5);
  for (auto& w : m.weights_ho) w = rng.uniform(-0.5, 0.5);
  m.bias_h.assign(static_cast<std::size_t>(n_hidden), 0.0);
  m.bias_o.assign(static_cast<std::size_t>(n_out), 0.0);
  m.meta.seed = seed;
  return m;
}

namespace detail {

inline void check_shape(const MlpModel& m) {
  if (m.weights_ih.size() != static_cast<std::size_t>(m.n_hidden) * m.n_in ||
      m.weights_ho.size() != static_cast<std::size_t>(m.n_out) * m.n_hidden ||
      m.bias_h.size() != static_cast<std::size_t>(m.n_hidden) || m.bias_o.size() != static_cast<std::size_t>(m.n_out))
    fail(ErrorCode::ShapeMismatch, "model matrices do not match layer sizes");
}

template <typename Real>
void forward_into(const MlpModel& m, std::span<const double> x, std::vector<Real>& hidden, std::vector<Real>& out) {
  if (x.size() != static_cast<std::size_t>(m.n_in))
    fail(ErrorCode::ShapeMismatch, "input length " + std::to_string(x.size()) + " != n_in " + std::to_string(m.n_in));
  hidden.resize(static_cast<std::size_t>(m.n_hidden));
  out.resize(static_cast<std::size_t>(m.n_out));
  for (int j = 0; j < m.n_hidden; ++j) {
    const double* row = m.weights_ih.data() + static_cast<std::size_t>(j) * m.n_in;
    Real z = m.bias_h[j];
    for (int i = 0; i < m.n_in; ++i) z += Real(row[i]) * Real(x[i]);
    hidden[j] = sigmoid(z);
  }
  for (int c = 0; c < m.n_out; ++c) {
    const double* row = m.weights_ho.data() + static_cast<std::size_t>(c) * m.n_hidden;
    Real z = m.bias_o[c];
    for (int j = 0; j < m.n_hidden; ++j) z += Real(row[j]) * hidden[j];
    out[c] = sigmoid(z);
  }
}

template <typename Real>
Real squared_error(std::span<const Real> out, std::span<const double> target) {
  Real e = 0;
  for (std::size_t c = 0; c < out.size(); ++c) {
    const Real t = Real(target[c]);
    e += (out[c] - t) * (out[c] - t);
  }
  return e;
}

inline std::vector<double> one_hot(int label, int n_out) {
  std::vector<double> t(static_cast<std::size_t>(n_out), 0.0);
  t[static_cast<std::size_t>(label)] = 1.0;
  return t;
}

inline void check_label(const MlpModel& m, int label) {
  if (label < 0 || label >= m.n_out)
    fail(ErrorCode::LabelOutOfRange, "label " + std::to_string(label) + " outside [0, " + std::to_string(m.n_out) + ")");
}

// Writes dE/dparameter for one sample into grad (parameter order as
// MlpModel::parameter) and returns E.
inline double backprop(const MlpModel& m, std::span<const double> x, std::span<const double> target,
                       std::vector<double>& grad,
                       std::vector<double>& hidden, std::vector<double>& out, std::vector<double>& delta_h,
                       std::vector<double>& delta_o) {
  forward_into<double>(m, x, hidden, out);
  const std::size_t nih = m.weights_ih.size(), nh = m.bias_h.size(), nho = m.weights_ho.size();
  grad.resize(m.parameter_count());
  delta_o.resize(static_cast<std::size_t>(m.n_out));
  delta_h.assign(static_cast<std::size_t>(m.n_hidden), 0.0);

  double loss = 0.0;
  for (int c = 0; c < m.n_out; ++c) {
    const double err = out[c] - target[c];
    loss += err * err;
    delta_o[c] = 2.0 * err * out[c] * (1.0 - out[c]);
  }
  double* g_ho = grad.data() + nih + nh;
  double* g_bo = g_ho + nho;
  for (int c = 0; c < m.n_out; ++c) {
    const double* row = m.weights_ho.data() + static_cast<std::size_t>(c) * m.n_hidden;
    double* grow = g_ho + static_cast<std::size_t>(c) * m.n_hidden;
    for (int j = 0; j < m.n_hidden; ++j) {
      grow[j] = delta_o[c] * hidden[j];
      delta_h[j] += row[j] * delta_o[c];
    }
    g_bo[c] = delta_o[c];
  }
  double* g_ih = grad.data();
  double* g_bh = grad.data() + nih;
  for (int j = 0; j < m.n_hidden; ++j) {
    delta_h[j] *= hidden[j] * (1.0 - hidden[j]);
    double* grow = g_ih + static_cast<std::size_t>(j) * m.n_in;
    for (int i = 0; i < m.n_in; ++i) grow[i] = delta_h[j] * x[i];
    g_bh[j] = delta_h[j];
  }
  return loss;
}

}  // namespace detail

inline ClassScores forward(const MlpModel& m, std::span<const double> x) {
  detail::check_shape(m);
  std::vector<double> hidden, out;
  detail::forward_into<double>(m, x, hidden, out);
  return out;
}

// Summed squared error of one sample against its one-hot target.
inline double sample_loss(const MlpModel& m, std::span<const double> x, int label) {
  detail::check_label(m, label);
  auto out = forward(m, x);
  return detail::squared_error<double>(out, detail::one_hot(label, m.n_out));
}

// Fraction of samples whose argmax output equals the label.
inline double accuracy(const MlpModel& m, std::span<const LabeledVector> data) {
  if (data.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& s : data) {
    const auto out = forward(m, s.x);
    hits += static_cast<int>(std::max_element(out.begin(), out.end()) - out.begin()) == s.label;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

struct TrainResult {
  MlpModel model;
  std::vector<double> loss_history;  // summed loss per epoch
};

// Online updates: dw(t) = -lr * dE/dw + momentum * dw(t-1), applied after
// every sample. Deterministic given the data order and cfg.seed.
inline TrainResult train(MlpModel m, std::span<const TargetedVector> data, const TrainConfig& cfg) {
  detail::check_shape(m);
  if (data.empty()) fail(ErrorCode::EmptyTrainingSet, "no training samples");
  if (!(cfg.learning_rate > 0.0)) fail(ErrorCode::InvalidArgument, "learning_rate must be > 0");
  if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0)) fail(ErrorCode::InvalidArgument, "momentum must be in [0,1)");
  if (cfg.epochs < 0) fail(ErrorCode::InvalidArgument, "epochs must be >= 0");
  for (const auto& s : data) {
    if (s.x.size() != static_cast<std::size_t>(m.n_in)) fail(ErrorCode::ShapeMismatch, "training vector length != n_in");
    if (s.target.size() != static_cast<std::size_t>(m.n_out)) fail(ErrorCode::ShapeMismatch, "target length != n_out");
  }

  TrainResult result;
  result.loss_history.reserve(static_cast<std::size_t>(cfg.epochs));
  if (cfg.epochs == 0) {
    result.model = std::move(m);
    return result;
  }

  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(mix_seed(cfg.seed, 0x7261696E));

  std::vector<double> grad, velocity(m.parameter_count(), 0.0), hidden, out, delta_h, delta_o;
  std::vector<double*> params;
  params.reserve(m.parameter_count());
  for (auto* v : {&m.weights_ih, &m.bias_h, &m.weights_ho, &m.bias_o})
    for (auto& p : *v) params.push_back(&p);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t idx : order) {
      const auto& s = data[idx];
      epoch_loss += detail::backprop(m, s.x, s.target, grad, hidden, out, delta_h, delta_o);
      for (std::size_t k = 0; k < params.size(); ++k) {
        velocity[k] = -cfg.learning_rate * grad[k] + cfg.momentum * velocity[k];
        *params[k] += velocity[k];
      }
    }
    result.loss_history.push_back(epoch_loss);
  }
  if (!std::all_of(params.begin(), params.end(), [](const double* p) { return std::isfinite(*p); }))
    fail(ErrorCode::InvariantViolation, "training diverged to non-finite weights");

  m.meta.learning_rate = cfg.learning_rate;
  m.meta.momentum = cfg.momentum;
  m.meta.epochs = cfg.epochs;
  m.meta.seed = cfg.seed;
  result.model = std::move(m);
  return result;
}

// Classification training with one-hot targets.
inline TrainResult train(MlpModel m, std::span<const LabeledVector> data, const TrainConfig& cfg) {
  detail::check_shape(m);
  std::vector<TargetedVector> targeted;
  targeted.reserve(data.size());
  for (const auto& s : data) {
    detail::check_label(m, s.label);
    targeted.push_back({s.x, detail::one_hot(s.label, m.n_out)});
  }
  return train(std::move(m), std::span<const TargetedVector>(targeted), cfg);
}

inline std::vector<double> analytic_gradient(const MlpModel& m, std::span<const double> x, int label) {
  detail::check_shape(m);
  detail::check_label(m, label);
  const auto target = detail::one_hot(label, m.n_out);
  std::vector<double> grad, hidden, out, delta_h, delta_o;
  detail::backprop(m, x, target, grad, hidden, out, delta_h, delta_o);
  return grad;
}

// Max relative error between backprop gradients and central differences
// (E(w+h) - E(w-h)) / 2h over every parameter. The difference quotient is
// evaluated in long double so rounding stays far below the tolerance.
inline double gradient_check(const MlpModel& model, std::span<const double> x, int label, double h = 1e-5) {
  const auto analytic = analytic_gradient(model, x, label);
  const auto target = detail::one_hot(label, model.n_out);
  MlpModel m = model;
  std::vector<long double> hidden, out;
  auto loss_at = [&]() {
    detail::forward_into<long double>(m, x, hidden, out);
    return detail::squared_error<long double>(out, target);
  };
  double worst = 0.0;
  for (std::size_t k = 0; k < m.parameter_count(); ++k) {
    double& w = m.parameter(k);
    const double saved = w;
    w = saved + h;
    const long double up = loss_at();
    w = saved - h;
    const long double down = loss_at();
    w = saved;
    const long double step = (static_cast<long double>(saved) + h) - (static_cast<long double>(saved) - h);
    const double numeric = static_cast<double>((up - down) / step);
    const double denom = std::max({std::abs(analytic[k]), std::abs(numeric), 1e-8});
    worst = std::max(worst, std::abs(analytic[k] - numeric) / denom);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Serialization: "TSG1", u32 n_in/n_hidden/n_out, f64 weights_ih, bias_h,
// weights_ho, bias_o, then the training metadata as length-prefixed JSON.
// ---------------------------------------------------------------------------

inline void write_model(io::ByteWriter& w, const MlpModel& m) {
  detail::check_shape(m);
  w.bytes("TSG1");
  w.u32(static_cast<std::uint32_t>(m.n_in));
  w.u32(static_cast<std::uint32_t>(m.n_hidden));
  w.u32(static_cast<std::uint32_t>(m.n_out));
  w.f64s(m.weights_ih);
  w.f64s(m.bias_h);
  w.f64s(m.weights_ho);
  w.f64s(m.bias_o);
  nlohmann::ordered_json meta{{"learning_rate", m.meta.learning_rate},
                              {"momentum", m.meta.momentum},
                              {"epochs", m.meta.epochs},
                              {"seed", m.meta.seed},
                              {"validation_accuracy", m.meta.validation_accuracy}};
  w.str(meta.dump());
}

inline MlpModel read_model(io::ByteReader& r) {
  const auto magic = r.bytes(4);
  if (magic.substr(0, 3) != "TSG" || magic[3] < '0' || magic[3] > '9') fail(ErrorCode::BadMagic, "not a model file");
  if (magic[3] != '1') fail(ErrorCode::VersionMismatch, std::string("unsupported model version ") + magic[3]);
  MlpModel m;
  m.n_in = static_cast<int>(r.u32());
  m.n_hidden = static_cast<int>(r.u32());
  m.n_out = static_cast<int>(r.u32());
  constexpr std::uint32_t kMaxLayer = 1u << 16;
  if (m.n_in < 1 || m.n_hidden < 1 || m.n_out < 1 || static_cast<std::uint32_t>(m.n_in) > kMaxLayer ||
      static_cast<std::uint32_t>(m.n_hidden) > kMaxLayer || static_cast<std::uint32_t>(m.n_out) > kMaxLayer)
    fail(ErrorCode::BadShape, "implausible layer sizes in model header");
  m.weights_ih.resize(static_cast<std::size_t>(m.n_hidden) * m.n_in);
  m.bias_h.resize(static_cast<std::size_t>(m.n_hidden));
  m.weights_ho.resize(static_cast<std::size_t>(m.n_out) * m.n_hidden);
  m.bias_o.resize(static_cast<std::size_t>(m.n_out));
  r.f64s(m.weights_ih);
  r.f64s(m.bias_h);
  r.f64s(m.weights_ho);
  r.f64s(m.bias_o);
  const auto text = r.str();
  const auto meta = nlohmann::json::parse(text, nullptr, false);
  if (meta.is_discarded() || !meta.is_object()) fail(ErrorCode::BadFormat, "model metadata is not valid JSON");
  m.meta.learning_rate = meta.value("learning_rate", 0.0);
  m.meta.momentum = meta.value("momentum", 0.0);
  m.meta.epochs = meta.value("epochs", 0);
  m.meta.seed = meta.value("seed", std::uint64_t{0});
  m.meta.validation_accuracy = meta.value("validation_accuracy", 0.0);
  return m;
}

inline void save(const MlpModel& m, const std::filesystem::path& path) {
  io::ByteWriter w;
  write_model(w, m);
  io::write_file(path, w.data());
}

inline MlpModel load(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  io::ByteReader r(bytes);
  return read_model(r);
}

}  // namespace mlp
}  // namespace twostage
