#include "qsurf/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "qsurf/error.hpp"

namespace qsurf {

std::string to_string(Activation act) {
  switch (act) {
    case Activation::Tanh: return "tanh";
    case Activation::Relu: return "relu";
    case Activation::Linear: return "linear";
  }
  return "unknown";
}

Activation activation_from_string(const std::string& name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "relu") return Activation::Relu;
  if (name == "linear") return Activation::Linear;
  fail(ErrorKind::InvalidParameter, "unknown activation '" + name + "'");
}

Mlp::Mlp(std::vector<std::size_t> layer_sizes, Activation hidden) : sizes_(std::move(layer_sizes)), hidden_(hidden) {
  if (sizes_.size() < 2) fail(ErrorKind::InvalidParameter, "network needs at least input and output layers");
  for (std::size_t s : sizes_) {
    if (s == 0) fail(ErrorKind::InvalidParameter, "layer sizes must be positive");
  }
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(total);
    const std::size_t weights = sizes_[l] * sizes_[l + 1];
    weight_mask_.insert(weight_mask_.end(), weights, 1);
    weight_mask_.insert(weight_mask_.end(), sizes_[l + 1], 0);
    total += weights + sizes_[l + 1];
  }
  params_.assign(total, 0.0);
}

Mlp Mlp::glorot(std::vector<std::size_t> layer_sizes, Activation hidden, Rng& rng) {
  Mlp net(std::move(layer_sizes), hidden);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const double fan_in = static_cast<double>(net.sizes_[l]);
    const double fan_out = static_cast<double>(net.sizes_[l + 1]);
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    const std::size_t begin = net.weight_offset(l);
    const std::size_t end = net.bias_offset(l);
    for (std::size_t p = begin; p < end; ++p) net.params_[p] = sample_uniform(rng, -limit, limit);
  }
  return net;
}

std::size_t Mlp::max_width() const { return *std::max_element(sizes_.begin(), sizes_.end()); }

std::vector<double> Mlp::forward(std::span<const double> input) const {
  MlpWorkspace ws(*this);
  const auto out = forward_cached(*this, input, ws);
  return {out.begin(), out.end()};
}

MlpWorkspace::MlpWorkspace(const Mlp& net) {
  for (std::size_t s : net.layer_sizes()) activations.emplace_back(s, 0.0);
  const std::size_t width = net.layer_sizes().empty() ? 0 : net.max_width();
  delta.resize(width);
  delta_prev.resize(width);
}

namespace {

inline double activate(Activation act, double z) {
  switch (act) {
    case Activation::Tanh: return std::tanh(z);
    case Activation::Relu: return z > 0.0 ? z : 0.0;
    case Activation::Linear: return z;
  }
  return z;
}

// Derivative expressed through the activation output.
inline double activate_slope(Activation act, double a) {
  switch (act) {
    case Activation::Tanh: return 1.0 - a * a;
    case Activation::Relu: return a > 0.0 ? 1.0 : 0.0;
    case Activation::Linear: return 1.0;
  }
  return 1.0;
}

}  // namespace

std::span<const double> forward_cached(const Mlp& net, std::span<const double> input, MlpWorkspace& ws) {
  const auto& sizes = net.layer_sizes();
  if (input.size() != sizes.front()) {
    fail(ErrorKind::DimensionMismatch, "network expects " + std::to_string(sizes.front()) + " inputs, got " +
                                           std::to_string(input.size()));
  }
  std::copy(input.begin(), input.end(), ws.activations[0].begin());
  const auto params = net.parameters();
  const std::size_t layers = net.layer_count();
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = sizes[l];
    const std::size_t out = sizes[l + 1];
    const double* w = params.data() + net.weight_offset(l);
    const double* b = params.data() + net.bias_offset(l);
    const double* a = ws.activations[l].data();
    double* next = ws.activations[l + 1].data();
    const Activation act = (l + 1 == layers) ? Activation::Linear : net.hidden_activation();
    for (std::size_t o = 0; o < out; ++o) {
      double z = b[o];
      const double* row = w + o * in;
      for (std::size_t i = 0; i < in; ++i) z += row[i] * a[i];
      next[o] = activate(act, z);
    }
  }
  return ws.activations.back();
}

void backward_accumulate(const Mlp& net, MlpWorkspace& ws, std::span<const double> output_grad,
                         std::span<double> grad) {
  const auto& sizes = net.layer_sizes();
  if (output_grad.size() != sizes.back()) fail(ErrorKind::DimensionMismatch, "output gradient size mismatch");
  if (grad.size() != net.parameter_count()) fail(ErrorKind::DimensionMismatch, "gradient buffer size mismatch");
  const auto params = net.parameters();
  std::copy(output_grad.begin(), output_grad.end(), ws.delta.begin());
  for (std::size_t l = net.layer_count(); l-- > 0;) {
    const std::size_t in = sizes[l];
    const std::size_t out = sizes[l + 1];
    const double* a = ws.activations[l].data();
    const double* w = params.data() + net.weight_offset(l);
    double* gw = grad.data() + net.weight_offset(l);
    double* gb = grad.data() + net.bias_offset(l);
    const double* delta = ws.delta.data();
    for (std::size_t o = 0; o < out; ++o) {
      const double d = delta[o];
      gb[o] += d;
      double* grow = gw + o * in;
      for (std::size_t i = 0; i < in; ++i) grow[i] += d * a[i];
    }
    if (l == 0) break;
    double* prev = ws.delta_prev.data();
    for (std::size_t i = 0; i < in; ++i) prev[i] = 0.0;
    for (std::size_t o = 0; o < out; ++o) {
      const double d = delta[o];
      const double* row = w + o * in;
      for (std::size_t i = 0; i < in; ++i) prev[i] += row[i] * d;
    }
    for (std::size_t i = 0; i < in; ++i) prev[i] *= activate_slope(net.hidden_activation(), a[i]);
    std::swap(ws.delta, ws.delta_prev);
  }
}

double l2_penalty(const Mlp& net, double lambda) {
  if (lambda == 0.0) return 0.0;
  const auto params = net.parameters();
  const auto& mask = net.weight_mask();
  double sum = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    if (mask[p]) sum += params[p] * params[p];
  }
  return lambda * sum;
}

double add_l2_penalty(const Mlp& net, double lambda, std::span<double> grad) {
  if (lambda == 0.0) return 0.0;
  const auto params = net.parameters();
  const auto& mask = net.weight_mask();
  double sum = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    if (!mask[p]) continue;
    sum += params[p] * params[p];
    grad[p] += 2.0 * lambda * params[p];
  }
  return lambda * sum;
}

}  // namespace qsurf
