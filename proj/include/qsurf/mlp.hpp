#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qsurf/numkit.hpp"

namespace qsurf {

enum class Activation { Tanh, Relu, Linear };

std::string to_string(Activation act);
Activation activation_from_string(const std::string& name);

/// Fully connected network with a shared hidden activation and a linear
/// output layer. All parameters live in one flat buffer, layer by layer:
/// weights (out x in, row-major) followed by biases.
class Mlp {
 public:
  Mlp() = default;
  /// Zero-initialized network. `layer_sizes` = {input, hidden..., output}.
  Mlp(std::vector<std::size_t> layer_sizes, Activation hidden);

  /// Uniform init in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  static Mlp glorot(std::vector<std::size_t> layer_sizes, Activation hidden, Rng& rng);

  const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
  Activation hidden_activation() const { return hidden_; }
  std::size_t input_size() const { return sizes_.front(); }
  std::size_t output_size() const { return sizes_.back(); }
  std::size_t layer_count() const { return sizes_.size() - 1; }
  std::size_t max_width() const;

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  std::size_t parameter_count() const { return params_.size(); }

  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + sizes_[layer] * sizes_[layer + 1];
  }
  /// 1 for weight entries, 0 for biases; indexed like parameters().
  const std::vector<std::uint8_t>& weight_mask() const { return weight_mask_; }

  std::vector<double> forward(std::span<const double> input) const;

 private:
  std::vector<std::size_t> sizes_;
  Activation hidden_ = Activation::Tanh;
  std::vector<double> params_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint8_t> weight_mask_;
};

/// Per-sample activations cached by forward_cached for backward_accumulate.
struct MlpWorkspace {
  std::vector<std::vector<double>> activations;  // [0] is the input
  std::vector<double> delta;
  std::vector<double> delta_prev;

  explicit MlpWorkspace(const Mlp& net = Mlp());
};

std::span<const double> forward_cached(const Mlp& net, std::span<const double> input, MlpWorkspace& ws);

/// Adds d(loss)/d(params) to `grad` given d(loss)/d(output) for the input
/// last passed through forward_cached on the same workspace.
void backward_accumulate(const Mlp& net, MlpWorkspace& ws, std::span<const double> output_grad,
                         std::span<double> grad);

/// lambda * sum(w^2) over weights (biases excluded); adds 2*lambda*w to grad.
double add_l2_penalty(const Mlp& net, double lambda, std::span<double> grad);
double l2_penalty(const Mlp& net, double lambda);

}  // namespace qsurf
