#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "qsurf/adam.hpp"
#include "qsurf/error.hpp"
#include "qsurf/kernels.hpp"
#include "qsurf/mlp.hpp"
#include "qsurf/numkit.hpp"

namespace qsurf {

struct TrainConfig {
  int epochs = 50000;
  double learning_rate = 0.1;
  double l2 = 0.3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t batch_size = 0;  // 0 selects full-batch gradients
  std::uint64_t seed = 0;

  void validate() const {
    if (epochs < 1) fail(ErrorKind::InvalidParameter, "epochs must be >= 1");
    if (!(learning_rate > 0.0)) fail(ErrorKind::InvalidParameter, "learning rate must be positive");
    if (!(l2 >= 0.0)) fail(ErrorKind::InvalidParameter, "L2 coefficient must be nonnegative");
  }

  AdamConfig adam() const { return {learning_rate, beta1, beta2, epsilon}; }
};

/// Objective value recorded once per epoch.
struct TrainingLog {
  std::vector<double> objective;
};

/// Minimizes sum_i loss_i(net(x_i)) + l2 * sum(w^2) with Adam. In mini-batch
/// mode each step uses the batch sum rescaled by rows / batch size.
template <class LossFn>
void optimize(Mlp& net, const kernels::BatchView& batch, LossFn&& loss_fn, const TrainConfig& config,
              TrainingLog* log = nullptr) {
  config.validate();
  if (batch.rows == 0) fail(ErrorKind::EmptyDataset, "no training rows");
  Adam adam(net.parameter_count(), config.adam());
  std::vector<double> grad(net.parameter_count());
  if (log) log->objective.reserve(log->objective.size() + static_cast<std::size_t>(config.epochs));

  const bool full_batch = config.batch_size == 0 || config.batch_size >= batch.rows;
  if (full_batch) {
    kernels::BatchGradient kernel(net, batch.rows);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      double objective = kernel(net, batch, loss_fn, grad);
      objective += add_l2_penalty(net, config.l2, grad);
      if (!std::isfinite(objective)) {
        fail(ErrorKind::Divergence, "non-finite objective at epoch " + std::to_string(epoch));
      }
      if (log) log->objective.push_back(objective);
      adam.step(net.parameters(), grad);
    }
    return;
  }

  Rng shuffle_rng(mix_seed(config.seed, 0x5348'5546ULL));
  std::vector<std::size_t> order(batch.rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> rows_buf;
  std::map<std::size_t, kernels::BatchGradient> kernels_by_size;
  const double rescale_base = static_cast<double>(batch.rows);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(shuffle_rng.next_u64() % i);
      std::swap(order[i - 1], order[j]);
    }
    double objective = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t size = std::min(config.batch_size, order.size() - begin);
      rows_buf.resize(size * batch.cols);
      for (std::size_t r = 0; r < size; ++r) {
        const auto src = batch.row(order[begin + r]);
        std::copy(src.begin(), src.end(), rows_buf.begin() + static_cast<std::ptrdiff_t>(r * batch.cols));
      }
      auto it = kernels_by_size.find(size);
      if (it == kernels_by_size.end()) it = kernels_by_size.emplace(size, kernels::BatchGradient(net, size)).first;
      const kernels::BatchView sub{rows_buf, size, batch.cols};
      const std::size_t offset = begin;
      auto mapped = [&](std::size_t i, std::span<const double> out, std::span<double> out_grad) {
        return loss_fn(order[offset + i], out, out_grad);
      };
      const double scale = rescale_base / static_cast<double>(size);
      double loss = it->second(net, sub, mapped, grad);
      for (double& g : grad) g *= scale;
      loss = loss * scale + add_l2_penalty(net, config.l2, grad);
      if (!std::isfinite(loss)) fail(ErrorKind::Divergence, "non-finite objective at epoch " + std::to_string(epoch));
      objective += loss * static_cast<double>(size) / rescale_base;
      adam.step(net.parameters(), grad);
    }
    if (log) log->objective.push_back(objective);
  }
}

}  // namespace qsurf
