#pragma once

// Batch kernels over samples. The parallel versions split the batch into
// fixed-size chunks whose partial results are reduced serially in chunk
// order, so results do not depend on the number of threads. The serial
// reference versions are kept for tests and benchmarks.

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qsurf/error.hpp"
#include "qsurf/mlp.hpp"

namespace qsurf::kernels {

inline constexpr std::size_t kDefaultChunk = 64;

/// Row-major matrix of network inputs, one sample per row.
struct BatchView {
  std::span<const double> data;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::span<const double> row(std::size_t i) const { return data.subspan(i * cols, cols); }
};

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline int thread_index() {
#ifdef _OPENMP
  return omp_get_thread_num();
#else
  return 0;
#endif
}

/// Calls fn(i) for every i in [0, n). Each index must write only its own output.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
}

/// Left-to-right sum; the reduction order every parallel kernel commits to.
inline double ordered_sum(std::span<const double> values) {
  double total = 0.0;
  for (double v : values) total += v;
  return total;
}

// LossFn signature: double(std::size_t sample, std::span<const double> output,
//                          std::span<double> output_grad)
// returns the sample's loss and writes d(loss)/d(output). Must be safe to call
// concurrently for distinct samples.

/// Serial reference: sum over samples of loss, gradient written into `grad`.
template <class LossFn>
double batch_loss_gradient_reference(const Mlp& net, const BatchView& batch, LossFn&& loss_fn,
                                     std::span<double> grad) {
  if (batch.cols != net.input_size()) fail(ErrorKind::DimensionMismatch, "batch width differs from network input");
  std::fill(grad.begin(), grad.end(), 0.0);
  MlpWorkspace ws(net);
  std::vector<double> out_grad(net.output_size());
  double total = 0.0;
  for (std::size_t i = 0; i < batch.rows; ++i) {
    const auto out = forward_cached(net, batch.row(i), ws);
    total += loss_fn(i, out, std::span<double>(out_grad));
    backward_accumulate(net, ws, out_grad, grad);
  }
  return total;
}

/// OpenMP batch loss and gradient with preallocated per-chunk buffers.
class BatchGradient {
 public:
  BatchGradient(const Mlp& net, std::size_t rows, std::size_t chunk = kDefaultChunk)
      : params_(net.parameter_count()), rows_(rows), chunk_(std::max<std::size_t>(chunk, 1)) {
    chunks_ = (rows_ + chunk_ - 1) / chunk_;
    chunk_grads_.assign(chunks_ * params_, 0.0);
    chunk_losses_.assign(chunks_, 0.0);
    ensure_threads(net);
  }

  std::size_t rows() const { return rows_; }

  template <class LossFn>
  double operator()(const Mlp& net, const BatchView& batch, LossFn&& loss_fn, std::span<double> grad) {
    if (batch.rows != rows_ || net.parameter_count() != params_) {
      fail(ErrorKind::DimensionMismatch, "batch gradient buffers were sized for a different problem");
    }
    if (batch.cols != net.input_size()) fail(ErrorKind::DimensionMismatch, "batch width differs from network input");
    ensure_threads(net);
    const auto chunks = static_cast<std::ptrdiff_t>(chunks_);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < chunks; ++c) {
      const auto t = static_cast<std::size_t>(thread_index());
      MlpWorkspace& ws = workspaces_[t];
      std::span<double> out_grad(out_grads_[t]);
      std::span<double> g(chunk_grads_.data() + static_cast<std::size_t>(c) * params_, params_);
      std::fill(g.begin(), g.end(), 0.0);
      const std::size_t begin = static_cast<std::size_t>(c) * chunk_;
      const std::size_t end = std::min(rows_, begin + chunk_);
      double loss = 0.0;
      for (std::size_t i = begin; i < end; ++i) {
        const auto out = forward_cached(net, batch.row(i), ws);
        loss += loss_fn(i, out, out_grad);
        backward_accumulate(net, ws, out_grad, g);
      }
      chunk_losses_[static_cast<std::size_t>(c)] = loss;
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t c = 0; c < chunks_; ++c) {
      const double* g = chunk_grads_.data() + c * params_;
      for (std::size_t p = 0; p < params_; ++p) grad[p] += g[p];
    }
    return ordered_sum(chunk_losses_);
  }

 private:
  void ensure_threads(const Mlp& net) {
    const auto threads = static_cast<std::size_t>(max_threads());
    while (workspaces_.size() < threads) {
      workspaces_.emplace_back(net);
      out_grads_.emplace_back(net.output_size(), 0.0);
    }
  }

  std::size_t params_;
  std::size_t rows_;
  std::size_t chunk_;
  std::size_t chunks_ = 0;
  std::vector<double> chunk_grads_;
  std::vector<double> chunk_losses_;
  std::vector<MlpWorkspace> workspaces_;
  std::vector<std::vector<double>> out_grads_;
};

}  // namespace qsurf::kernels
