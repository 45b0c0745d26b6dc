// Serial reference vs chunked OpenMP batch gradient on a QSNN-sized problem.

#include <benchmark/benchmark.h>

#include <vector>

#include "qsurf/kernels.hpp"
#include "qsurf/qsnn.hpp"
#include "qsurf/synthdata.hpp"

namespace {

using namespace qsurf;

const std::vector<double> kLevels{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99};

struct Problem {
  QsnnTrainingSet set;
  Mlp net;
};

Problem make_problem(std::size_t n, std::size_t hidden) {
  SyntheticSpec config;
  config.kind = SyntheticKind::Cmgd;
  config.train_count = n;
  const Dataset data = generate(config, SplitKind::Train);
  Rng rng(42);
  Problem p{build_qsnn_training_set(data, PointModel::constant({0.0, 0.0})),
            Mlp::glorot({2 + data.feature_dim, hidden, kLevels.size()}, Activation::Tanh, rng)};
  return p;
}

struct Pinball {
  const QsnnTrainingSet* set;

  double operator()(std::size_t i, std::span<const double> out, std::span<double> g) const {
    double loss = 0.0;
    for (std::size_t l = 0; l < kLevels.size(); ++l) {
      loss += pinball_loss(set->lengths[i], out[l], kLevels[l]);
      g[l] = pinball_slope(set->lengths[i], out[l], kLevels[l]);
    }
    return loss;
  }
};

void BM_Reference(benchmark::State& state) {
  const Problem p = make_problem(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  std::vector<double> grad(p.net.parameter_count());
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::batch_loss_gradient_reference(p.net, p.set.batch(), Pinball{&p.set}, grad));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Parallel(benchmark::State& state) {
  const Problem p = make_problem(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  std::vector<double> grad(p.net.parameter_count());
  kernels::BatchGradient kernel(p.net, p.set.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernel(p.net, p.set.batch(), Pinball{&p.set}, grad));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Reference)->Args({1000, 10})->Args({10000, 10})->Args({10000, 50});
BENCHMARK(BM_Parallel)->Args({1000, 10})->Args({10000, 10})->Args({10000, 50});

BENCHMARK_MAIN();
