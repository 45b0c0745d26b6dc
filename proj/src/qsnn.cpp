#include "qsurf/qsnn.hpp"

#include <algorithm>
#include <cmath>

#include "qsurf/error.hpp"
#include "qsurf/kernels.hpp"

namespace qsurf {

double pinball_loss(double observation, double predicted, double tau) {
  const double diff = predicted - observation;
  return diff >= 0.0 ? (1.0 - tau) * diff : tau * -diff;
}

double pinball_slope(double observation, double predicted, double tau) {
  return predicted - observation >= 0.0 ? 1.0 - tau : -tau;
}

void validate_levels(std::span<const double> levels) {
  if (levels.empty()) fail(ErrorKind::InvalidParameter, "at least one quantile level is required");
  for (std::size_t l = 0; l < levels.size(); ++l) {
    if (!(levels[l] > 0.0 && levels[l] < 1.0)) fail(ErrorKind::InvalidParameter, "quantile levels must lie in (0,1)");
    if (l > 0 && !(levels[l] > levels[l - 1])) fail(ErrorKind::InvalidParameter, "quantile levels must ascend");
  }
}

QsnnModel::QsnnModel(Mlp net, std::vector<double> levels, std::size_t direction_dim, std::size_t feature_dim)
    : net_(std::move(net)), levels_(std::move(levels)), direction_dim_(direction_dim), feature_dim_(feature_dim) {
  validate_levels(levels_);
  if (net_.output_size() != levels_.size()) fail(ErrorKind::InvalidParameter, "one output head per level required");
  if (net_.input_size() != direction_dim_ + feature_dim_) {
    fail(ErrorKind::InvalidParameter, "network input must be direction plus features");
  }
}

std::vector<double> QsnnModel::raw_outputs(std::span<const double> direction,
                                           std::span<const double> features) const {
  if (direction.size() != direction_dim_ || features.size() != feature_dim_) {
    fail(ErrorKind::DimensionMismatch, "QSNN input dimensions");
  }
  std::vector<double> input(direction.begin(), direction.end());
  input.insert(input.end(), features.begin(), features.end());
  return net_.forward(input);
}

void QsnnModel::radii(std::span<const double> direction, std::span<const double> features,
                      std::span<double> out) const {
  const auto raw = raw_outputs(direction, features);
  if (out.size() != raw.size()) fail(ErrorKind::DimensionMismatch, "radius buffer size");
  for (std::size_t l = 0; l < raw.size(); ++l) out[l] = std::max(raw[l], 0.0);
  std::sort(out.begin(), out.end());
}

QsnnTrainingSet build_qsnn_training_set(const Dataset& data, const PointModel& point_model) {
  QsnnTrainingSet set;
  set.input_dim = data.target_dim + data.feature_dim;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto features = data.feature(i);
    const auto point = point_model.predict(features);
    const auto adjusted = forecast_adjust(data.target(i), point);
    if (norm(adjusted) == 0.0) {
      ++set.skipped_zero_length;
      continue;
    }
    const auto obs = decompose(adjusted);
    set.inputs.insert(set.inputs.end(), obs.direction.begin(), obs.direction.end());
    set.inputs.insert(set.inputs.end(), features.begin(), features.end());
    set.lengths.push_back(obs.length);
    set.source_rows.push_back(i);
  }
  return set;
}

namespace {

struct PinballHeads {
  std::span<const double> lengths;
  std::span<const double> levels;

  double operator()(std::size_t i, std::span<const double> out, std::span<double> out_grad) const {
    const double o = lengths[i];
    double loss = 0.0;
    for (std::size_t l = 0; l < out.size(); ++l) {
      loss += pinball_loss(o, out[l], levels[l]);
      out_grad[l] = pinball_slope(o, out[l], levels[l]);
    }
    return loss;
  }
};

}  // namespace

double qsnn_objective(const Mlp& net, const QsnnTrainingSet& set, std::span<const double> levels, double l2,
                      std::span<double> grad) {
  if (net.output_size() != levels.size()) fail(ErrorKind::DimensionMismatch, "heads and levels differ");
  const PinballHeads heads{set.lengths, levels};
  if (grad.empty()) {
    MlpWorkspace ws(net);
    std::vector<double> scratch(levels.size());
    double total = 0.0;
    const auto batch = set.batch();
    for (std::size_t i = 0; i < set.size(); ++i) total += heads(i, forward_cached(net, batch.row(i), ws), scratch);
    return total + l2_penalty(net, l2);
  }
  const double loss = kernels::batch_loss_gradient_reference(net, set.batch(), heads, grad);
  return loss + add_l2_penalty(net, l2, grad);
}

QsnnModel train_qsnn(const Dataset& data, const PointModel& point_model, const std::vector<double>& levels,
                     const QsnnArchitecture& architecture, const TrainConfig& config, TrainingLog* log) {
  validate_levels(levels);
  if (data.empty()) fail(ErrorKind::EmptyDataset, "QSNN training data is empty");
  const QsnnTrainingSet set = build_qsnn_training_set(data, point_model);
  if (set.size() == 0) fail(ErrorKind::NoTrainableDirections, "every observation coincides with its point estimate");

  std::vector<std::size_t> sizes{set.input_dim};
  sizes.insert(sizes.end(), architecture.hidden.begin(), architecture.hidden.end());
  sizes.push_back(levels.size());
  Rng rng(mix_seed(config.seed, 0x5153'4E4EULL));
  Mlp net = Mlp::glorot(sizes, architecture.activation, rng);

  optimize(net, set.batch(), PinballHeads{set.lengths, levels}, config, log);
  return QsnnModel(std::move(net), levels, data.target_dim, data.feature_dim);
}

QuantileSurfaceForecast predict_surface(const QsnnModel& model, std::span<const double> point_estimate,
                                        std::span<const double> features, const std::vector<Vec>& directions) {
  return make_surface(model, point_estimate, features, directions);
}

double predict_radius(const QsnnModel& model, std::span<const double> direction, std::span<const double> features,
                      std::size_t level_index) {
  if (level_index >= model.levels().size()) fail(ErrorKind::InvalidParameter, "level index out of range");
  return model.radii(direction, features)[level_index];
}

}  // namespace qsurf
