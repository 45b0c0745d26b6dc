#include "qsurf/point_model.hpp"

#include <Eigen/Dense>

#include "qsurf/error.hpp"
#include "qsurf/kernels.hpp"

namespace qsurf {

std::string to_string(PointModelKind kind) {
  switch (kind) {
    case PointModelKind::Mean: return "mean";
    case PointModelKind::Linear: return "linear";
    case PointModelKind::Mlp: return "mlp";
  }
  return "unknown";
}

PointModelKind point_model_kind_from_string(const std::string& name) {
  if (name == "mean") return PointModelKind::Mean;
  if (name == "linear") return PointModelKind::Linear;
  if (name == "mlp") return PointModelKind::Mlp;
  fail(ErrorKind::InvalidParameter, "unknown point model '" + name + "'");
}

PointModel PointModel::constant(std::vector<double> value) {
  PointModel m;
  m.kind_ = PointModelKind::Mean;
  m.target_dim_ = value.size();
  m.bias_ = std::move(value);
  return m;
}

PointModel PointModel::linear(std::size_t feature_dim, std::vector<double> weights, std::vector<double> bias) {
  if (weights.size() != feature_dim * bias.size()) fail(ErrorKind::DimensionMismatch, "linear weights shape");
  PointModel m;
  m.kind_ = PointModelKind::Linear;
  m.feature_dim_ = feature_dim;
  m.target_dim_ = bias.size();
  m.weights_ = std::move(weights);
  m.bias_ = std::move(bias);
  return m;
}

PointModel PointModel::network(Mlp net) {
  PointModel m;
  m.kind_ = PointModelKind::Mlp;
  m.feature_dim_ = net.input_size();
  m.target_dim_ = net.output_size();
  m.net_ = std::move(net);
  return m;
}

std::vector<double> PointModel::predict(std::span<const double> features) const {
  switch (kind_) {
    case PointModelKind::Mean:
      return bias_;
    case PointModelKind::Linear: {
      if (features.size() != feature_dim_) fail(ErrorKind::DimensionMismatch, "point model feature count");
      std::vector<double> out = bias_;
      for (std::size_t k = 0; k < target_dim_; ++k) {
        for (std::size_t m = 0; m < feature_dim_; ++m) out[k] += weights_[k * feature_dim_ + m] * features[m];
      }
      return out;
    }
    case PointModelKind::Mlp:
      return net_.forward(features);
  }
  return bias_;
}

namespace {

std::vector<double> sample_mean(const Dataset& data) {
  std::vector<double> mean(data.target_dim, 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto y = data.target(i);
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += y[k];
  }
  for (double& v : mean) v /= static_cast<double>(data.size());
  return mean;
}

PointModel fit_linear(const Dataset& data) {
  const auto n = static_cast<Eigen::Index>(data.size());
  const auto m = static_cast<Eigen::Index>(data.feature_dim);
  const auto k = static_cast<Eigen::Index>(data.target_dim);
  Eigen::MatrixXd design(n, m + 1);
  Eigen::MatrixXd targets(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto x = data.feature(static_cast<std::size_t>(i));
    const auto y = data.target(static_cast<std::size_t>(i));
    for (Eigen::Index j = 0; j < m; ++j) design(i, j) = x[static_cast<std::size_t>(j)];
    design(i, m) = 1.0;
    for (Eigen::Index j = 0; j < k; ++j) targets(i, j) = y[static_cast<std::size_t>(j)];
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  const Eigen::MatrixXd coef = qr.solve(targets);  // (m+1) x k
  std::vector<double> weights(static_cast<std::size_t>(k * m));
  std::vector<double> bias(static_cast<std::size_t>(k));
  for (Eigen::Index t = 0; t < k; ++t) {
    for (Eigen::Index j = 0; j < m; ++j) weights[static_cast<std::size_t>(t * m + j)] = coef(j, t);
    bias[static_cast<std::size_t>(t)] = coef(m, t);
  }
  return PointModel::linear(data.feature_dim, std::move(weights), std::move(bias));
}

PointModel fit_mlp(const Dataset& data, const PointModelConfig& config) {
  std::vector<std::size_t> sizes{data.feature_dim};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(data.target_dim);
  Rng rng(mix_seed(config.train.seed, 0x504F'494EULL));
  Mlp net = Mlp::glorot(sizes, config.activation, rng);
  const kernels::BatchView batch{data.features, data.size(), data.feature_dim};
  auto squared_error = [&](std::size_t i, std::span<const double> out, std::span<double> out_grad) {
    const auto y = data.target(i);
    double loss = 0.0;
    for (std::size_t k = 0; k < out.size(); ++k) {
      const double r = out[k] - y[k];
      loss += r * r;
      out_grad[k] = 2.0 * r;
    }
    return loss;
  };
  optimize(net, batch, squared_error, config.train);
  return PointModel::network(std::move(net));
}

}  // namespace

PointModel fit_point_model(const Dataset& data, const PointModelConfig& config) {
  if (data.empty()) fail(ErrorKind::EmptyDataset, "cannot fit a point model without samples");
  if (data.feature_dim == 0 || config.kind == PointModelKind::Mean) {
    return PointModel::constant(sample_mean(data));
  }
  if (config.kind == PointModelKind::Linear) return fit_linear(data);
  return fit_mlp(data, config);
}

std::vector<std::vector<double>> predict_points(const PointModel& model, const Dataset& data) {
  std::vector<std::vector<double>> points(data.size());
  kernels::parallel_for(data.size(), [&](std::size_t i) { points[i] = model.predict(data.feature(i)); });
  return points;
}

}  // namespace qsurf
