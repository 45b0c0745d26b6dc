#include "qsurf/persist.hpp"

#include <fstream>

#include "qsurf/error.hpp"

namespace qsurf {

using nlohmann::json;

namespace {

json header(const char* format) { return json{{"format", format}, {"version", kModelFormatVersion}}; }

void expect_header(const json& doc, const char* format) {
  if (!doc.is_object() || doc.value("format", "") != format) {
    fail(ErrorKind::Format, std::string("expected a '") + format + "' document");
  }
  const int version = doc.value("version", 0);
  if (version != kModelFormatVersion) {
    fail(ErrorKind::Format, std::string(format) + " version " + std::to_string(version) + " is not supported");
  }
}

template <class T>
T field(const json& doc, const char* key) {
  if (!doc.contains(key)) fail(ErrorKind::Format, std::string("missing field '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, std::string("bad field '") + key + "': " + e.what());
  }
}

}  // namespace

json to_json(const Mlp& net) {
  json doc = header("qsurf-mlp");
  doc["layer_sizes"] = net.layer_sizes();
  doc["hidden_activation"] = to_string(net.hidden_activation());
  doc["output_activation"] = "linear";
  doc["parameters"] = std::vector<double>(net.parameters().begin(), net.parameters().end());
  return doc;
}

Mlp mlp_from_json(const json& doc) {
  expect_header(doc, "qsurf-mlp");
  if (field<std::string>(doc, "output_activation") != "linear") fail(ErrorKind::Format, "only linear outputs exist");
  Mlp net(field<std::vector<std::size_t>>(doc, "layer_sizes"),
          activation_from_string(field<std::string>(doc, "hidden_activation")));
  const auto params = field<std::vector<double>>(doc, "parameters");
  if (params.size() != net.parameter_count()) fail(ErrorKind::Format, "parameter count does not match layer sizes");
  std::copy(params.begin(), params.end(), net.parameters().begin());
  return net;
}

json to_json(const PointModel& model) {
  json doc = header("qsurf-point-model");
  doc["kind"] = to_string(model.kind());
  doc["feature_dim"] = model.feature_dim();
  doc["target_dim"] = model.target_dim();
  switch (model.kind()) {
    case PointModelKind::Mean:
      doc["value"] = model.bias();
      break;
    case PointModelKind::Linear:
      doc["weights"] = model.weights();
      doc["bias"] = model.bias();
      break;
    case PointModelKind::Mlp:
      doc["net"] = to_json(model.net());
      break;
  }
  return doc;
}

PointModel point_model_from_json(const json& doc) {
  expect_header(doc, "qsurf-point-model");
  switch (point_model_kind_from_string(field<std::string>(doc, "kind"))) {
    case PointModelKind::Mean:
      return PointModel::constant(field<std::vector<double>>(doc, "value"));
    case PointModelKind::Linear:
      return PointModel::linear(field<std::size_t>(doc, "feature_dim"), field<std::vector<double>>(doc, "weights"),
                                field<std::vector<double>>(doc, "bias"));
    case PointModelKind::Mlp:
      return PointModel::network(mlp_from_json(field<json>(doc, "net")));
  }
  fail(ErrorKind::Format, "unknown point model kind");
}

json to_json(const QsnnModel& model) {
  json doc = header("qsurf-qsnn");
  doc["levels"] = model.levels();
  doc["direction_dim"] = model.direction_dim();
  doc["feature_dim"] = model.feature_dim();
  doc["net"] = to_json(model.net());
  return doc;
}

QsnnModel qsnn_from_json(const json& doc) {
  expect_header(doc, "qsurf-qsnn");
  try {
    return QsnnModel(mlp_from_json(field<json>(doc, "net")), field<std::vector<double>>(doc, "levels"),
                     field<std::size_t>(doc, "direction_dim"), field<std::size_t>(doc, "feature_dim"));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Format) throw;
    fail(ErrorKind::Format, e.what());
  }
}

json to_json(const GaussianForecast& forecast) {
  json doc = header("qsurf-gaussian");
  doc["mean"] = forecast.mean;
  doc["covariance"] = forecast.covariance.m;
  return doc;
}

GaussianForecast gaussian_from_json(const json& doc) {
  expect_header(doc, "qsurf-gaussian");
  GaussianForecast f;
  f.mean = field<std::vector<double>>(doc, "mean");
  f.covariance.m = field<std::array<double, 4>>(doc, "covariance");
  return f;
}

json to_json(const CovarianceNet& net) {
  json doc = header("qsurf-covariance-net");
  doc["parameterization"] = "log-sd,log-sd,scaled-tanh-correlation";
  doc["net"] = to_json(net.net());
  return doc;
}

CovarianceNet covariance_net_from_json(const json& doc) {
  expect_header(doc, "qsurf-covariance-net");
  try {
    return CovarianceNet(mlp_from_json(field<json>(doc, "net")));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Format) throw;
    fail(ErrorKind::Format, e.what());
  }
}

void save_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << doc.dump(1) << '\n';
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, path.string() + ": " + e.what());
  }
}

}  // namespace qsurf
