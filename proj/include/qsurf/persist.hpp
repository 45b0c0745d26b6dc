#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "qsurf/gaussian.hpp"
#include "qsurf/mlp.hpp"
#include "qsurf/point_model.hpp"
#include "qsurf/qsnn.hpp"

namespace qsurf {

// Versioned JSON documents. Doubles are written in shortest round-trip form,
// so loading a saved model reproduces its predictions bit for bit.
inline constexpr int kModelFormatVersion = 1;

nlohmann::json to_json(const Mlp& net);
Mlp mlp_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const PointModel& model);
PointModel point_model_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const QsnnModel& model);
QsnnModel qsnn_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const GaussianForecast& forecast);
GaussianForecast gaussian_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const CovarianceNet& net);
CovarianceNet covariance_net_from_json(const nlohmann::json& doc);

void save_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace qsurf
