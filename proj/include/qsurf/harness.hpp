#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qsurf/dataset.hpp"
#include "qsurf/gaussian.hpp"
#include "qsurf/metrics.hpp"
#include "qsurf/persist.hpp"
#include "qsurf/point_model.hpp"
#include "qsurf/qsnn.hpp"
#include "qsurf/synthdata.hpp"

namespace qsurf {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kFastEpochs = 5000;
inline constexpr const char* kOutputDirEnv = "QSURF_OUTPUT_DIR";

inline const std::string kQsnnName = "qsnn";
inline const std::string kUnconditionalName = "gauss_uncond";
inline const std::string kConditionalName = "gauss_cond";
inline const std::string kTruthName = "gauss_truth";

struct ExperimentConfig {
  SyntheticSpec data;
  std::vector<double> levels{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99};
  QsnnArchitecture qsnn;
  TrainConfig train;
  PointModelConfig point;
  CovarianceArchitecture covariance;
  TrainConfig covariance_train{.epochs = 50000, .learning_rate = 0.01, .l2 = 0.3};
  int directions = 360;
  bool unconditional_baseline = true;
  bool conditional_baseline = false;
  bool truth_baseline = false;
  std::filesystem::path output_dir = "qsurf_out";
  std::uint64_t seed = 0;

  /// Levels ascending in (0,1), at least 3 directions, valid training settings.
  void validate() const;
};

/// Synthetic presets with the published hyperparameters: one hidden layer of
/// 10 tanh units, Adam with learning rate 0.1, L2 0.3, 50000 epochs, 1000
/// training and 1000 test samples.
ExperimentConfig preset(SyntheticKind kind);
ExperimentConfig preset(const std::string& name);
/// Shortens both training budgets to kFastEpochs.
void apply_fast(ExperimentConfig& config);

/// Config keys in canonical order; CLI flags mirror them.
const std::vector<std::string>& config_keys();
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);
std::string config_value(const ExperimentConfig& config, const std::string& key);
/// Flat `key = value` text, preceded by schema_version. Artifacts written
/// into a run directory leave out output_dir so runs are relocatable.
std::string to_config_text(const ExperimentConfig& config, bool include_output_dir = true);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct ModelReport {
  std::string name;
  ReliabilityCurve reliability;
  SharpnessCurve sharpness;
  std::vector<SampleScore> crps;
  double average_crps = 0.0;
  double skill_vs_baseline = 0.0;
};

struct EvaluationReport {
  std::string dataset;
  std::uint64_t seed = 0;
  std::string baseline = kUnconditionalName;
  std::vector<ModelReport> models;
  double runtime_seconds = 0.0;  // not persisted

  const ModelReport& model(const std::string& name) const;
};

struct TrainedModels {
  PointModel point;
  QsnnModel qsnn;
  std::optional<GaussianForecast> unconditional;
  std::optional<CovarianceNet> conditional;
  TrainingLog qsnn_log;
  TrainingLog covariance_log;
};

TrainedModels train_models(const ExperimentConfig& config, const Dataset& train);
void save_models(const std::filesystem::path& dir, const ExperimentConfig& config, const TrainedModels& models);
/// Reads config.txt and the model files written by save_models.
std::pair<ExperimentConfig, TrainedModels> load_models(const std::filesystem::path& dir);

/// Quantile models to score, in report order.
std::vector<std::pair<std::string, std::unique_ptr<DirectionalQuantileModel>>> forecasters(
    const ExperimentConfig& config, const TrainedModels& models);

EvaluationReport evaluate_models(const ExperimentConfig& config, const TrainedModels& models, const Dataset& test);

nlohmann::json to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const nlohmann::json& doc);

/// reliability_<model>.csv, sharpness_<model>.csv, crps_<model>.csv and
/// summary.csv; returns the written file names.
std::vector<std::string> write_report_tables(const std::filesystem::path& dir, const EvaluationReport& report);

/// Generates data, fits the point model, QSNN and baselines on the training
/// split, scores everything on the test split and writes every artifact plus
/// a manifest into config.output_dir. Errors name the failing stage.
EvaluationReport run_experiment(const ExperimentConfig& config);

/// 64-bit FNV-1a of a file's bytes, as 16 hex digits.
std::string file_checksum(const std::filesystem::path& path);

}  // namespace qsurf
