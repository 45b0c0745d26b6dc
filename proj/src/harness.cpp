#include "qsurf/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "qsurf/error.hpp"
#include "qsurf/kernels.hpp"

namespace qsurf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ',';
    out += parts[i];
  }
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string join_doubles(const std::vector<double>& values) {
  std::vector<std::string> parts;
  for (double v : values) parts.push_back(format_double(v));
  return join(parts);
}

std::string join_sizes(const std::vector<std::size_t>& values) {
  std::vector<std::string> parts;
  for (auto v : values) parts.push_back(std::to_string(v));
  return join(parts);
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  for (const auto& p : split_list(text)) out.push_back(parse_double(p));
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::InvalidParameter, key + " expects a nonnegative integer, got '" + text + "'");
  }
}

std::vector<std::size_t> parse_sizes(const std::string& key, const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& p : split_list(text)) out.push_back(static_cast<std::size_t>(parse_u64(key, p)));
  if (out.empty()) fail(ErrorKind::InvalidParameter, key + " needs at least one hidden layer width");
  return out;
}

int parse_int(const std::string& key, const std::string& text) {
  const auto v = parse_u64(key, text);
  if (v > 1'000'000'000ULL) fail(ErrorKind::InvalidParameter, key + " is out of range");
  return static_cast<int>(v);
}

double parse_real(const std::string& key, const std::string& text) {
  try {
    return parse_double(text);
  } catch (const Error&) {
    fail(ErrorKind::InvalidParameter, key + " expects a number, got '" + text + "'");
  }
}

std::string baselines_value(const ExperimentConfig& c) {
  std::vector<std::string> names;
  if (c.unconditional_baseline) names.push_back(kUnconditionalName);
  if (c.conditional_baseline) names.push_back(kConditionalName);
  if (c.truth_baseline) names.push_back(kTruthName);
  return names.empty() ? "none" : join(names);
}

void set_baselines(ExperimentConfig& c, const std::string& value) {
  c.unconditional_baseline = c.conditional_baseline = c.truth_baseline = false;
  for (const auto& name : split_list(value)) {
    if (name == "none") continue;
    if (name == kUnconditionalName) {
      c.unconditional_baseline = true;
    } else if (name == kConditionalName) {
      c.conditional_baseline = true;
    } else if (name == kTruthName) {
      c.truth_baseline = true;
    } else {
      fail(ErrorKind::InvalidParameter, "unknown baseline '" + name + "'");
    }
  }
}

// Rethrows with the failing stage named in the message.
template <class Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("stage '") + name + "': " + e.detail());
  }
}

// The experiment seed drives every stochastic stage.
ExperimentConfig seeded(const ExperimentConfig& c) {
  ExperimentConfig out = c;
  out.data.seed = c.seed;
  out.train.seed = c.seed;
  out.covariance_train.seed = c.seed;
  out.point.train.seed = c.seed;
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  validate_levels(levels);
  if (directions < 3) fail(ErrorKind::InvalidParameter, "directions must be >= 3");
  if (data.train_count == 0 || data.test_count == 0) fail(ErrorKind::InvalidParameter, "sample counts must be >= 1");
  if (qsnn.hidden.empty()) fail(ErrorKind::InvalidParameter, "QSNN needs at least one hidden layer");
  train.validate();
  if (conditional_baseline) covariance_train.validate();
  if (data.kind == SyntheticKind::Smd && truth_baseline) {
    fail(ErrorKind::InvalidParameter, "the skewed dataset has no closed-form truth baseline");
  }
  if (conditional_baseline && data.kind != SyntheticKind::Cmgd) {
    fail(ErrorKind::InvalidParameter, "the conditional baseline needs a dataset with features");
  }
}

ExperimentConfig preset(SyntheticKind kind) {
  ExperimentConfig c;
  c.data.kind = kind;
  c.output_dir = "qsurf_out_" + to_string(kind);
  switch (kind) {
    case SyntheticKind::Mgd:
      c.truth_baseline = true;
      break;
    case SyntheticKind::Smd:
      break;
    case SyntheticKind::Cmgd:
      c.point.kind = PointModelKind::Linear;
      c.conditional_baseline = true;
      c.truth_baseline = true;
      break;
  }
  return c;
}

ExperimentConfig preset(const std::string& name) { return preset(synthetic_kind_from_string(name)); }

void apply_fast(ExperimentConfig& config) {
  config.train.epochs = kFastEpochs;
  config.covariance_train.epochs = kFastEpochs;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "dataset",       "seed",          "train_count",       "test_count",  "levels",      "hidden",
      "activation",    "epochs",        "learning_rate",     "l2",          "batch_size",  "point_model",
      "point_epochs",  "point_learning_rate", "directions",  "baselines",   "cov_hidden",  "cov_epochs",
      "cov_learning_rate", "cov_l2",    "output_dir"};
  return keys;
}

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "dataset") {
    c.data.kind = synthetic_kind_from_string(value);
  } else if (key == "seed") {
    c.seed = parse_u64(key, value);
    c = seeded(c);
  } else if (key == "train_count") {
    c.data.train_count = static_cast<std::size_t>(parse_u64(key, value));
  } else if (key == "test_count") {
    c.data.test_count = static_cast<std::size_t>(parse_u64(key, value));
  } else if (key == "levels") {
    c.levels = parse_doubles(value);
  } else if (key == "hidden") {
    c.qsnn.hidden = parse_sizes(key, value);
  } else if (key == "activation") {
    c.qsnn.activation = activation_from_string(value);
    c.covariance.activation = c.qsnn.activation;
  } else if (key == "epochs") {
    c.train.epochs = parse_int(key, value);
  } else if (key == "learning_rate") {
    c.train.learning_rate = parse_real(key, value);
  } else if (key == "l2") {
    c.train.l2 = parse_real(key, value);
  } else if (key == "batch_size") {
    c.train.batch_size = static_cast<std::size_t>(parse_u64(key, value));
  } else if (key == "point_model") {
    c.point.kind = point_model_kind_from_string(value);
  } else if (key == "point_epochs") {
    c.point.train.epochs = parse_int(key, value);
  } else if (key == "point_learning_rate") {
    c.point.train.learning_rate = parse_real(key, value);
  } else if (key == "directions") {
    c.directions = parse_int(key, value);
  } else if (key == "baselines") {
    set_baselines(c, value);
  } else if (key == "cov_hidden") {
    c.covariance.hidden = parse_sizes(key, value);
  } else if (key == "cov_epochs") {
    c.covariance_train.epochs = parse_int(key, value);
  } else if (key == "cov_learning_rate") {
    c.covariance_train.learning_rate = parse_real(key, value);
  } else if (key == "cov_l2") {
    c.covariance_train.l2 = parse_real(key, value);
  } else if (key == "output_dir") {
    c.output_dir = value;
  } else {
    fail(ErrorKind::InvalidParameter, "unknown config key '" + key + "'");
  }
}

std::string config_value(const ExperimentConfig& c, const std::string& key) {
  if (key == "dataset") return to_string(c.data.kind);
  if (key == "seed") return std::to_string(c.seed);
  if (key == "train_count") return std::to_string(c.data.train_count);
  if (key == "test_count") return std::to_string(c.data.test_count);
  if (key == "levels") return join_doubles(c.levels);
  if (key == "hidden") return join_sizes(c.qsnn.hidden);
  if (key == "activation") return to_string(c.qsnn.activation);
  if (key == "epochs") return std::to_string(c.train.epochs);
  if (key == "learning_rate") return format_double(c.train.learning_rate);
  if (key == "l2") return format_double(c.train.l2);
  if (key == "batch_size") return std::to_string(c.train.batch_size);
  if (key == "point_model") return to_string(c.point.kind);
  if (key == "point_epochs") return std::to_string(c.point.train.epochs);
  if (key == "point_learning_rate") return format_double(c.point.train.learning_rate);
  if (key == "directions") return std::to_string(c.directions);
  if (key == "baselines") return baselines_value(c);
  if (key == "cov_hidden") return join_sizes(c.covariance.hidden);
  if (key == "cov_epochs") return std::to_string(c.covariance_train.epochs);
  if (key == "cov_learning_rate") return format_double(c.covariance_train.learning_rate);
  if (key == "cov_l2") return format_double(c.covariance_train.l2);
  if (key == "output_dir") return c.output_dir.generic_string();
  fail(ErrorKind::InvalidParameter, "unknown config key '" + key + "'");
}

std::string to_config_text(const ExperimentConfig& config, bool include_output_dir) {
  std::string out = "# qsurf experiment config\nschema_version = " + std::to_string(kConfigSchemaVersion) + "\n";
  for (const auto& key : config_keys()) {
    if (key == "output_dir" && !include_output_dir) continue;
    out += key + " = " + config_value(config, key) + "\n";
  }
  return out;
}

ExperimentConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::pair<std::string, std::string>> entries;
  int schema = -1;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorKind::Format, "config line " + std::to_string(line_no) + " lacks '='");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "schema_version") {
      schema = parse_int(key, value);
    } else {
      entries.emplace_back(key, value);
    }
  }
  if (schema != kConfigSchemaVersion) {
    fail(ErrorKind::Format, "config schema_version must be " + std::to_string(kConfigSchemaVersion));
  }
  // The dataset selects the preset; every other key overrides it.
  ExperimentConfig config;
  for (const auto& [key, value] : entries) {
    if (key == "dataset") config = preset(value);
  }
  for (const auto& [key, value] : entries) apply_setting(config, key, value);
  return config;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config_text(text);
}

const ModelReport& EvaluationReport::model(const std::string& name) const {
  for (const auto& m : models) {
    if (m.name == name) return m;
  }
  fail(ErrorKind::InvalidParameter, "report has no model '" + name + "'");
}

TrainedModels train_models(const ExperimentConfig& input, const Dataset& train) {
  const ExperimentConfig config = seeded(input);
  config.validate();
  TrainedModels models;
  models.point = stage("point model", [&] { return fit_point_model(train, config.point); });
  models.qsnn = stage("qsnn", [&] {
    return train_qsnn(train, models.point, config.levels, config.qsnn, config.train, &models.qsnn_log);
  });
  if (config.unconditional_baseline) {
    models.unconditional = stage("unconditional gaussian", [&] { return fit_unconditional(train, models.point); });
  }
  if (config.conditional_baseline) {
    models.conditional = stage("conditional gaussian", [&] {
      return fit_conditional(train, models.point, config.covariance, config.covariance_train, &models.covariance_log);
    });
  }
  return models;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << text;
}

void write_training_curve(const fs::path& path, const TrainingLog& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << "epoch,objective\n";
  for (std::size_t e = 0; e < log.objective.size(); ++e) out << e << ',' << format_double(log.objective[e]) << '\n';
}

}  // namespace

void save_models(const fs::path& dir, const ExperimentConfig& config, const TrainedModels& models) {
  fs::create_directories(dir);
  write_text(dir / "config.txt", to_config_text(config, false));
  save_json(dir / "point_model.json", to_json(models.point));
  save_json(dir / "qsnn.json", to_json(models.qsnn));
  if (models.unconditional) save_json(dir / (kUnconditionalName + ".json"), to_json(*models.unconditional));
  if (models.conditional) save_json(dir / (kConditionalName + ".json"), to_json(*models.conditional));
  if (!models.qsnn_log.objective.empty()) write_training_curve(dir / "training_qsnn.csv", models.qsnn_log);
  if (!models.covariance_log.objective.empty()) {
    write_training_curve(dir / ("training_" + kConditionalName + ".csv"), models.covariance_log);
  }
}

std::pair<ExperimentConfig, TrainedModels> load_models(const fs::path& dir) {
  ExperimentConfig config = load_config(dir / "config.txt");
  TrainedModels models;
  models.point = point_model_from_json(load_json(dir / "point_model.json"));
  models.qsnn = qsnn_from_json(load_json(dir / "qsnn.json"));
  if (config.unconditional_baseline) {
    models.unconditional = gaussian_from_json(load_json(dir / (kUnconditionalName + ".json")));
  }
  if (config.conditional_baseline) {
    models.conditional = covariance_net_from_json(load_json(dir / (kConditionalName + ".json")));
  }
  return {std::move(config), std::move(models)};
}

std::vector<std::pair<std::string, std::unique_ptr<DirectionalQuantileModel>>> forecasters(
    const ExperimentConfig& config, const TrainedModels& models) {
  std::vector<std::pair<std::string, std::unique_ptr<DirectionalQuantileModel>>> out;
  out.emplace_back(kQsnnName, std::make_unique<QsnnModel>(models.qsnn));
  if (models.unconditional) {
    out.emplace_back(kUnconditionalName, std::make_unique<GaussianQuantileModel>(
                                             GaussianQuantileModel::unconditional(*models.unconditional, config.levels)));
  }
  if (models.conditional) {
    out.emplace_back(kConditionalName, std::make_unique<GaussianQuantileModel>(
                                           GaussianQuantileModel::conditional(*models.conditional, config.levels)));
  }
  if (config.truth_baseline) {
    out.emplace_back(kTruthName,
                     std::make_unique<GaussianQuantileModel>(true_quantile_model(config.data.kind, config.levels)));
  }
  return out;
}

EvaluationReport evaluate_models(const ExperimentConfig& config, const TrainedModels& models, const Dataset& test) {
  config.validate();
  EvaluationReport report;
  report.dataset = to_string(config.data.kind);
  report.seed = config.seed;
  const auto points = stage("evaluation", [&] { return predict_points(models.point, test); });
  const auto grid = direction_grid(config.directions);
  std::vector<double> alphas;
  for (double tau : config.levels) alphas.push_back(1.0 - tau);

  for (const auto& [name, model] : forecasters(config, models)) {
    ModelReport entry = stage("evaluation", [&, &name = name, &model = model] {
      ModelReport r;
      r.name = name;
      const auto eval = evaluate_directions(*model, test, points);
      r.reliability = reliability_curve(eval, model->levels());
      r.crps = directional_crps_scores(eval, model->levels());
      r.average_crps = average_directional_crps(r.crps);
      std::vector<QuantileSurfaceForecast> surfaces(test.size());
      kernels::parallel_for(test.size(), [&](std::size_t i) {
        surfaces[i] = make_surface(*model, points[i], test.feature(i), grid);
      });
      r.sharpness = sharpness_curve(surfaces, alphas);
      return r;
    });
    report.models.push_back(std::move(entry));
  }

  report.baseline = models.unconditional ? kUnconditionalName : kQsnnName;
  const double base = report.model(report.baseline).average_crps;
  for (auto& m : report.models) m.skill_vs_baseline = base > 0.0 ? skill(m.average_crps, base) : 0.0;
  return report;
}

json to_json(const EvaluationReport& report) {
  json doc{{"format", "qsurf-report"}, {"version", kModelFormatVersion}, {"dataset", report.dataset},
           {"seed", report.seed},      {"baseline", report.baseline}};
  json models = json::array();
  for (const auto& m : report.models) {
    json rel = json::array();
    for (const auto& p : m.reliability) rel.push_back({p.level, p.frequency});
    json sharp = json::array();
    for (const auto& p : m.sharpness) sharp.push_back({p.coverage, p.mean_area});
    json crps = json::array();
    for (const auto& s : m.crps) crps.push_back({s.sample, s.angle, s.length, s.crps});
    models.push_back({{"name", m.name},
                      {"reliability", rel},
                      {"sharpness", sharp},
                      {"crps", crps},
                      {"average_crps", m.average_crps},
                      {"skill_vs_baseline", m.skill_vs_baseline}});
  }
  doc["models"] = models;
  return doc;
}

EvaluationReport report_from_json(const json& doc) {
  if (!doc.is_object() || doc.value("format", "") != "qsurf-report") fail(ErrorKind::Format, "not a qsurf report");
  if (doc.value("version", 0) != kModelFormatVersion) fail(ErrorKind::Format, "unsupported report version");
  try {
    EvaluationReport report;
    report.dataset = doc.at("dataset").get<std::string>();
    report.seed = doc.at("seed").get<std::uint64_t>();
    report.baseline = doc.at("baseline").get<std::string>();
    for (const auto& m : doc.at("models")) {
      ModelReport r;
      r.name = m.at("name").get<std::string>();
      for (const auto& p : m.at("reliability")) r.reliability.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      for (const auto& p : m.at("sharpness")) r.sharpness.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      for (const auto& s : m.at("crps")) {
        r.crps.push_back({s.at(0).get<std::size_t>(), s.at(1).get<double>(), s.at(2).get<double>(),
                          s.at(3).get<double>()});
      }
      r.average_crps = m.at("average_crps").get<double>();
      r.skill_vs_baseline = m.at("skill_vs_baseline").get<double>();
      report.models.push_back(std::move(r));
    }
    return report;
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, std::string("malformed report: ") + e.what());
  }
}

std::vector<std::string> write_report_tables(const fs::path& dir, const EvaluationReport& report) {
  fs::create_directories(dir);
  std::vector<std::string> written;
  auto open = [&](const std::string& name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot write " + (dir / name).string());
    written.push_back(name);
    return out;
  };
  for (const auto& m : report.models) {
    {
      auto out = open("reliability_" + m.name + ".csv");
      out << "level,frequency\n";
      for (const auto& p : m.reliability) out << format_double(p.level) << ',' << format_double(p.frequency) << '\n';
    }
    {
      auto out = open("sharpness_" + m.name + ".csv");
      out << "coverage,mean_area\n";
      for (const auto& p : m.sharpness) out << format_double(p.coverage) << ',' << format_double(p.mean_area) << '\n';
    }
    {
      auto out = open("crps_" + m.name + ".csv");
      out << "sample_id,direction_angle,length,crps\n";
      for (const auto& s : m.crps) {
        out << s.sample << ',' << format_double(s.angle) << ',' << format_double(s.length) << ','
            << format_double(s.crps) << '\n';
      }
    }
  }
  auto out = open("summary.csv");
  out << "model,avg_crps,skill_vs_baseline\n";
  for (const auto& m : report.models) {
    out << m.name << ',' << format_double(m.average_crps) << ',' << format_double(m.skill_vs_baseline) << '\n';
  }
  return written;
}

std::string file_checksum(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, path.string());
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  char buf[1 << 14];
  while (in) {
    in.read(buf, sizeof(buf));
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001B3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
  return hex;
}

EvaluationReport run_experiment(const ExperimentConfig& input) {
  const ExperimentConfig config = seeded(input);
  const auto start = std::chrono::steady_clock::now();
  stage("config", [&] { config.validate(); });
  const fs::path dir = config.output_dir;
  stage("output", [&] { fs::create_directories(dir); });

  const SyntheticSplit split = stage("data generation", [&] { return generate(config.data); });
  stage("output", [&] {
    write_dataset_csv(dir / "dataset_train.csv", split.train);
    write_dataset_csv(dir / "dataset_test.csv", split.test);
  });

  const TrainedModels models = train_models(config, split.train);
  stage("output", [&] { save_models(dir, config, models); });

  EvaluationReport report = evaluate_models(config, models, split.test);
  stage("output", [&] {
    save_json(dir / "report.json", to_json(report));
    write_report_tables(dir, report);

    std::vector<std::string> artifacts;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().filename() != "manifest.txt") {
        artifacts.push_back(entry.path().filename().string());
      }
    }
    std::sort(artifacts.begin(), artifacts.end());
    std::string manifest = "# qsurf run manifest\nseed = " + std::to_string(config.seed) + "\n[config]\n" +
                           to_config_text(config, false) + "[artifacts]\n";
    for (const auto& name : artifacts) {
      manifest += name + " fnv1a64=" + file_checksum(dir / name) + " bytes=" +
                  std::to_string(fs::file_size(dir / name)) + "\n";
    }
    write_text(dir / "manifest.txt", manifest);
  });
  report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace qsurf
