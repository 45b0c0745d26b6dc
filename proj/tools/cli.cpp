#include "cli.hpp"

#include <omp.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "qsurf/error.hpp"
#include "qsurf/harness.hpp"

namespace qsurf::cli {

namespace fs = std::filesystem;

namespace {

std::string flag_name(const std::string& key) {
  std::string name = key;
  for (auto& c : name) {
    if (c == '_') c = '-';
  }
  return "--" + name;
}

// Options that build an ExperimentConfig: a base (preset or config file),
// --fast, then one flag per config key.
struct ConfigFlags {
  std::string preset;
  std::string config_file;
  bool fast = false;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void attach(CLI::App* app, bool all_keys) {
    auto* p = app->add_option("--preset", preset, "Synthetic preset: mgd, smd or cmgd")
                  ->check(CLI::IsMember({"mgd", "smd", "cmgd"}));
    auto* c = app->add_option("--config", config_file, "Config file (key = value)")->check(CLI::ExistingFile);
    p->excludes(c);
    if (all_keys) app->add_flag("--fast", fast, "Use the short training budget");
    for (const auto& key : config_keys()) {
      if (key == "output_dir" || key == "dataset") continue;
      if (!all_keys && key != "seed" && key != "train_count" && key != "test_count") continue;
      options[key] = app->add_option(flag_name(key), values[key], "Config key " + key);
    }
  }

  ExperimentConfig build() const {
    ExperimentConfig config = config_file.empty() ? preset_or_default() : load_config(config_file);
    if (fast) apply_fast(config);
    for (const auto& [key, option] : options) {
      if (option->count() > 0) apply_setting(config, key, values.at(key));
    }
    return config;
  }

 private:
  ExperimentConfig preset_or_default() const { return qsurf::preset(preset.empty() ? "mgd" : preset); }
};

// --out wins, then the environment, then whatever the config says.
fs::path resolve_output(const std::string& flag, const fs::path& fallback) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return fallback;
}

void print_summary(std::ostream& out, const EvaluationReport& report) {
  out << "model,avg_crps,skill_vs_" << report.baseline << '\n';
  for (const auto& m : report.models) {
    out << m.name << ',' << format_double(m.average_crps) << ',' << format_double(m.skill_vs_baseline) << '\n';
  }
}

void write_outputs(const fs::path& dir, const EvaluationReport& report) {
  fs::create_directories(dir);
  save_json(dir / "report.json", to_json(report));
  write_report_tables(dir, report);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantile-surface forecasting experiments", "qsurf"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads (0 keeps the runtime default)")->check(CLI::NonNegativeNumber);

  auto* gen = app.add_subcommand("gen", "Emit a synthetic dataset as CSV");
  ConfigFlags gen_flags;
  gen_flags.attach(gen, false);
  std::size_t gen_n = 0;
  std::string gen_split = "train";
  std::string gen_out;
  gen->add_option("--n", gen_n, "Number of samples (defaults to the split size)");
  gen->add_option("--split", gen_split, "Which stream to draw: train or test")
      ->check(CLI::IsMember({"train", "test"}));
  gen->add_option("--out", gen_out, "Output CSV path (stdout when omitted)");

  auto* train = app.add_subcommand("train", "Fit and persist the point model, QSNN and baselines");
  ConfigFlags train_flags;
  train_flags.attach(train, true);
  std::string train_out;
  std::string train_data;
  train->add_option("--out", train_out, "Output directory");
  train->add_option("--data", train_data, "Training CSV (generated from the config when omitted)");

  auto* eval = app.add_subcommand("eval", "Score persisted models on a dataset");
  std::string eval_models;
  std::string eval_data;
  std::string eval_out;
  eval->add_option("--models", eval_models, "Directory written by train or run")->required();
  eval->add_option("--data", eval_data, "Test CSV (the config's test split when omitted)");
  eval->add_option("--out", eval_out, "Output directory (defaults to the models directory)");

  auto* runc = app.add_subcommand("run", "Generate, train, evaluate and write every artifact");
  ConfigFlags run_flags;
  run_flags.attach(runc, true);
  std::string run_out;
  runc->add_option("--out", run_out, "Output directory");

  auto* report = app.add_subcommand("report", "Re-emit tables from a persisted report.json");
  std::string report_file;
  std::string report_out;
  report->add_option("--report", report_file, "Path to report.json")->required();
  report->add_option("--out", report_out, "Output directory (defaults to the report's directory)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (*gen) {
      ExperimentConfig config = gen_flags.build();
      const auto split = gen_split == "train" ? SplitKind::Train : SplitKind::Test;
      if (gen->count("--n") > 0) {
        config.data.train_count = gen_n;
        config.data.test_count = gen_n;
      }
      const Dataset data = generate(config.data, split);
      if (gen_out.empty()) {
        write_dataset_csv(out, data);
      } else {
        write_dataset_csv(fs::path(gen_out), data);
      }
      return 0;
    }
    if (*train) {
      const ExperimentConfig config = train_flags.build();
      const fs::path dir = resolve_output(train_out, config.output_dir);
      Dataset data = train_data.empty() ? generate(config.data, SplitKind::Train) : read_dataset_csv(fs::path(train_data));
      const TrainedModels models = train_models(config, data);
      save_models(dir, config, models);
      write_dataset_csv(dir / "dataset_train.csv", data);
      out << "models written to " << dir.string() << '\n';
      return 0;
    }
    if (*eval) {
      const fs::path models_dir = eval_models;
      if (!fs::is_directory(models_dir)) fail(ErrorKind::Io, models_dir.string());
      auto [config, models] = load_models(models_dir);
      const Dataset data =
          eval_data.empty() ? generate(config.data, SplitKind::Test) : read_dataset_csv(fs::path(eval_data));
      const EvaluationReport result = evaluate_models(config, models, data);
      write_outputs(resolve_output(eval_out, models_dir), result);
      print_summary(out, result);
      return 0;
    }
    if (*runc) {
      ExperimentConfig config = run_flags.build();
      config.output_dir = resolve_output(run_out, config.output_dir);
      const EvaluationReport result = run_experiment(config);
      print_summary(out, result);
      err << "wrote " << config.output_dir.string() << " in " << result.runtime_seconds << " s\n";
      return 0;
    }
    if (*report) {
      const fs::path file = report_file;
      const EvaluationReport result = report_from_json(load_json(file));
      const fs::path parent = file.has_parent_path() ? file.parent_path() : fs::path(".");
      write_report_tables(resolve_output(report_out, parent), result);
      print_summary(out, result);
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace qsurf::cli
