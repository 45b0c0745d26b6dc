#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace qsurf {

/// Paired features and targets, row-major. feature_dim may be zero for
/// unconditional problems.
struct Dataset {
  std::size_t feature_dim = 0;
  std::size_t target_dim = 0;
  std::vector<double> features;
  std::vector<double> targets;

  Dataset() = default;
  Dataset(std::size_t features_per_row, std::size_t targets_per_row)
      : feature_dim(features_per_row), target_dim(targets_per_row) {}

  std::size_t size() const { return target_dim == 0 ? 0 : targets.size() / target_dim; }
  bool empty() const { return size() == 0; }

  std::span<const double> feature(std::size_t i) const {
    return std::span<const double>(features).subspan(i * feature_dim, feature_dim);
  }
  std::span<const double> target(std::size_t i) const {
    return std::span<const double>(targets).subspan(i * target_dim, target_dim);
  }

  void push_back(std::span<const double> x, std::span<const double> y);
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);
double parse_double(const std::string& text);

/// Header `x1..xM,y1..yK`, one row per sample.
void write_dataset_csv(std::ostream& out, const Dataset& data);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv(const std::filesystem::path& path);

}  // namespace qsurf
