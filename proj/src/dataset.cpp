#include "qsurf/dataset.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "qsurf/error.hpp"

namespace qsurf {

void Dataset::push_back(std::span<const double> x, std::span<const double> y) {
  if (x.size() != feature_dim || y.size() != target_dim) {
    fail(ErrorKind::DimensionMismatch, "row does not match dataset dimensions");
  }
  features.insert(features.end(), x.begin(), x.end());
  targets.insert(targets.end(), y.begin(), y.end());
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin < end && *begin == ' ') ++begin;
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end) fail(ErrorKind::Format, "not a number: '" + text + "'");
  return value;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  bool first = true;
  auto sep = [&] {
    if (!first) out << ',';
    first = false;
  };
  for (std::size_t m = 0; m < data.feature_dim; ++m) {
    sep();
    out << 'x' << (m + 1);
  }
  for (std::size_t k = 0; k < data.target_dim; ++k) {
    sep();
    out << 'y' << (k + 1);
  }
  out << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    first = true;
    for (double v : data.feature(i)) {
      sep();
      out << format_double(v);
    }
    for (double v : data.target(i)) {
      sep();
      out << format_double(v);
    }
    out << '\n';
  }
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  write_dataset_csv(out, data);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Format, "dataset CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  std::size_t features = 0;
  std::size_t targets = 0;
  for (const auto& name : header) {
    if (name.size() < 2 || (name[0] != 'x' && name[0] != 'y')) fail(ErrorKind::Format, "bad column '" + name + "'");
    if (name[0] == 'x') {
      if (targets > 0) fail(ErrorKind::Format, "feature columns must precede target columns");
      ++features;
    } else {
      ++targets;
    }
  }
  if (targets == 0) fail(ErrorKind::Format, "dataset CSV has no target columns");
  Dataset data(features, targets);
  std::vector<double> row(features + targets);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != row.size()) fail(ErrorKind::Format, "wrong column count on line " + std::to_string(line_no));
    for (std::size_t c = 0; c < cells.size(); ++c) row[c] = parse_double(cells[c]);
    data.push_back(std::span<const double>(row).first(features), std::span<const double>(row).subspan(features));
  }
  return data;
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, path.string());
  return read_dataset_csv(in);
}

}  // namespace qsurf
