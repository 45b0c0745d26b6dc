#include "qsurf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qsurf/error.hpp"
#include "qsurf/kernels.hpp"

namespace qsurf {

DirectionalCdf::DirectionalCdf(std::vector<Anchor> anchors) : anchors_(std::move(anchors)) {
  if (anchors_.empty()) fail(ErrorKind::ContractViolation, "a CDF needs at least one anchor");
  for (std::size_t k = 0; k < anchors_.size(); ++k) {
    const auto& a = anchors_[k];
    if (!(a.length >= 0.0) || !(a.probability >= 0.0 && a.probability <= 1.0)) {
      fail(ErrorKind::ContractViolation, "CDF anchors need nonnegative lengths and probabilities in [0,1]");
    }
    if (k > 0 && (a.length < anchors_[k - 1].length || a.probability < anchors_[k - 1].probability)) {
      fail(ErrorKind::ContractViolation, "CDF anchors must be nondecreasing");
    }
  }
}

DirectionalCdf DirectionalCdf::step(double length) { return DirectionalCdf({{length, 1.0}}); }

double DirectionalCdf::operator()(double length) const {
  if (length < anchors_.front().length) return 0.0;
  if (length >= anchors_.back().length) return 1.0;
  for (std::size_t k = 1; k < anchors_.size(); ++k) {
    const auto& lo = anchors_[k - 1];
    const auto& hi = anchors_[k];
    if (length < hi.length) return lo.probability + (hi.probability - lo.probability) * (length - lo.length) / (hi.length - lo.length);
  }
  return 1.0;
}

DirectionalCdf build_directional_cdf(std::span<const double> levels, std::span<const double> radii) {
  if (levels.empty() || levels.size() != radii.size()) {
    fail(ErrorKind::DimensionMismatch, "one radius per level is required");
  }
  std::vector<DirectionalCdf::Anchor> anchors{{0.0, 0.0}};
  for (std::size_t l = 0; l < levels.size(); ++l) {
    if (!(radii[l] >= 0.0)) fail(ErrorKind::ContractViolation, "radii must be nonnegative");
    if (l > 0 && radii[l] < radii[l - 1]) fail(ErrorKind::ContractViolation, "radii decrease across levels");
    if (!(levels[l] > 0.0 && levels[l] < 1.0)) fail(ErrorKind::ContractViolation, "levels must lie in (0,1)");
    if (l > 0 && !(levels[l] > levels[l - 1])) fail(ErrorKind::ContractViolation, "levels must ascend");
    anchors.push_back({radii[l], levels[l]});
  }
  return DirectionalCdf(std::move(anchors));
}

namespace {

// Integral over a segment of width w of (p(t) - h)^2, p linear from p0 to p1.
double segment_integral(double p0, double p1, double w, double h) {
  const double a = p0 - h;
  const double b = p1 - h;
  return w * (a * a + a * b + b * b) / 3.0;
}

}  // namespace

double directional_crps(const DirectionalCdf& cdf, double observed_length) {
  if (!(observed_length >= 0.0)) fail(ErrorKind::Domain, "observed length must be nonnegative");
  const auto& anchors = cdf.anchors();
  const double o = observed_length;
  // Below the first anchor F = 0, so only [o, x_0) contributes.
  double total = std::max(0.0, anchors.front().length - o);
  for (std::size_t k = 1; k < anchors.size(); ++k) {
    const double x0 = anchors[k - 1].length;
    const double x1 = anchors[k].length;
    const double p0 = anchors[k - 1].probability;
    const double p1 = anchors[k].probability;
    const double w = x1 - x0;
    if (!(w > 0.0)) continue;
    if (o <= x0) {
      total += segment_integral(p0, p1, w, 1.0);
    } else if (o >= x1) {
      total += segment_integral(p0, p1, w, 0.0);
    } else {
      const double pm = p0 + (p1 - p0) * (o - x0) / w;
      total += segment_integral(p0, pm, o - x0, 0.0);
      total += segment_integral(pm, p1, x1 - o, 1.0);
    }
  }
  // From the last anchor on F = 1, so only [x_last, o) contributes.
  total += std::max(0.0, o - anchors.back().length);
  return total;
}

double skill(double eval_score, double base_score) {
  if (!(base_score > 0.0)) fail(ErrorKind::InvalidParameter, "baseline score must be positive");
  return 1.0 - eval_score / base_score;
}

DirectionalEvaluation evaluate_directions(const DirectionalQuantileModel& model, const Dataset& data,
                                          const std::vector<Vec>& point_estimates) {
  if (data.empty()) fail(ErrorKind::EmptyDataset, "evaluation dataset is empty");
  if (point_estimates.size() != data.size()) fail(ErrorKind::DimensionMismatch, "one point estimate per sample");
  DirectionalEvaluation eval;
  eval.levels = model.levels().size();
  const std::size_t n = data.size();
  eval.directions.resize(n);
  eval.lengths.resize(n);
  eval.radii.resize(n * eval.levels);
  kernels::parallel_for(n, [&](std::size_t i) {
    const auto adjusted = forecast_adjust(data.target(i), point_estimates[i]);
    const double length = norm(adjusted);
    if (length > 0.0) {
      eval.directions[i] = decompose(adjusted).direction;
    } else {
      eval.directions[i].assign(adjusted.size(), 0.0);
      eval.directions[i][0] = 1.0;
    }
    eval.lengths[i] = length;
    model.radii(eval.directions[i], data.feature(i),
                std::span<double>(eval.radii).subspan(i * eval.levels, eval.levels));
  });
  return eval;
}

double coverage(std::span<const double> radii, std::span<const double> lengths) {
  if (lengths.empty()) fail(ErrorKind::EmptyDataset, "coverage of an empty dataset");
  if (radii.size() != lengths.size()) fail(ErrorKind::DimensionMismatch, "one radius per sample");
  std::size_t inside = 0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (radii[i] - lengths[i] >= 0.0) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(lengths.size());
}

namespace {

std::size_t level_index_of(std::span<const double> levels, double tau) {
  for (std::size_t l = 0; l < levels.size(); ++l) {
    if (std::abs(levels[l] - tau) <= 1e-12) return l;
  }
  fail(ErrorKind::MissingLevel, "level " + std::to_string(tau) + " is not among the model levels");
}

std::vector<double> level_column(const DirectionalEvaluation& eval, std::size_t level) {
  std::vector<double> column(eval.size());
  for (std::size_t i = 0; i < eval.size(); ++i) column[i] = eval.radii[i * eval.levels + level];
  return column;
}

}  // namespace

double coverage(const DirectionalQuantileModel& model, const Dataset& data, const std::vector<Vec>& point_estimates,
                double tau) {
  const std::size_t level = level_index_of(model.levels(), tau);
  const auto eval = evaluate_directions(model, data, point_estimates);
  return coverage(level_column(eval, level), eval.lengths);
}

ReliabilityCurve reliability_curve(const DirectionalEvaluation& eval, std::span<const double> levels) {
  if (levels.size() != eval.levels) fail(ErrorKind::DimensionMismatch, "level count differs from evaluation");
  ReliabilityCurve curve;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    curve.push_back({levels[l], coverage(level_column(eval, l), eval.lengths)});
  }
  return curve;
}

ReliabilityCurve reliability_curve(const DirectionalQuantileModel& model, const Dataset& data,
                                   const std::vector<Vec>& point_estimates) {
  return reliability_curve(evaluate_directions(model, data, point_estimates), model.levels());
}

SharpnessCurve sharpness_curve(std::span<const QuantileSurfaceForecast> surfaces, std::span<const double> alphas) {
  if (surfaces.empty()) fail(ErrorKind::EmptyDataset, "sharpness of no surfaces");
  SharpnessCurve curve;
  std::vector<double> areas(surfaces.size());
  for (double alpha : alphas) {
    const double tau = 1.0 - alpha;
    const std::size_t level = level_index_of(surfaces.front().levels, tau);
    kernels::parallel_for(surfaces.size(), [&](std::size_t i) {
      areas[i] = polygon_area(surfaces[i], level_index_of(surfaces[i].levels, tau));
    });
    curve.push_back({surfaces.front().levels[level], kernels::ordered_sum(areas) / static_cast<double>(surfaces.size())});
  }
  return curve;
}

std::vector<SampleScore> directional_crps_scores(const DirectionalEvaluation& eval, std::span<const double> levels) {
  if (eval.size() == 0) fail(ErrorKind::EmptyDataset, "CRPS of an empty dataset");
  std::vector<SampleScore> scores(eval.size());
  kernels::parallel_for(eval.size(), [&](std::size_t i) {
    const auto cdf = build_directional_cdf(levels, eval.radii_at(i));
    const auto& u = eval.directions[i];
    scores[i] = {i, u.size() == 2 ? direction_angle(u) : 0.0, eval.lengths[i], directional_crps(cdf, eval.lengths[i])};
  });
  return scores;
}

double average_directional_crps(std::span<const SampleScore> scores) {
  if (scores.empty()) fail(ErrorKind::EmptyDataset, "CRPS of an empty dataset");
  double total = 0.0;
  for (const auto& s : scores) total += s.crps;
  return total / static_cast<double>(scores.size());
}

double average_directional_crps(const DirectionalQuantileModel& model, const Dataset& data,
                                const std::vector<Vec>& point_estimates) {
  const auto eval = evaluate_directions(model, data, point_estimates);
  return average_directional_crps(directional_crps_scores(eval, model.levels()));
}

}  // namespace qsurf
