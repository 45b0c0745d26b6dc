// Acceptance suite: one PASS/FAIL line per criterion. Training-based checks
// use the full preset budget (50000 epochs).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "qsurf/harness.hpp"
#include "quadrature.hpp"

using namespace qsurf;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const Outcome& o, double seconds) {
  std::printf("%s  %2d  %-40s %s  (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), seconds);
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

void criterion(int id, const std::string& name, const std::function<Outcome()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  report(id, name, o, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

double max_relative_error(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
  }
  return scale == 0.0 ? diff : diff / scale;
}

std::vector<double> central_difference(Mlp& net, const std::function<double()>& f, double h) {
  std::vector<double> g(net.parameter_count());
  auto p = net.parameters();
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double saved = p[k];
    p[k] = saved + h;
    const double up = f();
    p[k] = saved - h;
    const double down = f();
    p[k] = saved;
    g[k] = (up - down) / (2.0 * h);
  }
  return g;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

double angle_gap_deg(double a, double b) {
  double d = std::fmod(std::abs(a - b), 360.0);
  return d > 180.0 ? 360.0 - d : d;
}

struct TrainedRun {
  ExperimentConfig config;
  SyntheticSplit split;
  TrainedModels models;
  EvaluationReport report;
  double train_seconds = 0.0;
};

TrainedRun train_run(const std::string& preset_name, std::uint64_t seed, bool conditional) {
  TrainedRun run;
  run.config = preset(preset_name);
  apply_setting(run.config, "seed", std::to_string(seed));
  run.config.conditional_baseline = conditional;
  run.split = generate(run.config.data);
  const auto start = std::chrono::steady_clock::now();
  run.models = train_models(run.config, run.split.train);
  run.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  run.report = evaluate_models(run.config, run.models, run.split.test);
  return run;
}

Dataset subset(const Dataset& d, double feature) {
  Dataset out(d.feature_dim, d.target_dim);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.feature(i)[0] == feature) out.push_back(d.feature(i), d.target(i));
  }
  return out;
}

}  // namespace

int main() {
  const std::vector<std::uint64_t> mgd_seeds{1, 2, 3};
  const std::uint64_t smd_seed = 1, cmgd_seed = 1;
  std::vector<TrainedRun> mgd;
  std::optional<TrainedRun> smd, cmgd;

  std::cerr << "training MGD (3 seeds), SMD and CMGD at the full budget...\n";
  for (auto s : mgd_seeds) mgd.push_back(train_run("mgd", s, false));
  smd = train_run("smd", smd_seed, false);
  cmgd = train_run("cmgd", cmgd_seed, false);
  const auto& levels = mgd.front().config.levels;

  criterion(1, "skill arithmetic", [] {
    const double s = skill(0.046, 0.376);
    return Outcome{std::abs(s - 0.878) <= 0.001, "skill(0.046, 0.376) = " + fmt("%.5f", s) + ", want 0.878 +- 0.001"};
  });

  criterion(2, "MGD calibration (3 seeds)", [&] {
    double worst = 0.0, worst_level = 0.0, slowest = 0.0;
    for (std::size_t l = 0; l < levels.size(); ++l) {
      double mean = 0.0;
      for (const auto& run : mgd) mean += run.report.model(kQsnnName).reliability[l].frequency;
      mean /= static_cast<double>(mgd.size());
      if (std::abs(mean - levels[l]) > worst) {
        worst = std::abs(mean - levels[l]);
        worst_level = levels[l];
      }
    }
    for (const auto& run : mgd) slowest = std::max(slowest, run.train_seconds);
    return Outcome{worst <= 0.05 && slowest <= 600.0,
                   "max |coverage - tau| = " + fmt("%.4f", worst) + " at tau " + fmt("%.2f", worst_level) +
                       ", limit 0.05; slowest seed " + fmt("%.0f", slowest) + " s of 600"};
  });

  criterion(3, "MGD sharpness congruence", [&] {
    const double analytic = std::numbers::pi * std::sqrt(0.5 * 2.0) * chi2_inverse_cdf(0.9, 2);
    double mean = 0.0;
    for (const auto& run : mgd) {
      for (const auto& p : run.report.model(kQsnnName).sharpness) {
        if (p.coverage == 0.9) mean += p.mean_area;
      }
    }
    mean /= static_cast<double>(mgd.size());
    const double rel = std::abs(mean / analytic - 1.0);
    return Outcome{rel <= 0.15, "mean 0.9 area " + fmt("%.3f", mean) + " vs " + fmt("%.3f", analytic) + " (" +
                                    fmt("%.1f", 100 * rel) + "% off, limit 15%)"};
  });

  criterion(4, "SMD calibration, baseline underconfident", [&] {
    const auto& q = smd->report.model(kQsnnName).reliability;
    const auto& g = smd->report.model(kUnconditionalName).reliability;
    double worst = 0.0;
    int over = 0;
    for (std::size_t l = 0; l < q.size(); ++l) {
      worst = std::max(worst, std::abs(q[l].frequency - q[l].level));
      const bool mid = g[l].level >= 0.3 && g[l].level <= 0.8;
      if (mid && g[l].frequency >= g[l].level + 0.03) ++over;
    }
    return Outcome{worst <= 0.05 && over >= 3, "QSNN max |coverage - tau| = " + fmt("%.4f", worst) +
                                                   " (limit 0.05); baseline overcovers by >= 0.03 at " +
                                                   std::to_string(over) + " mid levels (need 3)"};
  });

  criterion(5, "SMD skewness capture", [&] {
    const auto& model = smd->models.qsnn;
    const auto point = smd->models.point.predict({});
    const auto grid = direction_grid(360);
    const auto surface = predict_surface(model, point, {}, grid);
    const std::size_t top = levels.size() - 1;
    std::size_t jmax = 0, jmin = 0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      if (surface.radius(top, j) > surface.radius(top, jmax)) jmax = j;
      if (surface.radius(top, j) < surface.radius(top, jmin)) jmin = j;
    }
    const double ratio = surface.radius(top, jmax) / surface.radius(top, jmin);
    const double model_angle = direction_angle(grid[jmax]) * 180.0 / std::numbers::pi;

    // Oracle: empirical 0.99 directional quantiles of 10^5 generator draws
    // around the same point estimate, in 10-degree sectors.
    Rng rng(mix_seed(smd_seed, 0x4F52'4143ULL));
    const Dataset draws = gen_smd(rng, 100000);
    std::vector<std::vector<double>> sectors(36);
    for (std::size_t i = 0; i < draws.size(); ++i) {
      const auto adj = forecast_adjust(draws.target(i), point);
      const double a = std::atan2(adj[1], adj[0]);
      const double deg = (a < 0 ? a + 2 * std::numbers::pi : a) * 180.0 / std::numbers::pi;
      sectors[static_cast<std::size_t>(deg / 10.0) % 36].push_back(norm(adj));
    }
    double best = 0.0, oracle_angle = 0.0;
    for (std::size_t s = 0; s < sectors.size(); ++s) {
      auto& v = sectors[s];
      if (v.size() < 100) continue;
      const auto k = static_cast<std::size_t>(0.99 * static_cast<double>(v.size()));
      std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
      if (v[k] > best) {
        best = v[k];
        oracle_angle = 10.0 * static_cast<double>(s) + 5.0;
      }
    }
    // The exponential component is the second axis; rotated 45 degrees
    // counterclockwise it points at 135 degrees.
    const double exp_axis = 135.0;
    const double gap_oracle = angle_gap_deg(model_angle, oracle_angle);
    const double gap_axis = angle_gap_deg(model_angle, exp_axis);
    return Outcome{ratio >= 2.0 && gap_oracle <= 30.0 && gap_axis <= 30.0,
                   "max/min 0.99 radius " + fmt("%.2f", ratio) + " (need 2); max at " + fmt("%.0f", model_angle) +
                       " deg, empirical max " + fmt("%.0f", oracle_angle) + " deg, exponential axis " +
                       fmt("%.0f", exp_axis) + " deg (limit 30)"};
  });

  criterion(6, "CMGD conditional calibration and skill", [&] {
    const auto& test = cmgd->split.test;
    double worst = 0.0;
    for (double condition : {0.0, 1.0}) {
      const Dataset part = subset(test, condition);
      const auto curve = reliability_curve(cmgd->models.qsnn, part, predict_points(cmgd->models.point, part));
      for (const auto& p : curve) worst = std::max(worst, std::abs(p.frequency - p.level));
    }
    const double s = cmgd->report.model(kQsnnName).skill_vs_baseline;
    return Outcome{worst <= 0.07 && s > 0.0, "per-condition max |coverage - tau| = " + fmt("%.4f", worst) +
                                                 " (limit 0.07); skill vs unconditional " + fmt("%.4f", s)};
  });

  criterion(7, "gradient correctness", [] {
    Rng rng(7007);
    double worst_qsnn = 0.0, worst_nll = 0.0;
    int redraws = 0;
    const double h = 1e-5;
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t features = rng.next_u64() % 3;
      const std::size_t hidden = 1 + rng.next_u64() % 12;
      const std::size_t level_count = 1 + rng.next_u64() % 11;
      std::vector<double> lv;
      for (std::size_t l = 0; l < level_count; ++l) lv.push_back((l + 0.5) / static_cast<double>(level_count));
      const double l2 = sample_uniform(rng, 0.0, 1.0);
      // The pinball objective is piecewise linear: redraw configurations with
      // an output within reach of a kink, where differences are undefined.
      for (;;) {
        Dataset d(features, 2);
        for (int i = 0; i < 20; ++i) {
          std::vector<double> x;
          for (std::size_t m = 0; m < features; ++m) x.push_back(sample_uniform(rng, -1, 1));
          d.push_back(x, std::vector<double>{sample_uniform(rng, -3, 3), sample_uniform(rng, -3, 3)});
        }
        const auto set = build_qsnn_training_set(d, PointModel::constant({0.0, 0.0}));
        Mlp net = Mlp::glorot({2 + features, hidden, level_count}, Activation::Tanh, rng);
        for (auto& v : net.parameters()) v += sample_uniform(rng, -0.5, 0.5);
        double gap = INFINITY;
        for (std::size_t i = 0; i < set.size(); ++i) {
          const auto out = net.forward(set.batch().row(i));
          for (double o : out) gap = std::min(gap, std::abs(o - set.lengths[i]));
        }
        if (gap < 1e-3) {
          ++redraws;
          continue;
        }
        std::vector<double> grad(net.parameter_count());
        qsnn_objective(net, set, lv, l2, grad);
        const auto fd = central_difference(net, [&] { return qsnn_objective(net, set, lv, l2); }, h);
        worst_qsnn = std::max(worst_qsnn, max_relative_error(grad, fd));
        break;
      }

      Dataset c(std::max<std::size_t>(features, 1), 2);
      for (int i = 0; i < 20; ++i) {
        std::vector<double> x;
        for (std::size_t m = 0; m < c.feature_dim; ++m) x.push_back(sample_uniform(rng, -1, 1));
        c.push_back(x, std::vector<double>{sample_uniform(rng, -3, 3), sample_uniform(rng, -3, 3)});
      }
      const auto cset = build_covariance_training_set(c, PointModel::constant({0.0, 0.0}));
      Mlp cnet = Mlp::glorot({c.feature_dim, hidden, 3}, Activation::Tanh, rng);
      for (auto& v : cnet.parameters()) v += sample_uniform(rng, -0.3, 0.3);
      std::vector<double> cgrad(cnet.parameter_count());
      covariance_objective(cnet, cset, l2, cgrad);
      const auto cfd = central_difference(cnet, [&] { return covariance_objective(cnet, cset, l2); }, h);
      worst_nll = std::max(worst_nll, max_relative_error(cgrad, cfd));
    }
    return Outcome{worst_qsnn < 1e-4 && worst_nll < 1e-4,
                   "max rel error QSNN " + fmt("%.2e", worst_qsnn) + ", NLL " + fmt("%.2e", worst_nll) +
                       " over 100 configs each (limit 1e-4; " + std::to_string(redraws) + " kink redraws)"};
  });

  criterion(8, "pinball minimizer oracle", [] {
    Rng rng(8008);
    std::vector<double> draws(100000);
    for (auto& d : draws) d = sample_standard_normal(rng);
    double worst = 0.0;
    for (double tau : {0.1, 0.5, 0.9}) {
      // Probit via bisection on the normal CDF.
      double lo = -10, hi = 10;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (0.5 * std::erfc(-mid / std::numbers::sqrt2) < tau ? lo : hi) = mid;
      }
      const double truth = 0.5 * (lo + hi);
      double best = 0.0, best_loss = INFINITY;
      for (double q = -3.0; q <= 3.0; q += 0.002) {
        double s = 0.0;
        for (double o : draws) s += pinball_loss(o, q, tau);
        if (s < best_loss) {
          best_loss = s;
          best = q;
        }
      }
      worst = std::max(worst, std::abs(best - truth));
    }
    return Outcome{worst <= 0.02, "max |argmin - quantile| = " + fmt("%.4f", worst) + " (limit 0.02)"};
  });

  criterion(9, "directional CRPS oracle", [] {
    Rng rng(9009);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const int count = 1 + static_cast<int>(rng.next_u64() % 11);
      std::vector<double> lv, radii;
      double r = 0.0;
      for (int l = 0; l < count; ++l) {
        r += sample_uniform(rng, 0.0, 2.0);
        radii.push_back(r);
        lv.push_back((l + sample_uniform(rng, 0.05, 0.95)) / count);
      }
      const auto cdf = build_directional_cdf(lv, radii);
      const double o = sample_uniform(rng, 0.0, r + 2.0);
      const double quad = crps_quadrature([&](double y) { return cdf(y); }, radii, o, std::max(o, r) + 1.0, 100000);
      worst = std::max(worst, std::abs(directional_crps(cdf, o) - quad));
    }
    bool step_exact = true;
    for (int i = 0; i < 1000; ++i) {
      const double q = sample_uniform(rng, 0, 10), o = sample_uniform(rng, 0, 10);
      step_exact = step_exact && directional_crps(DirectionalCdf::step(q), o) == std::abs(q - o);
    }
    return Outcome{worst < 1e-6 && step_exact, "max |closed form - quadrature| = " + fmt("%.2e", worst) +
                                                   " (limit 1e-6); step CDF gives |q - o| " +
                                                   (step_exact ? "exactly" : "NOT exactly")};
  });

  criterion(10, "geometry oracles", [&] {
    double worst_poly = 0.0;
    for (int d : {3, 4, 7, 36, 360, 3600}) {
      QuantileSurfaceForecast s{{0.0, 0.0}, {0.5}, direction_grid(d), std::vector<double>(static_cast<std::size_t>(d), 1.0)};
      worst_poly = std::max(worst_poly, std::abs(polygon_area(s, 0) - 0.5 * d * std::sin(2 * std::numbers::pi / d)));
    }
    QuantileSurfaceForecast circle{{0.0, 0.0}, {0.5}, direction_grid(3600), std::vector<double>(3600, 1.0)};
    const double circle_err = std::abs(polygon_area(circle, 0) - std::numbers::pi);

    // Monte Carlo against a trained, skewed surface.
    const auto point = smd->models.point.predict({});
    const auto surface = predict_surface(smd->models.qsnn, point, {}, direction_grid(360));
    const std::size_t level = 8;  // 0.9
    double reach = 0.0;
    for (std::size_t j = 0; j < 360; ++j) reach = std::max(reach, surface.radius(level, j));
    const Box box{{point[0] - reach, point[1] - reach}, {point[0] + reach, point[1] + reach}};
    const auto mc = monte_carlo_volume([&](std::span<const double> p) { return polygon_contains(surface, level, p); },
                                       box, 100000, Rng(10010));
    const double exact = polygon_area(surface, level);
    const double z = std::abs(mc.volume - exact) / mc.standard_error;
    return Outcome{worst_poly <= 1e-12 && circle_err <= 1e-5 && z <= 3.0,
                   "regular polygons " + fmt("%.1e", worst_poly) + " (1e-12); D=3600 circle " + fmt("%.1e", circle_err) +
                       " (1e-5); MC " + fmt("%.3f", mc.volume) + " vs " + fmt("%.3f", exact) + " = " + fmt("%.2f", z) +
                       " SE (3)"};
  });

  criterion(11, "chi2 link", [] {
    double worst = 0.0;
    Rng rng(11011);
    const Dataset mgd_draws = gen_mgd(rng, 100000);
    const Dataset cmgd_draws = gen_cmgd(rng, 100000);
    for (const Dataset* d : {&mgd_draws, &cmgd_draws}) {
      const auto kind = d->feature_dim ? SyntheticKind::Cmgd : SyntheticKind::Mgd;
      const auto model = true_quantile_model(kind, {0.5, 0.9, 0.99});
      const auto curve = reliability_curve(model, *d, std::vector<Vec>(d->size(), Vec{0.0, 0.0}));
      for (const auto& p : curve) worst = std::max(worst, std::abs(p.frequency - p.level));
    }
    const double x = chi2_inverse_cdf(0.9, 2);
    const double err = std::abs(x - (-2.0 * std::log(0.1)));
    return Outcome{worst <= 0.01 && err <= 1e-8, "max |coverage - tau| = " + fmt("%.4f", worst) +
                                                     " (limit 0.01); chi2_2^-1(0.9) = " + fmt("%.9f", x) + ", off -2 ln 0.1 by " + fmt("%.1e", err)};
  });

  criterion(12, "no quantile crossing", [&] {
    Rng rng(12012);
    std::vector<const QsnnModel*> models;
    for (const auto& run : mgd) models.push_back(&run.models.qsnn);
    models.push_back(&smd->models.qsnn);
    models.push_back(&cmgd->models.qsnn);
    long violations = 0, checked = 0;
    for (const auto* m : models) {
      for (int i = 0; i < 10000; ++i) {
        const double a = sample_uniform(rng, 0.0, 2.0 * std::numbers::pi);
        const Vec u{std::cos(a), std::sin(a)};
        Vec x;
        for (std::size_t k = 0; k < m->feature_dim(); ++k) x.push_back(sample_uniform(rng, -2.0, 3.0));
        const auto r = m->radii(u, x);
        for (std::size_t l = 0; l < r.size(); ++l) {
          violations += r[l] < 0.0 || (l > 0 && r[l] < r[l - 1]);
        }
        ++checked;
      }
    }
    return Outcome{violations == 0, std::to_string(violations) + " violations in " + std::to_string(checked) +
                                        " random inputs over " + std::to_string(models.size()) + " trained models"};
  });

  criterion(13, "determinism of run --preset mgd --seed 7", [] {
    const fs::path base = fs::temp_directory_path() / "qsurf_acceptance_determinism";
    fs::remove_all(base);
    std::ostringstream sink;
    for (const char* name : {"a", "b"}) {
      const std::vector<std::string> args{"qsurf", "run", "--preset", "mgd", "--seed", "7", "--out", (base / name).string()};
      if (cli::run(args, sink, sink) != 0) return Outcome{false, "run exited nonzero: " + sink.str()};
    }
    std::size_t files = 0, differing = 0;
    for (const auto& entry : fs::directory_iterator(base / "a")) {
      ++files;
      const auto other = base / "b" / entry.path().filename();
      if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++differing;
    }
    std::size_t files_b = 0;
    for ([[maybe_unused]] const auto& entry : fs::directory_iterator(base / "b")) ++files_b;
    return Outcome{differing == 0 && files == files_b && files > 0,
                   std::to_string(files) + " files, " + std::to_string(differing) + " differ"};
  });

  std::printf("%d of 13 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
