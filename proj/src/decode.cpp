#include "avc/decode.hpp"

#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "avc/errors.hpp"
#include "avc/parallel.hpp"
#include "avc/pushforward.hpp"
#include "avc/specfun.hpp"

namespace avc {
namespace {

constexpr int kBrentBits = 30;
constexpr std::uintmax_t kBrentMaxIter = 200;

const char* weight_mode_name(WeightMode m) {
  return m == WeightMode::kNormalized ? "normalized" : "linear";
}

WeightMode weight_mode_from(const std::string& s) {
  if (s == "linear") return WeightMode::kLinear;
  if (s == "normalized") return WeightMode::kNormalized;
  throw ConfigError("unknown weight_mode '" + s + "' (expected linear or normalized)");
}

std::vector<double> north_pole_point(int m, double r) {
  std::vector<double> x(m + 1, 0.0);
  x[m] = r;
  return x;
}

}  // namespace

void CalibrationConfig::validate() const {
  if (m < 2) throw ConfigError("m must be >= 2");
  if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("r must be positive");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be positive");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be >= 0");
  if (!(density > 0.0)) throw ConfigError("density must be positive");
  if (n_points == 0) throw ConfigError("n_points must be positive");
  if (!(weight_scale > 0.0)) throw ConfigError("weight_scale must be positive");
  if (max_components < 1 || max_components > 4) {
    throw ConfigError("max_components must be in [1, 4]");
  }
}

VmfMixture CalibrationReport::fitted() const {
  return VmfMixture(UnitVector::north_pole(config.m + 1), components);
}

CalibrationReport calibrate(const CalibrationConfig& config, std::size_t trials,
                            std::uint64_t seed, unsigned threads) {
  config.validate();
  if (trials < 100) throw DomainError("calibration needs at least 100 trials");

  const int m = config.m;
  const std::vector<double> x = north_pole_point(m, config.r);
  const double reach =
      config.epsilon + (config.sigma > 0.0 ? config.sigma * (std::sqrt(m + 1.0) + 8.0) : 0.0);
  const TangentOptions options{config.weight_scale, config.weight_mode};
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<double> angles(trials, nan);
  parallel_for(
      trials,
      [&](std::size_t t) {
        Rng rng = Rng::stream(seed, t);
        PointCloud cloud = sample_sphere_cap(m, config.r, config.n_points, reach, rng);
        add_gaussian_noise_inplace(cloud, config.sigma, rng);
        try {
          const TangentEstimate est = estimate_tangent(cloud, x, m, config.epsilon, options);
          angles[t] = normal_angle(est.normal.coords(), UnitVector::north_pole(m + 1).coords());
        } catch (const NumericalError&) {
          // left as NaN and counted below
        }
      },
      threads);

  CalibrationReport report;
  report.config = config;
  report.seed = seed;
  report.trials = trials;
  for (double a : angles) {
    if (std::isnan(a)) {
      ++report.skipped;
    } else {
      report.angle_samples.push_back(a);
    }
  }
  if (report.skipped * 100 > trials) {
    throw NumericalError("calibration skipped " + std::to_string(report.skipped) + " of " +
                         std::to_string(trials) +
                         " trials (more than 1%); the tangent ball is too sparse");
  }
  const MixtureFitReport fit = fit_vmf_mixture_report(report.angle_samples, m,
                                                      config.max_components);
  report.components = fit.selected.components;
  report.fit_log_likelihood = fit.selected.log_likelihood;
  report.candidates = fit.candidates;
  return report;
}

nlohmann::json to_json(const CalibrationConfig& c) {
  return {{"m", c.m},
          {"r", c.r},
          {"epsilon", c.epsilon},
          {"sigma", c.sigma},
          {"density", c.density},
          {"n_points", c.n_points},
          {"weight_scale", c.weight_scale},
          {"weight_mode", weight_mode_name(c.weight_mode)},
          {"max_components", c.max_components}};
}

CalibrationConfig calibration_config_from_json(const nlohmann::json& j) {
  try {
    CalibrationConfig c;
    c.m = j.at("m").get<int>();
    c.r = j.at("r").get<double>();
    c.epsilon = j.at("epsilon").get<double>();
    c.sigma = j.at("sigma").get<double>();
    c.density = j.at("density").get<double>();
    c.n_points = j.at("n_points").get<std::size_t>();
    c.weight_scale = j.at("weight_scale").get<double>();
    c.weight_mode = weight_mode_from(j.value("weight_mode", std::string("linear")));
    c.max_components = j.value("max_components", 4);
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid calibration config: ") + e.what());
  }
}

namespace {

nlohmann::json components_json(const std::vector<VmfComponent>& cs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : cs) arr.push_back({{"weight", c.weight}, {"kappa", c.kappa}});
  return arr;
}

std::vector<VmfComponent> components_from(const nlohmann::json& arr) {
  std::vector<VmfComponent> out;
  for (const auto& c : arr) out.push_back({c.at("weight").get<double>(), c.at("kappa").get<double>()});
  return out;
}

}  // namespace

nlohmann::json to_json(const CalibrationReport& r) {
  nlohmann::json candidates = nlohmann::json::array();
  for (const auto& f : r.candidates) {
    candidates.push_back({{"components", components_json(f.components)},
                          {"log_likelihood", f.log_likelihood},
                          {"bic", f.bic},
                          {"iterations", f.iterations},
                          {"converged", f.converged}});
  }
  return {{"config", to_json(r.config)},
          {"seed", r.seed},
          {"trials", r.trials},
          {"skipped", r.skipped},
          {"fit_components", r.fit_components()},
          {"fitted", {{"mean", "e_{m+1}"}, {"components", components_json(r.components)}}},
          {"fit_log_likelihood", r.fit_log_likelihood},
          {"candidates", candidates},
          {"angle_samples", r.angle_samples}};
}

CalibrationReport calibration_report_from_json(const nlohmann::json& j) {
  try {
    CalibrationReport r;
    r.config = calibration_config_from_json(j.at("config"));
    r.seed = j.at("seed").get<std::uint64_t>();
    r.trials = j.at("trials").get<std::size_t>();
    r.skipped = j.at("skipped").get<std::size_t>();
    r.components = components_from(j.at("fitted").at("components"));
    r.fit_log_likelihood = j.value("fit_log_likelihood", 0.0);
    if (j.contains("candidates")) {
      for (const auto& c : j.at("candidates")) {
        MixtureFit f;
        f.components = components_from(c.at("components"));
        f.log_likelihood = c.at("log_likelihood").get<double>();
        f.bic = c.at("bic").get<double>();
        f.iterations = c.at("iterations").get<int>();
        f.converged = c.at("converged").get<bool>();
        r.candidates.push_back(std::move(f));
      }
    }
    if (j.contains("angle_samples")) {
      r.angle_samples = j.at("angle_samples").get<std::vector<double>>();
    }
    if (r.components.empty()) throw ConfigError("calibration has no fitted components");
    (void)r.fitted();  // validates weights and kappas
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid calibration report: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid calibration report: ") + e.what());
  }
}

void save_calibration(const CalibrationReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing (" + path.string() + ")");
  out << to_json(report).dump(2) << '\n';
  if (!out) throw IoError("write failed (" + path.string() + ")");
}

CalibrationReport load_calibration(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading (" + path.string() + ")");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed calibration JSON (" + path.string() + "): " + e.what());
  }
  return calibration_report_from_json(j);
}

MleResult mle_alpha(std::span<const double> thetas, const VmfMixture& noise, int m) {
  if (thetas.size() < 3) throw DomainError("angle MLE needs at least 3 samples");
  if (noise.mean().dim() != m + 1) throw DomainError("noise model dimension does not match m");
  const AngleMixtureDensity density(m, noise.components());

  const double lo = kAlphaMargin, hi = kHalfPi - kAlphaMargin;
  const double step = (hi - lo) / (kAlphaGrid - 1);
  auto grid = [&](int k) { return k == kAlphaGrid - 1 ? hi : lo + step * k; };
  int best = 0;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < kAlphaGrid; ++k) {
    const double ll = density.log_likelihood(grid(k), thetas);
    if (ll > best_ll) {
      best_ll = ll;
      best = k;
    }
  }
  if (!std::isfinite(best_ll)) {
    throw OptimizationFailure("angle likelihood is not finite anywhere on the grid");
  }

  const double a = grid(std::max(best - 1, 0));
  const double b = grid(std::min(best + 1, kAlphaGrid - 1));
  std::uintmax_t iters = kBrentMaxIter;
  const auto neg = [&](double alpha) { return -density.log_likelihood(alpha, thetas); };
  const auto found = boost::math::tools::brent_find_minima(neg, a, b, kBrentBits, iters);

  MleResult out;
  out.alpha_hat = found.first;
  out.log_likelihood = -found.second;
  if (out.log_likelihood < best_ll) {
    out.alpha_hat = grid(best);
    out.log_likelihood = best_ll;
  }
  out.iterations = static_cast<int>(iters);
  out.converged = iters < kBrentMaxIter;
  const double edge = 1e-7;
  if ((best == 0 && out.alpha_hat - lo < edge) ||
      (best == kAlphaGrid - 1 && hi - out.alpha_hat < edge)) {
    throw OptimizationFailure("angle likelihood is maximal at the search boundary (alpha = " +
                              std::to_string(out.alpha_hat) + ")");
  }
  return out;
}

DecodedCurvature decode_samples(std::span<const CurvatureSample> samples,
                                const VmfMixture& noise, int m) {
  std::vector<double> thetas;
  thetas.reserve(samples.size());
  CompensatedSum chord;
  for (const auto& s : samples) {
    thetas.push_back(s.theta);
    chord.add(s.chord);
  }
  const MleResult mle = mle_alpha(thetas, noise, m);
  DecodedCurvature out;
  out.alpha_hat = mle.alpha_hat;
  out.d_bar = chord.value() / static_cast<double>(samples.size());
  out.omega_tilde = 2.0 * std::sin(0.5 * out.alpha_hat) / out.d_bar;
  out.n_samples = samples.size();
  out.iterations = mle.iterations;
  out.converged = mle.converged;
  out.log_likelihood = mle.log_likelihood;
  return out;
}

CurvatureEstimate estimate_curvature(const PointCloud& cloud, std::span<const double> x,
                                     int m, double eps, double eps_prime,
                                     const VmfMixture& noise, const TangentOptions& options) {
  CurvatureEstimate out;
  out.naive = naive_curvature(cloud, x, m, eps, eps_prime, options);
  out.decoded = decode_samples(out.naive.samples, noise, m);
  return out;
}

DecodedCurvature decoded_curvature(const PointCloud& cloud, std::span<const double> x, int m,
                                   double eps, double eps_prime, const VmfMixture& noise,
                                   const TangentOptions& options) {
  return estimate_curvature(cloud, x, m, eps, eps_prime, noise, options).decoded;
}

}  // namespace avc
