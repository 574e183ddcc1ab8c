#include "avc/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "avc/errors.hpp"
#include "avc/histogram.hpp"
#include "avc/parallel.hpp"
#include "avc/pointcloud_io.hpp"
#include "avc/specfun.hpp"
#include "avc/version.hpp"

namespace avc {
namespace {

constexpr std::uint64_t kCalibrationStream = 0xCA1B;
constexpr std::uint64_t kRepeatStream = 0x5245504541;

bool same_radius(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, b); }

template <typename T>
T field(const nlohmann::json& j, const char* name) {
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field '") + name + "': " + e.what());
  }
}

template <typename T>
std::optional<T> optional_field(const nlohmann::json& j, const char* name) {
  if (!j.contains(name) || j.at(name).is_null()) return std::nullopt;
  return field<T>(j, name);
}

}  // namespace

double default_epsilon(double r) {
  if (same_radius(r, 1.0)) return 0.52;
  if (same_radius(r, 2.0)) return 0.78;
  throw ConfigError("no default epsilon for r = " + format_double(r) + "; set epsilon explicitly");
}

std::size_t derived_n_points(int m, double r, double density) {
  return static_cast<std::size_t>(std::ceil(density * sphere_surface_area(m, r)));
}

void ExperimentConfig::validate() const {
  if (m < 2) throw ConfigError("m must be >= 2");
  if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("r must be positive");
  if (sampling == Sampling::kNoisy && !(sigma > 0.0)) {
    throw ConfigError("noisy sampling needs sigma > 0");
  }
  if (sampling == Sampling::kPerfect && sigma != 0.0) {
    throw ConfigError("perfect sampling needs sigma = 0");
  }
  if (!std::isfinite(sigma) || sigma < 0.0) throw ConfigError("sigma must be >= 0");
  if (!(density > 0.0) || !std::isfinite(density)) throw ConfigError("density must be positive");
  if (n_points == 0) throw ConfigError("n_points must be positive");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(epsilon_prime > epsilon)) {
    throw ConfigError("epsilon_prime (" + format_double(epsilon_prime) +
                      ") must exceed epsilon (" + format_double(epsilon) + ")");
  }
  if (!(weight_scale > 0.0)) throw ConfigError("weight_scale must be positive");
  if (calibration_trials < 100) throw ConfigError("calibration_trials must be >= 100");
  if (estimate_repeats < 1) throw ConfigError("estimate_repeats must be >= 1");
  if (max_components < 1 || max_components > 4) {
    throw ConfigError("max_components must be in [1, 4]");
  }
}

CalibrationConfig ExperimentConfig::calibration() const {
  CalibrationConfig c;
  c.m = m;
  c.r = r;
  c.epsilon = epsilon;
  c.sigma = sigma;
  c.density = density;
  c.n_points = n_points;
  c.weight_scale = weight_scale;
  c.weight_mode = weight_mode;
  c.max_components = max_components;
  return c;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"m", c.m},
          {"r", c.r},
          {"sampling", c.sampling == Sampling::kNoisy ? "noisy" : "perfect"},
          {"sigma", c.sigma},
          {"density", c.density},
          {"n_points", c.n_points},
          {"epsilon", c.epsilon},
          {"epsilon_prime", c.epsilon_prime},
          {"weight_scale", c.weight_scale},
          {"weight_mode", c.weight_mode == WeightMode::kNormalized ? "normalized" : "linear"},
          {"calibration_trials", c.calibration_trials},
          {"estimate_repeats", c.estimate_repeats},
          {"seed", c.seed},
          {"max_components", c.max_components}};
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const char* known[] = {"m",           "r",            "sampling",        "sigma",
                                "density",     "n_points",     "epsilon",         "epsilon_prime",
                                "weight_scale", "weight_mode", "calibration_trials",
                                "estimate_repeats", "seed",    "max_components"};
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw ConfigError("unknown config field '" + item.key() + "'");
  }

  ExperimentConfig c;
  c.m = field<int>(j, "m");
  c.r = field<double>(j, "r");
  c.sigma = optional_field<double>(j, "sigma").value_or(0.0);
  const std::string sampling =
      optional_field<std::string>(j, "sampling").value_or(c.sigma > 0.0 ? "noisy" : "perfect");
  if (sampling == "perfect") {
    c.sampling = Sampling::kPerfect;
  } else if (sampling == "noisy") {
    c.sampling = Sampling::kNoisy;
  } else {
    throw ConfigError("sampling must be 'perfect' or 'noisy'");
  }
  c.density = field<double>(j, "density");
  if (c.m < 1 || !(c.r > 0.0)) throw ConfigError("m must be >= 1 and r positive");
  c.n_points = optional_field<std::size_t>(j, "n_points")
                   .value_or(derived_n_points(c.m, c.r, c.density));
  c.epsilon = optional_field<double>(j, "epsilon").value_or(0.0);
  if (!j.contains("epsilon") || j.at("epsilon").is_null()) c.epsilon = default_epsilon(c.r);
  c.epsilon_prime =
      optional_field<double>(j, "epsilon_prime").value_or(c.epsilon + 0.2 * c.r);
  c.weight_scale = optional_field<double>(j, "weight_scale").value_or(5.0);
  const std::string mode = optional_field<std::string>(j, "weight_mode").value_or("linear");
  if (mode == "linear") {
    c.weight_mode = WeightMode::kLinear;
  } else if (mode == "normalized") {
    c.weight_mode = WeightMode::kNormalized;
  } else {
    throw ConfigError("weight_mode must be 'linear' or 'normalized'");
  }
  c.calibration_trials = optional_field<std::size_t>(j, "calibration_trials")
                             .value_or(c.m >= 10 ? 10000 : 50000);
  c.estimate_repeats = optional_field<std::size_t>(j, "estimate_repeats").value_or(50);
  c.seed = optional_field<std::uint64_t>(j, "seed").value_or(0);
  c.max_components = optional_field<int>(j, "max_components").value_or(4);
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config (" + path.string() + ")");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed config JSON (" + path.string() + "): " + e.what());
  }
  return experiment_config_from_json(j);
}

const std::vector<SphereProfile>& sphere_profiles() {
  static const std::vector<SphereProfile> rows = {
      {3, 1.0, 50, 1000},         {5, 1.0, 200, 6400},        {10, 1.0, 100000, 2100000},
      {3, 2.0, 20, 3160},         {5, 2.0, 25, 24825},        {10, 2.0, 500, 10611500},
      {12, 2.0, 3000, 145470000},
  };
  return rows;
}

std::optional<SphereProfile> find_sphere_profile(int m, double r) {
  for (const auto& row : sphere_profiles()) {
    if (row.m == m && same_radius(row.r, r)) return row;
  }
  return std::nullopt;
}

std::vector<std::string> config_warnings(const ExperimentConfig& c) {
  std::vector<std::string> out;
  const auto row = find_sphere_profile(c.m, c.r);
  // The published counts and the density-derived counts differ by rounding.
  if (row && c.n_points < std::min(row->n_points, derived_n_points(c.m, c.r, row->density))) {
    std::ostringstream os;
    os << "n_points = " << c.n_points << " is below the reference sample count "
       << row->n_points << " for S^" << c.m << "_" << format_double(c.r) << " (density "
       << format_double(row->density) << "); running a scaled-down profile";
    out.push_back(os.str());
  }
  return out;
}

EstimatorSummary summarize(std::span<const double> values, double truth) {
  EstimatorSummary s;
  if (values.empty()) return s;
  CompensatedSum sum;
  for (double v : values) sum.add(v);
  const double n = static_cast<double>(values.size());
  s.mean = sum.value() / n;
  CompensatedSum sq;
  for (double v : values) sq.add((v - s.mean) * (v - s.mean));
  s.stddev = values.size() > 1 ? std::sqrt(sq.value() / (n - 1.0)) : 0.0;
  s.abs_bias = std::abs(s.mean - truth);
  return s;
}

std::uint64_t calibration_seed(std::uint64_t seed) {
  return derive_seed(seed, kCalibrationStream);
}

ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads) {
  config.validate();
  const CalibrationReport cal = calibrate(config.calibration(), config.calibration_trials,
                                          calibration_seed(config.seed), threads);
  return run_experiment(config, cal, threads);
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const CalibrationReport& calibration, unsigned threads) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  if (calibration.config.m != config.m || !same_radius(calibration.config.r, config.r)) {
    throw ConfigError("calibration was computed for a different sphere");
  }
  const int m = config.m;
  const VmfMixture noise = calibration.fitted();
  const TangentOptions options{config.weight_scale, config.weight_mode};
  std::vector<double> x(m + 1, 0.0);
  x[m] = config.r;
  const double margin = config.sigma > 0.0 ? config.sigma * (std::sqrt(m + 1.0) + 8.0) : 0.0;
  const double reach = config.epsilon + config.epsilon_prime + margin;
  const std::uint64_t repeat_seed = derive_seed(config.seed, kRepeatStream);

  const std::size_t n = config.estimate_repeats;
  std::vector<CurvatureEstimate> estimates(n);
  parallel_for(
      n,
      [&](std::size_t k) {
        try {
          Rng rng = Rng::stream(repeat_seed, k);
          PointCloud cloud = sample_sphere_cap(m, config.r, config.n_points, reach, rng);
          add_gaussian_noise_inplace(cloud, config.sigma, rng);
          estimates[k] =
              estimate_curvature(cloud, x, m, config.epsilon, config.epsilon_prime, noise, options);
        } catch (const Error& e) {
          throw Error(e.category(), "repeat " + std::to_string(k) + " (seed " +
                                        std::to_string(config.seed) + "): " + e.what());
        }
      },
      threads);

  ExperimentResult result;
  result.config = config;
  result.calibration = calibration;
  result.true_curvature = 1.0 / config.r;
  for (const auto& e : estimates) {
    result.naive_values.push_back(e.naive.omega_bar);
    result.decoded_values.push_back(e.decoded.omega_tilde);
    result.alpha_hats.push_back(e.decoded.alpha_hat);
    result.annulus_sizes.push_back(e.naive.samples.size());
  }
  result.naive = summarize(result.naive_values, result.true_curvature);
  result.decoded = summarize(result.decoded_values, result.true_curvature);
  result.warnings = config_warnings(config);
  result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string s = to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

nlohmann::json summary_json(const EstimatorSummary& s) {
  return {{"mean", s.mean}, {"stddev", s.stddev}, {"abs_bias", s.abs_bias}};
}

}  // namespace

nlohmann::json to_json(const ExperimentResult& r) {
  nlohmann::json cal = to_json(r.calibration);
  cal.erase("angle_samples");
  return {{"config", to_json(r.config)},
          {"provenance",
           {{"config_hash", config_hash(r.config)},
            {"seed", r.config.seed},
            {"code_version", kVersion}}},
          {"true_curvature", r.true_curvature},
          {"summary", {{"naive", summary_json(r.naive)}, {"decoded", summary_json(r.decoded)}}},
          {"naive_values", r.naive_values},
          {"decoded_values", r.decoded_values},
          {"alpha_hats", r.alpha_hats},
          {"annulus_sizes", r.annulus_sizes},
          {"calibration", cal},
          {"warnings", r.warnings},
          {"runtime_seconds", r.runtime_seconds}};
}

std::filesystem::path write_run(const ExperimentResult& result,
                                const std::filesystem::path& out_root) {
  const auto dir = out_root / (config_hash(result.config) + "-" + std::to_string(result.config.seed));
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create run directory (" + dir.string() + "): " + ec.message());

  auto write_json = [&](const std::filesystem::path& p, const nlohmann::json& j) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot open for writing (" + p.string() + ")");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed (" + p.string() + ")");
  };
  write_json(dir / "config.json", to_json(result.config));
  write_json(dir / "result.json", to_json(result));
  save_calibration(result.calibration, dir / "calibration.json");

  const std::vector<std::string> names{"naive", "decoded", "alpha_hat"};
  const std::vector<std::vector<double>> cols{result.naive_values, result.decoded_values,
                                              result.alpha_hats};
  write_columns_csv(dir / "estimates.csv", names, cols);

  std::ostringstream tag;
  tag << "S^" << result.config.m << "_" << format_double(result.config.r);
  if (result.config.sampling == Sampling::kNoisy) {
    tag << ", sigma = " << format_double(result.config.sigma);
  }
  emit_histogram(result.naive_values, 30, dir / "naive.svg",
                 {"naive curvature, " + tag.str(), "curvature", result.true_curvature});
  emit_histogram(result.decoded_values, 30, dir / "decoded.svg",
                 {"decoded curvature, " + tag.str(), "curvature", result.true_curvature});
  return dir;
}

}  // namespace avc
