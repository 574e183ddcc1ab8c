#pragma once

// Experiment configuration, the reference sample-size table, the experiment
// driver and run-directory output.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "avc/decode.hpp"
#include "json.hpp"

namespace avc {

enum class Sampling { kPerfect, kNoisy };

/// All fields are resolved: parsing fills defaults for epsilon,
/// epsilon_prime, n_points and calibration_trials when they are absent, and
/// serialization writes every field, so a parse/serialize round trip is exact.
struct ExperimentConfig {
  int m = 3;
  double r = 1.0;
  Sampling sampling = Sampling::kPerfect;
  double sigma = 0.0;
  double density = 50.0;
  std::size_t n_points = 0;
  double epsilon = 0.52;
  double epsilon_prime = 0.72;
  double weight_scale = 5.0;
  WeightMode weight_mode = WeightMode::kLinear;
  std::size_t calibration_trials = 50000;
  std::size_t estimate_repeats = 50;
  std::uint64_t seed = 0;
  int max_components = 4;

  /// Throws ConfigError on invalid combinations (e.g. epsilon_prime <= epsilon).
  void validate() const;
  CalibrationConfig calibration() const;
};

/// Defaults: epsilon 0.52 for r = 1 and 0.78 for r = 2 (other radii must set
/// it), epsilon_prime = epsilon + 0.2 r, n_points = ceil(density * area),
/// calibration_trials 50000 (10000 for m >= 10).
double default_epsilon(double r);
std::size_t derived_n_points(int m, double r, double density);

nlohmann::json to_json(const ExperimentConfig& config);
/// Parses and validates; missing optional fields get their defaults.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct SphereProfile {
  int m;
  double r;
  double density;
  std::size_t n_points;
};

/// Reference (m, r, density, sample count) profiles.
const std::vector<SphereProfile>& sphere_profiles();
std::optional<SphereProfile> find_sphere_profile(int m, double r);

/// Human-readable warnings, e.g. n_points below the published sample count.
std::vector<std::string> config_warnings(const ExperimentConfig& config);

struct EstimatorSummary {
  double mean = 0.0;
  double stddev = 0.0;
  double abs_bias = 0.0;
};

EstimatorSummary summarize(std::span<const double> values, double truth);

struct ExperimentResult {
  ExperimentConfig config;
  CalibrationReport calibration;
  std::vector<double> naive_values;
  std::vector<double> decoded_values;
  std::vector<double> alpha_hats;
  std::vector<std::size_t> annulus_sizes;
  double true_curvature = 1.0;
  EstimatorSummary naive;
  EstimatorSummary decoded;
  double runtime_seconds = 0.0;
  std::vector<std::string> warnings;
};

/// Seed handed to calibrate() by run_experiment for the given master seed.
/// The calibrate CLI command uses it too, so a saved calibration reproduces
/// the one an experiment with the same seed would compute.
std::uint64_t calibration_seed(std::uint64_t seed);

/// Calibrates, then estimates naive and decoded curvature at the north pole
/// of `estimate_repeats` independent clouds. Repeat k uses its own stream of
/// the seed; each cloud is drawn only where it can influence the estimate
/// (within epsilon + epsilon_prime of the pole, plus the noise margin).
/// Errors are rethrown with the failing repeat and seed in the message.
ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads = 0);

/// An already computed calibration can be reused (it must match the config).
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const CalibrationReport& calibration, unsigned threads = 0);

/// 16 hex digits of FNV-1a over the compact config JSON.
std::string config_hash(const ExperimentConfig& config);

/// Result document; runtime_seconds is the only field that varies between
/// identical runs.
nlohmann::json to_json(const ExperimentResult& result);

/// Writes config.json, result.json, calibration.json, estimates.csv and the
/// naive/decoded histograms (SVG with sibling CSV) into
/// out_root/<hash>-<seed>/ and returns that directory.
std::filesystem::path write_run(const ExperimentResult& result,
                                const std::filesystem::path& out_root);

}  // namespace avc
