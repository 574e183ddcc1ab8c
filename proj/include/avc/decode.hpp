#pragma once

// Bias-corrected curvature: calibrate the vMF-mixture noise of the tangent
// estimator at the north pole, then recover the true inter-normal angle by
// maximum likelihood and convert it to curvature.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "avc/curvature.hpp"
#include "avc/mixture_fit.hpp"
#include "avc/randgeom.hpp"
#include "avc/tangent.hpp"
#include "json.hpp"

namespace avc {

struct CalibrationConfig {
  int m = 3;
  double r = 1.0;
  double epsilon = 0.52;
  double sigma = 0.0;  // 0 means perfect sampling
  double density = 50.0;
  std::size_t n_points = 1000;
  double weight_scale = 5.0;
  WeightMode weight_mode = WeightMode::kLinear;
  int max_components = 4;

  void validate() const;
};

struct CalibrationReport {
  CalibrationConfig config;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::size_t skipped = 0;
  std::vector<double> angle_samples;
  std::vector<VmfComponent> components;  // the selected fit
  double fit_log_likelihood = 0.0;
  std::vector<MixtureFit> candidates;

  int fit_components() const { return static_cast<int>(components.size()); }
  /// The fitted noise model, centered on the true normal e_{m+1}.
  VmfMixture fitted() const;
};

/// Runs `trials` independent tangent estimations at the north pole r e_{m+1}
/// and fits the folded angles to the true normal. Each trial draws only the
/// part of the cloud that can reach the tangent ball (see sample_sphere_cap),
/// padded by sigma (sqrt(m + 1) + 8) under noise. Trial t uses stream t of
/// `seed`, so the result does not depend on the thread count.
///
/// Trials that raise a numerical error are skipped and counted; more than 1%
/// skipped raises NumericalError. trials < 100 raises DomainError.
CalibrationReport calibrate(const CalibrationConfig& config, std::size_t trials,
                            std::uint64_t seed, unsigned threads = 0);

nlohmann::json to_json(const CalibrationConfig& config);
CalibrationConfig calibration_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CalibrationReport& report);
CalibrationReport calibration_report_from_json(const nlohmann::json& j);
void save_calibration(const CalibrationReport& report, const std::filesystem::path& path);
CalibrationReport load_calibration(const std::filesystem::path& path);

struct MleResult {
  double alpha_hat = 0.0;
  int iterations = 0;
  bool converged = false;
  double log_likelihood = 0.0;
};

inline constexpr double kAlphaMargin = 1e-4;
inline constexpr int kAlphaGrid = 64;

/// Maximizes the mixture angle likelihood over alpha in
/// (1e-4, pi/2 - 1e-4): 64-point grid scan, then Brent refinement on the
/// cells around the best grid point. Throws DomainError for fewer than 3
/// samples and OptimizationFailure if the optimum stays on the boundary.
MleResult mle_alpha(std::span<const double> thetas, const VmfMixture& noise, int m);

struct DecodedCurvature {
  double alpha_hat = 0.0;
  double d_bar = 0.0;
  double omega_tilde = 0.0;
  std::size_t n_samples = 0;
  int iterations = 0;
  bool converged = false;
  double log_likelihood = 0.0;
};

/// Decoding from already collected (theta, chord) samples.
DecodedCurvature decode_samples(std::span<const CurvatureSample> samples,
                                const VmfMixture& noise, int m);

DecodedCurvature decoded_curvature(const PointCloud& cloud, std::span<const double> x, int m,
                                   double eps, double eps_prime, const VmfMixture& noise,
                                   const TangentOptions& options = {});

/// Naive and decoded estimates computed from the same annulus samples.
struct CurvatureEstimate {
  NaiveCurvature naive;
  DecodedCurvature decoded;
};

CurvatureEstimate estimate_curvature(const PointCloud& cloud, std::span<const double> x,
                                     int m, double eps, double eps_prime,
                                     const VmfMixture& noise,
                                     const TangentOptions& options = {});

}  // namespace avc
