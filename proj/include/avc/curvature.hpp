#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "avc/randgeom.hpp"
#include "avc/tangent.hpp"

namespace avc {

struct CurvatureSample {
  double theta = 0.0;  // folded angle between the two normals, [0, pi/2]
  double chord = 0.0;  // |x - y|
  double omega = 0.0;  // 2 sin(theta / 2) / chord
};

/// 2 sin(theta / 2) / chord for theta in [0, pi], chord > 0.
double discrete_variation_curvature(double theta, double chord);

/// Produces the tangent estimate at a point. The default implementation is
/// estimate_tangent on the cloud; tests inject exact normals through this.
using TangentEstimator = std::function<TangentEstimate(std::span<const double>)>;

struct NaiveCurvature {
  double omega_bar = 0.0;
  std::vector<CurvatureSample> samples;
  TangentEstimate base;
  double chord_mean = 0.0;
  double chord_stddev = 0.0;
};

/// Curvature samples between x and every point of the open annulus
/// eps < |y - x| < eps_prime. Throws EmptyAnnulus when there are none.
NaiveCurvature naive_curvature(const PointCloud& cloud, std::span<const double> x,
                               double eps, double eps_prime,
                               const TangentEstimator& estimator);

/// Same with the PCA estimator (ball radius eps, intrinsic dimension m).
NaiveCurvature naive_curvature(const PointCloud& cloud, std::span<const double> x, int m,
                               double eps, double eps_prime,
                               const TangentOptions& options = {});

struct ShapeOperatorSpec {
  std::vector<double> eigenvalues;
};

struct MonteCarloEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

/// Mean of |L u| over uniform unit vectors u, with L = diag(eigenvalues).
/// When all |eigenvalues| coincide every draw returns the same value, so the
/// estimate is exact.
MonteCarloEstimate absolute_variation_curvature_mc(const ShapeOperatorSpec& shape,
                                                   std::size_t trials, std::uint64_t seed);

}  // namespace avc
