#pragma once

// Local-PCA normal estimation for codimension-one point clouds.

#include <cstddef>
#include <span>
#include <vector>

#include "avc/randgeom.hpp"

namespace avc {

/// Strict annulus inner < |p - center| < outer. inner = 0 gives an open ball
/// that excludes exact duplicates of the center.
struct NeighborQuery {
  std::span<const double> center;
  double inner = 0.0;
  double outer = 0.0;
};

/// Indices in ascending order. Throws DomainError for an invalid query.
std::vector<std::size_t> annulus_neighbors(const PointCloud& cloud,
                                           const NeighborQuery& query);

enum class WeightMode {
  kLinear,      // w = sqrt(exp(-s d^2 / eps))
  kNormalized,    // w = sqrt(exp(-s d^2 / eps^2))
};

struct TangentOptions {
  double weight_scale = 5.0;
  WeightMode weight_mode = WeightMode::kLinear;
};

struct TangentEstimate {
  std::vector<double> base_point;
  UnitVector normal;
  std::size_t neighbor_count = 0;
  double weight_scale = 5.0;
  /// Singular values of the weighted neighbor matrix, descending.
  std::vector<double> singular_values;
};

/// Normal of the tangent space at x from the neighbors in the open ball of
/// radius eps. The normal is the left singular vector of the smallest singular
/// value, signed so that its largest-magnitude component is positive.
///
/// Throws DomainError if the cloud is not codimension one (ambient = m + 1),
/// InsufficientNeighbors with fewer than m + 1 neighbors and
/// DegenerateNeighborhood when the two smallest singular values are within
/// 1e-12 (relative to the largest).
TangentEstimate estimate_tangent(const PointCloud& cloud, std::span<const double> x, int m,
                                 double eps, const TangentOptions& options = {});

/// Normals at several query points, evaluated in parallel.
std::vector<TangentEstimate> estimate_tangents(const PointCloud& cloud,
                                               std::span<const std::vector<double>> xs,
                                               int m, double eps,
                                               const TangentOptions& options = {},
                                               unsigned threads = 0);

/// arccos |<a, b>| in [0, pi/2], via atan2 so small angles keep full accuracy.
double normal_angle(std::span<const double> a, std::span<const double> b);

double tangent_angle(const TangentEstimate& a, const TangentEstimate& b);

}  // namespace avc
