#pragma once

// Point clouds on hyperspheres and von Mises-Fisher sampling.
//
// The "north pole" of S^m_r is r * e_{m+1}, i.e. the last coordinate axis.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "avc/rng.hpp"

namespace avc {

/// Points in R^n stored row-major. For sphere samples n = m + 1.
class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(int ambient_dim, int intrinsic_dim, double radius, double noise_sigma,
             std::vector<double> coords);

  int ambient_dim() const { return ambient_dim_; }
  int intrinsic_dim() const { return intrinsic_dim_; }
  double radius() const { return radius_; }
  double noise_sigma() const { return noise_sigma_; }
  std::size_t size() const { return ambient_dim_ == 0 ? 0 : coords_.size() / ambient_dim_; }
  bool empty() const { return size() == 0; }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * ambient_dim_, static_cast<std::size_t>(ambient_dim_)};
  }
  std::span<const double> coords() const { return coords_; }
  std::vector<double>& mutable_coords() { return coords_; }

  /// Subset of rows, in the given order.
  PointCloud select(std::span<const std::size_t> indices) const;

 private:
  int ambient_dim_ = 0;
  int intrinsic_dim_ = 0;
  double radius_ = 1.0;
  double noise_sigma_ = 0.0;
  std::vector<double> coords_;
};

/// Normalized direction; the constructor rescales its input to unit length.
class UnitVector {
 public:
  UnitVector() = default;
  explicit UnitVector(std::vector<double> coords);

  static UnitVector axis(int dim, int index);
  static UnitVector north_pole(int ambient_dim) { return axis(ambient_dim, ambient_dim - 1); }

  std::span<const double> coords() const { return coords_; }
  int dim() const { return static_cast<int>(coords_.size()); }
  double operator[](std::size_t i) const { return coords_[i]; }
  double dot(std::span<const double> other) const;

 private:
  std::vector<double> coords_;
};

struct VmfComponent {
  double weight;
  double kappa;
};

/// vMF mixture sharing one mean direction. Weights are renormalized on
/// construction; their input sum must already be within 1e-9 of one.
class VmfMixture {
 public:
  VmfMixture(UnitVector mean, std::vector<VmfComponent> components);

  static VmfMixture single(UnitVector mean, double kappa) {
    return VmfMixture(std::move(mean), {{1.0, kappa}});
  }

  const UnitVector& mean() const { return mean_; }
  std::span<const VmfComponent> components() const { return components_; }
  std::size_t size() const { return components_.size(); }

 private:
  UnitVector mean_;
  std::vector<VmfComponent> components_;
};

/// Uniform points on S^m_r (normalized isotropic Gaussians).
PointCloud sample_sphere_uniform(int m, double r, std::size_t count, std::uint64_t seed);

/// Probability that a uniform point on S^m lies within polar angle `angle` of
/// the north pole.
double cap_probability(int m, double angle);

/// The points of a `total_count`-point uniform sample of S^m_r that fall
/// within Euclidean distance `chord` of the north pole. The count is drawn
/// as Binomial(total_count, cap probability) and the points uniformly inside
/// the cap, which has the same law as sampling everything and filtering.
PointCloud sample_sphere_cap(int m, double r, std::size_t total_count, double chord,
                             Rng& rng);

/// Adds i.i.d. N(0, sigma^2) to every coordinate. sigma == 0 returns a copy.
PointCloud add_gaussian_noise(const PointCloud& cloud, double sigma, std::uint64_t seed);
void add_gaussian_noise_inplace(PointCloud& cloud, double sigma, Rng& rng);

/// Draws from vMF(mean, kappa) with Wood's rejection scheme.
class VmfSampler {
 public:
  VmfSampler(const UnitVector& mean, double kappa);
  /// Writes one unit vector into out (size = ambient dimension).
  void draw(Rng& rng, std::span<double> out) const;

 private:
  std::vector<double> mean_;
  double kappa_;
  int p_;
  double b_;
  double s_;         // 1 - x0
  double log_env_;   // ln(1 - x0^2)
};

std::vector<UnitVector> sample_vmf(const VmfMixture& mixture, std::size_t count,
                                   std::uint64_t seed);

/// Folded angle arccos|<x, mu0>| of each vMF mixture draw, computed through
/// atan2 for accuracy near zero. Used by calibration oracles and the
/// sampler-density consistency checks.
std::vector<double> sample_folded_angles(const VmfMixture& mixture, const UnitVector& mu0,
                                         std::size_t count, std::uint64_t seed);

/// Unit vector at angle `alpha` from the north pole of S^{dim-1}, tilted
/// towards e_{dim-1}.
UnitVector tilted_pole(int dim, double alpha);

}  // namespace avc
