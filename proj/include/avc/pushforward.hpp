#pragma once

// Densities of the folded angle between a fixed normal mu0 and a vMF-noisy
// normal X (mean at angle alpha from mu0), and of the discrete curvature
// 2 sin(theta/2) / chord derived from it on a sphere of radius r.
//
// All functions return natural logarithms. The angle density lives on the
// folded domain [0, pi/2]; the curvature density on (0, C / sqrt 2].

#include <span>
#include <vector>

#include "avc/randgeom.hpp"

namespace avc {

struct AnglePushforwardParams {
  int m = 2;           // normals live on S^m, m >= 2
  double kappa = 1.0;  // > 0
  double alpha = 0.0;  // [0, pi]

  void validate() const;
};

struct CurvaturePushforwardParams {
  AnglePushforwardParams angle;
  double C = 1.0;

  CurvaturePushforwardParams() = default;
  /// Takes C as given (must be positive and finite).
  CurvaturePushforwardParams(AnglePushforwardParams angle, double C);
  /// C = (1/r) sqrt(2 / (1 - cos alpha)), evaluated as 1 / (r sin(alpha/2)).
  static CurvaturePushforwardParams from_radius(AnglePushforwardParams angle, double r);

  void validate() const;
};

/// ln of the vMF normalizer kappa^{(m-1)/2} / (sqrt(2 pi) I_{(m-1)/2}(kappa)).
double log_angle_normalizer(int m, double kappa);

/// ln f_Theta(theta) for theta in [0, pi/2]. -inf where the density is zero
/// (theta = 0). DomainError outside the folded domain or for invalid params.
double log_f_theta(const AnglePushforwardParams& params, double theta);

/// ln f_Omega(omega). -inf for omega = 0 and for omega > C / sqrt 2 (where
/// 2 asin(omega / C) leaves the folded angle domain); DomainError for
/// negative or non-finite omega.
double log_f_omega(const CurvaturePushforwardParams& params, double omega);

/// Fixed-mean vMF mixture densities, sum_j a_j f_j.
double log_f_theta_mixture(int m, std::span<const VmfComponent> components, double alpha,
                           double theta);
double log_f_omega_mixture(int m, std::span<const VmfComponent> components, double alpha,
                           double C, double omega);

/// Mixture angle density with the per-component constants precomputed, for
/// likelihood loops that evaluate many (alpha, theta) pairs.
class AngleMixtureDensity {
 public:
  AngleMixtureDensity(int m, std::span<const VmfComponent> components);

  int m() const { return m_; }
  double log_density(double alpha, double theta) const;
  /// Sum of log densities over samples (compensated, fixed order).
  double log_likelihood(double alpha, std::span<const double> thetas) const;

 private:
  struct Term {
    double log_weight;
    double kappa;
    double log_norm;
  };
  int m_;
  double order_;  // (m - 2) / 2
  std::vector<Term> terms_;
};

}  // namespace avc
