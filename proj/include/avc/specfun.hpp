#pragma once

// Log-space special functions used by the vMF densities.
//
// Everything here returns logarithms: I_v(z) overflows doubles for z beyond
// ~700 and the concentration parameters produced by calibration routinely
// reach 1e4 and more.

#include <span>

namespace avc {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kHalfPi = kPi / 2.0;
inline constexpr double kLn2 = 0.69314718055994530942;
inline constexpr double kLnSqrt2Pi = 0.91893853320467274178;

/// ln Gamma(x) for x > 0. Thread-safe (does not touch signgam).
double log_gamma(double x);

/// ln I_v(z), the modified Bessel function of the first kind.
///
/// Valid for v >= -1/2 and finite z >= 0. Uses the ascending series for
/// z <= max(30, v^2) and the large-argument Hankel expansion above it; the
/// series is rescaled on the fly so it never overflows. Returns -inf for
/// z == 0 and v > 0, 0 for (0, 0), +inf for z == 0 and v < 0.
/// Throws DomainError otherwise.
double log_bessel_i(double v, double z);

/// ln[ I_v(z) / z^v ] for v >= 0, z >= 0, continuous at z = 0 where it equals
/// -v ln 2 - ln Gamma(v + 1).
double log_bessel_ratio_limit(double v, double z);

/// I_{v+1}(z) / I_v(z), computed from the log values. Used as the mean
/// resultant length of a vMF distribution.
double bessel_ratio(double v, double z);

/// Surface area of the m-sphere of radius r embedded in R^{m+1}:
/// 2 pi^{(m+1)/2} r^m / Gamma((m+1)/2).
double sphere_surface_area(int m, double r);

/// ln cosh(x) without overflow, accurate to a few ulp relative to the result.
double log_cosh(double x);

/// ln(sum exp(x_i)); -inf for an empty range or all -inf terms.
double log_sum_exp(std::span<const double> xs);

/// Neumaier-compensated sum; order-dependent only at the last-ulp level.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace avc
