#include "avc/specfun.hpp"

#include <math.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "avc/errors.hpp"

namespace avc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Rescale threshold for the ascending series; terms can exceed DBL_MAX for
// z beyond ~700 long before the sum converges.
constexpr double kRescale = 1e250;
const double kLogRescale = std::log(kRescale);

// ln sum_k (z^2/4)^k / (k! (v+1)_k). All terms are positive, so the only
// error source is rounding in the running product.
double log_series_sum(double v, double z) {
  const double q = 0.25 * z * z;
  double term = 1.0;
  double sum = 1.0;
  double log_scale = 0.0;
  for (int k = 1; k < 100000; ++k) {
    const double ratio = q / (static_cast<double>(k) * (v + k));
    term *= ratio;
    sum += term;
    if (sum > kRescale) {
      sum /= kRescale;
      term /= kRescale;
      log_scale += kLogRescale;
    }
    if (ratio < 1.0 && term < 1e-17 * sum) break;
  }
  return log_scale + std::log(sum);
}

// ln of the Hankel asymptotic sum sum_k (-1)^k a_k(v) / z^k, truncated at the
// smallest term. The exponentially small e^{-z} companion series is dropped.
double log_hankel_sum(double v, double z) {
  const double mu = 4.0 * v * v;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (8.0 * k * z);
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (term == 0.0 || std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return std::log(sum);
}

bool use_hankel(double v, double z) { return z > std::max(30.0, v * v); }

void check_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw DomainError(std::string(what) + " must be finite");
  }
}

}  // namespace

double log_gamma(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

double log_bessel_i(double v, double z) {
  check_finite(v, "Bessel order");
  check_finite(z, "Bessel argument");
  if (v < -0.5) throw DomainError("Bessel order must be >= -1/2");
  if (z < 0.0) throw DomainError("Bessel argument must be >= 0");
  if (z == 0.0) {
    if (v == 0.0) return 0.0;
    return v > 0.0 ? -kInf : kInf;
  }
  if (use_hankel(v, z)) {
    return z - 0.5 * std::log(2.0 * kPi * z) + log_hankel_sum(v, z);
  }
  return v * std::log(0.5 * z) - log_gamma(v + 1.0) + log_series_sum(v, z);
}

double log_bessel_ratio_limit(double v, double z) {
  check_finite(v, "Bessel order");
  check_finite(z, "Bessel argument");
  if (v < 0.0) throw DomainError("Bessel ratio order must be >= 0");
  if (z < 0.0) throw DomainError("Bessel ratio argument must be >= 0");
  if (z == 0.0) return -v * kLn2 - log_gamma(v + 1.0);
  if (use_hankel(v, z)) return log_bessel_i(v, z) - v * std::log(z);
  return -v * kLn2 - log_gamma(v + 1.0) + log_series_sum(v, z);
}

double bessel_ratio(double v, double z) {
  if (z == 0.0) return 0.0;
  // In the asymptotic regime the common factor e^z / sqrt(2 pi z) cancels.
  if (use_hankel(v + 1.0, z)) return std::exp(log_hankel_sum(v + 1.0, z) - log_hankel_sum(v, z));
  return std::exp(log_bessel_i(v + 1.0, z) - log_bessel_i(v, z));
}

double sphere_surface_area(int m, double r) {
  if (m < 1) throw DomainError("sphere dimension must be >= 1");
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw DomainError("sphere radius must be positive and finite");
  }
  const double half = 0.5 * (m + 1);
  const double unit = std::exp(kLn2 + half * std::log(kPi) - log_gamma(half));
  return unit * std::pow(r, m);
}

double log_cosh(double x) {
  const double a = std::abs(x);
  if (a < 1.0) {
    const double sh = std::sinh(0.5 * a);
    return std::log1p(2.0 * sh * sh);
  }
  return a + std::log1p(std::exp(-2.0 * a)) - kLn2;
}

double log_sum_exp(std::span<const double> xs) {
  double hi = -kInf;
  for (double x : xs) hi = std::max(hi, x);
  if (hi == -kInf) return -kInf;
  if (hi == kInf) return kInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - hi);
  return hi + std::log(s);
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

}  // namespace avc
