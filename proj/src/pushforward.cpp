#include "avc/pushforward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "avc/errors.hpp"
#include "avc/specfun.hpp"

namespace avc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_components(std::span<const VmfComponent> components) {
  if (components.empty()) throw DomainError("mixture needs at least one component");
  for (const auto& c : components) {
    if (!(c.weight > 0.0) || !(c.kappa > 0.0) || !std::isfinite(c.kappa)) {
      throw DomainError("mixture weights and kappas must be positive");
    }
  }
}

// Terms of ln f_Theta that depend on theta, for sin/cos of alpha and theta given.
double angle_terms(int m, double order, double kappa, double sa, double ca, double st,
                   double ct) {
  return kLn2 + (m - 1) * std::log(st) + log_cosh(kappa * ca * ct) +
         log_bessel_ratio_limit(order, kappa * sa * st);
}

// theta = 2 asin(omega / C) and ln(d theta / d omega); inside is false when
// theta would leave [0, pi/2].
struct OmegaMap {
  double theta;
  double log_jacobian;
  bool inside;
};

OmegaMap map_omega(double C, double omega) {
  if (!std::isfinite(omega) || omega < 0.0) {
    throw DomainError("omega must be finite and non-negative");
  }
  const double u = omega / C;
  if (u > std::sqrt(0.5)) return {0.0, 0.0, false};
  const double theta = std::min(2.0 * std::asin(u), kHalfPi);
  const double log_jac = kLn2 - std::log(C) - 0.5 * std::log1p(-u * u);
  return {theta, log_jac, true};
}

}  // namespace

void AnglePushforwardParams::validate() const {
  if (m < 2) throw DomainError("pushforward needs m >= 2");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be positive");
  if (!(alpha >= 0.0 && alpha <= kPi)) throw DomainError("alpha must lie in [0, pi]");
}

CurvaturePushforwardParams::CurvaturePushforwardParams(AnglePushforwardParams a, double c)
    : angle(a), C(c) {
  validate();
}

CurvaturePushforwardParams CurvaturePushforwardParams::from_radius(
    AnglePushforwardParams angle, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("radius must be positive");
  angle.validate();
  if (!(angle.alpha > 0.0)) throw DomainError("curvature pushforward needs alpha > 0");
  return CurvaturePushforwardParams(angle, 1.0 / (r * std::sin(0.5 * angle.alpha)));
}

void CurvaturePushforwardParams::validate() const {
  angle.validate();
  if (!(C > 0.0) || !std::isfinite(C)) throw DomainError("C must be positive and finite");
}

double log_angle_normalizer(int m, double kappa) {
  const double v = 0.5 * (m - 1);
  return v * std::log(kappa) - kLnSqrt2Pi - log_bessel_i(v, kappa);
}

double log_f_theta(const AnglePushforwardParams& params, double theta) {
  params.validate();
  if (!(theta >= 0.0 && theta <= kHalfPi)) {
    throw DomainError("theta must lie in [0, pi/2], got " + std::to_string(theta));
  }
  const double st = std::sin(theta);
  if (st == 0.0) return kNegInf;
  const double order = 0.5 * (params.m - 2);
  return angle_terms(params.m, order, params.kappa, std::sin(params.alpha),
                     std::cos(params.alpha), st, std::cos(theta)) +
         log_angle_normalizer(params.m, params.kappa);
}

double log_f_omega(const CurvaturePushforwardParams& params, double omega) {
  params.validate();
  const OmegaMap map = map_omega(params.C, omega);
  if (!map.inside) return kNegInf;
  return log_f_theta(params.angle, map.theta) + map.log_jacobian;
}

AngleMixtureDensity::AngleMixtureDensity(int m, std::span<const VmfComponent> components)
    : m_(m), order_(0.5 * (m - 2)) {
  if (m < 2) throw DomainError("pushforward needs m >= 2");
  check_components(components);
  double total = 0.0;
  for (const auto& c : components) total += c.weight;
  for (const auto& c : components) {
    terms_.push_back({std::log(c.weight / total), c.kappa, log_angle_normalizer(m, c.kappa)});
  }
}

double AngleMixtureDensity::log_density(double alpha, double theta) const {
  if (!(alpha >= 0.0 && alpha <= kPi)) throw DomainError("alpha must lie in [0, pi]");
  if (!(theta >= 0.0 && theta <= kHalfPi)) throw DomainError("theta must lie in [0, pi/2]");
  const double st = std::sin(theta);
  if (st == 0.0) return kNegInf;
  const double ct = std::cos(theta), sa = std::sin(alpha), ca = std::cos(alpha);
  if (terms_.size() == 1) {
    const Term& t = terms_[0];
    return t.log_weight + angle_terms(m_, order_, t.kappa, sa, ca, st, ct) + t.log_norm;
  }
  double parts[8];
  std::vector<double> heap;
  double* buf = parts;
  if (terms_.size() > 8) {
    heap.resize(terms_.size());
    buf = heap.data();
  }
  for (std::size_t j = 0; j < terms_.size(); ++j) {
    const Term& t = terms_[j];
    buf[j] = t.log_weight + angle_terms(m_, order_, t.kappa, sa, ca, st, ct) + t.log_norm;
  }
  return log_sum_exp({buf, terms_.size()});
}

double AngleMixtureDensity::log_likelihood(double alpha, std::span<const double> thetas) const {
  CompensatedSum sum;
  for (double th : thetas) sum.add(log_density(alpha, th));
  return sum.value();
}

double log_f_theta_mixture(int m, std::span<const VmfComponent> components, double alpha,
                           double theta) {
  return AngleMixtureDensity(m, components).log_density(alpha, theta);
}

double log_f_omega_mixture(int m, std::span<const VmfComponent> components, double alpha,
                           double C, double omega) {
  if (!(C > 0.0) || !std::isfinite(C)) throw DomainError("C must be positive and finite");
  const OmegaMap map = map_omega(C, omega);
  if (!map.inside) return kNegInf;
  return log_f_theta_mixture(m, components, alpha, map.theta) + map.log_jacobian;
}

}  // namespace avc
