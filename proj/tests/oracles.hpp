#pragma once

// Reference computations shared by the tests. Nothing here calls into the
// library's density code; the oracles are built from Boost special functions
// and direct quadrature.

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <functional>
#include <numbers>
#include <queue>
#include <vector>

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

/// Globally adaptive Gauss-Kronrod over [a, b], seeded with the given
/// interior points. The panel with the largest error estimate is bisected
/// until the summed estimate drops below tol * |integral|.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        std::vector<double> breaks = {}, double tol = 1e-11) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  struct Panel {
    double lo, hi, value, err;
    bool operator<(const Panel& o) const { return err < o.err; }
  };
  auto panel = [&](double lo, double hi) {
    double err = 0.0;
    const double v = GK::integrate(f, lo, hi, 0, 0.0, &err);
    return Panel{lo, hi, v, err};
  };
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::priority_queue<Panel> heap;
  double total = 0.0, err = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = std::max(a, breaks[i]), hi = std::min(b, breaks[i + 1]);
    if (!(hi > lo)) continue;
    heap.push(panel(lo, hi));
  }
  auto sums = [&] {
    auto copy = heap;
    total = err = 0.0;
    while (!copy.empty()) {
      total += copy.top().value;
      err += copy.top().err;
      copy.pop();
    }
  };
  sums();
  for (int split = 0; split < 20000 && err > tol * std::abs(total); ++split) {
    const Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    const Panel left = panel(worst.lo, mid), right = panel(mid, worst.hi);
    heap.push(left);
    heap.push(right);
    total += left.value + right.value - worst.value;
    err += left.err + right.err - worst.err;
    if (split % 256 == 255) sums();
  }
  sums();
  return total;
}

/// Breakpoints that resolve a peak of width ~1/sqrt(kappa) near `center` and
/// the near-zero mode sqrt((m - 1) / kappa) of the folded angle density.
inline std::vector<double> angle_breaks(int m, double kappa, double center) {
  std::vector<double> b;
  const double s = 1.0 / std::sqrt(kappa);
  for (int j = -40; j <= 40; ++j) b.push_back(center + 0.5 * j * s);
  const double mode0 = std::sqrt(std::max(1.0, m - 1.0) / kappa);
  for (int j = 1; j <= 40; ++j) b.push_back(0.25 * j * mode0);
  std::vector<double> kept;
  for (double x : b)
    if (x > 0.0 && x < kPi / 2) kept.push_back(x);
  return kept;
}

/// Density of the unfolded angle phi between mu0 and X ~ vMF(mu, kappa) on
/// S^m, where angle(mu, mu0) = alpha, by integrating the vMF density over the
/// (m-1)-sphere of directions at polar angle phi. Moderate kappa only
/// (exp(kappa) must not overflow).
inline double unfolded_angle_density(int m, double kappa, double alpha, double phi) {
  const double p = m + 1.0;
  const double cp = std::pow(kappa, p / 2 - 1) /
                    (std::pow(2 * kPi, p / 2) * boost::math::cyl_bessel_i(p / 2 - 1, kappa));
  // X = cos(phi) mu0 + sin(phi) v with v on S^{m-1}; t is the angle between v
  // and the tangent direction of mu. |S^{m-2}| is 2 for m = 2.
  const double area = 2 * std::pow(kPi, (m - 1) / 2.0) / std::tgamma((m - 1) / 2.0);
  const double a = kappa * std::cos(alpha) * std::cos(phi);
  const double b = kappa * std::sin(alpha) * std::sin(phi);
  auto inner = [&](double t) {
    return std::exp(a + b * std::cos(t)) * std::pow(std::sin(t), m - 2);
  };
  const double shell = area * integrate(inner, 0.0, kPi);
  return cp * std::pow(std::sin(phi), m - 1) * shell;
}

/// Folded angle density f(theta) + f(pi - theta) for theta in [0, pi/2].
inline double folded_angle_density(int m, double kappa, double alpha, double theta) {
  return unfolded_angle_density(m, kappa, alpha, theta) +
         unfolded_angle_density(m, kappa, alpha, kPi - theta);
}

/// Direct closed form of the curvature density written in omega, evaluated
/// with Boost Bessel functions. It omits the folding factor 2 and integrates
/// to 1/2, so the normalized density is twice this value.
inline double omega_density_direct(int m, double kappa, double alpha, double C, double w) {
  const double u = w / C;
  const double z = kappa * std::sin(alpha) * 2 * u * std::sqrt(1 - u * u);
  const double v = (m - 2) / 2.0;
  const double ratio = z == 0.0 ? std::pow(0.5, v) / std::tgamma(v + 1)
                                : boost::math::cyl_bessel_i(v, z) / std::pow(z, v);
  return std::pow(kappa, (m - 1) / 2.0) /
         (std::sqrt(2 * kPi) * boost::math::cyl_bessel_i((m - 1) / 2.0, kappa)) *
         std::pow(2 / C, m) * std::pow(1 - u * u, (m - 2) / 2.0) * std::pow(w, m - 1) *
         std::cosh(kappa * std::cos(alpha) * (1 - 2 * u * u)) * ratio;
}

/// ln sinh(z) for z > 0.
inline double log_sinh(double z) {
  return z + std::log1p(-std::exp(-2 * z)) - std::log(2.0);
}

}  // namespace oracle
