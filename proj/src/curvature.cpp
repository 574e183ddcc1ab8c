#include "avc/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "avc/errors.hpp"
#include "avc/rng.hpp"
#include "avc/simd/kernels.hpp"
#include "avc/specfun.hpp"

namespace avc {
namespace {

constexpr std::uint64_t kShapeStream = 0x5348415045;

// Only points within eps + eps_prime of x can take part: annulus points lie
// within eps_prime and their tangent balls within a further eps.
PointCloud local_patch(const PointCloud& cloud, std::span<const double> x, double reach) {
  std::vector<double> d2(cloud.size());
  simd::squared_distances(cloud.coords(), static_cast<std::size_t>(cloud.ambient_dim()), x,
                          d2);
  std::vector<std::size_t> keep;
  const double lim = reach * reach * (1.0 + 1e-9);
  for (std::size_t i = 0; i < d2.size(); ++i) {
    if (d2[i] < lim) keep.push_back(i);
  }
  if (keep.size() == cloud.size()) return cloud;
  return cloud.select(keep);
}

}  // namespace

double discrete_variation_curvature(double theta, double chord) {
  if (!(chord > 0.0) || !std::isfinite(chord)) throw DomainError("chord must be positive");
  if (!(theta >= 0.0 && theta <= kPi)) throw DomainError("theta must lie in [0, pi]");
  return 2.0 * std::sin(0.5 * theta) / chord;
}

NaiveCurvature naive_curvature(const PointCloud& cloud, std::span<const double> x,
                               double eps, double eps_prime,
                               const TangentEstimator& estimator) {
  if (!(eps_prime > eps)) throw DomainError("eps_prime must exceed eps");
  const auto idx = annulus_neighbors(cloud, {x, eps, eps_prime});
  if (idx.empty()) throw EmptyAnnulus("no neighbors in the annulus (eps, eps_prime)");

  NaiveCurvature out;
  out.base = estimator(x);
  out.samples.reserve(idx.size());
  CompensatedSum omega_sum, chord_sum;
  for (std::size_t i : idx) {
    const auto y = cloud.point(i);
    const TangentEstimate ty = estimator(y);
    double d2 = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) d2 += (y[j] - x[j]) * (y[j] - x[j]);
    CurvatureSample s;
    s.theta = tangent_angle(out.base, ty);
    s.chord = std::sqrt(d2);
    s.omega = discrete_variation_curvature(s.theta, s.chord);
    omega_sum.add(s.omega);
    chord_sum.add(s.chord);
    out.samples.push_back(s);
  }
  const double n = static_cast<double>(out.samples.size());
  out.omega_bar = omega_sum.value() / n;
  out.chord_mean = chord_sum.value() / n;
  double var = 0.0;
  for (const auto& s : out.samples) var += (s.chord - out.chord_mean) * (s.chord - out.chord_mean);
  out.chord_stddev = out.samples.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
  return out;
}

NaiveCurvature naive_curvature(const PointCloud& cloud, std::span<const double> x, int m,
                               double eps, double eps_prime, const TangentOptions& options) {
  if (!(eps_prime > eps)) throw DomainError("eps_prime must exceed eps");
  const PointCloud patch = local_patch(cloud, x, eps + eps_prime);
  const TangentEstimator pca = [&](std::span<const double> p) {
    return estimate_tangent(patch, p, m, eps, options);
  };
  return naive_curvature(patch, x, eps, eps_prime, pca);
}

MonteCarloEstimate absolute_variation_curvature_mc(const ShapeOperatorSpec& shape,
                                                   std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw DomainError("trials must be positive");
  const auto& lam = shape.eigenvalues;
  if (lam.empty()) throw DomainError("shape operator needs at least one eigenvalue");
  double top = 0.0;
  for (double l : lam) {
    if (!std::isfinite(l)) throw DomainError("eigenvalues must be finite");
    top = std::max(top, std::abs(l));
  }
  if (top == 0.0) return {0.0, 0.0};

  // |L u| = top * sqrt(sum (l_i/top)^2 g_i^2 / sum g_i^2) for u = g/|g|.
  // Ratios of exactly 1 make numerator and denominator the same sum.
  std::vector<double> ratio2(lam.size());
  for (std::size_t i = 0; i < lam.size(); ++i) ratio2[i] = (lam[i] / top) * (lam[i] / top);

  Rng rng = Rng::stream(seed, kShapeStream);
  double mean = 0.0, m2 = 0.0;
  std::vector<double> g(lam.size());
  for (std::size_t t = 1; t <= trials; ++t) {
    double den, num;
    do {
      den = num = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = rng.normal();
        den += g[i] * g[i];
        num += ratio2[i] * g[i] * g[i];
      }
    } while (den == 0.0);
    const double v = top * std::sqrt(num / den);
    const double delta = v - mean;
    mean += delta / static_cast<double>(t);
    m2 += delta * (v - mean);
  }
  const double n = static_cast<double>(trials);
  const double se = trials > 1 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0;
  return {mean, se};
}

}  // namespace avc
