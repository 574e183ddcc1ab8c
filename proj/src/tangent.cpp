#include "avc/tangent.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "avc/errors.hpp"
#include "avc/parallel.hpp"
#include "avc/simd/kernels.hpp"
#include "avc/specfun.hpp"

namespace avc {

std::vector<std::size_t> annulus_neighbors(const PointCloud& cloud,
                                           const NeighborQuery& query) {
  if (static_cast<int>(query.center.size()) != cloud.ambient_dim()) {
    throw DomainError("neighbor query center has wrong dimension");
  }
  if (!(query.inner >= 0.0) || !(query.outer > query.inner)) {
    throw DomainError("neighbor query needs 0 <= inner < outer");
  }
  std::vector<double> d2(cloud.size());
  simd::squared_distances(cloud.coords(), static_cast<std::size_t>(cloud.ambient_dim()),
                          query.center, d2);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < d2.size(); ++i) {
    const double d = std::sqrt(d2[i]);
    if (d > query.inner && d < query.outer) out.push_back(i);
  }
  return out;
}

TangentEstimate estimate_tangent(const PointCloud& cloud, std::span<const double> x, int m,
                                 double eps, const TangentOptions& options) {
  const int dim = cloud.ambient_dim();
  if (m < 1 || dim != m + 1) {
    throw DomainError("tangent estimation needs ambient dimension m + 1 (m = " +
                      std::to_string(m) + ", ambient = " + std::to_string(dim) + ")");
  }
  if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("eps must be positive");
  if (!(options.weight_scale > 0.0)) throw DomainError("weight_scale must be positive");

  const auto idx = annulus_neighbors(cloud, {x, 0.0, eps});
  if (idx.size() < static_cast<std::size_t>(m + 1)) {
    throw InsufficientNeighbors("only " + std::to_string(idx.size()) +
                                " neighbors within eps, need " + std::to_string(m + 1));
  }

  const double denom = options.weight_mode == WeightMode::kNormalized ? eps * eps : eps;
  Eigen::MatrixXd b(dim, static_cast<Eigen::Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) {
    const auto p = cloud.point(idx[c]);
    double d2 = 0.0;
    for (int j = 0; j < dim; ++j) d2 += (p[j] - x[j]) * (p[j] - x[j]);
    const double w = std::sqrt(std::exp(-options.weight_scale * d2 / denom));
    for (int j = 0; j < dim; ++j) b(j, static_cast<Eigen::Index>(c)) = w * (p[j] - x[j]);
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  if (s(m - 1) - s(m) <= 1e-12 * s(0)) {
    throw DegenerateNeighborhood("two smallest singular values coincide");
  }

  std::vector<double> normal(dim);
  int big = 0;
  for (int j = 0; j < dim; ++j) {
    normal[j] = svd.matrixU()(j, m);
    if (std::abs(normal[j]) > std::abs(normal[big])) big = j;
  }
  if (normal[big] < 0.0) {
    for (double& v : normal) v = -v;
  }

  TangentEstimate est;
  est.base_point.assign(x.begin(), x.end());
  est.normal = UnitVector(std::move(normal));
  est.neighbor_count = idx.size();
  est.weight_scale = options.weight_scale;
  est.singular_values.assign(s.data(), s.data() + s.size());
  return est;
}

std::vector<TangentEstimate> estimate_tangents(const PointCloud& cloud,
                                               std::span<const std::vector<double>> xs,
                                               int m, double eps,
                                               const TangentOptions& options,
                                               unsigned threads) {
  std::vector<TangentEstimate> out(xs.size());
  parallel_for(
      xs.size(), [&](std::size_t i) { out[i] = estimate_tangent(cloud, xs[i], m, eps, options); },
      threads);
  return out;
}

double normal_angle(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("normal_angle: dimension mismatch");
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  const double sign = dot < 0.0 ? -1.0 : 1.0;
  // Half-angle form: 2 atan2(|a - b|, |a + b|) after aligning b with a.
  double diff = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double bi = sign * b[i];
    diff += (a[i] - bi) * (a[i] - bi);
    sum += (a[i] + bi) * (a[i] + bi);
  }
  const double angle = 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
  return std::min(angle, kHalfPi);
}

double tangent_angle(const TangentEstimate& a, const TangentEstimate& b) {
  return normal_angle(a.normal.coords(), b.normal.coords());
}

}  // namespace avc
