#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "avc/errors.hpp"
#include "avc/randgeom.hpp"
#include "avc/tangent.hpp"
#include "doctest.h"

using namespace avc;

namespace {

/// Random orthogonal matrix from the QR factorization of a Gaussian matrix.
Eigen::MatrixXd random_rotation(int n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
}

PointCloud rotate(const PointCloud& cloud, const Eigen::MatrixXd& q) {
  const int n = cloud.ambient_dim();
  std::vector<double> out(cloud.coords().size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    Eigen::Map<const Eigen::VectorXd> p(cloud.point(i).data(), n);
    Eigen::Map<Eigen::VectorXd>(out.data() + i * n, n) = q * p;
  }
  return PointCloud(n, cloud.intrinsic_dim(), cloud.radius(), cloud.noise_sigma(), out);
}

std::vector<double> rotate_vec(const Eigen::MatrixXd& q, std::span<const double> x) {
  Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::VectorXd r = q * v;
  return {r.data(), r.data() + r.size()};
}

}  // namespace

TEST_CASE("annulus neighbors match a brute-force filter") {
  const auto cloud = sample_sphere_uniform(3, 1.0, 3000, 4);
  const std::vector<double> c{0.0, 0.0, 0.0, 1.0};
  for (auto [inner, outer] : {std::pair{0.0, 0.5}, std::pair{0.3, 0.6}, std::pair{1.0, 2.5}}) {
    const auto got = annulus_neighbors(cloud, {c, inner, outer});
    std::vector<std::size_t> want;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const auto p = cloud.point(i);
      double d2 = 0;
      for (int k = 0; k < 4; ++k) d2 += (p[k] - c[k]) * (p[k] - c[k]);
      const double d = std::sqrt(d2);
      if (d > inner && d < outer) want.push_back(i);
    }
    CHECK(got == want);
  }
}

TEST_CASE("annulus bounds are strict") {
  // Points at exact distances 0, 1 and 2 from the origin.
  const PointCloud cloud(2, 1, 1.0, 0.0, {0, 0, 1, 0, 2, 0});
  const std::vector<double> c{0.0, 0.0};
  CHECK(annulus_neighbors(cloud, {c, 0.0, 2.0}) == std::vector<std::size_t>{1});
  CHECK(annulus_neighbors(cloud, {c, 1.0, 2.5}) == std::vector<std::size_t>{2});
  CHECK_THROWS_AS(annulus_neighbors(cloud, {c, 1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(annulus_neighbors(cloud, {std::vector<double>{0.0}, 0.0, 1.0}), DomainError);
}

TEST_CASE("planar neighborhoods give the exact normal") {
  // Points on a hyperplane through x, in a random orientation.
  for (int m : {2, 3, 7}) {
    const int n = m + 1;
    Rng rng(100 + m);
    std::vector<double> pts;
    for (int i = 0; i < 200; ++i) {
      for (int k = 0; k < m; ++k) pts.push_back(0.3 * rng.normal());
      pts.push_back(0.0);
    }
    const PointCloud flat(n, m, 1.0, 0.0, pts);
    const auto q = random_rotation(n, 7 + m);
    const auto cloud = rotate(flat, q);
    std::vector<double> x(n, 0.0);
    const auto est = estimate_tangent(cloud, x, m, 0.5);
    std::vector<double> e(n, 0.0);
    e[m] = 1.0;
    const auto truth = rotate_vec(q, e);
    CAPTURE(m);
    CHECK(normal_angle(est.normal.coords(), truth) < 1e-10);
    CHECK(est.neighbor_count > static_cast<std::size_t>(m));
    CHECK(est.singular_values.size() == static_cast<std::size_t>(n));
    CHECK(std::is_sorted(est.singular_values.rbegin(), est.singular_values.rend()));
  }
}

TEST_CASE("normal sign rule: largest-magnitude component is positive") {
  const auto cloud = sample_sphere_uniform(2, 1.0, 4000, 9);
  for (int i = 0; i < 20; ++i) {
    const auto x = cloud.point(i);
    const auto est = estimate_tangent(cloud, x, 2, 0.4);
    const auto nrm = est.normal.coords();
    const auto it = std::max_element(nrm.begin(), nrm.end(),
                                     [](double a, double b) { return std::abs(a) < std::abs(b); });
    CHECK(*it > 0.0);
  }
}

TEST_CASE("estimates are rotation equivariant") {
  const int m = 3;
  const auto cloud = sample_sphere_uniform(m, 1.0, 5000, 12);
  const auto q = random_rotation(m + 1, 3);
  const auto rotated = rotate(cloud, q);
  for (int i = 0; i < 10; ++i) {
    const auto x = cloud.point(i);
    const auto a = estimate_tangent(cloud, x, m, 0.5);
    const auto b = estimate_tangent(rotated, rotate_vec(q, x), m, 0.5);
    CHECK(normal_angle(rotate_vec(q, a.normal.coords()), b.normal.coords()) < 1e-9);
    CHECK(a.neighbor_count == b.neighbor_count);
  }
}

TEST_CASE("dense perfect samples give a normal close to the radial direction") {
  const auto cloud = sample_sphere_uniform(2, 1.0, 200000, 5);
  const std::vector<double> pole{0.0, 0.0, 1.0};
  const auto est = estimate_tangent(cloud, pole, 2, 0.1);
  CHECK(normal_angle(est.normal.coords(), pole) < 0.02);
}

TEST_CASE("both weight modes run and differ") {
  const auto cloud = sample_sphere_uniform(3, 1.0, 20000, 6);
  const std::vector<double> pole{0.0, 0.0, 0.0, 1.0};
  const auto a = estimate_tangent(cloud, pole, 3, 0.52, {5.0, WeightMode::kLinear});
  const auto b = estimate_tangent(cloud, pole, 3, 0.52, {5.0, WeightMode::kNormalized});
  CHECK(a.neighbor_count == b.neighbor_count);
  CHECK(a.singular_values != b.singular_values);
}

TEST_CASE("tangent estimation errors") {
  const auto cloud = sample_sphere_uniform(3, 1.0, 50, 2);
  const std::vector<double> pole{0.0, 0.0, 0.0, 1.0};
  CHECK_THROWS_AS(estimate_tangent(cloud, pole, 3, 0.05), InsufficientNeighbors);
  CHECK_THROWS_AS(estimate_tangent(cloud, pole, 2, 0.5), DomainError);
  CHECK_THROWS_AS(estimate_tangent(cloud, pole, 3, -1.0), DomainError);

  // A symmetric cross around x: both singular values coincide.
  const PointCloud cross(2, 1, 1.0, 0.0, {0.1, 0, -0.1, 0, 0, 0.1, 0, -0.1});
  const std::vector<double> origin{0.0, 0.0};
  CHECK_THROWS_AS(estimate_tangent(cross, origin, 1, 0.5), DegenerateNeighborhood);
}

TEST_CASE("normal_angle is folded and accurate at small angles") {
  const std::vector<double> a{1.0, 0.0, 0.0};
  CHECK(normal_angle(a, a) == 0.0);
  CHECK(normal_angle(a, std::vector<double>{-1.0, 0.0, 0.0}) == 0.0);
  CHECK(normal_angle(a, std::vector<double>{0.0, 1.0, 0.0}) == doctest::Approx(M_PI / 2));
  for (double t : {1e-9, 1e-5, 0.3, 1.2}) {
    const std::vector<double> b{std::cos(t), std::sin(t), 0.0};
    const std::vector<double> nb{-std::cos(t), -std::sin(t), 0.0};
    CHECK(normal_angle(a, b) == doctest::Approx(t).epsilon(1e-12));
    CHECK(normal_angle(a, nb) == doctest::Approx(t).epsilon(1e-12));
  }
  const std::vector<double> obtuse{std::cos(2.0), std::sin(2.0), 0.0};
  CHECK(normal_angle(a, obtuse) == doctest::Approx(M_PI - 2.0).epsilon(1e-12));
  CHECK_THROWS_AS(normal_angle(a, std::vector<double>{1.0, 0.0}), DomainError);
}

TEST_CASE("batch estimation equals one-by-one estimation") {
  const auto cloud = sample_sphere_uniform(3, 1.0, 8000, 14);
  std::vector<std::vector<double>> xs;
  for (int i = 0; i < 12; ++i) xs.emplace_back(cloud.point(i).begin(), cloud.point(i).end());
  const auto batch = estimate_tangents(cloud, xs, 3, 0.5, {}, 3);
  REQUIRE(batch.size() == xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto one = estimate_tangent(cloud, xs[i], 3, 0.5);
    CHECK(std::equal(one.normal.coords().begin(), one.normal.coords().end(),
                     batch[i].normal.coords().begin()));
    CHECK(tangent_angle(one, batch[i]) == 0.0);
  }
}
