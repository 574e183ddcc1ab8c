#include <algorithm>
#include <cmath>
#include <vector>

#include "avc/errors.hpp"
#include "avc/randgeom.hpp"
#include "avc/rng.hpp"
#include "avc/specfun.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace avc;

namespace {

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("streams are reproducible and distinct") {
  Rng a = Rng::stream(42, 3), b = Rng::stream(42, 3), c = Rng::stream(42, 4);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs |= x != c.next_u64();
  }
  CHECK(differs);
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
}

TEST_CASE("uniform, normal and binomial moments") {
  Rng rng(7);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0, sn4 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK_UNARY(u >= 0.0);
    CHECK_UNARY(u < 1.0);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
    sn4 += z * z * z * z;
  }
  CHECK(std::abs(su / n - 0.5) < 5 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(sn / n) < 5 / std::sqrt(n));
  CHECK(std::abs(sn2 / n - 1) < 5 * std::sqrt(2.0 / n));
  CHECK(std::abs(sn4 / n - 3) < 5 * std::sqrt(96.0 / n));

  for (double p : {0.001, 0.3, 0.9}) {
    const std::size_t trials = 10000;
    const int reps = 2000;
    double s = 0;
    for (int i = 0; i < reps; ++i) {
      const auto k = rng.binomial(trials, p);
      CHECK_UNARY(k <= trials);
      s += static_cast<double>(k);
    }
    const double sd = std::sqrt(trials * p * (1 - p) / reps);
    CHECK(std::abs(s / reps - trials * p) < 5 * sd);
  }
  CHECK(rng.binomial(10, 0.0) == 0);
  CHECK(rng.binomial(10, 1.0) == 10);
}

TEST_CASE("uniform sphere samples lie on the sphere and are centered") {
  const auto cloud = sample_sphere_uniform(4, 2.5, 20000, 11);
  CHECK(cloud.ambient_dim() == 5);
  CHECK(cloud.intrinsic_dim() == 4);
  CHECK(cloud.size() == 20000);
  std::vector<double> mean(5, 0.0);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    CHECK(norm(p) == doctest::Approx(2.5).epsilon(1e-14));
    for (int d = 0; d < 5; ++d) mean[d] += p[d] / cloud.size();
  }
  // Each coordinate has variance r^2 / (m + 1).
  const double se = 2.5 / std::sqrt(5.0 * cloud.size());
  for (double v : mean) CHECK(std::abs(v) < 5 * se);
}

TEST_CASE("cap probability") {
  for (double a : {0.1, 0.7, 1.5, 3.0}) {
    CHECK(cap_probability(2, a) == doctest::Approx((1 - std::cos(a)) / 2).epsilon(1e-13));
  }
  const double full = oracle::integrate([](double t) { return std::pow(std::sin(t), 6); }, 0,
                                        oracle::kPi);
  for (double a : {0.2, 1.0, 2.0}) {
    const double part =
        oracle::integrate([](double t) { return std::pow(std::sin(t), 6); }, 0, a);
    CHECK(cap_probability(7, a) == doctest::Approx(part / full).epsilon(1e-12));
  }
  CHECK(cap_probability(3, 0.0) == 0.0);
  CHECK(cap_probability(3, oracle::kPi) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("cap sampling has the law of filtered full samples") {
  const int m = 3;
  const double r = 1.0, chord = 0.9;
  const std::size_t total = 4000;
  const double p = cap_probability(m, 2 * std::asin(chord / (2 * r)));
  Rng rng(5);
  double count_sum = 0, height_sum = 0, points = 0;
  const int reps = 300;
  for (int k = 0; k < reps; ++k) {
    const auto cap = sample_sphere_cap(m, r, total, chord, rng);
    count_sum += cap.size();
    for (std::size_t i = 0; i < cap.size(); ++i) {
      const auto q = cap.point(i);
      CHECK(norm(q) == doctest::Approx(r).epsilon(1e-14));
      const double dz = r - q[m];
      double d2 = dz * dz;
      for (int j = 0; j < m; ++j) d2 += q[j] * q[j];
      CHECK(std::sqrt(d2) <= chord * (1 + 1e-12));
      height_sum += q[m];
      points += 1;
    }
  }
  const double sd = std::sqrt(total * p * (1 - p) / reps);
  CHECK(std::abs(count_sum / reps - total * p) < 5 * sd);

  // Reference: filter full uniform samples.
  double ref_sum = 0, ref_sq = 0, ref_n = 0;
  for (int k = 0; k < 40; ++k) {
    const auto full = sample_sphere_uniform(m, r, 20000, 100 + k);
    for (std::size_t i = 0; i < full.size(); ++i) {
      const auto q = full.point(i);
      if (2 * r * (r - q[m]) <= chord * chord) {
        ref_sum += q[m];
        ref_sq += q[m] * q[m];
        ref_n += 1;
      }
    }
  }
  const double ref_mean = ref_sum / ref_n;
  const double ref_var = ref_sq / ref_n - ref_mean * ref_mean;
  const double se = std::sqrt(ref_var / ref_n + ref_var / points);
  CHECK(std::abs(height_sum / points - ref_mean) < 5 * se);
}

TEST_CASE("gaussian noise has the requested variance") {
  const auto cloud = sample_sphere_uniform(2, 1.0, 50000, 3);
  const auto noisy = add_gaussian_noise(cloud, 0.05, 9);
  double s2 = 0;
  for (std::size_t i = 0; i < cloud.coords().size(); ++i) {
    const double d = noisy.coords()[i] - cloud.coords()[i];
    s2 += d * d;
  }
  const double n = cloud.coords().size();
  CHECK(std::abs(s2 / n - 0.0025) < 5 * 0.0025 * std::sqrt(2.0 / n));
  CHECK(noisy.noise_sigma() == 0.05);
  const auto same = add_gaussian_noise(cloud, 0.0, 9);
  CHECK(std::equal(same.coords().begin(), same.coords().end(), cloud.coords().begin()));
}

TEST_CASE("vMF mean resultant length matches the Bessel ratio") {
  for (int p : {3, 4, 11}) {
    for (double kappa : {1.0, 10.0, 300.0}) {
      const auto mean = UnitVector::axis(p, 0);
      const auto draws = sample_vmf(VmfMixture::single(mean, kappa), 100000, 21);
      double s = 0, s2 = 0;
      for (const auto& x : draws) {
        CHECK(norm(x.coords()) == doctest::Approx(1.0).epsilon(1e-14));
        s += x[0];
        s2 += x[0] * x[0];
      }
      const double n = draws.size();
      const double m1 = s / n, var = s2 / n - m1 * m1;
      CAPTURE(p);
      CAPTURE(kappa);
      CHECK(std::abs(m1 - bessel_ratio(p / 2.0 - 1, kappa)) < 5 * std::sqrt(var / n));
    }
  }
}

TEST_CASE("vMF mixture draws follow the component weights") {
  // Two well separated concentrations; the fraction of draws beyond a cutoff
  // angle identifies the broad component.
  const auto mean = UnitVector::north_pole(3);
  const VmfMixture mix(mean, {{0.3, 5.0}, {0.7, 5000.0}});
  const auto angles = sample_folded_angles(mix, mean, 50000, 8);
  const double cut = 0.2;
  double broad = 0;
  for (double t : angles) broad += t > cut;
  // P(theta > cut) for the kappa = 5 component, from the folded oracle.
  const double tail5 = oracle::integrate(
      [](double t) { return oracle::folded_angle_density(2, 5.0, 0.0, t); }, cut, oracle::kPi / 2);
  const double expected = 0.3 * tail5;
  const double sd = std::sqrt(expected * (1 - expected) / angles.size());
  CHECK(std::abs(broad / angles.size() - expected) < 5 * sd);
}

TEST_CASE("mixture weights must sum to one") {
  const auto mean = UnitVector::north_pole(3);
  CHECK_THROWS_AS(VmfMixture(mean, {{0.5, 1.0}, {0.4, 2.0}}), DomainError);
  CHECK_THROWS_AS(VmfMixture(mean, {{1.0, -1.0}}), DomainError);
  CHECK_NOTHROW(VmfMixture(mean, {{0.5, 1.0}, {0.5, 2.0}}));
}

TEST_CASE("tilted pole and unit vectors") {
  for (double a : {0.0, 0.3, 1.2, 3.0}) {
    const auto t = tilted_pole(6, a);
    CHECK(norm(t.coords()) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(t.dot(UnitVector::north_pole(6).coords()) == doctest::Approx(std::cos(a)).epsilon(1e-14));
  }
  const UnitVector u(std::vector<double>{3.0, 4.0});
  CHECK(u[0] == doctest::Approx(0.6));
  CHECK(u[1] == doctest::Approx(0.8));
  CHECK_THROWS_AS(UnitVector(std::vector<double>{0.0, 0.0}), DomainError);
}

TEST_CASE("folded angles lie in [0, pi/2] and are reproducible") {
  const auto mean = tilted_pole(4, 0.4);
  const auto mix = VmfMixture::single(mean, 50.0);
  const auto a = sample_folded_angles(mix, UnitVector::north_pole(4), 1000, 3);
  const auto b = sample_folded_angles(mix, UnitVector::north_pole(4), 1000, 3);
  CHECK(a == b);
  for (double t : a) {
    CHECK_UNARY(t >= 0.0);
    CHECK_UNARY(t <= oracle::kPi / 2);
  }
}
