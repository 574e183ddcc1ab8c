#include "avc/randgeom.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numeric>
#include <string>

#include "avc/errors.hpp"
#include "avc/specfun.hpp"

namespace avc {
namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Uniform direction in R^dim written to out.
void random_direction(Rng& rng, std::span<double> out) {
  double n = 0.0;
  do {
    for (double& x : out) x = rng.normal();
    n = norm(out);
  } while (n == 0.0);
  for (double& x : out) x /= n;
}

double chi_square(Rng& rng, int dof) {
  double s = 0.0;
  for (int i = 0; i < dof; ++i) {
    const double g = rng.normal();
    s += g * g;
  }
  return s;
}

}  // namespace

PointCloud::PointCloud(int ambient_dim, int intrinsic_dim, double radius,
                       double noise_sigma, std::vector<double> coords)
    : ambient_dim_(ambient_dim),
      intrinsic_dim_(intrinsic_dim),
      radius_(radius),
      noise_sigma_(noise_sigma),
      coords_(std::move(coords)) {
  if (ambient_dim < 1) throw DomainError("ambient dimension must be positive");
  if (intrinsic_dim < 1 || intrinsic_dim >= ambient_dim + 1) {
    throw DomainError("intrinsic dimension must be in [1, ambient_dim]");
  }
  if (coords_.size() % static_cast<std::size_t>(ambient_dim) != 0) {
    throw DomainError("coordinate count is not a multiple of the ambient dimension");
  }
  if (noise_sigma < 0.0) throw DomainError("noise sigma must be non-negative");
}

PointCloud PointCloud::select(std::span<const std::size_t> indices) const {
  std::vector<double> out;
  out.reserve(indices.size() * ambient_dim_);
  for (std::size_t idx : indices) {
    const auto p = point(idx);
    out.insert(out.end(), p.begin(), p.end());
  }
  return PointCloud(ambient_dim_, intrinsic_dim_, radius_, noise_sigma_, std::move(out));
}

UnitVector::UnitVector(std::vector<double> coords) : coords_(std::move(coords)) {
  const double n = norm(coords_);
  if (coords_.empty() || !(n > 0.0) || !std::isfinite(n)) {
    throw DomainError("cannot normalize a zero or non-finite vector");
  }
  for (double& x : coords_) x /= n;
}

UnitVector UnitVector::axis(int dim, int index) {
  if (dim < 1 || index < 0 || index >= dim) throw DomainError("axis index out of range");
  std::vector<double> c(dim, 0.0);
  c[index] = 1.0;
  return UnitVector(std::move(c));
}

double UnitVector::dot(std::span<const double> other) const {
  if (other.size() != coords_.size()) throw DomainError("dimension mismatch in dot product");
  double s = 0.0;
  for (std::size_t i = 0; i < coords_.size(); ++i) s += coords_[i] * other[i];
  return s;
}

VmfMixture::VmfMixture(UnitVector mean, std::vector<VmfComponent> components)
    : mean_(std::move(mean)), components_(std::move(components)) {
  if (components_.empty()) throw DomainError("vMF mixture needs at least one component");
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight > 0.0) || !std::isfinite(c.weight)) {
      throw DomainError("vMF mixture weights must be positive");
    }
    if (!(c.kappa > 0.0) || !std::isfinite(c.kappa)) {
      throw DomainError("vMF concentration must be positive and finite");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw DomainError("vMF mixture weights must sum to one, got " + std::to_string(total));
  }
  for (auto& c : components_) c.weight /= total;
}

PointCloud sample_sphere_uniform(int m, double r, std::size_t count, std::uint64_t seed) {
  if (m < 1) throw DomainError("sphere dimension must be >= 1");
  if (!(r > 0.0)) throw DomainError("sphere radius must be positive");
  if (count == 0) throw DomainError("point count must be positive");
  const int n = m + 1;
  Rng rng = Rng::stream(seed, 0x5350484552ULL);
  std::vector<double> coords(count * n);
  for (std::size_t i = 0; i < count; ++i) {
    std::span<double> p(coords.data() + i * n, n);
    random_direction(rng, p);
    for (double& x : p) x *= r;
  }
  return PointCloud(n, m, r, 0.0, std::move(coords));
}

double cap_probability(int m, double angle) {
  if (m < 1) throw DomainError("sphere dimension must be >= 1");
  if (angle <= 0.0) return 0.0;
  if (angle >= kPi) return 1.0;
  // P(polar angle <= phi) with density ~ sin^{m-1}: regularized incomplete
  // beta in sin^2 phi, reflected past the equator.
  const double s = std::sin(angle);
  const double half = 0.5 * boost::math::ibeta(0.5 * m, 0.5, s * s);
  return angle <= 0.5 * kPi ? half : 1.0 - half;
}

PointCloud sample_sphere_cap(int m, double r, std::size_t total_count, double chord,
                             Rng& rng) {
  if (m < 1) throw DomainError("sphere dimension must be >= 1");
  if (!(r > 0.0)) throw DomainError("sphere radius must be positive");
  if (!(chord > 0.0)) throw DomainError("cap chord must be positive");
  const int n = m + 1;
  const double max_angle =
      chord >= 2.0 * r ? kPi : 2.0 * std::asin(chord / (2.0 * r));
  const std::size_t count = rng.binomial(total_count, cap_probability(m, max_angle));

  std::vector<double> coords(count * n);
  std::vector<double> dir(m);
  for (std::size_t i = 0; i < count; ++i) {
    // Polar angle density ~ sin^{m-1}(phi) on [0, max_angle]; the proposal
    // ~ phi^{m-1} dominates it since sin(phi) <= phi.
    double phi;
    while (true) {
      phi = max_angle * std::pow(rng.uniform_open(), 1.0 / m);
      const double accept = std::pow(std::sin(phi) / phi, m - 1);
      if (rng.uniform() < accept) break;
    }
    double* p = coords.data() + i * n;
    if (m == 1) {
      dir[0] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    } else {
      random_direction(rng, dir);
    }
    const double sp = r * std::sin(phi);
    for (int j = 0; j < m; ++j) p[j] = sp * dir[j];
    p[m] = r * std::cos(phi);
  }
  return PointCloud(n, m, r, 0.0, std::move(coords));
}

void add_gaussian_noise_inplace(PointCloud& cloud, double sigma, Rng& rng) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw DomainError("noise sigma must be non-negative and finite");
  }
  if (sigma == 0.0) return;
  for (double& x : cloud.mutable_coords()) x += sigma * rng.normal();
  cloud = PointCloud(cloud.ambient_dim(), cloud.intrinsic_dim(), cloud.radius(), sigma,
                     std::move(cloud.mutable_coords()));
}

PointCloud add_gaussian_noise(const PointCloud& cloud, double sigma, std::uint64_t seed) {
  PointCloud out = cloud;
  Rng rng = Rng::stream(seed, 0x4e4f495345ULL);
  add_gaussian_noise_inplace(out, sigma, rng);
  return out;
}

VmfSampler::VmfSampler(const UnitVector& mean, double kappa)
    : mean_(mean.coords().begin(), mean.coords().end()), kappa_(kappa), p_(mean.dim()) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw DomainError("vMF concentration must be positive and finite");
  }
  if (p_ < 2) throw DomainError("vMF needs ambient dimension >= 2");
  const double pm1 = p_ - 1.0;
  b_ = pm1 / (2.0 * kappa + std::sqrt(4.0 * kappa * kappa + pm1 * pm1));
  s_ = 2.0 * b_ / (1.0 + b_);
  log_env_ = std::log(s_ * (2.0 - s_));
}

void VmfSampler::draw(Rng& rng, std::span<double> out) const {
  const int p = p_;
  const double pm1 = p - 1.0;
  // Radial component W = <x, mean> by rejection; t = 1 - W and the
  // tangential magnitude are formed without cancellation for large kappa.
  double w = 0.0, tangential = 0.0;
  while (true) {
    const double a = chi_square(rng, p - 1);
    const double bb = chi_square(rng, p - 1);
    const double z = a / (a + bb);
    const double one_minus_z = bb / (a + bb);
    const double denom = 1.0 - (1.0 - b_) * z;
    const double t = 2.0 * b_ * z / denom;
    const double log_u = std::log(rng.uniform_open());
    const double lhs = kappa_ * (s_ - t) + pm1 * (std::log(s_ + t - s_ * t) - log_env_);
    if (lhs >= log_u) {
      w = 1.0 - t;
      tangential = 2.0 * std::sqrt(b_ * z * one_minus_z) / denom;
      break;
    }
  }
  // Uniform direction orthogonal to the mean.
  double n2 = 0.0;
  do {
    for (int i = 0; i < p; ++i) out[i] = rng.normal();
    double d = 0.0;
    for (int i = 0; i < p; ++i) d += out[i] * mean_[i];
    for (int i = 0; i < p; ++i) out[i] -= d * mean_[i];
    n2 = 0.0;
    for (int i = 0; i < p; ++i) n2 += out[i] * out[i];
  } while (n2 == 0.0);
  const double inv = tangential / std::sqrt(n2);
  double total = 0.0;
  for (int i = 0; i < p; ++i) {
    out[i] = w * mean_[i] + inv * out[i];
    total += out[i] * out[i];
  }
  const double fix = 1.0 / std::sqrt(total);
  for (int i = 0; i < p; ++i) out[i] *= fix;
}

namespace {

template <typename Sink>
void draw_mixture(const VmfMixture& mixture, std::size_t count, std::uint64_t seed,
                  Sink&& sink) {
  if (count == 0) throw DomainError("sample count must be positive");
  std::vector<VmfSampler> samplers;
  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& c : mixture.components()) {
    samplers.emplace_back(mixture.mean(), c.kappa);
    acc += c.weight;
    cumulative.push_back(acc);
  }
  cumulative.back() = 1.0;
  Rng rng = Rng::stream(seed, 0x564d46ULL);
  std::vector<double> buf(mixture.mean().dim());
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = 0;
    if (samplers.size() > 1) {
      const double u = rng.uniform();
      while (j + 1 < cumulative.size() && u >= cumulative[j]) ++j;
    }
    samplers[j].draw(rng, buf);
    sink(buf);
  }
}

}  // namespace

std::vector<UnitVector> sample_vmf(const VmfMixture& mixture, std::size_t count,
                                   std::uint64_t seed) {
  std::vector<UnitVector> out;
  out.reserve(count);
  draw_mixture(mixture, count, seed,
               [&](const std::vector<double>& v) { out.emplace_back(v); });
  return out;
}

std::vector<double> sample_folded_angles(const VmfMixture& mixture, const UnitVector& mu0,
                                         std::size_t count, std::uint64_t seed) {
  if (mu0.dim() != mixture.mean().dim()) throw DomainError("dimension mismatch");
  std::vector<double> out;
  out.reserve(count);
  std::vector<double> perp(mu0.dim());
  draw_mixture(mixture, count, seed, [&](const std::vector<double>& v) {
    const double d = mu0.dot(v);
    double s = 0.0;
    for (int i = 0; i < mu0.dim(); ++i) {
      const double q = v[i] - d * mu0[i];
      s += q * q;
    }
    out.push_back(std::atan2(std::sqrt(s), std::abs(d)));
  });
  return out;
}

UnitVector tilted_pole(int dim, double alpha) {
  if (dim < 2) throw DomainError("tilted_pole needs dim >= 2");
  std::vector<double> c(dim, 0.0);
  c[dim - 2] = std::sin(alpha);
  c[dim - 1] = std::cos(alpha);
  return UnitVector(std::move(c));
}

}  // namespace avc
