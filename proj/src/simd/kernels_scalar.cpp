#include <cmath>

#include "avc/simd/kernels.hpp"
#include "avc/specfun.hpp"

namespace avc::simd::scalar {

void squared_distances(const double* points, std::size_t n, std::size_t dim,
                       const double* center, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = points + i * dim;
    double s = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double diff = p[j] - center[j];
      s += diff * diff;
    }
    out[i] = s;
  }
}

void log_cosh_scaled(double scale, const double* x, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = log_cosh(scale * x[i]);
}

double weighted_log_cosh_sum(double scale, const double* x, const double* w,
                             std::size_t n) {
  // Four interleaved partial sums, reduced in the same order as the vector
  // path.
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t lane = 0; lane < 4; ++lane) {
      acc[lane] += w[i + lane] * log_cosh(scale * x[i + lane]);
    }
  }
  double total = (acc[0] + acc[2]) + (acc[1] + acc[3]);
  for (; i < n; ++i) total += w[i] * log_cosh(scale * x[i]);
  return total;
}

}  // namespace avc::simd::scalar
