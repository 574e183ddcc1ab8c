#include "avc/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define AVC_X86 1
#include <immintrin.h>
#else
#define AVC_X86 0
#endif

#include <cmath>

#include "avc/specfun.hpp"

namespace avc::simd::avx2 {

#if AVC_X86

#define AVC_TARGET __attribute__((target("avx2,fma")))

namespace {

constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kLog2e = 1.44269504088896338700e+00;
constexpr double kLn2 = 0.69314718055994530942;
// Below this exp() is flushed to zero; the log1p term is then < 1e-300.
constexpr double kExpFloor = -708.0;

// e^y for y <= 0. Range reduction y = k ln2 + r, |r| <= ln2/2, then a
// degree-13 Taylor polynomial (truncation error < 5e-18 relative).
AVC_TARGET inline __m256d exp_nonpositive(__m256d y) {
  const __m256d floor_mask = _mm256_cmp_pd(y, _mm256_set1_pd(kExpFloor), _CMP_LT_OQ);
  y = _mm256_max_pd(y, _mm256_set1_pd(kExpFloor));
  const __m256d k = _mm256_round_pd(_mm256_mul_pd(y, _mm256_set1_pd(kLog2e)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, _mm256_set1_pd(kLn2Hi), y);
  r = _mm256_fnmadd_pd(k, _mm256_set1_pd(kLn2Lo), r);

  static constexpr double kCoef[14] = {
      1.0,
      1.0,
      1.0 / 2.0,
      1.0 / 6.0,
      1.0 / 24.0,
      1.0 / 120.0,
      1.0 / 720.0,
      1.0 / 5040.0,
      1.0 / 40320.0,
      1.0 / 362880.0,
      1.0 / 3628800.0,
      1.0 / 39916800.0,
      1.0 / 479001600.0,
      1.0 / 6227020800.0,
  };
  __m256d p = _mm256_set1_pd(kCoef[13]);
  for (int i = 12; i >= 0; --i) {
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kCoef[i]));
  }

  const __m128i k32 = _mm256_cvtpd_epi32(k);
  __m256i bits = _mm256_cvtepi32_epi64(k32);
  bits = _mm256_add_epi64(bits, _mm256_set1_epi64x(1023));
  bits = _mm256_slli_epi64(bits, 52);
  const __m256d scale = _mm256_castsi256_pd(bits);
  const __m256d result = _mm256_mul_pd(p, scale);
  return _mm256_andnot_pd(floor_mask, result);
}

// log(1 + y) for y in [0, 1] via 2 atanh(s), s = y / (2 + y) <= 1/3.
AVC_TARGET inline __m256d log1p_unit(__m256d y) {
  const __m256d s = _mm256_div_pd(y, _mm256_add_pd(_mm256_set1_pd(2.0), y));
  const __m256d t = _mm256_mul_pd(s, s);
  __m256d p = _mm256_set1_pd(1.0 / 35.0);
  for (int k = 16; k >= 0; --k) {
    p = _mm256_fmadd_pd(p, t, _mm256_set1_pd(1.0 / (2.0 * k + 1.0)));
  }
  return _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(2.0), s), p);
}

// sinh(b) for |b| <= 0.5 by its odd Taylor series through b^17.
AVC_TARGET inline __m256d sinh_small(__m256d b) {
  const __m256d t = _mm256_mul_pd(b, b);
  __m256d p = _mm256_set1_pd(1.0 / 355687428096000.0);  // 1/17!
  double inv_fact = 1.0 / 355687428096000.0;
  for (int k = 15; k >= 1; k -= 2) {
    inv_fact *= (k + 1.0) * (k + 2.0);
    p = _mm256_fmadd_pd(p, t, _mm256_set1_pd(inv_fact));
  }
  return _mm256_mul_pd(b, p);
}

// Below 1 uses log1p(2 sinh^2(a/2)), which avoids the cancellation of the
// large-argument form near zero.
AVC_TARGET inline __m256d log_cosh_vec(__m256d x) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d a = _mm256_andnot_pd(sign_mask, x);
  const __m256d e = exp_nonpositive(_mm256_mul_pd(_mm256_set1_pd(-2.0), a));
  const __m256d large = _mm256_sub_pd(_mm256_add_pd(a, log1p_unit(e)), _mm256_set1_pd(kLn2));
  const __m256d small_mask = _mm256_cmp_pd(a, _mm256_set1_pd(1.0), _CMP_LT_OQ);
  const __m256d sh = sinh_small(_mm256_mul_pd(_mm256_set1_pd(0.5), _mm256_min_pd(a, _mm256_set1_pd(1.0))));
  const __m256d small = log1p_unit(_mm256_mul_pd(_mm256_set1_pd(2.0), _mm256_mul_pd(sh, sh)));
  return _mm256_blendv_pd(large, small, small_mask);
}

}  // namespace

bool supported() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

AVC_TARGET void squared_distances(const double* points, std::size_t n,
                                  std::size_t dim, const double* center,
                                  double* out) {
  const long long stride = static_cast<long long>(dim);
  const __m256i offsets = _mm256_set_epi64x(3 * stride, 2 * stride, stride, 0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double* base = points + i * dim;
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t j = 0; j < dim; ++j) {
      const __m256d p = _mm256_i64gather_pd(base + j, offsets, 8);
      const __m256d diff = _mm256_sub_pd(p, _mm256_set1_pd(center[j]));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(diff, diff));
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) {
    const double* p = points + i * dim;
    double s = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double diff = p[j] - center[j];
      s += diff * diff;
    }
    out[i] = s;
  }
}

AVC_TARGET void log_cosh_scaled(double scale, const double* x, std::size_t n,
                                double* out) {
  const __m256d vs = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_mul_pd(vs, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(out + i, log_cosh_vec(v));
  }
  for (; i < n; ++i) out[i] = avc::log_cosh(scale * x[i]);
}

AVC_TARGET double weighted_log_cosh_sum(double scale, const double* x,
                                        const double* w, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(scale);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_mul_pd(vs, _mm256_loadu_pd(x + i));
    const __m256d lc = log_cosh_vec(v);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + i), lc));
  }
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  double total = _mm_cvtsd_f64(pair) + _mm_cvtsd_f64(_mm_unpackhi_pd(pair, pair));
  for (; i < n; ++i) total += w[i] * avc::log_cosh(scale * x[i]);
  return total;
}

#else  // !AVC_X86

bool supported() { return false; }

void squared_distances(const double* points, std::size_t n, std::size_t dim,
                       const double* center, double* out) {
  scalar::squared_distances(points, n, dim, center, out);
}

void log_cosh_scaled(double scale, const double* x, std::size_t n, double* out) {
  scalar::log_cosh_scaled(scale, x, n, out);
}

double weighted_log_cosh_sum(double scale, const double* x, const double* w,
                             std::size_t n) {
  return scalar::weighted_log_cosh_sum(scale, x, w, n);
}

#endif

}  // namespace avc::simd::avx2
