#pragma once

// Data-parallel inner loops with a scalar reference implementation and an
// AVX2/FMA variant. The variant is picked once at runtime from CPUID; tests
// pin either one through force_isa() and check them against each other.
//
// squared_distances is bit-identical across variants (same per-lane operation
// order, no contraction). The log-cosh kernels use a polynomial exp/log1p in
// the vector path and agree with the scalar path to a few ulp.

#include <cstddef>
#include <span>

namespace avc::simd {

enum class Isa { kScalar, kAvx2 };

const char* isa_name(Isa isa);
bool isa_available(Isa isa);

/// The variant currently used by the dispatching wrappers below.
Isa active_isa();

/// Overrides runtime detection. Throws DomainError if isa is unavailable.
void force_isa(Isa isa);
/// Restores CPUID-based selection.
void reset_isa();

// out[i] = |points[i] - center|^2, points row-major n x dim.
void squared_distances(std::span<const double> points, std::size_t dim,
                       std::span<const double> center, std::span<double> out);

// out[i] = ln cosh(scale * x[i]).
void log_cosh_scaled(double scale, std::span<const double> x,
                     std::span<double> out);

// sum_i w[i] * ln cosh(scale * x[i]).
double weighted_log_cosh_sum(double scale, std::span<const double> x,
                             std::span<const double> w);

namespace scalar {
void squared_distances(const double* points, std::size_t n, std::size_t dim,
                       const double* center, double* out);
void log_cosh_scaled(double scale, const double* x, std::size_t n, double* out);
double weighted_log_cosh_sum(double scale, const double* x, const double* w,
                             std::size_t n);
}  // namespace scalar

namespace avx2 {
bool supported();
void squared_distances(const double* points, std::size_t n, std::size_t dim,
                       const double* center, double* out);
void log_cosh_scaled(double scale, const double* x, std::size_t n, double* out);
double weighted_log_cosh_sum(double scale, const double* x, const double* w,
                             std::size_t n);
}  // namespace avx2

}  // namespace avc::simd
