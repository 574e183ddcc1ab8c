#include <atomic>
#include <string>

#include "avc/errors.hpp"
#include "avc/simd/kernels.hpp"

namespace avc::simd {
namespace {

Isa detect() { return avx2::supported() ? Isa::kAvx2 : Isa::kScalar; }

// -1 means "not forced".
std::atomic<int> g_forced{-1};

void check_sizes(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw DomainError(std::string(what) + ": size mismatch");
}

}  // namespace

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  return isa == Isa::kScalar || (isa == Isa::kAvx2 && avx2::supported());
}

Isa active_isa() {
  static const Isa detected = detect();
  const int forced = g_forced.load(std::memory_order_relaxed);
  return forced < 0 ? detected : static_cast<Isa>(forced);
}

void force_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw DomainError(std::string("instruction set not available: ") + isa_name(isa));
  }
  g_forced.store(static_cast<int>(isa), std::memory_order_relaxed);
}

void reset_isa() { g_forced.store(-1, std::memory_order_relaxed); }

void squared_distances(std::span<const double> points, std::size_t dim,
                       std::span<const double> center, std::span<double> out) {
  check_sizes(center.size(), dim, "squared_distances center");
  if (dim == 0) throw DomainError("squared_distances: dim must be positive");
  check_sizes(points.size(), out.size() * dim, "squared_distances points");
  if (active_isa() == Isa::kAvx2) {
    avx2::squared_distances(points.data(), out.size(), dim, center.data(), out.data());
  } else {
    scalar::squared_distances(points.data(), out.size(), dim, center.data(), out.data());
  }
}

void log_cosh_scaled(double scale, std::span<const double> x, std::span<double> out) {
  check_sizes(x.size(), out.size(), "log_cosh_scaled");
  if (active_isa() == Isa::kAvx2) {
    avx2::log_cosh_scaled(scale, x.data(), x.size(), out.data());
  } else {
    scalar::log_cosh_scaled(scale, x.data(), x.size(), out.data());
  }
}

double weighted_log_cosh_sum(double scale, std::span<const double> x,
                             std::span<const double> w) {
  check_sizes(x.size(), w.size(), "weighted_log_cosh_sum");
  if (active_isa() == Isa::kAvx2) {
    return avx2::weighted_log_cosh_sum(scale, x.data(), w.data(), x.size());
  }
  return scalar::weighted_log_cosh_sum(scale, x.data(), w.data(), x.size());
}

}  // namespace avc::simd
