#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "avc/pushforward.hpp"

namespace avc {

struct Histogram {
  double lo = 0.0;
  double width = 1.0;
  std::vector<double> centers;
  std::vector<double> density;  // count / (N * width)
};

/// Equal-width bins over [min, max] of the values (a unit-wide range centered
/// on the value when all values coincide). Needs >= 1 finite value, bins >= 2.
Histogram make_histogram(std::span<const double> values, int bins);

struct HistogramStyle {
  std::string title;
  std::string x_label = "curvature";
  std::optional<double> reference;  // vertical dashed line, e.g. 1/r
};

/// Writes an SVG 1.1 histogram to `svg_path` and the (bin_center, density)
/// table to the same path with extension ".csv".
Histogram emit_histogram(std::span<const double> values, int bins,
                         const std::filesystem::path& svg_path,
                         const HistogramStyle& style = {});

enum class DensityKind { kTheta, kOmega };

struct DensityTable {
  std::vector<double> x;
  std::vector<double> density;
};

/// Tabulates f_Theta or f_Omega of a fixed-mean mixture on n >= 2 equally
/// spaced points of [lo, hi]. For kOmega, C must be given. Writes "x,density"
/// CSV when out_path is non-empty.
DensityTable tabulate_density(DensityKind kind, int m, std::span<const VmfComponent> noise,
                              double alpha, std::optional<double> C, double lo, double hi,
                              int n, const std::filesystem::path& out_path = {});

}  // namespace avc
