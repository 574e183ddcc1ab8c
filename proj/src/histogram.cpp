#include "avc/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "avc/errors.hpp"
#include "avc/pointcloud_io.hpp"

namespace avc {
namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(precision);
  os << v;
  return os.str();
}

}  // namespace

Histogram make_histogram(std::span<const double> values, int bins) {
  if (bins < 2) throw DomainError("histogram needs at least 2 bins");
  std::vector<double> v;
  for (double x : values) {
    if (std::isfinite(x)) v.push_back(x);
  }
  if (v.empty()) throw DomainError("histogram needs at least one finite value");
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  double lo = *mn, hi = *mx;
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  Histogram h;
  h.lo = lo;
  h.width = (hi - lo) / bins;
  std::vector<double> counts(bins, 0.0);
  for (double x : v) {
    int b = static_cast<int>((x - lo) / h.width);
    counts[std::clamp(b, 0, bins - 1)] += 1.0;
  }
  const double norm = 1.0 / (static_cast<double>(v.size()) * h.width);
  for (int b = 0; b < bins; ++b) {
    h.centers.push_back(lo + (b + 0.5) * h.width);
    h.density.push_back(counts[b] * norm);
  }
  return h;
}

Histogram emit_histogram(std::span<const double> values, int bins,
                         const std::filesystem::path& svg_path, const HistogramStyle& style) {
  const Histogram h = make_histogram(values, bins);

  std::filesystem::path csv_path = svg_path;
  csv_path.replace_extension(".csv");
  const std::vector<std::string> names{"bin_center", "density"};
  const std::vector<std::vector<double>> cols{h.centers, h.density};
  write_columns_csv(csv_path, names, cols);

  constexpr double W = 640, H = 400, L = 60, R = 20, T = 40, B = 50;
  const double pw = W - L - R, ph = H - T - B;
  double x_lo = h.lo, x_hi = h.lo + h.width * bins;
  if (style.reference) {
    x_lo = std::min(x_lo, *style.reference - 0.5 * h.width);
    x_hi = std::max(x_hi, *style.reference + 0.5 * h.width);
  }
  const double y_hi = *std::max_element(h.density.begin(), h.density.end()) * 1.05;
  auto sx = [&](double x) { return L + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto sy = [&](double y) { return T + ph - y / y_hi * ph; };

  std::ofstream out(svg_path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing (" + svg_path.string() + ")");
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W
      << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H
      << "\" fill=\"white\"/>\n";
  if (!style.title.empty()) {
    out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"14\">" << xml_escape(style.title)
        << "</text>\n";
  }
  for (int b = 0; b < bins; ++b) {
    if (h.density[b] <= 0.0) continue;
    const double x0 = sx(h.lo + b * h.width), x1 = sx(h.lo + (b + 1) * h.width);
    const double y0 = sy(h.density[b]);
    out << "<rect x=\"" << fmt(x0, 6) << "\" y=\"" << fmt(y0, 6) << "\" width=\""
        << fmt(x1 - x0, 6) << "\" height=\"" << fmt(T + ph - y0, 6)
        << "\" fill=\"#4c72b0\" stroke=\"#2a4470\" stroke-width=\"0.5\"/>\n";
  }
  out << "<line x1=\"" << L << "\" y1=\"" << T + ph << "\" x2=\"" << L + pw << "\" y2=\""
      << T + ph << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << T + ph
      << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x_lo + (x_hi - x_lo) * k / 4.0;
    out << "<text x=\"" << fmt(sx(xv), 6) << "\" y=\"" << T + ph + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(xv) << "</text>\n";
    const double yv = y_hi * k / 4.0;
    out << "<text x=\"" << L - 6 << "\" y=\"" << fmt(sy(yv) + 4, 6)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(yv)
        << "</text>\n";
  }
  out << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << xml_escape(style.x_label) << "</text>\n";
  if (style.reference) {
    const double xr = sx(*style.reference);
    out << "<line x1=\"" << fmt(xr, 6) << "\" y1=\"" << T << "\" x2=\"" << fmt(xr, 6)
        << "\" y2=\"" << T + ph << "\" stroke=\"#c44e52\" stroke-width=\"1.5\" "
        << "stroke-dasharray=\"6,4\"/>\n";
  }
  out << "</svg>\n";
  if (!out) throw IoError("write failed (" + svg_path.string() + ")");
  return h;
}

DensityTable tabulate_density(DensityKind kind, int m, std::span<const VmfComponent> noise,
                              double alpha, std::optional<double> C, double lo, double hi,
                              int n, const std::filesystem::path& out_path) {
  if (n < 2) throw DomainError("density grid needs at least 2 points");
  if (!(hi > lo)) throw DomainError("density grid needs lo < hi");
  if (kind == DensityKind::kOmega && !C) throw DomainError("omega density needs C");
  DensityTable t;
  for (int i = 0; i < n; ++i) {
    const double x = i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1);
    const double lf = kind == DensityKind::kTheta
                          ? log_f_theta_mixture(m, noise, alpha, x)
                          : log_f_omega_mixture(m, noise, alpha, *C, x);
    t.x.push_back(x);
    t.density.push_back(std::exp(lf));
  }
  if (!out_path.empty()) {
    const std::vector<std::string> names{kind == DensityKind::kTheta ? "theta" : "omega",
                                         "density"};
    const std::vector<std::vector<double>> cols{t.x, t.density};
    write_columns_csv(out_path, names, cols);
  }
  return t;
}

}  // namespace avc
