#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "avc/errors.hpp"
#include "avc/histogram.hpp"
#include "avc/specfun.hpp"
#include "avc/randgeom.hpp"
#include "doctest.h"

using namespace avc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::pair<double, double>> read_xy(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::pair<double, double>> out;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    out.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
  }
  return out;
}

}  // namespace

TEST_CASE("histogram densities integrate to one") {
  Rng rng(3);
  std::vector<double> v;
  for (int i = 0; i < 5000; ++i) v.push_back(rng.normal());
  for (int bins : {2, 10, 37}) {
    const auto h = make_histogram(v, bins);
    REQUIRE(h.centers.size() == static_cast<std::size_t>(bins));
    double mass = 0;
    for (double d : h.density) mass += d * h.width;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(h.centers.front() == doctest::Approx(h.lo + h.width / 2));
  }
  const auto flat = make_histogram(std::vector<double>{2.0, 2.0, 2.0}, 4);
  CHECK(flat.width == doctest::Approx(0.25));
  double mass = 0;
  for (double d : flat.density) mass += d * flat.width;
  CHECK(mass == doctest::Approx(1.0));
  CHECK_THROWS_AS(make_histogram(v, 1), DomainError);
  CHECK_THROWS_AS(make_histogram(std::vector<double>{}, 4), DomainError);
  CHECK_THROWS_AS(make_histogram(std::vector<double>{std::nan("")}, 4), DomainError);
}

TEST_CASE("SVG and CSV siblings are written") {
  const fs::path svg = fs::temp_directory_path() / "avc_test_hist.svg";
  const std::vector<double> v{0.9, 1.0, 1.05, 1.1, 1.3};
  const auto h = emit_histogram(v, 5, svg, {"test <title> & more", "curvature", 1.0});
  const auto text = slurp(svg);
  CHECK(text.find("<svg") != std::string::npos);
  CHECK(text.find("version=\"1.1\"") != std::string::npos);
  CHECK(text.find("&lt;title&gt; &amp; more") != std::string::npos);
  CHECK(text.find("<title> &") == std::string::npos);
  const auto rows = read_xy(fs::path(svg).replace_extension(".csv"));
  REQUIRE(rows.size() == 5);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].first == h.centers[i]);
    CHECK(rows[i].second == h.density[i]);
  }
  fs::remove(svg);
  fs::remove(fs::path(svg).replace_extension(".csv"));
  CHECK_THROWS_AS(emit_histogram(v, 5, "/nonexistent/dir/h.svg"), IoError);
}

TEST_CASE("tabulated densities integrate to one on a fine grid") {
  const std::vector<VmfComponent> noise{{0.4, 60.0}, {0.6, 500.0}};
  const fs::path out = fs::temp_directory_path() / "avc_test_density.csv";
  const auto t = tabulate_density(DensityKind::kTheta, 5, noise, 0.4, std::nullopt, 0.0, kHalfPi, 10000, out);
  double mass = 0;
  for (std::size_t i = 1; i < t.x.size(); ++i) mass += 0.5 * (t.density[i] + t.density[i - 1]) * (t.x[i] - t.x[i - 1]);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-4));
  const auto rows = read_xy(out);
  REQUIRE(rows.size() == 10000);
  double csv_mass = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    csv_mass += 0.5 * (rows[i].second + rows[i - 1].second) * (rows[i].first - rows[i - 1].first);
  CHECK(csv_mass == doctest::Approx(1.0).epsilon(1e-4));
  fs::remove(out);

  const double C = 1.0 / std::sin(0.2);
  const auto w = tabulate_density(DensityKind::kOmega, 5, noise, 0.4, C, 0.0, C / std::sqrt(2.0), 10000);
  double wmass = 0;
  for (std::size_t i = 1; i < w.x.size(); ++i) wmass += 0.5 * (w.density[i] + w.density[i - 1]) * (w.x[i] - w.x[i - 1]);
  CHECK(wmass == doctest::Approx(1.0).epsilon(1e-4));
  // Zero outside the support.
  const auto beyond = tabulate_density(DensityKind::kOmega, 5, noise, 0.4, C, C, 2 * C, 3);
  for (double d : beyond.density) CHECK(d == 0.0);
}

TEST_CASE("tabulation preconditions") {
  const std::vector<VmfComponent> noise{{1.0, 60.0}};
  CHECK_THROWS_AS(tabulate_density(DensityKind::kTheta, 3, noise, 0.3, std::nullopt, 0.0, 1.0, 1), DomainError);
  CHECK_THROWS_AS(tabulate_density(DensityKind::kTheta, 3, noise, 0.3, std::nullopt, 1.0, 1.0, 5), DomainError);
  CHECK_THROWS_AS(tabulate_density(DensityKind::kOmega, 3, noise, 0.3, std::nullopt, 0.0, 1.0, 5), DomainError);
  CHECK_THROWS_AS(tabulate_density(DensityKind::kTheta, 3, noise, 0.3, std::nullopt, 0.0, 2.0, 5), DomainError);
}
