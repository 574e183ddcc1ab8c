#include <algorithm>
#include <cmath>
#include <vector>

#include "avc/errors.hpp"
#include "avc/mixture_fit.hpp"
#include "avc/randgeom.hpp"
#include "doctest.h"

using namespace avc;

namespace {

std::vector<double> draw(int m, std::vector<VmfComponent> comps, std::size_t n, std::uint64_t seed) {
  const auto pole = UnitVector::north_pole(m + 1);
  return sample_folded_angles(VmfMixture(pole, std::move(comps)), pole, n, seed);
}

}  // namespace

TEST_CASE("single vMF samples select one component with the right kappa") {
  const auto angles = draw(5, {{1.0, 300.0}}, 50000, 1);
  const auto report = fit_vmf_mixture_report(angles, 5, 4);
  CHECK(report.selected.components.size() == 1);
  CHECK(report.selected.components[0].kappa == doctest::Approx(300.0).epsilon(0.03));
  CHECK(report.selected.converged);
  REQUIRE(report.candidates.size() == 4);
  for (std::size_t k = 0; k < report.candidates.size(); ++k) {
    if (report.candidates[k].converged) CHECK(report.candidates[k].components.size() == k + 1);
  }
}

TEST_CASE("two well separated components are recovered") {
  const auto angles = draw(3, {{0.5, 50.0}, {0.5, 2000.0}}, 50000, 2);
  const auto report = fit_vmf_mixture_report(angles, 3, 4);
  const auto& fit = report.selected;
  REQUIRE(fit.components.size() == 2);
  // Components are sorted by concentration.
  CHECK(fit.components[0].kappa == doctest::Approx(50.0).epsilon(0.1));
  CHECK(fit.components[1].kappa == doctest::Approx(2000.0).epsilon(0.1));
  CHECK(std::abs(fit.components[0].weight - 0.5) < 0.05);
  CHECK(std::abs(fit.components[1].weight - 0.5) < 0.05);
}

TEST_CASE("EM log-likelihood is monotone") {
  const auto angles = draw(5, {{0.2, 30.0}, {0.5, 150.0}, {0.3, 900.0}}, 20000, 3);
  for (int K : {2, 3}) {
    std::vector<double> trace;
    const auto fit = fit_vmf_mixture_k(angles, 5, K, &trace);
    REQUIRE(trace.size() >= 2);
    for (std::size_t i = 1; i < trace.size(); ++i) {
      CHECK(trace[i] >= trace[i - 1] - 1e-9 * std::max(1.0, std::abs(trace[i - 1])));
    }
    CHECK(fit.log_likelihood == doctest::Approx(trace.back()).epsilon(1e-12));
    double wsum = 0;
    for (const auto& c : fit.components) {
      CHECK(c.kappa > 0.0);
      wsum += c.weight;
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("BIC uses 2K - 1 parameters") {
  const auto angles = draw(4, {{1.0, 100.0}}, 2000, 4);
  const auto report = fit_vmf_mixture_report(angles, 4, 2);
  for (const auto& c : report.candidates) {
    if (!c.converged) continue;
    const double p = 2.0 * c.components.size() - 1.0;
    CHECK(c.bic == doctest::Approx(p * std::log(2000.0) - 2 * c.log_likelihood).epsilon(1e-12));
  }
}

TEST_CASE("degenerate samples cap kappa") {
  const std::vector<double> same(500, 1e-9);
  try {
    const auto fit = fit_vmf_mixture_k(same, 3, 1);
    CHECK(fit.components[0].kappa == kKappaMax);
  } catch (const ConvergenceFailure&) {
    // Also documented behavior.
  }
}

TEST_CASE("fits are deterministic") {
  const auto angles = draw(3, {{0.4, 80.0}, {0.6, 600.0}}, 5000, 5);
  const auto a = fit_vmf_mixture_report(angles, 3, 3);
  const auto b = fit_vmf_mixture_report(angles, 3, 3);
  CHECK(a.selected.log_likelihood == b.selected.log_likelihood);
  REQUIRE(a.selected.components.size() == b.selected.components.size());
  for (std::size_t i = 0; i < a.selected.components.size(); ++i) {
    CHECK(a.selected.components[i].kappa == b.selected.components[i].kappa);
    CHECK(a.selected.components[i].weight == b.selected.components[i].weight);
  }
  const auto mix = fit_vmf_mixture(angles, 3, 3);
  CHECK(mix.mean().dim() == 4);
  CHECK(mix.mean()[3] == 1.0);
}

TEST_CASE("input validation") {
  const std::vector<double> few(99, 0.1);
  CHECK_THROWS_AS(fit_vmf_mixture_k(few, 3, 1), DomainError);
  std::vector<double> bad(200, 0.1);
  bad[7] = 2.0;
  CHECK_THROWS_AS(fit_vmf_mixture_k(bad, 3, 1), DomainError);
  const std::vector<double> ok(200, 0.1);
  CHECK_THROWS_AS(fit_vmf_mixture_k(ok, 3, 5), DomainError);
  CHECK_THROWS_AS(fit_vmf_mixture_report(ok, 3, 0), DomainError);
  CHECK_THROWS_AS(fit_vmf_mixture_k(ok, 1, 1), DomainError);
}
