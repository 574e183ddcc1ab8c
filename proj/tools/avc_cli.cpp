// Command-line front end: sample, calibrate, estimate, experiment, density, plot.

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "avc/decode.hpp"
#include "avc/errors.hpp"
#include "avc/harness.hpp"
#include "avc/histogram.hpp"
#include "avc/pointcloud_io.hpp"
#include "avc/simd/kernels.hpp"
#include "avc/specfun.hpp"
#include "avc/version.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

// Experiment fields settable from the command line. Unset flags leave the
// config file (or the defaults) untouched.
struct ConfigFlags {
  std::string config_path;
  std::optional<int> m;
  std::optional<double> r;
  std::optional<std::string> sampling;
  std::optional<double> sigma;
  std::optional<double> density;
  std::optional<std::size_t> n_points;
  std::optional<double> epsilon;
  std::optional<double> epsilon_prime;
  std::optional<double> weight_scale;
  std::optional<std::string> weight_mode;
  std::optional<std::size_t> calibration_trials;
  std::optional<std::size_t> estimate_repeats;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_components;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "experiment config JSON")->check(CLI::ExistingFile);
    app->add_option("--m", m, "intrinsic dimension (sphere S^m)");
    app->add_option("--r", r, "sphere radius");
    app->add_option("--sampling", sampling, "perfect or noisy");
    app->add_option("--sigma", sigma, "ambient noise standard deviation");
    app->add_option("--density", density, "points per unit surface area");
    app->add_option("--n-points", n_points, "total points (overrides density)");
    app->add_option("--epsilon", epsilon, "tangent ball radius");
    app->add_option("--epsilon-prime", epsilon_prime, "outer annulus radius");
    app->add_option("--weight-scale", weight_scale, "PCA weight scale");
    app->add_option("--weight-mode", weight_mode, "linear or normalized");
    app->add_option("--calibration-trials", calibration_trials, "calibration trials");
    app->add_option("--estimate-repeats", estimate_repeats, "independent clouds");
    app->add_option("--max-components", max_components, "mixture components, 1..4");
  }

  avc::ExperimentConfig resolve() const {
    json j = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path, std::ios::binary);
      if (!in) throw avc::IoError("cannot open config (" + config_path + ")");
      try {
        in >> j;
      } catch (const json::exception& e) {
        throw avc::ConfigError("malformed config JSON (" + config_path + "): " + e.what());
      }
    }
    auto set = [&](const char* key, const auto& v) {
      if (v) j[key] = *v;
    };
    set("m", m);
    set("r", r);
    set("sampling", sampling);
    set("sigma", sigma);
    set("density", density);
    set("n_points", n_points);
    set("epsilon", epsilon);
    set("epsilon_prime", epsilon_prime);
    set("weight_scale", weight_scale);
    set("weight_mode", weight_mode);
    set("calibration_trials", calibration_trials);
    set("estimate_repeats", estimate_repeats);
    set("seed", seed);
    set("max_components", max_components);
    return avc::experiment_config_from_json(j);
  }
};

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw avc::IoError("cannot open for writing (" + path + ")");
  out << text;
  if (!out) throw avc::IoError("write failed (" + path + ")");
}

std::vector<double> read_column(const std::string& path, const std::string& column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw avc::IoError("cannot open for reading (" + path + ")");
  std::string line;
  if (!std::getline(in, line)) throw avc::IoError("empty file (" + path + ")");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      if (!cell.empty() && cell.back() == '\r') cell.pop_back();
      header.push_back(cell);
    }
  }
  std::size_t col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == column) col = i;
  }
  if (col == header.size()) {
    throw avc::ConfigError("column '" + column + "' not found in " + path);
  }
  std::vector<double> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    for (std::size_t i = 0; i <= col && std::getline(ss, cell, ','); ++i) {
    }
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw avc::IoError("non-numeric value '" + cell + "' in " + path);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curvature estimation from point clouds with vMF noise decoding"};
  app.set_version_flag("--version", std::string(avc::kVersion));
  app.require_subcommand(1);
  unsigned threads = 0;
  std::string isa = "auto";
  app.add_option("--threads", threads, "worker threads (0 = all cores)");
  app.add_option("--isa", isa, "kernel variant: auto, scalar or avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  // sample
  // Global options are also accepted after the subcommand name.
  app.fallthrough();
  auto* sample = app.add_subcommand("sample", "draw a point cloud on S^m_r");
  int s_m = 2;
  double s_r = 1.0, s_sigma = 0.0, s_density = 0.0;
  std::size_t s_n = 0;
  std::uint64_t s_seed = 0;
  std::string s_out;
  bool s_header = false;
  sample->add_option("--m", s_m, "intrinsic dimension")->required();
  sample->add_option("--r", s_r, "radius");
  auto* s_n_opt = sample->add_option("--n-points", s_n, "number of points");
  auto* s_d_opt = sample->add_option("--density", s_density, "points per unit area");
  s_n_opt->excludes(s_d_opt);
  sample->add_option("--sigma", s_sigma, "ambient Gaussian noise");
  sample->add_option("--seed", s_seed, "seed")->required();
  sample->add_option("--out", s_out, "output path (.csv or .pcld)")->required();
  sample->add_flag("--header", s_header, "write a CSV header row");

  // calibrate
  auto* calib = app.add_subcommand("calibrate", "fit the tangent-noise vMF mixture");
  ConfigFlags c_flags;
  c_flags.attach(calib);
  calib->add_option("--seed", c_flags.seed, "seed")->required();
  std::string c_out;
  calib->add_option("--out", c_out, "calibration JSON path")->required();

  // estimate
  auto* estimate = app.add_subcommand("estimate", "naive and decoded curvature at a point");
  std::string e_cloud, e_cal, e_samples;
  std::vector<double> e_point;
  double e_eps = 0.0, e_eps_prime = 0.0;
  estimate->add_option("--cloud", e_cloud, "point cloud (.csv or .pcld)")->required();
  estimate->add_option("--calibration", e_cal, "calibration JSON")->required();
  estimate->add_option("--point", e_point, "query point (default: north pole r e_{m+1})");
  estimate->add_option("--epsilon", e_eps, "tangent ball radius (default: calibration's)");
  estimate->add_option("--epsilon-prime", e_eps_prime, "outer annulus radius");
  estimate->add_option("--samples-out", e_samples, "write theta,chord,omega CSV");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "calibrate, estimate and summarize");
  ConfigFlags x_flags;
  x_flags.attach(experiment);
  experiment->add_option("--seed", x_flags.seed, "seed (mandatory)")->required();
  std::string x_out = "runs";
  std::string x_calibration;
  experiment->add_option("--out", x_out, "root directory for run output");
  experiment->add_option("--calibration", x_calibration, "reuse a calibration JSON");

  // density
  auto* density = app.add_subcommand("density", "tabulate f_Theta or f_Omega");
  std::string d_kind = "omega", d_out, d_cal;
  int d_m = 3, d_n = 1000;
  double d_kappa = 0.0, d_alpha = 0.0, d_r = 1.0, d_lo = 0.0, d_hi = 0.0;
  density->add_option("--kind", d_kind, "theta or omega")
      ->check(CLI::IsMember({"theta", "omega"}));
  density->add_option("--m", d_m, "sphere dimension");
  auto* d_kappa_opt = density->add_option("--kappa", d_kappa, "single vMF concentration");
  auto* d_cal_opt = density->add_option("--calibration", d_cal, "use a calibrated mixture");
  d_kappa_opt->excludes(d_cal_opt);
  density->add_option("--alpha", d_alpha, "true angle between normals")->required();
  density->add_option("--r", d_r, "sphere radius (sets C for omega)");
  density->add_option("--lo", d_lo, "grid start");
  density->add_option("--hi", d_hi, "grid end (default: end of support)");
  density->add_option("--n", d_n, "grid points");
  density->add_option("--out", d_out, "CSV path")->required();

  // plot
  auto* plot = app.add_subcommand("plot", "histogram of a CSV column as SVG");
  std::string p_in, p_col, p_out, p_title;
  int p_bins = 30;
  std::optional<double> p_ref;
  plot->add_option("--in", p_in, "CSV with a header row")->required();
  plot->add_option("--column", p_col, "column name")->required();
  plot->add_option("--bins", p_bins, "number of bins");
  plot->add_option("--reference", p_ref, "reference line position");
  plot->add_option("--title", p_title, "plot title");
  plot->add_option("--out", p_out, "SVG path (a CSV is written next to it)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : avc::exit_code(avc::ErrorCategory::kConfig);
  }

  try {
    if (isa == "scalar") avc::simd::force_isa(avc::simd::Isa::kScalar);
    if (isa == "avx2") avc::simd::force_isa(avc::simd::Isa::kAvx2);

    if (*sample) {
      if (s_n == 0) {
        if (!(s_density > 0.0)) throw avc::ConfigError("give --n-points or --density");
        s_n = avc::derived_n_points(s_m, s_r, s_density);
      }
      avc::PointCloud cloud = avc::sample_sphere_uniform(s_m, s_r, s_n, s_seed);
      if (s_sigma > 0.0) cloud = avc::add_gaussian_noise(cloud, s_sigma, s_seed);
      avc::write_cloud(cloud, s_out, s_header);
      std::cout << "wrote " << cloud.size() << " points to " << s_out << '\n';
    } else if (*calib) {
      const avc::ExperimentConfig cfg = c_flags.resolve();
      print_warnings(avc::config_warnings(cfg));
      const auto report =
          avc::calibrate(cfg.calibration(), cfg.calibration_trials,
                         avc::calibration_seed(cfg.seed), threads);
      avc::save_calibration(report, c_out);
      std::cout << "fitted " << report.fit_components() << " component(s):";
      for (const auto& c : report.components) {
        std::cout << " (a=" << avc::format_double(c.weight)
                  << ", kappa=" << avc::format_double(c.kappa) << ")";
      }
      std::cout << "; skipped " << report.skipped << " of " << report.trials << '\n';
    } else if (*estimate) {
      const auto cal = avc::load_calibration(e_cal);
      const int m = cal.config.m;
      const double r = cal.config.r;
      const avc::PointCloud cloud = avc::read_cloud(e_cloud, m, r);
      if (cloud.ambient_dim() != m + 1) {
        throw avc::ConfigError("cloud dimension does not match the calibration");
      }
      std::vector<double> x = e_point;
      if (x.empty()) {
        x.assign(m + 1, 0.0);
        x[m] = r;
      }
      if (static_cast<int>(x.size()) != m + 1) throw avc::ConfigError("--point has wrong dimension");
      const double eps = e_eps > 0.0 ? e_eps : cal.config.epsilon;
      const double eps_prime = e_eps_prime > 0.0 ? e_eps_prime : eps + 0.2 * r;
      const auto est = avc::estimate_curvature(
          cloud, x, m, eps, eps_prime, cal.fitted(),
          {cal.config.weight_scale, cal.config.weight_mode});
      if (!e_samples.empty()) {
        std::vector<std::vector<double>> cols(3);
        for (const auto& s : est.naive.samples) {
          cols[0].push_back(s.theta);
          cols[1].push_back(s.chord);
          cols[2].push_back(s.omega);
        }
        const std::vector<std::string> names{"theta", "chord", "omega"};
        avc::write_columns_csv(e_samples, names, cols);
      }
      const json out = {{"naive_omega_bar", est.naive.omega_bar},
                        {"decoded_omega_tilde", est.decoded.omega_tilde},
                        {"alpha_hat", est.decoded.alpha_hat},
                        {"d_bar", est.decoded.d_bar},
                        {"n_samples", est.decoded.n_samples},
                        {"chord_stddev", est.naive.chord_stddev},
                        {"mle_iterations", est.decoded.iterations},
                        {"mle_converged", est.decoded.converged},
                        {"log_likelihood", est.decoded.log_likelihood}};
      std::cout << out.dump(2) << '\n';
    } else if (*experiment) {
      const avc::ExperimentConfig cfg = x_flags.resolve();
      print_warnings(avc::config_warnings(cfg));
      const avc::ExperimentResult result =
          x_calibration.empty()
              ? avc::run_experiment(cfg, threads)
              : avc::run_experiment(cfg, avc::load_calibration(x_calibration), threads);
      const auto dir = avc::write_run(result, x_out);
      std::cout << "run directory: " << dir.string() << '\n'
                << "true curvature " << avc::format_double(result.true_curvature)
                << "; naive mean " << avc::format_double(result.naive.mean) << " (sd "
                << avc::format_double(result.naive.stddev) << "); decoded mean "
                << avc::format_double(result.decoded.mean) << " (sd "
                << avc::format_double(result.decoded.stddev) << ")\n";
    } else if (*density) {
      std::vector<avc::VmfComponent> noise;
      int m = d_m;
      if (!d_cal.empty()) {
        const auto cal = avc::load_calibration(d_cal);
        noise = cal.components;
        m = cal.config.m;
      } else {
        if (!(d_kappa > 0.0)) throw avc::ConfigError("give --kappa or --calibration");
        noise = {{1.0, d_kappa}};
      }
      const auto kind = d_kind == "theta" ? avc::DensityKind::kTheta : avc::DensityKind::kOmega;
      std::optional<double> C;
      double hi = d_hi;
      if (kind == avc::DensityKind::kOmega) {
        C = avc::CurvaturePushforwardParams::from_radius({m, noise[0].kappa, d_alpha}, d_r).C;
        if (!(hi > 0.0)) hi = *C / std::sqrt(2.0);
      } else if (!(hi > 0.0)) {
        hi = avc::kHalfPi;
      }
      avc::tabulate_density(kind, m, noise, d_alpha, C, d_lo, hi, d_n, d_out);
      std::cout << "wrote " << d_n << " rows to " << d_out << '\n';
    } else if (*plot) {
      const auto values = read_column(p_in, p_col);
      avc::emit_histogram(values, p_bins, p_out,
                          {p_title.empty() ? p_col : p_title, p_col, p_ref});
      std::cout << "wrote " << p_out << '\n';
    }
  } catch (const avc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return avc::exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return avc::exit_code(avc::ErrorCategory::kNumerical);
  }
  return 0;
}
