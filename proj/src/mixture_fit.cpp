#include "avc/mixture_fit.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "avc/errors.hpp"
#include "avc/pushforward.hpp"
#include "avc/simd/kernels.hpp"
#include "avc/specfun.hpp"

namespace avc {
namespace {

constexpr int kBrentBits = 26;
constexpr std::uintmax_t kBrentMaxIter = 200;
constexpr double kWarmWindow = 2.5;  // half-width in ln kappa
constexpr double kEmTolerancePerSample = 1e-8;

struct Prepared {
  int m;
  std::vector<double> cosines;
  double base_sum;  // sum of the parameter-free terms of ln f
};

Prepared prepare(std::span<const double> angles, int m) {
  if (m < 2) throw DomainError("mixture fit needs m >= 2");
  if (angles.size() < 100) throw DomainError("mixture fit needs at least 100 angle samples");
  Prepared p{m, {}, 0.0};
  p.cosines.reserve(angles.size());
  const double ratio0 = log_bessel_ratio_limit(0.5 * (m - 2), 0.0);
  CompensatedSum base;
  for (double th : angles) {
    if (!(th >= 0.0 && th <= kHalfPi)) throw DomainError("angle samples must lie in [0, pi/2]");
    p.cosines.push_back(std::cos(th));
    base.add(kLn2 + (m - 1) * std::log(std::sin(th)) + ratio0);
  }
  p.base_sum = base.value();
  std::sort(p.cosines.begin(), p.cosines.end());
  return p;
}

double kappa_from_moments(std::span<const double> angles) {
  CompensatedSum s;
  for (double th : angles) {
    const double h = std::sin(0.5 * th);
    s.add(2.0 * h * h);
  }
  return s.value() / static_cast<double>(angles.size());
}

double clamp_kappa(double k) {
  if (!(k > kKappaMin)) return kKappaMin;
  return std::min(k, kKappaMax);
}

// Weighted component objective sum_i r_i ln cosh(kappa c_i) + R N(kappa).
// With the cosines sorted, ln cosh(x) = x - ln 2 to double precision once
// x >= 20, so the tail is a suffix sum and only the head needs the kernel.
class ComponentObjective {
 public:
  ComponentObjective(const Prepared& p, std::span<const double> resp, double resp_sum)
      : p_(p), resp_(resp), resp_sum_(resp_sum), rc_(resp.size() + 1, 0.0),
        r_(resp.size() + 1, 0.0) {
    for (std::size_t i = resp.size(); i-- > 0;) {
      rc_[i] = rc_[i + 1] + resp[i] * p.cosines[i];
      r_[i] = r_[i + 1] + resp[i];
    }
  }

  double operator()(double kappa) const {
    const double cut = kLinearFrom / kappa;
    const auto head = static_cast<std::size_t>(
        std::lower_bound(p_.cosines.begin(), p_.cosines.end(), cut) - p_.cosines.begin());
    const double exact = simd::weighted_log_cosh_sum(
        kappa, std::span<const double>(p_.cosines).first(head), resp_.first(head));
    return exact + kappa * rc_[head] - kLn2 * r_[head] +
           resp_sum_ * log_angle_normalizer(p_.m, kappa);
  }

 private:
  static constexpr double kLinearFrom = 20.0;
  const Prepared& p_;
  std::span<const double> resp_;
  double resp_sum_;
  std::vector<double> rc_, r_;
};

double maximize_kappa(const ComponentObjective& objective, double kappa_prev) {
  const double lo = std::log(kKappaMin), hi = std::log(kKappaMax);
  auto neg = [&](double t) { return -objective(std::exp(t)); };
  const double t0 = std::log(kappa_prev);
  double a = std::max(lo, t0 - kWarmWindow), b = std::min(hi, t0 + kWarmWindow);
  std::uintmax_t iters = kBrentMaxIter;
  auto best = boost::math::tools::brent_find_minima(neg, a, b, kBrentBits, iters);
  const double edge_tol = 1e-6;
  const bool at_inner_edge =
      (best.first - a < edge_tol && a > lo) || (b - best.first < edge_tol && b < hi);
  if (at_inner_edge) {
    iters = kBrentMaxIter;
    best = boost::math::tools::brent_find_minima(neg, lo, hi, kBrentBits, iters);
  }
  if (hi - best.first < edge_tol) return kKappaMax;
  if (best.first - lo < edge_tol) return kKappaMin;
  return clamp_kappa(std::exp(best.first));
}

double bic(double ll, int K, std::size_t n) {
  return -2.0 * ll + (2.0 * K - 1.0) * std::log(static_cast<double>(n));
}

struct Params {
  std::vector<double> weights;
  std::vector<double> kappas;
};

class EmEngine {
 public:
  EmEngine(const Prepared& p, int K)
      : p_(p), K_(K), n_(p.cosines.size()), g_(n_ * K), col_(n_) {}

  // Log-likelihood (parameter-dependent part) of `params`; fills resp.
  double e_step(const Params& params, std::vector<double>& resp) {
    resp.resize(n_ * K_);
    for (int j = 0; j < K_; ++j) {
      simd::log_cosh_scaled(params.kappas[j], p_.cosines, col_);
      const double lw = std::log(params.weights[j]) + log_angle_normalizer(p_.m, params.kappas[j]);
      for (std::size_t i = 0; i < n_; ++i) g_[i * K_ + j] = col_[i] + lw;
    }
    CompensatedSum ll;
    for (std::size_t i = 0; i < n_; ++i) {
      const double li = log_sum_exp({g_.data() + i * K_, static_cast<std::size_t>(K_)});
      ll.add(li);
      for (int j = 0; j < K_; ++j) resp[j * n_ + i] = std::exp(g_[i * K_ + j] - li);
    }
    return ll.value();
  }

  // Returns false when a component lost all responsibility.
  bool m_step(const Params& current, const std::vector<double>& resp, Params& next) const {
    next = current;
    for (int j = 0; j < K_; ++j) {
      std::span<const double> r{resp.data() + j * n_, n_};
      CompensatedSum rs;
      for (double v : r) rs.add(v);
      const double R = rs.value();
      next.weights[j] = R / static_cast<double>(n_);
      if (!(R > 0.0)) return false;
      const ComponentObjective objective(p_, r, R);
      const double cand = maximize_kappa(objective, current.kappas[j]);
      if (objective(cand) >= objective(current.kappas[j])) next.kappas[j] = cand;
    }
    return true;
  }

 private:
  const Prepared& p_;
  int K_;
  std::size_t n_;
  std::vector<double> g_, col_;
};

// Coordinates for extrapolation: log weights and log kappas.
std::vector<double> to_coords(const Params& q) {
  std::vector<double> t;
  for (double a : q.weights) t.push_back(std::log(a));
  for (double k : q.kappas) t.push_back(std::log(k));
  return t;
}

Params from_coords(const std::vector<double>& t, int K) {
  Params q;
  double top = t[0];
  for (int j = 1; j < K; ++j) top = std::max(top, t[j]);
  double total = 0.0;
  for (int j = 0; j < K; ++j) total += std::exp(t[j] - top);
  for (int j = 0; j < K; ++j) q.weights.push_back(std::exp(t[j] - top) / total);
  for (int j = 0; j < K; ++j) q.kappas.push_back(clamp_kappa(std::exp(t[K + j])));
  return q;
}

bool usable(const Params& q) {
  for (double a : q.weights) {
    if (!(a > 0.0)) return false;
  }
  return true;
}

MixtureFit run_em(const Prepared& p, std::span<const double> angles, int K,
                  std::vector<double>* trace) {
  const std::size_t n = p.cosines.size();
  Params cur{std::vector<double>(K, 1.0 / K), std::vector<double>(K)};
  if (K == 1) {
    cur.kappas[0] = clamp_kappa(p.m / (2.0 * kappa_from_moments(angles)));
  } else {
    std::vector<double> sorted(angles.begin(), angles.end());
    std::sort(sorted.begin(), sorted.end());
    for (int j = 0; j < K; ++j) {
      const std::size_t b = n * j / K, e = n * (j + 1) / K;
      cur.kappas[j] = clamp_kappa(p.m / (2.0 * kappa_from_moments({sorted.data() + b, e - b})));
    }
  }

  EmEngine em(p, K);
  std::vector<double> resp, resp1, resp2, resp3;
  double ll = em.e_step(cur, resp);
  if (trace) trace->push_back(ll + p.base_sum);

  MixtureFit fit;
  const double tol = kEmTolerancePerSample * static_cast<double>(n);
  const double drop_tol = 1e-9 * std::max(1.0, std::abs(ll));
  int steps = 0;
  bool collapsed = false;
  // SQUAREM cycles: two EM steps, a squared extrapolation from them followed
  // by one stabilizing EM step, kept only if it beats the second EM step.
  while (steps < kMaxEmIterations) {
    Params p1, p2;
    if (!em.m_step(cur, resp, p1)) {
      collapsed = true;
      break;
    }
    ++steps;
    Params next = p1;
    double next_ll = em.e_step(p1, resp1);
    std::vector<double>* next_resp = &resp1;
    if (K > 1 && steps < kMaxEmIterations && em.m_step(p1, resp1, p2)) {
      ++steps;
      const double ll2 = em.e_step(p2, resp2);
      next = p2;
      next_ll = ll2;
      next_resp = &resp2;
      const auto t0 = to_coords(cur), t1 = to_coords(p1), t2 = to_coords(p2);
      double rr = 0.0, vv = 0.0;
      std::vector<double> r(t0.size()), v(t0.size());
      for (std::size_t i = 0; i < t0.size(); ++i) {
        r[i] = t1[i] - t0[i];
        v[i] = t2[i] - t1[i] - r[i];
        rr += r[i] * r[i];
        vv += v[i] * v[i];
      }
      // Step length -sqrt(rr / vv), backtracked towards -1 (plain EM) while the
      // stabilized extrapolation would lower the likelihood.
      double step = vv > 0.0 ? std::min(-1.0, -std::sqrt(rr / vv)) : -1.0;
      for (int attempt = 0; vv > 0.0 && step < -1.0 && attempt < 4 &&
                            steps < kMaxEmIterations;
           ++attempt, step = 0.5 * (step - 1.0)) {
        std::vector<double> t(t0.size());
        for (std::size_t i = 0; i < t0.size(); ++i) {
          t[i] = t0[i] - 2.0 * step * r[i] + step * step * v[i];
        }
        const Params px = from_coords(t, K);
        if (!usable(px)) continue;
        const double llx = em.e_step(px, resp3);
        Params py;
        if (!std::isfinite(llx) || !em.m_step(px, resp3, py)) continue;
        ++steps;
        const double lly = em.e_step(py, resp3);
        if (std::isfinite(lly) && lly >= ll2) {
          next = std::move(py);
          next_ll = lly;
          next_resp = &resp3;
          break;
        }
      }
    }
    if (trace) trace->push_back(next_ll + p.base_sum);
    if (next_ll < ll - drop_tol) {
      throw ConvergenceFailure("EM log-likelihood decreased from " + std::to_string(ll) +
                               " to " + std::to_string(next_ll));
    }
    const double delta = next_ll - ll;
    cur = std::move(next);
    std::swap(resp, *next_resp);
    ll = next_ll;
    if (delta <= tol) {
      fit.converged = true;
      break;
    }
  }
  fit.iterations = steps;
  fit.log_likelihood = ll + p.base_sum;
  if (collapsed || !usable(cur)) {
    fit.converged = false;
    return fit;
  }
  fit.bic = bic(fit.log_likelihood, K, n);
  for (int j = 0; j < K; ++j) fit.components.push_back({cur.weights[j], cur.kappas[j]});
  std::sort(fit.components.begin(), fit.components.end(),
            [](const VmfComponent& x, const VmfComponent& y) { return x.kappa < y.kappa; });
  return fit;
}

}  // namespace

MixtureFit fit_vmf_mixture_k(std::span<const double> angles, int m, int K,
                             std::vector<double>* trace) {
  if (K < 1 || K > 4) throw DomainError("number of components must be in [1, 4]");
  const Prepared p = prepare(angles, m);
  MixtureFit fit = run_em(p, angles, K, trace);
  if (!fit.converged) {
    throw ConvergenceFailure("EM did not converge for K = " + std::to_string(K) + " within " +
                             std::to_string(kMaxEmIterations) + " iterations");
  }
  return fit;
}

MixtureFitReport fit_vmf_mixture_report(std::span<const double> angles, int m,
                                        int max_components) {
  if (max_components < 1 || max_components > 4) {
    throw DomainError("max_components must be in [1, 4]");
  }
  const Prepared p = prepare(angles, m);
  MixtureFitReport report;
  int best = -1;
  for (int K = 1; K <= max_components; ++K) {
    MixtureFit fit = run_em(p, angles, K, nullptr);
    if (K == 1 && !fit.converged) {
      throw ConvergenceFailure("single-component fit did not converge");
    }
    if (fit.converged &&
        (best < 0 || fit.bic < report.candidates[static_cast<std::size_t>(best)].bic)) {
      best = K - 1;
    }
    report.candidates.push_back(std::move(fit));
  }
  report.selected = report.candidates[static_cast<std::size_t>(best)];
  return report;
}

VmfMixture fit_vmf_mixture(std::span<const double> angles, int m, int max_components) {
  const auto report = fit_vmf_mixture_report(angles, m, max_components);
  return VmfMixture(UnitVector::north_pole(m + 1), report.selected.components);
}

}  // namespace avc
