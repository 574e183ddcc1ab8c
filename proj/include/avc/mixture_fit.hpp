#pragma once

// Maximum-likelihood fits of fixed-mean vMF mixtures to folded angles
// measured against the true normal (alpha = 0 in the angle density).
//
// EM over (a_j, kappa_j), accelerated with SQUAREM: two EM steps are
// extrapolated in (log a, log kappa) coordinates, the extrapolated point is
// stabilized by one more EM step and kept only if its log-likelihood is at
// least that of the plain second step (otherwise the step length is halved,
// then plain EM is used). The M-step maximizes each component's weighted
// log-likelihood over ln kappa with Brent's method on [1e-6, 1e8]; a step that
// would lower the component objective is rejected. Iteration stops when the
// log-likelihood gain falls to 1e-8 per sample. Initialization:
// kappa_0 = m / (2 mean(1 - cos theta)) on the whole sample for K = 1, and on
// K equal-count quantile groups of the sorted angles for K > 1, with equal
// weights. K is chosen by BIC with 2K - 1 free parameters.

#include <cstddef>
#include <span>
#include <vector>

#include "avc/randgeom.hpp"

namespace avc {

inline constexpr double kKappaMin = 1e-6;
inline constexpr double kKappaMax = 1e8;
inline constexpr int kMaxEmIterations = 500;

struct MixtureFit {
  std::vector<VmfComponent> components;
  double log_likelihood = 0.0;
  double bic = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct MixtureFitReport {
  MixtureFit selected;
  /// One entry per K = 1..max_components, in order. Entries with
  /// converged == false were excluded from selection.
  std::vector<MixtureFit> candidates;
};

/// EM fit with exactly K components. Throws ConvergenceFailure if the
/// log-likelihood decreases (beyond 1e-9 relative) or EM does not converge
/// within 500 M-steps. `trace`, when given, receives the log-likelihood
/// after every accepted update.
MixtureFit fit_vmf_mixture_k(std::span<const double> angles, int m, int K,
                             std::vector<double>* trace = nullptr);

/// Fits K = 1..max_components and selects by BIC. Fits with K >= 2 that fail
/// to converge are recorded and skipped; the K = 1 fit must succeed.
MixtureFitReport fit_vmf_mixture_report(std::span<const double> angles, int m,
                                        int max_components = 4);

/// The selected fit as a mixture around the north pole of S^m.
VmfMixture fit_vmf_mixture(std::span<const double> angles, int m, int max_components = 4);

}  // namespace avc
