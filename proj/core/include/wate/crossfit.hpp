#pragma once

// Two-fold cross-fitted one-step targeted estimation: fold management,
// per-fold targeting, aggregation, plug-in variance, and Wald intervals.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "wate/model.hpp"
#include "wate/targeting.hpp"
#include "wate/weights.hpp"

namespace wate {

// A disjoint two-way split of {0..n-1} with |i0| = ceil(n/2).
struct FoldPlan {
  std::vector<std::size_t> i0, i1;
  std::size_t n = 0;
  std::uint64_t seed = 0;

  // Validates disjointness, coverage, and the size convention.
  static FoldPlan from_indices(std::vector<std::size_t> i0,
                               std::vector<std::size_t> i1, std::size_t n);
};

// Seeded uniform random permutation split. Requires n >= 4.
FoldPlan split_folds(std::size_t n, std::uint64_t seed);

// Trains a nuisance model on (and only on) the dataset it is handed; the
// cross-fitting driver guarantees that dataset is the opposite fold.
using NuisanceFitter =
    std::function<std::unique_ptr<NuisanceModel>(const Dataset&)>;

struct FoldSummary {
  RootReport root;
  double psi_k = 0.0;
  std::size_t m = 0;
  bool fallback = false;      // psi_k = 0 and D == 0 convention applied
  bool positivity_ok = true;  // initial values inside [3*eta, 1 - 3*eta]
  double c_init_hat = 0.0;    // exact E0[(D*)^2] on the fold at t = 0
  double c_used = 0.0;        // weight-band curvature scale fed to targeting
  std::string flag;           // reason for fallback, empty when none
};

struct Estimate {
  double psi_cf = 0.0;
  double sigma2_cf = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double alpha = 0.05;
  std::size_t n = 0;
  std::array<FoldSummary, 2> folds{};
  std::uint64_t seed = 0;
  WeightSpec weight{};
  bool odd_n_weighting = false;  // fold-size weights were used (odd n)
  // Per-sample values of the full influence function at the targeted fit of
  // the fold each sample belongs to, in the original dataset order; zeros on
  // fallback folds. sigma2_cf is their mean square.
  std::vector<double> d_values;
};

struct CrossfitConfig {
  std::uint64_t seed = 1;
  double alpha = 0.05;
  // Band margin used for the curvature scale and the positivity check;
  // with spline truncation eta0 the canonical choice is eta = eta0 / 4.
  double eta = 0.05;
  // Numeric guard: the empirical curvature scale is floored here before it
  // is used to size the initial root bracket.
  double c_init_floor = 1e-12;
  TargetMode mode = TargetMode::practical;
  double resid_tol = 1e-11;
  double width_tol = 1e-14;
};

// Quantile of the standard normal distribution (Wichura's algorithm,
// absolute error below 1e-9 over (0,1)). Throws InputError outside (0,1).
double normal_quantile(double p);

// psi_hat -/+ z_{1-alpha/2} sqrt(sigma2 / n).
std::pair<double, double> wald_ci(double psi_hat, double sigma2,
                                  std::size_t n, double alpha);

// Full pipeline with a seeded random split (seed taken from cfg).
Estimate cross_fit_estimate(const Dataset& data, const WeightSpec& w,
                            const NuisanceFitter& fit,
                            const CrossfitConfig& cfg);

// Same pipeline on an explicit fold plan (swapping the plan's fold labels
// must permute the per-fold results and leave psi_cf unchanged for even n).
Estimate cross_fit_estimate(const Dataset& data, const FoldPlan& plan,
                            const WeightSpec& w, const NuisanceFitter& fit,
                            const CrossfitConfig& cfg);

}  // namespace wate
