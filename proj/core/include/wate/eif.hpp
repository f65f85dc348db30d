#pragma once

#include <array>

#include "wate/model.hpp"
#include "wate/weights.hpp"

namespace wate {

/** Everything needed to evaluate influence functions at a fitted law:
 * the weight, the functionals Omega and psi under the evaluation marginal,
 * and the per-point nuisance values. Build with EifContext::make so the
 * scalars stay coherent with the values. */
struct EifContext {
  WeightSpec weight;
  double omega = 0;
  double psi = 0;
  const NuisanceValues* values = nullptr;

  static EifContext make(const NuisanceValues& v, const WeightSpec& w);
};

/** Augmented inverse-probability-weighted pseudo-outcome
 *   phi = (a/e)(y - q1) - ((1-a)/(1-e))(y - q0) + (q1 - q0).
 * Its conditional mean given x is the blip q1(x) - q0(x). */
double aipw_phi(int a, int y, double q1, double q0, double e);

/** Influence function for the model with a known (held fixed) covariate
 * marginal, at support point i:
 *   D*(o) = (lambda(e)/Omega)(phi - tau) + (lambda'(e)/Omega)(tau - psi)(a - e)
 * with tau = q1 - q0. Has conditional mean zero given x by construction. */
double d_restricted(const EifContext& ctx, std::size_t i, int a, int y);

/** Full influence function and its three components:
 *   d_q = (lambda/Omega) [ (a/e)(y-q1) - ((1-a)/(1-e))(y-q0) ]   (outcome part)
 *   d_e = (lambda'/Omega) (tau - psi)(a - e)                     (propensity part)
 *   d_x = (lambda/Omega) (tau - psi)                             (marginal part)
 * total = d_q + d_e + d_x, and d_restricted = total - d_x. */
struct FullEif {
  double d_q = 0, d_e = 0, d_x = 0, total = 0;
};
FullEif d_full(const EifContext& ctx, std::size_t i, int a, int y);

/** Exact finite mixture of D* over (a,y) at support point i:
 *   sum_{a,y} D*(x_i, a, y) * pmf[2a + y].
 * pmf must sum to one. With pmf equal to the model's own conditional law the
 * result is zero (score property). */
double conditional_mean_dstar(const EifContext& ctx, std::size_t i,
                              const std::array<double, 4>& pmf);

}  // namespace wate
