#pragma once

#include <string>

namespace wate {

enum class WeightKind { ate, att, atc, ato, aten, atb, smooth_trim };

/** A propensity-scale weight function lambda(t) defining a weighted average
 * treatment effect, together with its analytic derivatives up to order 3.
 *
 * Catalog:
 *   ate         lambda(t) = 1
 *   att         lambda(t) = t
 *   atc         lambda(t) = 1 - t
 *   ato         lambda(t) = t(1-t)
 *   aten        lambda(t) = -t log t - (1-t) log(1-t)
 *   atb         lambda(t) = t^(nu1-1) (1-t)^(nu2-1), nu1, nu2 >= 1;
 *               (1,1), (2,1), (1,2), (2,2) coincide with ate/att/atc/ato
 *   smooth_trim lambda(t) = Phi_eps(1-alpha-t) * Phi_eps(t-alpha), where
 *               Phi_eps is the Gaussian CDF with mean 0 and variance eps^2;
 *               a smooth two-sided trimming weight, 0 < alpha < 1/2, eps > 0
 *
 * Non-smooth weights (matching-style min(t,1-t), hard trimming indicators,
 * treated-share caps) are intentionally not representable: every catalog
 * entry is C^3 on (0,1), which the path construction requires.
 */
struct WeightSpec {
  WeightKind kind = WeightKind::ate;
  double nu1 = 1.0;    // atb only
  double nu2 = 1.0;    // atb only
  double alpha = 0.1;  // smooth_trim only
  double eps = 0.01;   // smooth_trim only

  static WeightSpec ate() { return {WeightKind::ate}; }
  static WeightSpec att() { return {WeightKind::att}; }
  static WeightSpec atc() { return {WeightKind::atc}; }
  static WeightSpec ato() { return {WeightKind::ato}; }
  static WeightSpec aten() { return {WeightKind::aten}; }
  static WeightSpec atb(double nu1, double nu2);
  static WeightSpec smooth_trim(double alpha, double eps);

  /** Parse the CLI grammar: a lowercase name, optionally followed by ':'
   * and comma-separated parameters, e.g. "ato", "atb:2.5,3.0",
   * "smoothtrim:0.1,0.01". Unsupported non-smooth names are rejected with
   * an explanatory message. Throws InputError. */
  static WeightSpec parse(const std::string& text);

  /** Canonical grammar string for this spec (inverse of parse). */
  std::string name() const;
};

/** Order-th derivative (order 0..3) of lambda at t, in closed form.
 * Preconditions: t in (0,1); order in 0..3. Throws InputError. */
double lambda_eval(const WeightSpec& w, double t, int order = 0);

/** Extrema of lambda and its derivative magnitudes over [eta, 1-eta]. */
struct LambdaBounds {
  double lambda_min = 0;  // min of lambda
  double lambda_max = 0;  // max of lambda
  double d1_max = 0;      // max |lambda'|
  double d2_max = 0;      // max |lambda''|
  double d3_max = 0;      // max |lambda'''|
  double eta = 0;         // band parameter, in (0, 1/4)
};

/** Compute LambdaBounds over [eta, 1-eta], 0 < eta < 1/4. Closed forms are
 * used for the polynomial weights (ate/att/atc/ato); the remaining weights
 * are scanned on a 10^4-point uniform grid augmented with the solvable
 * stationary points (the grid error is immaterial because these bounds only
 * feed conservative interval constants). Throws InputError. */
LambdaBounds lambda_bounds(const WeightSpec& w, double eta);

/** The regularity constant:
 *   c = min{ lambda_min, eta, 1 / max{lambda_max, d1_max, d2_max, d3_max, eta} }.
 * Requires lambda_min > 0 (a weight that vanishes on the band has no valid
 * constant). Throws InputError. */
double frak_c(const LambdaBounds& b);

}  // namespace wate
