#pragma once

// Simulation laboratory: smooth data-generating processes with known
// nuisances, deterministic oracles for the target parameter and the
// efficiency bound, an independent classical TMLE oracle for the
// unweighted effect, and a seeded Monte Carlo replication harness.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "wate/crossfit.hpp"
#include "wate/model.hpp"
#include "wate/weights.hpp"

namespace wate {

using SmoothField = std::function<double(const std::vector<double>&)>;

/** A data-generating process on [0,1]^d with X uniform,
 * A | X ~ Bernoulli(e*(X)) and Y | A, X ~ Bernoulli(q*_A(X)).
 * All three nuisance fields are polynomials (hence C-infinity) taking
 * values inside [2 eta_star, 1 - 2 eta_star]. */
struct DgpSpec {
  std::string name;
  std::size_t d = 1;
  SmoothField q1_star, q0_star, e_star;
  double eta_star = 0.1;
};

/** Catalog: easy / typical / stress designs.
 *   null-effect          q1* = q0* (true effect 0), mild propensity tilt
 *   smooth-heterogeneous S-shaped propensity, curved treated regression
 *   near-boundary        propensity sweeping [0.1, 0.9]
 */
DgpSpec dgp_null_effect();
DgpSpec dgp_smooth_heterogeneous();
DgpSpec dgp_near_boundary();
DgpSpec dgp_by_name(const std::string& name);
std::vector<std::string> dgp_catalog();

/** Seeded draw of n observations. Identical (dgp, n, seed) gives identical
 * bytes. Draw order per observation: x_1..x_d, then A, then Y. */
Dataset generate(const DgpSpec& dgp, std::size_t n, std::uint64_t seed);

/** Exact nuisance model backed by the generating truth. */
class DgpNuisanceModel : public NuisanceModel {
 public:
  explicit DgpNuisanceModel(DgpSpec dgp) : dgp_(std::move(dgp)) {}
  double q1(const std::vector<double>& x) const override;
  double q0(const std::vector<double>& x) const override;
  double e(const std::vector<double>& x) const override;

 private:
  DgpSpec dgp_;
};

struct QuadratureResult {
  double value = 0.0;
  double error_bound = 0.0;  // |value - value at half resolution|
};

/** Oracle target value psi* = E[lambda(e*) (q1* - q0*)] / E[lambda(e*)]
 * by deterministic quadrature: tensor Simpson with `resolution` panels per
 * axis for d <= 2, Halton quasi-random integration with `resolution`^2
 * points for d >= 3. The error bound comes from resolution doubling. */
QuadratureResult true_psi(const DgpSpec& dgp, const WeightSpec& w,
                          std::size_t resolution = 2048);

/** Oracle efficiency bound: Var(D_full(O; P*)) = E[D_full^2], by the same
 * quadrature over x and exact summation over the four (a, y) cells. */
QuadratureResult oracle_eif_variance(const DgpSpec& dgp, const WeightSpec& w,
                                     std::size_t resolution = 2048);

/** Empirical mean of the classical one-dimensional fluctuation score
 *   (1/m) sum_i [ A_i/e_i (Y_i - expit(logit(q1_i) + eps/e_i))
 *               - (1-A_i)/(1-e_i) (Y_i - expit(logit(q0_i) - eps/(1-e_i))) ],
 * strictly decreasing in eps. */
double classical_ate_score(const Dataset& fold, const NuisanceValues& u0,
                           double eps);

/** Independent classical TMLE oracle for the unweighted effect: solves the
 * logistic-fluctuation score above by bisection (|eps| <= 50) and returns
 * the fluctuated plug-in mean of q1 - q0 over the fold. Used only to
 * cross-validate the path-based targeting. Throws NoRootError if the score
 * has no sign change in the clamp range. */
double classical_ate_tmle(const Dataset& fold, const NuisanceValues& u0);

struct McRow {
  std::uint64_t rep = 0;  // replication index
  bool failed = false;
  std::string failure;  // reason when failed
  double psi_hat = 0.0;
  double sigma2 = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  bool covered = false;
  double t_hat0 = 0.0;
  double t_hat1 = 0.0;
  bool fallback0 = false;
  bool fallback1 = false;
};

struct McSummary {
  double psi_star = 0.0;
  double bias = 0.0;
  double sd = 0.0;
  double rmse = 0.0;
  double coverage = 0.0;  // fraction of successful replications covering psi*
  double mean_ci_length = 0.0;
  std::size_t reps = 0;
  std::size_t failures = 0;
};

struct McResult {
  std::vector<McRow> rows;
  McSummary summary;
};

struct McConfig {
  std::size_t n = 1000;
  std::size_t reps = 100;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency; results do not depend on it
  double alpha = 0.05;
  int degree = 3;          // spline degree r
  double trunc = 0.04;     // spline truncation eta0; diagnostics use eta0/4
  double beta_guess = 2.0; // smoothness lower bound for the basis-size rule
  TargetMode mode = TargetMode::practical;
};

/** Full-pipeline Monte Carlo: per replication, generate data with the
 * per-replication seed, spline-fit nuisances per fold, target, aggregate.
 * Deterministic given cfg.seed; replication r uses an independent stream. */
McResult run_replications(const DgpSpec& dgp, const WeightSpec& w,
                          const McConfig& cfg);

/** Summary recomputation from the rows (pure; used by the harness and by
 * consumers that filter rows). */
McSummary summarize(const std::vector<McRow>& rows, double psi_star);

}  // namespace wate
