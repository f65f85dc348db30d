#pragma once

#include <vector>

#include "wate/eif.hpp"
#include "wate/model.hpp"
#include "wate/weights.hpp"

namespace wate {

/** State of the fluctuation path at time t: the nuisance values at the m
 * support points, plus the cached functionals Omega_t and psi_t (always
 * recomputed from the values; cache coherence is an invariant). */
struct PathState {
  double t = 0;
  NuisanceValues values;
  double omega_t = 0;
  double psi_t = 0;

  static PathState make(double t, NuisanceValues v, const WeightSpec& w);
};

enum class PathMethod { rk4, picard };

/** Integration settings.
 *
 * h is the RK4 step bound: a move to time t uses max(16, ceil(|t|/h)) equal
 * steps, so the effective step never exceeds h. `theoretical` ties h and the
 * guard t_max to the horizon t1 = c^6/8 on which existence is guaranteed;
 * `practical` uses a fixed per-unit-time resolution with a wide guard, for
 * root finding far beyond the worst-case horizon (positivity breaches are
 * detected, not assumed away). fd_step is the centered-difference step used
 * for the second log-likelihood derivative. */
struct PathConfig {
  double h = 1.0 / 512;
  double t_max = 50.0;
  PathMethod method = PathMethod::rk4;
  int picard_grid = 129;        // grid points per side of [-T, T]
  int picard_max_sweeps = 80;
  double picard_tol = 1e-14;
  double fd_step = 1e-9;

  static PathConfig theoretical(double t1);
  static PathConfig practical(double t1);
};

/** The path's driving field at a state, flattened as [dq1; dq0; de] blocks
 * of length m. Per support point i (tau_i = q1_i - q0_i):
 *   dq1_i =  q1_i(1-q1_i) lambda(e_i) / (Omega e_i)
 *   dq0_i = -q0_i(1-q0_i) lambda(e_i) / (Omega (1-e_i))
 *   de_i  =  e_i(1-e_i) lambda'(e_i) (tau_i - psi) / Omega
 * Omega and psi are those cached in the state. */
std::vector<double> vector_field(const PathState& s, const WeightSpec& w);

/** Move the state from u0 (time 0) to time t by fixed-step RK4, recomputing
 * Omega and psi at every stage. t may be negative. Throws PositivityBreach
 * if any value leaves (0,1) and InputError if |t| >= cfg.t_max. t = 0
 * returns u0 unchanged. Deterministic. */
PathState integrate_path(const NuisanceValues& u0, const WeightSpec& w, double t,
                         const PathConfig& cfg);

/** Fixed-point (Picard) solution on [-T, T]: iterate
 *   U^{k+1}(t) = u0 + integral_0^t F(U^k(s)) ds
 * on a uniform grid until the successive sup-distance falls below tol.
 * Serves as an independent oracle for the RK4 integrator; per-sweep
 * distances are recorded so contraction is observable. Throws
 * NonContractionError if the sweeps move apart instead. */
struct PicardResult {
  std::vector<double> times;                  // 2*picard_grid + 1 grid times
  std::vector<std::vector<double>> states;    // flat [q1; q0; e] per time
  std::vector<double> sweep_distances;        // sup-distance after each sweep
  int sweeps = 0;
  bool converged = false;

  /** State at a grid time index as NuisanceValues. */
  NuisanceValues values_at(std::size_t idx, std::size_t m) const;
};
PicardResult picard_solve(const NuisanceValues& u0, const WeightSpec& w, double T,
                          const PathConfig& cfg);

/** Path log-likelihood of a fold at time t and its first two derivatives:
 *   L(t)  = (1/m) sum_i log p_{U_t}(a_i, y_i | x_i)
 *   L'(t) = (1/m) sum_i D*(o_i; U_t)       (score identity)
 *   L''   = centered difference of L' with step cfg.fd_step, using the same
 *           step count for both sides so discretization bias cancels.
 * The fold's covariates must be the support points u0 was evaluated at
 * (pairing is by index; fold.size() must equal u0.size()). */
struct LoglikDerivs {
  double L = 0, dL = 0, d2L = 0;
};
LoglikDerivs loglik_path(const Dataset& fold, const NuisanceValues& u0,
                         const WeightSpec& w, double t, const PathConfig& cfg);

/** Just L'(t): the fold mean of D* at U_t. One integration, no finite
 * differences; this is the function whose root is the targeting time. */
double path_score(const Dataset& fold, const NuisanceValues& u0, const WeightSpec& w,
                  double t, const PathConfig& cfg);

}  // namespace wate
