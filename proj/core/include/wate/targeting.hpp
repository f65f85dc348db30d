#pragma once

#include <string>
#include <utility>
#include <vector>

#include "wate/model.hpp"
#include "wate/path.hpp"
#include "wate/weights.hpp"

namespace wate {

enum class TargetMode { theoretical, practical };

/** Outcome of solving the empirical score equation L'(t) = 0. */
struct RootReport {
  double t_hat = 0;
  double lo = 0, hi = 0;      // accepted bracket
  double residual = 0;        // |L'(t_hat)|
  TargetMode mode = TargetMode::practical;
  bool monotone_ok = true;    // L' nonincreasing at all evaluated points
  int iterations = 0;         // score evaluations performed
  bool converged = false;     // residual or width tolerance met
  bool fell_back = false;     // no usable bracket: t_hat forced to 0
  std::string flag;           // reason when fell_back or noteworthy
};

/** Root-solving settings. c and c_init are the regularity and score-
 * nondegeneracy constants used by the bracket arithmetic (c_init also scales
 * the practical starting bracket). */
struct TargetConfig {
  TargetMode mode = TargetMode::practical;
  PathConfig path;
  double c = 0.1;            // regularity constant of the weight/band
  double c_init = 0.01;      // score nondegeneracy constant
  double resid_tol = 1e-11;  // stop when |L'| falls below this
  double width_tol = 1e-14;  // ... or the bracket is this narrow
};

/** Scale endpoints of the guaranteed-root interval:
 *   t- = -4 max(-L0, 0) / c_init,  t+ = 4 max(L0, 0) / c_init
 * (one of them is always 0). */
std::pair<double, double> score_bracket_endpoints(double c_init, double l0);

/** The worst-case interval of the one-step construction:
 *   t2 = c_init c^20 / 10^6, and the bracket is [t-, t+] intersected with
 * [-t2, t2], augmented to include 0. Inside this interval the root is
 * guaranteed when the initialization conditions hold. */
std::pair<double, double> theoretical_bracket(double c, double c_init, double l0);

/** Find t_hat with L'(t_hat) = 0 by bisection on the fold score.
 *
 * practical mode: start from the scale bracket [t-, t+] and expand the outer
 * endpoint geometrically (factor 2, capped at cfg.path.t_max) until the score
 * changes sign; positivity breaches shrink the endpoint instead. theoretical
 * mode: use theoretical_bracket as-is, no expansion. If no sign change
 * exists in the allowed range the fold falls back to t_hat = 0 and the
 * report is flagged (the estimate convention for that event is applied by
 * targeted_fold_fit). */
RootReport solve_root(const Dataset& fold, const NuisanceValues& u0,
                      const WeightSpec& w, const TargetConfig& cfg);

/** Solve the score equation and build the fold-level targeted fit: the
 * fitted state U at t_hat, the plug-in psi_k under the fold's empirical
 * marginal, and the per-sample full-influence-function values. When the
 * solve fell back (no root), the convention is psi_k = 0 with all influence
 * values 0, and ok = false. */
struct FoldFit {
  PathState fitted;
  double psi_k = 0;
  std::vector<double> d_full_values;
  RootReport root;
  bool ok = false;
};
FoldFit targeted_fold_fit(const Dataset& fold, const NuisanceValues& u0,
                          const WeightSpec& w, const TargetConfig& cfg);

}  // namespace wate
