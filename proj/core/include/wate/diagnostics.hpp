#pragma once

// Executable diagnostics for the local bracketing conditions behind the
// targeting step: the curvature scale constants, the nuisance positivity
// band, the initial-score second moment, and (when the true conditional law
// is available, i.e. in simulation) the initial score mean and the
// total-variation gap between the initial fit and the truth.

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <utility>

#include "wate/model.hpp"
#include "wate/weights.hpp"

namespace wate {

// Scale constants derived from the weight-band curvature scale c and the
// initial-score second-moment lower bound c_init.
struct Constants {
  double t1 = 0.0;             // c^6 / 8: radius of the well-behaved path ball
  double t2 = 0.0;             // equals delta_init: guaranteed root bracket
  double delta_init = 0.0;     // c_init * c^20 / 1e6
  double tv_threshold = 0.0;   // c^10 * c_init / 600
  double mu0_threshold = 0.0;  // c_init * delta_init / 8
};

Constants constants(double c, double c_init);

// True iff every component of u0 lies in [3*eta, 1 - 3*eta], so that the
// whole sup-ball of radius 2*eta around u0 stays inside [eta, 1 - eta].
bool check_positivity(const NuisanceValues& u0, double eta);

// Exact E0[(D*)^2] at u0: the average over support points of
// sum_{a,y} D*(x_i, a, y)^2 p_{U0}(a, y | x_i). No sampling.
double c_init_hat(const NuisanceValues& u0, const WeightSpec& w);

// Conditional law oracle: for support point i, the four probabilities
// p*(a, y | x_i) indexed by 2a + y.
using ConditionalLawOracle =
    std::function<std::array<double, 4>(std::size_t)>;

// mu0   = average over support of sum_{a,y} D*(x,a,y; U0) p*(a,y | x);
// tv    = average over support of (1/2) sum_{a,y} |p* - p_{U0}|.
// Both are exact finite sums over the four (a, y) cells.
std::pair<double, double> mu0_and_tv(const NuisanceValues& u0,
                                     const ConditionalLawOracle& truth,
                                     const WeightSpec& w);

// Convenience overload: the true law given as nuisance values on the same
// support points.
std::pair<double, double> mu0_and_tv(const NuisanceValues& u0,
                                     const NuisanceValues& truth,
                                     const WeightSpec& w);

struct BracketReport {
  double eta_used = 0.0;
  double c = 0.0;           // weight-band curvature scale at eta_used
  double c_init_hat = 0.0;  // empirical initial-score second moment
  double t1 = 0.0;
  double t2 = 0.0;
  double delta_init = 0.0;
  std::optional<double> mu0;     // simulation only
  std::optional<double> tv_gap;  // simulation only
  bool positivity_ok = false;
  bool square_bound_ok = false;
  std::optional<bool> mu0_ok;
  std::optional<bool> tv_ok;
};

// Builds the full report. `truth` enables the simulation-only fields.
// `c_init_threshold` defaults to c^5, the value the spline analysis shows is
// always attainable on the positivity band.
BracketReport bracket_report(
    const NuisanceValues& u0, const WeightSpec& w, double eta,
    const ConditionalLawOracle* truth = nullptr,
    std::optional<double> c_init_threshold = std::nullopt);

}  // namespace wate
