#pragma once

#include <memory>
#include <vector>

#include "wate/weights.hpp"

namespace wate {

/** One observation: covariates x in [0,1]^d, binary treatment, binary outcome. */
struct Sample {
  std::vector<double> x;
  int a = 0;
  int y = 0;
};

/** An ordered sample of observations sharing a covariate dimension. */
struct Dataset {
  std::vector<Sample> samples;
  int d = 0;

  std::size_t size() const { return samples.size(); }

  /** Check the invariants: nonempty, consistent dimension, x in [0,1]^d,
   * a and y binary. Throws InputError with the offending row index. */
  void validate() const;

  /** Subset by index list (indices into samples, kept in the given order). */
  Dataset subset(const std::vector<std::size_t>& idx) const;
};

/** An evaluable nuisance triple (q1, q0, e): maps [0,1]^d -> (0,1).
 * Realizations: spline fits (splines.hpp) and exact simulation truths
 * (simlab.hpp). Evaluation must be deterministic. */
class NuisanceModel {
 public:
  virtual ~NuisanceModel() = default;
  virtual double q1(const std::vector<double>& x) const = 0;
  virtual double q0(const std::vector<double>& x) const = 0;
  virtual double e(const std::vector<double>& x) const = 0;
};

/** Nuisance values at the m support points of an empirical marginal:
 * column vectors q1, q0, e of equal length, all entries in (0,1).
 * This is the canonical path state: with an empirical covariate marginal,
 * the flow only ever needs the values at the support points plus the
 * scalars Omega and psi, so the infinite-dimensional problem reduces to
 * 3m coupled scalar ODEs. */
struct NuisanceValues {
  std::vector<double> q1, q0, e;

  std::size_t size() const { return e.size(); }

  /** Check equal lengths, nonempty, entries strictly inside (0,1). */
  void validate() const;
};

/** Evaluate a nuisance model at the covariates of a dataset. */
NuisanceValues evaluate(const NuisanceModel& u, const Dataset& at);

/** Conditional pmf of (A,Y) given the i-th support point:
 *   p(a,y|x_i) = e^a (1-e)^(1-a) * q_a^y (1-q_a)^(1-y).
 * The four values at fixed i sum to one. */
double conditional_pmf(const NuisanceValues& v, std::size_t i, int a, int y);

/** Omega = (1/m) sum_i lambda(e_i); throws if the result is below the
 * numerical floor (weight/positivity failure). */
double omega(const NuisanceValues& v, const WeightSpec& w);

/** psi = sum_i lambda(e_i)(q1_i - q0_i) / sum_i lambda(e_i). */
double psi(const NuisanceValues& v, const WeightSpec& w);

}  // namespace wate
