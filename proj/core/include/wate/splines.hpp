#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wate/model.hpp"

namespace wate {

/** Isotropic tensor-product B-spline basis on [0,1]^d: degree r >= 1,
 * J >= r+1 normalized B-splines per axis on a clamped uniform knot vector
 * (uniform interior knots, boundary knots repeated r+1 times), K = J^d
 * tensor functions in total. The same univariate knot vector is shared by
 * all axes. */
struct SplineBasisSpec {
  int degree = 0;             // r
  int per_axis = 0;           // J
  int dim = 0;                // d
  std::vector<double> knots;  // length J + r + 1

  static SplineBasisSpec make(int r, int J, int d);
  long K() const;  // J^d
};

/** All K tensor basis functions at x in [0,1]^d:
 * B_nu(x) = prod_j b_{nu_j}(x_j), flattened with the last axis fastest.
 * Entries are nonnegative and sum to one. Throws InputError off [0,1]^d. */
std::vector<double> basis_eval(const SplineBasisSpec& spec,
                               const std::vector<double>& x);

/** Minimum-Euclidean-norm least squares: the pseudoinverse solution of
 * design * c ~= response, via SVD with relative singular-value cutoff 1e-10.
 * Among all residual minimizers, returns the one with minimal Euclidean
 * norm (an all-zero design yields the zero vector). Rank deficiency is fine;
 * callers can read the rank via least_squares_rank. */
Eigen::VectorXd least_squares_min_norm(const Eigen::MatrixXd& design,
                                       const Eigen::VectorXd& response);

/** Rank at the same cutoff used by least_squares_min_norm. */
long least_squares_rank(const Eigen::MatrixXd& design);

/** Clamp u to [eta0, 1-eta0]; 1-Lipschitz and idempotent. */
double truncate(double u, double eta0);

/** Basis-size rule J = max{ r+1, floor((m / log(max(m,3)))^(1/(2 beta + d))) },
 * natural log. beta is a conservative smoothness lower bound. */
int spline_j(std::size_t m, int d, double beta, int r);

/** Spline-backed nuisance model: three coefficient vectors over a shared
 * basis, each prediction truncated to [eta0, 1-eta0]. */
class SplineNuisanceModel : public NuisanceModel {
 public:
  SplineNuisanceModel(SplineBasisSpec basis, Eigen::VectorXd coeffs_q1,
                      Eigen::VectorXd coeffs_q0, Eigen::VectorXd coeffs_e,
                      double eta0);

  double q1(const std::vector<double>& x) const override;
  double q0(const std::vector<double>& x) const override;
  double e(const std::vector<double>& x) const override;

  const SplineBasisSpec& basis() const { return basis_; }
  double eta0() const { return eta0_; }
  const Eigen::VectorXd& coeffs_q1() const { return cq1_; }
  const Eigen::VectorXd& coeffs_q0() const { return cq0_; }
  const Eigen::VectorXd& coeffs_e() const { return ce_; }

  /** Fit diagnostics: numerical ranks of the three design matrices. */
  struct FitInfo {
    long rank_e = 0, rank_q1 = 0, rank_q0 = 0, K = 0;
    bool q1_defaulted = false, q0_defaulted = false;  // empty-arm fallback
  };
  FitInfo info;

  /** Serialize as {degree, J, d, knots, coeffs_e, coeffs_q1, coeffs_q0, eta0}. */
  std::string to_json() const;
  static SplineNuisanceModel from_json(const std::string& text);

 private:
  SplineBasisSpec basis_;
  Eigen::VectorXd cq1_, cq0_, ce_;
  double eta0_;
};

/** Least-squares spline nuisance fit on one training sample:
 * e is regressed on all m rows against A; q_a on the subgroup {A = a}
 * against Y (an empty subgroup yields the constant 1/2); all three
 * predictions are truncated to [eta0, 1-eta0]. J follows spline_j with
 * m = data.size(). Preconditions: 0 < eta0 < 1/2 and r > max(beta, 1). */
std::unique_ptr<SplineNuisanceModel> fit_nuisances(const Dataset& data, int r,
                                                   double eta0, double beta);

}  // namespace wate
