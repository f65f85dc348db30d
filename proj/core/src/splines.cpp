#include "wate/splines.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "wate/errors.hpp"

namespace wate {

SplineBasisSpec SplineBasisSpec::make(int r, int J, int d) {
  if (r < 1) throw InputError("spline degree must be >= 1");
  if (J < r + 1) throw InputError("J must be >= degree + 1");
  if (d < 1) throw InputError("dimension must be >= 1");
  SplineBasisSpec s;
  s.degree = r;
  s.per_axis = J;
  s.dim = d;
  // Clamped uniform knots: boundary knots repeated r+1 times, J-r-1 uniform
  // interior knots.
  const int spans = J - r;
  s.knots.reserve(static_cast<std::size_t>(J + r + 1));
  for (int i = 0; i <= r; ++i) s.knots.push_back(0.0);
  for (int i = 1; i < spans; ++i)
    s.knots.push_back(static_cast<double>(i) / spans);
  for (int i = 0; i <= r; ++i) s.knots.push_back(1.0);
  return s;
}

long SplineBasisSpec::K() const {
  long k = 1;
  for (int j = 0; j < dim; ++j) k *= per_axis;
  return k;
}

namespace {

// The r+1 nonzero normalized B-splines at x: functions mu-r .. mu where mu is
// the knot span index. Triangular recurrence; exact partition of unity.
void basis_1d(const SplineBasisSpec& s, double x, int& mu, std::vector<double>& N) {
  const int r = s.degree, J = s.per_axis;
  const int spans = J - r;
  int i = static_cast<int>(std::floor(x * spans));
  i = std::clamp(i, 0, spans - 1);
  mu = r + i;
  const std::vector<double>& T = s.knots;
  while (mu > r && x < T[static_cast<std::size_t>(mu)]) --mu;
  while (mu < J - 1 && x >= T[static_cast<std::size_t>(mu) + 1]) ++mu;

  N.assign(static_cast<std::size_t>(r) + 1, 0.0);
  std::vector<double> left(static_cast<std::size_t>(r) + 1),
      right(static_cast<std::size_t>(r) + 1);
  N[0] = 1.0;
  for (int j = 1; j <= r; ++j) {
    left[static_cast<std::size_t>(j)] = x - T[static_cast<std::size_t>(mu + 1 - j)];
    right[static_cast<std::size_t>(j)] = T[static_cast<std::size_t>(mu + j)] - x;
    double saved = 0.0;
    for (int k = 0; k < j; ++k) {
      const double denom = right[static_cast<std::size_t>(k + 1)] +
                           left[static_cast<std::size_t>(j - k)];
      const double tmp = N[static_cast<std::size_t>(k)] / denom;
      N[static_cast<std::size_t>(k)] =
          saved + right[static_cast<std::size_t>(k + 1)] * tmp;
      saved = left[static_cast<std::size_t>(j - k)] * tmp;
    }
    N[static_cast<std::size_t>(j)] = saved;
  }
}

}  // namespace

std::vector<double> basis_eval(const SplineBasisSpec& spec,
                               const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != spec.dim)
    throw InputError("basis_eval: x has wrong dimension");
  for (double xj : x)
    if (!(xj >= 0.0) || !(xj <= 1.0))
      throw InputError("basis_eval: x outside [0,1]^d");

  const int d = spec.dim, r = spec.degree, J = spec.per_axis;
  std::vector<int> mu(static_cast<std::size_t>(d));
  std::vector<std::vector<double>> N(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j)
    basis_1d(spec, x[static_cast<std::size_t>(j)], mu[static_cast<std::size_t>(j)],
             N[static_cast<std::size_t>(j)]);

  std::vector<double> out(static_cast<std::size_t>(spec.K()), 0.0);
  std::vector<int> off(static_cast<std::size_t>(d), 0);
  for (;;) {
    double prod = 1.0;
    long idx = 0;
    for (int j = 0; j < d; ++j) {
      const std::size_t ju = static_cast<std::size_t>(j);
      prod *= N[ju][static_cast<std::size_t>(off[ju])];
      idx = idx * J + (mu[ju] - r + off[ju]);  // last axis fastest
    }
    out[static_cast<std::size_t>(idx)] = prod;
    int j = d - 1;
    while (j >= 0 && ++off[static_cast<std::size_t>(j)] > r) {
      off[static_cast<std::size_t>(j)] = 0;
      --j;
    }
    if (j < 0) break;
  }
  return out;
}

namespace {
constexpr double kSvCutoff = 1e-10;
}

Eigen::VectorXd least_squares_min_norm(const Eigen::MatrixXd& design,
                                       const Eigen::VectorXd& response) {
  if (design.rows() != response.size())
    throw InputError("least_squares_min_norm: row mismatch");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(design,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(kSvCutoff);
  return svd.solve(response);
}

long least_squares_rank(const Eigen::MatrixXd& design) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(design);
  svd.setThreshold(kSvCutoff);
  return svd.rank();
}

double truncate(double u, double eta0) {
  return std::max(eta0, std::min(u, 1.0 - eta0));
}

int spline_j(std::size_t m, int d, double beta, int r) {
  if (m == 0) throw InputError("spline_j: empty sample");
  const double mm = static_cast<double>(m);
  const double ratio = mm / std::log(std::max(mm, 3.0));
  const double j = std::floor(std::pow(ratio, 1.0 / (2.0 * beta + d)));
  return std::max(r + 1, static_cast<int>(j));
}

SplineNuisanceModel::SplineNuisanceModel(SplineBasisSpec basis,
                                         Eigen::VectorXd coeffs_q1,
                                         Eigen::VectorXd coeffs_q0,
                                         Eigen::VectorXd coeffs_e, double eta0)
    : basis_(std::move(basis)),
      cq1_(std::move(coeffs_q1)),
      cq0_(std::move(coeffs_q0)),
      ce_(std::move(coeffs_e)),
      eta0_(eta0) {
  const long K = basis_.K();
  if (cq1_.size() != K || cq0_.size() != K || ce_.size() != K)
    throw InputError("spline model: coefficient length != K");
  if (!(eta0_ > 0.0) || !(eta0_ < 0.5))
    throw InputError("spline model: eta0 must lie in (0, 1/2)");
}

namespace {

double predict(const SplineBasisSpec& basis, const Eigen::VectorXd& c,
               const std::vector<double>& x, double eta0) {
  const std::vector<double> b = basis_eval(basis, x);
  double acc = 0.0;
  for (long k = 0; k < c.size(); ++k) acc += b[static_cast<std::size_t>(k)] * c[k];
  return truncate(acc, eta0);
}

}  // namespace

double SplineNuisanceModel::q1(const std::vector<double>& x) const {
  return predict(basis_, cq1_, x, eta0_);
}
double SplineNuisanceModel::q0(const std::vector<double>& x) const {
  return predict(basis_, cq0_, x, eta0_);
}
double SplineNuisanceModel::e(const std::vector<double>& x) const {
  return predict(basis_, ce_, x, eta0_);
}

std::unique_ptr<SplineNuisanceModel> fit_nuisances(const Dataset& data, int r,
                                                   double eta0, double beta) {
  data.validate();
  if (!(eta0 > 0.0) || !(eta0 < 0.5))
    throw InputError("fit_nuisances: eta0 must lie in (0, 1/2)");
  if (!(static_cast<double>(r) > std::max(beta, 1.0)))
    throw InputError("fit_nuisances: need degree r > max(beta, 1)");

  const std::size_t m = data.size();
  const int J = spline_j(m, data.d, beta, r);
  SplineBasisSpec basis = SplineBasisSpec::make(r, J, data.d);
  const long K = basis.K();

  Eigen::MatrixXd Z(static_cast<long>(m), K);
  Eigen::VectorXd A(static_cast<long>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const std::vector<double> b = basis_eval(basis, data.samples[i].x);
    for (long k = 0; k < K; ++k) Z(static_cast<long>(i), k) = b[static_cast<std::size_t>(k)];
    A(static_cast<long>(i)) = data.samples[i].a;
  }

  SplineNuisanceModel::FitInfo info;
  info.K = K;
  const Eigen::VectorXd ce = least_squares_min_norm(Z, A);
  info.rank_e = least_squares_rank(Z);

  // Outcome regressions on the treated / control subgroups.
  Eigen::VectorXd cq[2];
  for (int arm = 0; arm <= 1; ++arm) {
    std::vector<long> rows;
    for (std::size_t i = 0; i < m; ++i)
      if (data.samples[i].a == arm) rows.push_back(static_cast<long>(i));
    if (rows.empty()) {
      // Empty arm: the regression is vacuous, fall back to the constant 1/2
      // (the basis sums to one, so constant coefficients reproduce it).
      cq[arm] = Eigen::VectorXd::Constant(K, 0.5);
      (arm ? info.q1_defaulted : info.q0_defaulted) = true;
      (arm ? info.rank_q1 : info.rank_q0) = 0;
      continue;
    }
    Eigen::MatrixXd Za(static_cast<long>(rows.size()), K);
    Eigen::VectorXd Ya(static_cast<long>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      Za.row(static_cast<long>(i)) = Z.row(rows[i]);
      Ya(static_cast<long>(i)) = data.samples[static_cast<std::size_t>(rows[i])].y;
    }
    cq[arm] = least_squares_min_norm(Za, Ya);
    (arm ? info.rank_q1 : info.rank_q0) = least_squares_rank(Za);
  }

  auto model = std::make_unique<SplineNuisanceModel>(std::move(basis), cq[1], cq[0],
                                                     ce, eta0);
  model->info = info;
  return model;
}

namespace {

void append_number(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

void append_array(std::string& out, const char* key, const double* v, long n) {
  out += '"';
  out += key;
  out += "\": [";
  for (long i = 0; i < n; ++i) {
    if (i) out += ", ";
    append_number(out, v[i]);
  }
  out += ']';
}

}  // namespace

std::string SplineNuisanceModel::to_json() const {
  std::string out = "{\n  \"degree\": " + std::to_string(basis_.degree) +
                    ",\n  \"J\": " + std::to_string(basis_.per_axis) +
                    ",\n  \"d\": " + std::to_string(basis_.dim) + ",\n  ";
  append_array(out, "knots", basis_.knots.data(),
               static_cast<long>(basis_.knots.size()));
  out += ",\n  ";
  append_array(out, "coeffs_e", ce_.data(), ce_.size());
  out += ",\n  ";
  append_array(out, "coeffs_q1", cq1_.data(), cq1_.size());
  out += ",\n  ";
  append_array(out, "coeffs_q0", cq0_.data(), cq0_.size());
  out += ",\n  \"eta0\": ";
  append_number(out, eta0_);
  out += "\n}\n";
  return out;
}

SplineNuisanceModel SplineNuisanceModel::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& ex) {
    throw InputError(std::string("spline model JSON parse failure: ") + ex.what());
  }
  SplineBasisSpec basis =
      SplineBasisSpec::make(j.at("degree").get<int>(), j.at("J").get<int>(),
                            j.at("d").get<int>());
  const auto knots = j.at("knots").get<std::vector<double>>();
  if (knots != basis.knots)
    throw InputError("spline model JSON: knot vector is not clamped-uniform");
  auto vec = [&](const char* key) {
    const auto v = j.at(key).get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<long>(v.size()))
        .eval();
  };
  return SplineNuisanceModel(std::move(basis), vec("coeffs_q1"), vec("coeffs_q0"),
                             vec("coeffs_e"), j.at("eta0").get<double>());
}

}  // namespace wate
