#include "wate/diagnostics.hpp"

#include <cmath>

#include "wate/eif.hpp"
#include "wate/errors.hpp"

namespace wate {

Constants constants(double c, double c_init) {
  if (!(c > 0.0) || !(c <= 1.0) || !(c_init > 0.0) || !(c_init <= 1.0))
    throw InputError("constants: c and c_init must lie in (0,1]");
  Constants k;
  k.t1 = std::pow(c, 6) / 8.0;
  k.delta_init = c_init * std::pow(c, 20) / 1e6;
  k.t2 = k.delta_init;
  k.tv_threshold = std::pow(c, 10) * c_init / 600.0;
  k.mu0_threshold = c_init * k.delta_init / 8.0;
  return k;
}

bool check_positivity(const NuisanceValues& u0, double eta) {
  if (!(eta > 0.0) || !(eta < 0.25))
    throw InputError("check_positivity: eta must lie in (0, 1/4)");
  const double lo = 3.0 * eta;
  const double hi = 1.0 - 3.0 * eta;
  for (std::size_t i = 0; i < u0.size(); ++i) {
    if (u0.q1[i] < lo || u0.q1[i] > hi) return false;
    if (u0.q0[i] < lo || u0.q0[i] > hi) return false;
    if (u0.e[i] < lo || u0.e[i] > hi) return false;
  }
  return true;
}

double c_init_hat(const NuisanceValues& u0, const WeightSpec& w) {
  const EifContext ctx = EifContext::make(u0, w);
  const std::size_t m = u0.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double cell = 0.0;
    for (int a = 0; a <= 1; ++a)
      for (int y = 0; y <= 1; ++y) {
        const double d = d_restricted(ctx, i, a, y);
        cell += d * d * conditional_pmf(u0, i, a, y);
      }
    acc += cell;
  }
  return acc / static_cast<double>(m);
}

std::pair<double, double> mu0_and_tv(const NuisanceValues& u0,
                                     const ConditionalLawOracle& truth,
                                     const WeightSpec& w) {
  if (!truth) throw InputError("mu0_and_tv: conditional law oracle is empty");
  const EifContext ctx = EifContext::make(u0, w);
  const std::size_t m = u0.size();
  double mu0 = 0.0;
  double tv = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::array<double, 4> p_star = truth(i);
    double mass = 0.0;
    for (double p : p_star) {
      if (!(p >= 0.0))
        throw InputError("mu0_and_tv: oracle probabilities must be >= 0");
      mass += p;
    }
    if (std::abs(mass - 1.0) > 1e-9)
      throw InputError("mu0_and_tv: oracle probabilities must sum to 1");
    double tv_i = 0.0;
    for (int a = 0; a <= 1; ++a)
      for (int y = 0; y <= 1; ++y) {
        const double ps = p_star[static_cast<std::size_t>(2 * a + y)];
        mu0 += d_restricted(ctx, i, a, y) * ps;
        tv_i += std::abs(ps - conditional_pmf(u0, i, a, y));
      }
    tv += 0.5 * tv_i;
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  return {mu0 * inv_m, tv * inv_m};
}

std::pair<double, double> mu0_and_tv(const NuisanceValues& u0,
                                     const NuisanceValues& truth,
                                     const WeightSpec& w) {
  if (truth.size() != u0.size())
    throw InputError("mu0_and_tv: truth and fit support sizes differ");
  ConditionalLawOracle oracle = [&truth](std::size_t i) {
    return std::array<double, 4>{
        conditional_pmf(truth, i, 0, 0), conditional_pmf(truth, i, 0, 1),
        conditional_pmf(truth, i, 1, 0), conditional_pmf(truth, i, 1, 1)};
  };
  return mu0_and_tv(u0, oracle, w);
}

BracketReport bracket_report(const NuisanceValues& u0, const WeightSpec& w,
                             double eta, const ConditionalLawOracle* truth,
                             std::optional<double> c_init_threshold) {
  BracketReport r;
  r.eta_used = eta;
  r.positivity_ok = check_positivity(u0, eta);
  const LambdaBounds lb = lambda_bounds(w, eta);
  r.c = frak_c(lb);
  r.c_init_hat = wate::c_init_hat(u0, w);
  // Same formulas as constants(), but valid for any c_init_hat > 0 (the
  // empirical second moment may exceed 1 near the positivity boundary).
  r.t1 = std::pow(r.c, 6) / 8.0;
  r.delta_init = r.c_init_hat * std::pow(r.c, 20) / 1e6;
  r.t2 = r.delta_init;
  const double threshold =
      c_init_threshold ? *c_init_threshold : std::pow(r.c, 5);
  r.square_bound_ok = r.c_init_hat >= threshold;
  if (truth != nullptr && *truth) {
    const auto [mu0, tv] = mu0_and_tv(u0, *truth, w);
    r.mu0 = mu0;
    r.tv_gap = tv;
    r.mu0_ok = std::abs(mu0) <= r.c_init_hat * r.delta_init / 8.0;
    r.tv_ok = tv <= std::pow(r.c, 10) * r.c_init_hat / 600.0;
  }
  return r;
}

}  // namespace wate
