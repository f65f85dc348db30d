#include "wate/eif.hpp"

#include <cmath>

#include "wate/errors.hpp"

namespace wate {

EifContext EifContext::make(const NuisanceValues& v, const WeightSpec& w) {
  EifContext ctx;
  ctx.weight = w;
  ctx.omega = wate::omega(v, w);
  ctx.psi = wate::psi(v, w);
  ctx.values = &v;
  return ctx;
}

double aipw_phi(int a, int y, double q1, double q0, double e) {
  if (!(e > 0.0) || !(e < 1.0)) throw InputError("aipw_phi: e must lie in (0,1)");
  const double treated = a ? (y - q1) / e : 0.0;
  const double control = a ? 0.0 : (y - q0) / (1.0 - e);
  return treated - control + (q1 - q0);
}

namespace {

struct PointTerms {
  double lam, dlam, tau, e;
};

PointTerms terms_at(const EifContext& ctx, std::size_t i) {
  const NuisanceValues& v = *ctx.values;
  PointTerms t;
  t.e = v.e[i];
  t.lam = lambda_eval(ctx.weight, t.e, 0);
  t.dlam = lambda_eval(ctx.weight, t.e, 1);
  t.tau = v.q1[i] - v.q0[i];
  return t;
}

}  // namespace

double d_restricted(const EifContext& ctx, std::size_t i, int a, int y) {
  if (!(ctx.omega > 0.0)) throw InputError("d_restricted: Omega must be positive");
  const NuisanceValues& v = *ctx.values;
  const PointTerms t = terms_at(ctx, i);
  const double phi = aipw_phi(a, y, v.q1[i], v.q0[i], t.e);
  return t.lam / ctx.omega * (phi - t.tau) +
         t.dlam / ctx.omega * (t.tau - ctx.psi) * (a - t.e);
}

FullEif d_full(const EifContext& ctx, std::size_t i, int a, int y) {
  if (!(ctx.omega > 0.0)) throw InputError("d_full: Omega must be positive");
  const NuisanceValues& v = *ctx.values;
  const PointTerms t = terms_at(ctx, i);
  FullEif out;
  const double resid = a ? (y - v.q1[i]) / t.e : -(y - v.q0[i]) / (1.0 - t.e);
  out.d_q = t.lam / ctx.omega * resid;
  out.d_e = t.dlam / ctx.omega * (t.tau - ctx.psi) * (a - t.e);
  out.d_x = t.lam / ctx.omega * (t.tau - ctx.psi);
  out.total = out.d_q + out.d_e + out.d_x;
  return out;
}

double conditional_mean_dstar(const EifContext& ctx, std::size_t i,
                              const std::array<double, 4>& pmf) {
  double total = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0)) throw InputError("conditional_mean_dstar: negative pmf entry");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw InputError("conditional_mean_dstar: pmf does not sum to one");
  double sum = 0.0;
  for (int a = 0; a <= 1; ++a)
    for (int y = 0; y <= 1; ++y)
      sum += d_restricted(ctx, i, a, y) * pmf[static_cast<std::size_t>(2 * a + y)];
  return sum;
}

}  // namespace wate
