#include "wate/crossfit.hpp"

#include <algorithm>
#include <cmath>

#include "wate/diagnostics.hpp"
#include "wate/errors.hpp"
#include "wate/rng.hpp"

namespace wate {

FoldPlan FoldPlan::from_indices(std::vector<std::size_t> i0,
                                std::vector<std::size_t> i1, std::size_t n) {
  FoldPlan plan;
  plan.i0 = std::move(i0);
  plan.i1 = std::move(i1);
  plan.n = n;
  if (plan.i0.size() != (n + 1) / 2 || plan.i1.size() != n / 2)
    throw InputError("fold plan: sizes must be (ceil(n/2), floor(n/2))");
  std::sort(plan.i0.begin(), plan.i0.end());
  std::sort(plan.i1.begin(), plan.i1.end());
  std::vector<char> seen(n, 0);
  for (const auto& fold : {plan.i0, plan.i1})
    for (std::size_t i : fold) {
      if (i >= n) throw InputError("fold plan: index out of range");
      if (seen[i]) throw InputError("fold plan: folds must be disjoint");
      seen[i] = 1;
    }
  return plan;
}

FoldPlan split_folds(std::size_t n, std::uint64_t seed) {
  if (n < 4) throw InputError("split_folds: need n >= 4");
  Rng rng(seed);
  const std::vector<std::size_t> perm = rng.permutation<std::size_t>(n);
  const std::size_t m0 = (n + 1) / 2;
  FoldPlan plan = FoldPlan::from_indices(
      std::vector<std::size_t>(perm.begin(), perm.begin() + m0),
      std::vector<std::size_t>(perm.begin() + m0, perm.end()), n);
  plan.seed = seed;
  return plan;
}

namespace {

double horner(const double* coef, int count, double r) {
  double acc = coef[0];
  for (int i = 1; i < count; ++i) acc = acc * r + coef[i];
  return acc;
}

}  // namespace

// Wichura's PPND16 rational approximations (absolute error ~ 1e-16 in the
// central region, well below 1e-9 everywhere).
double normal_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0))
    throw InputError("normal_quantile: p must lie in (0,1)");
  static const double a[8] = {
      2.5090809287301226727e+3, 3.3430575583588128105e+4,
      6.7265770927008700853e+4, 4.5921953931549871457e+4,
      1.3731693765509461125e+4, 1.9715909503065514427e+3,
      1.3314166789178437745e+2, 3.3871328727963666080e+0};
  static const double b[8] = {
      5.2264952788528545610e+3, 2.8729085735721942674e+4,
      3.9307895800092710610e+4, 2.1213794301586595867e+4,
      5.3941960214247511077e+3, 6.8718700749205790830e+2,
      4.2313330701600911252e+1, 1.0};
  static const double c[8] = {
      7.74545014278341407640e-4, 2.27238449892691845833e-2,
      2.41780725177450611770e-1, 1.27045825245236838258e+0,
      3.64784832476320460504e+0, 5.76949722146069140550e+0,
      4.63033784615654529590e+0, 1.42343711074968357734e+0};
  static const double d[8] = {
      1.05075007164441684324e-9, 5.47593808499534494600e-4,
      1.51986665636164571966e-2, 1.48103976427480074590e-1,
      6.89767334985100004550e-1, 1.67638483018380384940e+0,
      2.05319162663775882187e+0, 1.0};
  static const double e[8] = {
      2.01033439929228813265e-7, 2.71155556874348757815e-5,
      1.24266094738807843860e-3, 2.65321895265761230930e-2,
      2.96560571828504891230e-1, 1.78482653991729133580e+0,
      5.46378491116411436990e+0, 6.65790464350110377720e+0};
  static const double f[8] = {
      2.04426310338993978564e-15, 1.42151175831644588870e-7,
      1.84631831751005468180e-5,  7.86869131145613259100e-4,
      1.48753612908506148525e-2,  1.36929880922735805310e-1,
      5.99832206555887937690e-1,  1.0};

  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * horner(a, 8, r) / horner(b, 8, r);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = horner(c, 8, r) / horner(d, 8, r);
  } else {
    r -= 5.0;
    value = horner(e, 8, r) / horner(f, 8, r);
  }
  return q < 0.0 ? -value : value;
}

std::pair<double, double> wald_ci(double psi_hat, double sigma2,
                                  std::size_t n, double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw InputError("wald_ci: alpha must lie in (0,1)");
  if (!(sigma2 >= 0.0)) throw InputError("wald_ci: sigma2 must be >= 0");
  if (n < 1) throw InputError("wald_ci: need n >= 1");
  const double z = normal_quantile(1.0 - alpha / 2.0);
  const double half = z * std::sqrt(sigma2 / static_cast<double>(n));
  return {psi_hat - half, psi_hat + half};
}

Estimate cross_fit_estimate(const Dataset& data, const FoldPlan& plan,
                            const WeightSpec& w, const NuisanceFitter& fit,
                            const CrossfitConfig& cfg) {
  data.validate();
  if (plan.n != data.size())
    throw InputError("cross_fit_estimate: fold plan size differs from data");
  if (plan.i0.empty() || plan.i1.empty())
    throw InputError("cross_fit_estimate: both folds must be nonempty");
  if (!(cfg.alpha > 0.0) || !(cfg.alpha < 1.0))
    throw InputError("cross_fit_estimate: alpha must lie in (0,1)");
  if (!(cfg.eta > 0.0) || !(cfg.eta < 0.25))
    throw InputError("cross_fit_estimate: eta must lie in (0, 1/4)");
  if (!fit) throw InputError("cross_fit_estimate: empty nuisance fitter");

  Estimate est;
  est.alpha = cfg.alpha;
  est.n = data.size();
  est.seed = plan.seed;
  est.weight = w;
  est.odd_n_weighting = (data.size() % 2) != 0;

  const double c_scale = frak_c(lambda_bounds(w, cfg.eta));
  const double t1 = std::pow(c_scale, 6) / 8.0;

  std::vector<double> d_all(data.size(), 0.0);
  const std::array<const std::vector<std::size_t>*, 2> fold_idx{&plan.i0,
                                                                &plan.i1};
  for (int k = 0; k < 2; ++k) {
    const std::vector<std::size_t>& eval_idx = *fold_idx[k];
    const std::vector<std::size_t>& train_idx = *fold_idx[1 - k];
    const Dataset fold = data.subset(eval_idx);
    FoldSummary& fs = est.folds[static_cast<std::size_t>(k)];
    fs.m = fold.size();
    fs.c_used = c_scale;
    try {
      const std::unique_ptr<NuisanceModel> model = fit(data.subset(train_idx));
      if (!model) throw Error("nuisance fitter returned no model");
      const NuisanceValues u0 = evaluate(*model, fold);
      fs.positivity_ok = check_positivity(u0, cfg.eta);
      fs.c_init_hat = c_init_hat(u0, w);

      TargetConfig tc;
      tc.mode = cfg.mode;
      tc.c = c_scale;
      tc.c_init = std::max(fs.c_init_hat, cfg.c_init_floor);
      if (cfg.mode == TargetMode::theoretical)
        tc.c_init = std::min(tc.c_init, 1.0 - 1e-12);
      tc.resid_tol = cfg.resid_tol;
      tc.width_tol = cfg.width_tol;
      tc.path = cfg.mode == TargetMode::theoretical
                    ? PathConfig::theoretical(t1)
                    : PathConfig::practical(t1);

      const FoldFit ff = targeted_fold_fit(fold, u0, w, tc);
      fs.root = ff.root;
      fs.psi_k = ff.psi_k;
      fs.fallback = !ff.ok;
      fs.flag = ff.root.flag;
      for (std::size_t j = 0; j < eval_idx.size(); ++j)
        d_all[eval_idx[j]] = ff.d_full_values[j];
    } catch (const InputError&) {
      throw;  // malformed inputs are the caller's problem, not a fold event
    } catch (const Error& err) {
      fs.fallback = true;
      fs.psi_k = 0.0;
      fs.flag = err.what();
      for (std::size_t j : eval_idx) d_all[j] = 0.0;
    }
  }

  if (est.folds[0].fallback && est.folds[1].fallback)
    throw Error("estimation failed: targeting fell back in both folds");

  const double n_d = static_cast<double>(data.size());
  est.psi_cf = (static_cast<double>(est.folds[0].m) / n_d) * est.folds[0].psi_k +
               (static_cast<double>(est.folds[1].m) / n_d) * est.folds[1].psi_k;
  double ss = 0.0;
  for (double dv : d_all) ss += dv * dv;
  est.sigma2_cf = ss / n_d;
  est.d_values = std::move(d_all);
  const auto [lo, hi] = wald_ci(est.psi_cf, est.sigma2_cf, data.size(), cfg.alpha);
  est.ci_lo = lo;
  est.ci_hi = hi;
  return est;
}

Estimate cross_fit_estimate(const Dataset& data, const WeightSpec& w,
                            const NuisanceFitter& fit,
                            const CrossfitConfig& cfg) {
  const FoldPlan plan = split_folds(data.size(), cfg.seed);
  return cross_fit_estimate(data, plan, w, fit, cfg);
}

}  // namespace wate
