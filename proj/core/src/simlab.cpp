#include "wate/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "wate/errors.hpp"
#include "wate/rng.hpp"
#include "wate/splines.hpp"

namespace wate {

namespace {

// Smoothstep: monotone C^1 cubic from (0,0) to (1,1).
double smoothstep(double x) { return (3.0 - 2.0 * x) * x * x; }

double expit(double z) { return 1.0 / (1.0 + std::exp(-z)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

DgpSpec dgp_null_effect() {
  DgpSpec g;
  g.name = "null-effect";
  g.d = 1;
  g.eta_star = 0.15;
  g.q1_star = [](const std::vector<double>& x) { return 0.3 + 0.4 * x[0]; };
  g.q0_star = g.q1_star;
  g.e_star = [](const std::vector<double>& x) { return 0.4 + 0.2 * x[0]; };
  return g;
}

DgpSpec dgp_smooth_heterogeneous() {
  DgpSpec g;
  g.name = "smooth-heterogeneous";
  g.d = 1;
  g.eta_star = 0.1;
  g.q1_star = [](const std::vector<double>& x) {
    return 0.2 + 0.6 * x[0] - 0.2 * x[0] * x[0];
  };
  g.q0_star = [](const std::vector<double>& x) { return 0.5 - 0.2 * x[0]; };
  g.e_star = [](const std::vector<double>& x) {
    return 0.25 + 0.5 * smoothstep(x[0]);
  };
  return g;
}

DgpSpec dgp_near_boundary() {
  DgpSpec g;
  g.name = "near-boundary";
  g.d = 1;
  g.eta_star = 0.05;
  g.q1_star = [](const std::vector<double>& x) { return 0.3 + 0.4 * x[0]; };
  g.q0_star = [](const std::vector<double>& x) { return 0.6 - 0.3 * x[0]; };
  g.e_star = [](const std::vector<double>& x) {
    return 0.1 + 0.8 * smoothstep(x[0]);
  };
  return g;
}

std::vector<std::string> dgp_catalog() {
  return {"null-effect", "smooth-heterogeneous", "near-boundary"};
}

DgpSpec dgp_by_name(const std::string& name) {
  if (name == "null-effect") return dgp_null_effect();
  if (name == "smooth-heterogeneous") return dgp_smooth_heterogeneous();
  if (name == "near-boundary") return dgp_near_boundary();
  throw InputError("unknown DGP '" + name +
                   "'; catalog: null-effect, smooth-heterogeneous, "
                   "near-boundary");
}

Dataset generate(const DgpSpec& dgp, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw InputError("generate: need n >= 1");
  if (dgp.d < 1 || !dgp.q1_star || !dgp.q0_star || !dgp.e_star)
    throw InputError("generate: incomplete DGP specification");
  Rng rng(seed);
  Dataset data;
  data.d = static_cast<int>(dgp.d);
  data.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Sample& s = data.samples[i];
    s.x.resize(dgp.d);
    for (std::size_t j = 0; j < dgp.d; ++j) s.x[j] = rng.uniform();
    const double e = dgp.e_star(s.x);
    if (!(e > 0.0) || !(e < 1.0))
      throw InputError("generate: e* left (0,1) at a drawn point");
    s.a = rng.bernoulli(e);
    const double q = s.a ? dgp.q1_star(s.x) : dgp.q0_star(s.x);
    if (!(q > 0.0) || !(q < 1.0))
      throw InputError("generate: q* left (0,1) at a drawn point");
    s.y = rng.bernoulli(q);
  }
  return data;
}

double DgpNuisanceModel::q1(const std::vector<double>& x) const {
  return dgp_.q1_star(x);
}
double DgpNuisanceModel::q0(const std::vector<double>& x) const {
  return dgp_.q0_star(x);
}
double DgpNuisanceModel::e(const std::vector<double>& x) const {
  return dgp_.e_star(x);
}

namespace {

using Integrand = std::function<double(const std::vector<double>&)>;

// Composite Simpson over [0,1] with N (even) panels, tensorized for d = 2.
double simpson_tensor(std::size_t d, std::size_t panels, const Integrand& f) {
  const std::size_t N = std::max<std::size_t>(2, panels + (panels % 2));
  const double h = 1.0 / static_cast<double>(N);
  auto weight = [N](std::size_t i) -> double {
    if (i == 0 || i == N) return 1.0;
    return (i % 2 == 1) ? 4.0 : 2.0;
  };
  std::vector<double> x(d, 0.0);
  double acc = 0.0;
  if (d == 1) {
    for (std::size_t i = 0; i <= N; ++i) {
      x[0] = static_cast<double>(i) * h;
      acc += weight(i) * f(x);
    }
    return acc * h / 3.0;
  }
  for (std::size_t i = 0; i <= N; ++i) {
    x[0] = static_cast<double>(i) * h;
    double inner = 0.0;
    for (std::size_t j = 0; j <= N; ++j) {
      x[1] = static_cast<double>(j) * h;
      inner += weight(j) * f(x);
    }
    acc += weight(i) * inner;
  }
  return acc * h * h / 9.0;
}

double halton_radical_inverse(std::uint64_t index, std::uint64_t base) {
  double result = 0.0;
  double scale = 1.0 / static_cast<double>(base);
  while (index > 0) {
    result += static_cast<double>(index % base) * scale;
    index /= base;
    scale /= static_cast<double>(base);
  }
  return result;
}

double halton_mean(std::size_t d, std::size_t points, const Integrand& f) {
  static const std::uint64_t primes[] = {2,  3,  5,  7,  11, 13, 17, 19,
                                         23, 29, 31, 37, 41, 43, 47, 53};
  if (d > std::size(primes))
    throw InputError("quadrature: dimension too large for the Halton bases");
  std::vector<double> x(d, 0.0);
  double acc = 0.0;
  for (std::size_t k = 1; k <= points; ++k) {
    for (std::size_t j = 0; j < d; ++j)
      x[j] = halton_radical_inverse(k, primes[j]);
    acc += f(x);
  }
  return acc / static_cast<double>(points);
}

// Mean of f over the uniform law on [0,1]^d.
double integrate_mean(std::size_t d, std::size_t resolution,
                      const Integrand& f) {
  if (d <= 2) return simpson_tensor(d, resolution, f);
  const std::size_t points =
      std::min<std::size_t>(resolution * resolution, std::size_t{1} << 22);
  return halton_mean(d, points, f);
}

struct PsiParts {
  double omega = 0.0;  // E[lambda(e*)]
  double psi = 0.0;    // E[lambda(e*) (q1* - q0*)] / omega
};

PsiParts psi_parts(const DgpSpec& dgp, const WeightSpec& w,
                   std::size_t resolution) {
  const double num = integrate_mean(
      dgp.d, resolution, [&](const std::vector<double>& x) {
        return lambda_eval(w, dgp.e_star(x)) * (dgp.q1_star(x) - dgp.q0_star(x));
      });
  const double den =
      integrate_mean(dgp.d, resolution, [&](const std::vector<double>& x) {
        return lambda_eval(w, dgp.e_star(x));
      });
  if (!(den > 1e-12)) throw Error("true_psi: vanishing weight normalizer");
  return {den, num / den};
}

double d_full_scalar(const WeightSpec& w, double om, double psi_val, double q1,
                     double q0, double e, int a, int y) {
  const double lam = lambda_eval(w, e, 0);
  const double dlam = lambda_eval(w, e, 1);
  const double tau = q1 - q0;
  const double resid = a == 1 ? (static_cast<double>(y) - q1) / e
                              : -(static_cast<double>(y) - q0) / (1.0 - e);
  return (lam / om) * resid +
         (dlam / om) * (tau - psi_val) * (static_cast<double>(a) - e) +
         (lam / om) * (tau - psi_val);
}

}  // namespace

QuadratureResult true_psi(const DgpSpec& dgp, const WeightSpec& w,
                          std::size_t resolution) {
  if (resolution < 8) throw InputError("true_psi: resolution too small");
  const PsiParts coarse = psi_parts(dgp, w, resolution / 2);
  const PsiParts fine = psi_parts(dgp, w, resolution);
  return {fine.psi, std::abs(fine.psi - coarse.psi)};
}

QuadratureResult oracle_eif_variance(const DgpSpec& dgp, const WeightSpec& w,
                                     std::size_t resolution) {
  if (resolution < 8)
    throw InputError("oracle_eif_variance: resolution too small");
  auto at_resolution = [&](std::size_t res) {
    const PsiParts parts = psi_parts(dgp, w, res);
    return integrate_mean(dgp.d, res, [&](const std::vector<double>& x) {
      const double q1 = dgp.q1_star(x);
      const double q0 = dgp.q0_star(x);
      const double e = dgp.e_star(x);
      double cell = 0.0;
      for (int a = 0; a <= 1; ++a) {
        const double pa = a == 1 ? e : 1.0 - e;
        const double qa = a == 1 ? q1 : q0;
        for (int y = 0; y <= 1; ++y) {
          const double p = pa * (y == 1 ? qa : 1.0 - qa);
          const double dv =
              d_full_scalar(w, parts.omega, parts.psi, q1, q0, e, a, y);
          cell += dv * dv * p;
        }
      }
      return cell;
    });
  };
  const double coarse = at_resolution(resolution / 2);
  const double fine = at_resolution(resolution);
  return {fine, std::abs(fine - coarse)};
}

double classical_ate_score(const Dataset& fold, const NuisanceValues& u0,
                           double eps) {
  if (fold.size() != u0.size())
    throw InputError("classical_ate_score: fold and values sizes differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < fold.size(); ++i) {
    const Sample& s = fold.samples[i];
    const double e = u0.e[i];
    if (s.a == 1) {
      const double q1e = expit(logit(u0.q1[i]) + eps / e);
      acc += (static_cast<double>(s.y) - q1e) / e;
    } else {
      const double q0e = expit(logit(u0.q0[i]) - eps / (1.0 - e));
      acc -= (static_cast<double>(s.y) - q0e) / (1.0 - e);
    }
  }
  return acc / static_cast<double>(fold.size());
}

double classical_ate_tmle(const Dataset& fold, const NuisanceValues& u0) {
  u0.validate();
  const double s0 = classical_ate_score(fold, u0, 0.0);
  double lo = 0.0, hi = 0.0;
  if (std::abs(s0) > 1e-13) {
    // The score is strictly decreasing in eps, so the root lies on the side
    // where the score at 0 points.
    const double dir = s0 > 0.0 ? 1.0 : -1.0;
    double step = 1.0;
    double outer = dir * step;
    while (true) {
      const double s_out = classical_ate_score(fold, u0, outer);
      if ((s_out > 0.0) != (s0 > 0.0) || s_out == 0.0) break;
      step *= 2.0;
      if (step > 50.0)
        throw NoRootError(
            "classical fluctuation: no score root within |eps| <= 50");
      outer = dir * step;
    }
    lo = std::min(0.0, outer);
    hi = std::max(0.0, outer);
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double sm = classical_ate_score(fold, u0, mid);
      if (std::abs(sm) <= 1e-13) {
        lo = hi = mid;
        break;
      }
      // Decreasing score: positive score means the root is to the right.
      if (sm > 0.0)
        lo = mid;
      else
        hi = mid;
    }
  }
  const double eps = 0.5 * (lo + hi);
  double mean_blip = 0.0;
  for (std::size_t i = 0; i < fold.size(); ++i) {
    const double e = u0.e[i];
    const double q1e = expit(logit(u0.q1[i]) + eps / e);
    const double q0e = expit(logit(u0.q0[i]) - eps / (1.0 - e));
    mean_blip += q1e - q0e;
  }
  return mean_blip / static_cast<double>(fold.size());
}

McSummary summarize(const std::vector<McRow>& rows, double psi_star) {
  McSummary s;
  s.psi_star = psi_star;
  s.reps = rows.size();
  double mean = 0.0, mse = 0.0, ci_len = 0.0;
  std::size_t ok = 0, covered = 0;
  for (const McRow& r : rows) {
    if (r.failed) {
      ++s.failures;
      continue;
    }
    ++ok;
    mean += r.psi_hat;
    mse += (r.psi_hat - psi_star) * (r.psi_hat - psi_star);
    ci_len += r.ci_hi - r.ci_lo;
    if (r.covered) ++covered;
  }
  if (ok == 0) return s;
  const double k = static_cast<double>(ok);
  mean /= k;
  s.bias = mean - psi_star;
  s.rmse = std::sqrt(mse / k);
  s.coverage = static_cast<double>(covered) / k;
  s.mean_ci_length = ci_len / k;
  if (ok >= 2) {
    double ss = 0.0;
    for (const McRow& r : rows)
      if (!r.failed) ss += (r.psi_hat - mean) * (r.psi_hat - mean);
    s.sd = std::sqrt(ss / (k - 1.0));
  }
  return s;
}

McResult run_replications(const DgpSpec& dgp, const WeightSpec& w,
                          const McConfig& cfg) {
  if (cfg.reps < 1) throw InputError("run_replications: need reps >= 1");
  if (cfg.n < 4) throw InputError("run_replications: need n >= 4");
  const double psi_star = true_psi(dgp, w).value;

  McResult result;
  result.rows.resize(cfg.reps);

  auto run_one = [&](std::size_t r) {
    McRow& row = result.rows[r];
    row.rep = r;
    const std::uint64_t rep_seed = mix_seed(cfg.seed, r);
    try {
      const Dataset data = generate(dgp, cfg.n, mix_seed(rep_seed, 1));
      CrossfitConfig cf;
      cf.seed = mix_seed(rep_seed, 2);
      cf.alpha = cfg.alpha;
      cf.eta = cfg.trunc / 4.0;
      cf.mode = cfg.mode;
      const NuisanceFitter fitter = [&cfg](const Dataset& train) {
        return std::unique_ptr<NuisanceModel>(
            fit_nuisances(train, cfg.degree, cfg.trunc, cfg.beta_guess));
      };
      const Estimate est = cross_fit_estimate(data, w, fitter, cf);
      row.psi_hat = est.psi_cf;
      row.sigma2 = est.sigma2_cf;
      row.ci_lo = est.ci_lo;
      row.ci_hi = est.ci_hi;
      row.covered = est.ci_lo <= psi_star && psi_star <= est.ci_hi;
      row.t_hat0 = est.folds[0].root.t_hat;
      row.t_hat1 = est.folds[1].root.t_hat;
      row.fallback0 = est.folds[0].fallback;
      row.fallback1 = est.folds[1].fallback;
    } catch (const Error& err) {
      row.failed = true;
      row.failure = err.what();
    }
  };

  std::size_t threads = cfg.threads > 0
                            ? static_cast<std::size_t>(cfg.threads)
                            : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, cfg.reps);
  if (threads <= 1) {
    for (std::size_t r = 0; r < cfg.reps; ++r) run_one(r);
  } else {
    // Each row depends only on its index, so work stealing cannot change
    // the results, only the completion order.
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t tindex = 0; tindex < threads; ++tindex)
      pool.emplace_back([&] {
        while (true) {
          const std::size_t r = next.fetch_add(1);
          if (r >= cfg.reps) return;
          run_one(r);
        }
      });
    for (std::thread& th : pool) th.join();
  }

  result.summary = summarize(result.rows, psi_star);
  return result;
}

}  // namespace wate
