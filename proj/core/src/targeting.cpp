#include "wate/targeting.hpp"

#include <algorithm>
#include <cmath>

#include "wate/eif.hpp"
#include "wate/errors.hpp"

namespace wate {

std::pair<double, double> score_bracket_endpoints(double c_init, double l0) {
  if (!(c_init > 0.0)) throw InputError("score bracket: c_init must be positive");
  const double t_minus = -4.0 * std::max(-l0, 0.0) / c_init;
  const double t_plus = 4.0 * std::max(l0, 0.0) / c_init;
  return {t_minus, t_plus};
}

std::pair<double, double> theoretical_bracket(double c, double c_init, double l0) {
  if (!(c > 0.0) || !(c < 1.0) || !(c_init > 0.0) || !(c_init < 1.0))
    throw InputError("theoretical_bracket: c and c_init must lie in (0,1)");
  const double t2 = c_init * std::pow(c, 20) / 1e6;
  auto [tm, tp] = score_bracket_endpoints(c_init, l0);
  const double lo = std::min(0.0, std::max(tm, -t2));
  const double hi = std::max(0.0, std::min(tp, t2));
  return {lo, hi};
}

namespace {

struct ScoreEval {
  double t, f;
};

// Bisect between (a, fa) and (b, fb) with sign(fa) != sign(fb); a is the
// inner endpoint. Returns through the report.
void bisect(const Dataset& fold, const NuisanceValues& u0, const WeightSpec& w,
            const TargetConfig& cfg, double a, double fa, double b, double fb,
            std::vector<ScoreEval>& evals, RootReport& rr) {
  (void)fb;
  rr.lo = std::min(a, b);
  rr.hi = std::max(a, b);
  double mid = a, fm = fa;
  for (int it = 0; it < 200; ++it) {
    if (std::abs(b - a) <= cfg.width_tol) break;
    mid = 0.5 * (a + b);
    bool breached = false;
    try {
      fm = path_score(fold, u0, w, mid, cfg.path);
      ++rr.iterations;
      evals.push_back({mid, fm});
    } catch (const PositivityBreach&) {
      breached = true;
    }
    if (breached) {
      b = mid;  // pull the outer side in; the path exists on the inner part
      continue;
    }
    if (std::abs(fm) <= cfg.resid_tol) {
      rr.t_hat = mid;
      rr.residual = std::abs(fm);
      rr.converged = true;
      return;
    }
    if ((fm > 0.0) == (fa > 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  rr.t_hat = 0.5 * (a + b);
  rr.residual = std::abs(fm);
  rr.converged = std::abs(b - a) <= cfg.width_tol;
}

void check_monotone(std::vector<ScoreEval>& evals, RootReport& rr) {
  std::sort(evals.begin(), evals.end(),
            [](const ScoreEval& x, const ScoreEval& y) { return x.t < y.t; });
  double scale = 0.0;
  for (const ScoreEval& ev : evals) scale = std::max(scale, std::abs(ev.f));
  const double slack = 1e-12 + 1e-9 * scale;
  for (std::size_t i = 1; i < evals.size(); ++i)
    if (evals[i].f > evals[i - 1].f + slack) {
      rr.monotone_ok = false;
      return;
    }
}

}  // namespace

RootReport solve_root(const Dataset& fold, const NuisanceValues& u0,
                      const WeightSpec& w, const TargetConfig& cfg) {
  if (fold.size() != u0.size())
    throw InputError("solve_root: fold and support sizes differ");
  RootReport rr;
  rr.mode = cfg.mode;
  std::vector<ScoreEval> evals;

  const double l0 = path_score(fold, u0, w, 0.0, cfg.path);
  ++rr.iterations;
  evals.push_back({0.0, l0});

  if (std::abs(l0) <= cfg.resid_tol) {
    rr.t_hat = 0.0;
    rr.residual = std::abs(l0);
    rr.converged = true;
    check_monotone(evals, rr);
    return rr;
  }

  if (cfg.mode == TargetMode::theoretical) {
    const auto [lo, hi] = theoretical_bracket(cfg.c, cfg.c_init, l0);
    const double outer = l0 > 0.0 ? hi : lo;
    if (outer == 0.0) {
      rr.fell_back = true;
      rr.flag = "theoretical bracket degenerates to {0} with L'(0) != 0";
      rr.residual = std::abs(l0);
      return rr;
    }
    double fo;
    try {
      fo = path_score(fold, u0, w, outer, cfg.path);
      ++rr.iterations;
      evals.push_back({outer, fo});
    } catch (const PositivityBreach&) {
      rr.fell_back = true;
      rr.flag = "positivity breach inside the theoretical bracket";
      rr.residual = std::abs(l0);
      return rr;
    }
    if ((fo > 0.0) == (l0 > 0.0)) {
      // The guaranteed-root event did not occur at this sample size.
      rr.fell_back = true;
      rr.flag = "no sign change in the theoretical bracket";
      rr.residual = std::abs(l0);
      rr.lo = lo;
      rr.hi = hi;
      check_monotone(evals, rr);
      return rr;
    }
    bisect(fold, u0, w, cfg, 0.0, l0, outer, fo, evals, rr);
    check_monotone(evals, rr);
    return rr;
  }

  // Practical mode: start from the scale bracket and expand geometrically.
  const auto [tm, tp] = score_bracket_endpoints(cfg.c_init, l0);
  const double cap = cfg.path.t_max * (1.0 - 1e-9);
  const double sgn = l0 > 0.0 ? 1.0 : -1.0;
  double outer = std::clamp(l0 > 0.0 ? tp : tm, -cap, cap);
  double inner = 0.0;
  double f_inner = l0;
  double f_outer = 0.0;
  bool have_bracket = false;

  for (int tries = 0; tries < 300; ++tries) {
    bool breached = false;
    try {
      f_outer = path_score(fold, u0, w, outer, cfg.path);
      ++rr.iterations;
      evals.push_back({outer, f_outer});
    } catch (const PositivityBreach&) {
      breached = true;
    }
    if (breached) {
      // Shrink toward the last good endpoint; the root, if any, is inside.
      const double next = 0.5 * (inner + outer);
      if (std::abs(next - inner) <= cfg.width_tol) {
        rr.fell_back = true;
        rr.flag = "positivity breach before any sign change";
        rr.residual = std::abs(l0);
        check_monotone(evals, rr);
        return rr;
      }
      outer = next;
      continue;
    }
    if (std::abs(f_outer) <= cfg.resid_tol) {
      rr.t_hat = outer;
      rr.residual = std::abs(f_outer);
      rr.converged = true;
      rr.lo = std::min(inner, outer);
      rr.hi = std::max(inner, outer);
      check_monotone(evals, rr);
      return rr;
    }
    if ((f_outer > 0.0) != (l0 > 0.0)) {
      have_bracket = true;
      break;
    }
    // Same sign: move outward.
    if (std::abs(outer) >= cap) {
      rr.fell_back = true;
      rr.flag = "no sign change of L' within |t| <= t_max";
      rr.residual = std::abs(f_outer);
      check_monotone(evals, rr);
      return rr;
    }
    inner = outer;
    f_inner = f_outer;
    outer = std::clamp(2.0 * outer, -cap, cap);
    if (outer == inner) outer = sgn * cap;
  }

  if (!have_bracket) {
    rr.fell_back = true;
    rr.flag = "bracket expansion did not terminate";
    rr.residual = std::abs(l0);
    check_monotone(evals, rr);
    return rr;
  }

  bisect(fold, u0, w, cfg, inner, f_inner, outer, f_outer, evals, rr);
  check_monotone(evals, rr);
  return rr;
}

FoldFit targeted_fold_fit(const Dataset& fold, const NuisanceValues& u0,
                          const WeightSpec& w, const TargetConfig& cfg) {
  FoldFit ff;
  ff.root = solve_root(fold, u0, w, cfg);

  if (ff.root.fell_back) {
    // Outside the good event: the convention is a zero fold estimate with
    // zero influence values, reported as such.
    ff.fitted = PathState::make(0.0, u0, w);
    ff.psi_k = 0.0;
    ff.d_full_values.assign(fold.size(), 0.0);
    ff.ok = false;
    return ff;
  }

  ff.fitted = integrate_path(u0, w, ff.root.t_hat, cfg.path);
  const EifContext ctx = EifContext::make(ff.fitted.values, w);
  ff.psi_k = ctx.psi;
  ff.d_full_values.resize(fold.size());
  for (std::size_t i = 0; i < fold.size(); ++i)
    ff.d_full_values[i] =
        d_full(ctx, i, fold.samples[i].a, fold.samples[i].y).total;
  ff.ok = true;
  return ff;
}

}  // namespace wate
