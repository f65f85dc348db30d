#include "wate/path.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wate/errors.hpp"

namespace wate {

PathState PathState::make(double t, NuisanceValues v, const WeightSpec& w) {
  PathState s;
  s.t = t;
  s.omega_t = omega(v, w);
  s.psi_t = psi(v, w);
  s.values = std::move(v);
  return s;
}

PathConfig PathConfig::theoretical(double t1) {
  PathConfig cfg;
  cfg.h = t1 / 512.0;
  cfg.t_max = 0.9 * t1;
  cfg.fd_step = 1e-5 * t1;
  return cfg;
}

PathConfig PathConfig::practical(double t1) {
  PathConfig cfg;
  cfg.h = 1.0 / 512.0;
  cfg.t_max = 50.0;
  cfg.fd_step = 1e-5 * t1;
  return cfg;
}

namespace {

// Flat layout helpers: [q1(0..m-1), q0(0..m-1), e(0..m-1)].
std::vector<double> pack(const NuisanceValues& v) {
  std::vector<double> u;
  u.reserve(3 * v.size());
  u.insert(u.end(), v.q1.begin(), v.q1.end());
  u.insert(u.end(), v.q0.begin(), v.q0.end());
  u.insert(u.end(), v.e.begin(), v.e.end());
  return u;
}

NuisanceValues unpack(const std::vector<double>& u, std::size_t m) {
  NuisanceValues v;
  v.q1.assign(u.begin(), u.begin() + static_cast<long>(m));
  v.q0.assign(u.begin() + static_cast<long>(m), u.begin() + static_cast<long>(2 * m));
  v.e.assign(u.begin() + static_cast<long>(2 * m), u.end());
  return v;
}

void check_interior(const std::vector<double>& u, double t) {
  for (double v : u)
    if (!(v > 0.0) || !(v < 1.0))
      throw PositivityBreach(
          "path state left (0,1) near t = " + std::to_string(t), t);
}

// Field on the flat layout; Omega and psi are recomputed here, which is what
// couples the 3m scalar equations.
void field_flat(const std::vector<double>& u, std::size_t m, const WeightSpec& w,
                double t, std::vector<double>& out) {
  check_interior(u, t);
  double om = 0.0, num = 0.0;
  std::vector<double> lam(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double e = u[2 * m + i];
    lam[i] = lambda_eval(w, e, 0);
    om += lam[i];
    num += lam[i] * (u[i] - u[m + i]);
  }
  om /= static_cast<double>(m);
  if (!(om > 0.0)) throw InputError("path field: Omega <= 0");
  const double ps = num / (om * static_cast<double>(m));

  out.resize(3 * m);
  for (std::size_t i = 0; i < m; ++i) {
    const double q1 = u[i], q0 = u[m + i], e = u[2 * m + i];
    const double dlam = lambda_eval(w, e, 1);
    const double tau = q1 - q0;
    out[i] = q1 * (1.0 - q1) * lam[i] / (om * e);
    out[m + i] = -q0 * (1.0 - q0) * lam[i] / (om * (1.0 - e));
    out[2 * m + i] = e * (1.0 - e) * dlam * (tau - ps) / om;
  }
}

// One classical RK4 step of size dt starting at (t, u).
void rk4_step(std::vector<double>& u, std::size_t m, const WeightSpec& w, double t,
              double dt, std::vector<double>& k1, std::vector<double>& k2,
              std::vector<double>& k3, std::vector<double>& k4,
              std::vector<double>& tmp) {
  const std::size_t n = u.size();
  field_flat(u, m, w, t, k1);
  tmp.resize(n);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt * k1[i];
  field_flat(tmp, m, w, t + 0.5 * dt, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt * k2[i];
  field_flat(tmp, m, w, t + 0.5 * dt, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + dt * k3[i];
  field_flat(tmp, m, w, t + dt, k4);
  for (std::size_t i = 0; i < n; ++i)
    u[i] += dt * (1.0 / 6.0) * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
}

long step_count(double t, double h) {
  return std::max<long>(16, static_cast<long>(std::ceil(std::abs(t) / h)));
}

std::vector<double> integrate_flat(const NuisanceValues& u0, const WeightSpec& w,
                                   double t, long n_steps) {
  std::vector<double> u = pack(u0);
  if (t == 0.0) return u;
  const std::size_t m = u0.size();
  const double dt = t / static_cast<double>(n_steps);
  std::vector<double> k1, k2, k3, k4, tmp;
  for (long s = 0; s < n_steps; ++s) {
    rk4_step(u, m, w, dt * static_cast<double>(s), dt, k1, k2, k3, k4, tmp);
    check_interior(u, dt * static_cast<double>(s + 1));
  }
  return u;
}

}  // namespace

std::vector<double> vector_field(const PathState& s, const WeightSpec& w) {
  s.values.validate();
  if (!(s.omega_t > 0.0)) throw InputError("vector_field: Omega <= 0");
  std::vector<double> out;
  field_flat(pack(s.values), s.values.size(), w, s.t, out);
  return out;
}

PathState integrate_path(const NuisanceValues& u0, const WeightSpec& w, double t,
                         const PathConfig& cfg) {
  u0.validate();
  if (!(std::abs(t) < cfg.t_max))
    throw InputError("integrate_path: |t| = " + std::to_string(std::abs(t)) +
                     " exceeds the guard t_max = " + std::to_string(cfg.t_max));
  if (t == 0.0) return PathState::make(0.0, u0, w);
  const std::vector<double> u =
      integrate_flat(u0, w, t, step_count(t, cfg.h));
  return PathState::make(t, unpack(u, u0.size()), w);
}

NuisanceValues PicardResult::values_at(std::size_t idx, std::size_t m) const {
  return unpack(states.at(idx), m);
}

PicardResult picard_solve(const NuisanceValues& u0, const WeightSpec& w, double T,
                          const PathConfig& cfg) {
  u0.validate();
  if (!(T > 0.0)) throw InputError("picard_solve: T must be positive");
  const std::size_t m = u0.size();
  const int G = cfg.picard_grid;
  const std::size_t n_times = static_cast<std::size_t>(2 * G + 1);

  PicardResult res;
  res.times.resize(n_times);
  for (int j = -G; j <= G; ++j)
    res.times[static_cast<std::size_t>(j + G)] = T * static_cast<double>(j) / G;

  // Start from the constant path U^0(t) = u0.
  const std::vector<double> base = pack(u0);
  res.states.assign(n_times, base);

  const double dt = T / G;
  std::vector<std::vector<double>> fields(n_times);
  std::vector<std::vector<double>> next(n_times);

  for (int sweep = 0; sweep < cfg.picard_max_sweeps; ++sweep) {
    for (std::size_t j = 0; j < n_times; ++j)
      field_flat(res.states[j], m, w, res.times[j], fields[j]);

    // Cumulative trapezoid outward from t = 0 (grid index G).
    const std::size_t mid = static_cast<std::size_t>(G);
    next[mid] = base;
    for (std::size_t j = mid; j + 1 < n_times; ++j) {      // forward side
      next[j + 1] = next[j];
      for (std::size_t i = 0; i < 3 * m; ++i)
        next[j + 1][i] += 0.5 * dt * (fields[j][i] + fields[j + 1][i]);
    }
    for (std::size_t j = mid; j > 0; --j) {                // backward side
      next[j - 1] = next[j];
      for (std::size_t i = 0; i < 3 * m; ++i)
        next[j - 1][i] -= 0.5 * dt * (fields[j][i] + fields[j - 1][i]);
    }

    double dist = 0.0;
    for (std::size_t j = 0; j < n_times; ++j)
      for (std::size_t i = 0; i < 3 * m; ++i)
        dist = std::max(dist, std::abs(next[j][i] - res.states[j][i]));
    res.states.swap(next);
    res.sweeps = sweep + 1;
    res.sweep_distances.push_back(dist);

    if (dist <= cfg.picard_tol) {
      res.converged = true;
      break;
    }
    if (res.sweep_distances.size() >= 2) {
      const double prev = res.sweep_distances[res.sweep_distances.size() - 2];
      if (dist > prev && dist > 10.0 * cfg.picard_tol)
        throw NonContractionError(
            "picard_solve: successive sweeps moved apart (" +
            std::to_string(prev) + " -> " + std::to_string(dist) +
            "); T is outside the contraction regime");
    }
  }
  return res;
}

namespace {

double fold_loglik(const Dataset& fold, const NuisanceValues& v) {
  double sum = 0.0;
  for (std::size_t i = 0; i < fold.size(); ++i) {
    const double p = conditional_pmf(v, i, fold.samples[i].a, fold.samples[i].y);
    if (!(p > 0.0))
      throw PositivityBreach("loglik_path: nonpositive conditional probability");
    sum += std::log(p);
  }
  return sum / static_cast<double>(fold.size());
}

double fold_score(const Dataset& fold, const NuisanceValues& v, const WeightSpec& w) {
  const EifContext ctx = EifContext::make(v, w);
  double sum = 0.0;
  for (std::size_t i = 0; i < fold.size(); ++i)
    sum += d_restricted(ctx, i, fold.samples[i].a, fold.samples[i].y);
  return sum / static_cast<double>(fold.size());
}

}  // namespace

double path_score(const Dataset& fold, const NuisanceValues& u0, const WeightSpec& w,
                  double t, const PathConfig& cfg) {
  if (fold.size() != u0.size())
    throw InputError("path_score: fold and support sizes differ");
  if (t == 0.0) return fold_score(fold, u0, w);
  const PathState s = integrate_path(u0, w, t, cfg);
  return fold_score(fold, s.values, w);
}

LoglikDerivs loglik_path(const Dataset& fold, const NuisanceValues& u0,
                         const WeightSpec& w, double t, const PathConfig& cfg) {
  if (fold.size() != u0.size())
    throw InputError("loglik_path: fold and support sizes differ");
  u0.validate();
  const std::size_t m = u0.size();
  const double d = cfg.fd_step;

  // One shared step count for t and t +- d: the RK4 discretization error is
  // then a smooth function of the step and cancels in the centered
  // difference.
  const long n = step_count(std::abs(t) + d, cfg.h);
  auto values_at = [&](double tt) {
    if (tt == 0.0) return u0;
    return unpack(integrate_flat(u0, w, tt, n), m);
  };

  LoglikDerivs out;
  const NuisanceValues vt = values_at(t);
  out.L = fold_loglik(fold, vt);
  out.dL = fold_score(fold, vt, w);
  const double sp = fold_score(fold, values_at(t + d), w);
  const double sm = fold_score(fold, values_at(t - d), w);
  out.d2L = (sp - sm) / (2.0 * d);
  return out;
}

}  // namespace wate
