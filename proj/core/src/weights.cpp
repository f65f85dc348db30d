#include "wate/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "wate/errors.hpp"

namespace wate {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Standard normal CDF.
double norm_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

// Gaussian CDF with scale eps, and its derivatives in the argument.
double phi_eps(double u, double eps) {  // density
  const double z = u / eps;
  return kInvSqrt2Pi / eps * std::exp(-0.5 * z * z);
}
double phi_eps_d1(double u, double eps) { return -(u / (eps * eps)) * phi_eps(u, eps); }
double phi_eps_d2(double u, double eps) {
  const double e2 = eps * eps;
  return (u * u / (e2 * e2) - 1.0 / e2) * phi_eps(u, eps);
}

// Falling factorial p(p-1)...(p-k+1); empty product for k = 0.
double ffact(double p, int k) {
  double r = 1.0;
  for (int j = 0; j < k; ++j) r *= p - j;
  return r;
}

const int kBinom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};

// lambda for the beta-family weight t^p (1-t)^q via the general Leibniz rule.
double atb_eval(double p, double q, double t, int order) {
  double sum = 0.0;
  for (int j = 0; j <= order; ++j) {
    const double left = ffact(p, j);
    const double right = ffact(q, order - j);
    if (left == 0.0 || right == 0.0) continue;  // avoid 0 * inf at p-j < 0
    const double sgn = ((order - j) % 2 == 0) ? 1.0 : -1.0;
    sum += kBinom[order][j] * left * std::pow(t, p - j) * sgn * right *
           std::pow(1.0 - t, q - (order - j));
  }
  return sum;
}

// smooth_trim: lambda = G(t) H(t), G = Phi_eps(1-alpha-t), H = Phi_eps(t-alpha).
double smooth_trim_eval(double alpha, double eps, double t, int order) {
  const double u = 1.0 - alpha - t;  // G argument, du/dt = -1
  const double v = t - alpha;        // H argument, dv/dt = +1
  const double g[4] = {norm_cdf(u / eps), -phi_eps(u, eps), phi_eps_d1(u, eps),
                       -phi_eps_d2(u, eps)};
  const double h[4] = {norm_cdf(v / eps), phi_eps(v, eps), phi_eps_d1(v, eps),
                       phi_eps_d2(v, eps)};
  double sum = 0.0;
  for (int j = 0; j <= order; ++j)
    sum += kBinom[order][j] * g[j] * h[order - j];
  return sum;
}

void validate(const WeightSpec& w) {
  if (w.kind == WeightKind::atb && (w.nu1 < 1.0 || w.nu2 < 1.0))
    throw InputError("atb exponents must satisfy nu1, nu2 >= 1");
  if (w.kind == WeightKind::smooth_trim &&
      (!(w.alpha > 0.0) || !(w.alpha < 0.5) || !(w.eps > 0.0)))
    throw InputError("smoothtrim requires 0 < alpha < 1/2 and eps > 0");
}

}  // namespace

WeightSpec WeightSpec::atb(double nu1, double nu2) {
  WeightSpec w{WeightKind::atb};
  w.nu1 = nu1;
  w.nu2 = nu2;
  validate(w);
  return w;
}

WeightSpec WeightSpec::smooth_trim(double alpha, double eps) {
  WeightSpec w{WeightKind::smooth_trim};
  w.alpha = alpha;
  w.eps = eps;
  validate(w);
  return w;
}

double lambda_eval(const WeightSpec& w, double t, int order) {
  if (!(t > 0.0) || !(t < 1.0)) throw InputError("lambda_eval: t must lie in (0,1)");
  if (order < 0 || order > 3) throw InputError("lambda_eval: order must be 0..3");
  validate(w);
  switch (w.kind) {
    case WeightKind::ate:
      return order == 0 ? 1.0 : 0.0;
    case WeightKind::att:
      return order == 0 ? t : (order == 1 ? 1.0 : 0.0);
    case WeightKind::atc:
      return order == 0 ? 1.0 - t : (order == 1 ? -1.0 : 0.0);
    case WeightKind::ato:
      switch (order) {
        case 0: return t * (1.0 - t);
        case 1: return 1.0 - 2.0 * t;
        case 2: return -2.0;
        default: return 0.0;
      }
    case WeightKind::aten:
      switch (order) {
        case 0: return -t * std::log(t) - (1.0 - t) * std::log1p(-t);
        case 1: return std::log1p(-t) - std::log(t);
        case 2: return -1.0 / t - 1.0 / (1.0 - t);
        default: {
          const double s = 1.0 - t;
          return 1.0 / (t * t) - 1.0 / (s * s);
        }
      }
    case WeightKind::atb:
      return atb_eval(w.nu1 - 1.0, w.nu2 - 1.0, t, order);
    case WeightKind::smooth_trim:
      return smooth_trim_eval(w.alpha, w.eps, t, order);
  }
  throw InputError("lambda_eval: unknown weight kind");
}

LambdaBounds lambda_bounds(const WeightSpec& w, double eta) {
  if (!(eta > 0.0) || !(eta < 0.25))
    throw InputError("lambda_bounds: eta must lie in (0, 1/4)");
  validate(w);
  const double lo = eta, hi = 1.0 - eta;
  LambdaBounds b;
  b.eta = eta;

  switch (w.kind) {
    // Polynomial weights: endpoint/vertex analysis in closed form.
    case WeightKind::ate:
      b.lambda_min = b.lambda_max = 1.0;
      return b;
    case WeightKind::att:
      b.lambda_min = lo;
      b.lambda_max = hi;
      b.d1_max = 1.0;
      return b;
    case WeightKind::atc:
      b.lambda_min = lo;
      b.lambda_max = hi;
      b.d1_max = 1.0;
      return b;
    case WeightKind::ato:
      // t(1-t): vertex at 1/2 (inside the band since eta < 1/4), min at the
      // symmetric endpoints.
      b.lambda_min = lo * (1.0 - lo);
      b.lambda_max = 0.25;
      b.d1_max = 1.0 - 2.0 * eta;
      b.d2_max = 2.0;
      b.d3_max = 0.0;
      return b;
    default:
      break;
  }

  // Remaining weights: dense grid plus the solvable stationary points.
  constexpr int kGrid = 10000;
  std::vector<double> cand;
  cand.reserve(kGrid + 4);
  for (int i = 0; i <= kGrid; ++i)
    cand.push_back(lo + (hi - lo) * static_cast<double>(i) / kGrid);
  cand.push_back(0.5);  // symmetry point of aten / smooth_trim / atb(nu,nu)
  if (w.kind == WeightKind::atb) {
    const double p = w.nu1 - 1.0, q = w.nu2 - 1.0;
    if (p + q > 0.0) cand.push_back(std::clamp(p / (p + q), lo, hi));
  }

  double lmin = std::numeric_limits<double>::infinity(), lmax = 0.0;
  double d1 = 0.0, d2 = 0.0, d3 = 0.0;
  for (double t : cand) {
    if (t < lo || t > hi) continue;
    const double v = lambda_eval(w, t, 0);
    lmin = std::min(lmin, v);
    lmax = std::max(lmax, v);
    d1 = std::max(d1, std::abs(lambda_eval(w, t, 1)));
    d2 = std::max(d2, std::abs(lambda_eval(w, t, 2)));
    d3 = std::max(d3, std::abs(lambda_eval(w, t, 3)));
  }
  b.lambda_min = lmin;
  b.lambda_max = lmax;
  b.d1_max = d1;
  b.d2_max = d2;
  b.d3_max = d3;
  return b;
}

double frak_c(const LambdaBounds& b) {
  if (!(b.lambda_min > 0.0))
    throw InputError("frak_c: weight vanishes on the band (lambda_min <= 0)");
  const double denom = std::max({b.lambda_max, b.d1_max, b.d2_max, b.d3_max, b.eta});
  return std::min({b.lambda_min, b.eta, 1.0 / denom});
}

namespace {

// Split "name:p1,p2" into name and numeric params.
std::vector<double> parse_params(const std::string& text, std::size_t colon,
                                 std::size_t expected) {
  std::vector<double> out;
  std::size_t pos = colon + 1;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    const std::string tok =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InputError("weight parameter is not a number: '" + tok + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.size() != expected)
    throw InputError("weight '" + text.substr(0, colon) + "' takes " +
                     std::to_string(expected) + " parameters");
  return out;
}

}  // namespace

WeightSpec WeightSpec::parse(const std::string& text) {
  const std::size_t colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const bool has_params = colon != std::string::npos;

  auto no_params = [&](WeightSpec w) {
    if (has_params) throw InputError("weight '" + name + "' takes no parameters");
    return w;
  };

  if (name == "ate") return no_params(ate());
  if (name == "att") return no_params(att());
  if (name == "atc") return no_params(atc());
  if (name == "ato") return no_params(ato());
  if (name == "aten") return no_params(aten());
  if (name == "atb") {
    if (!has_params) throw InputError("atb requires parameters, e.g. atb:2.5,3.0");
    auto p = parse_params(text, colon, 2);
    return atb(p[0], p[1]);
  }
  if (name == "smoothtrim") {
    if (!has_params)
      throw InputError("smoothtrim requires parameters, e.g. smoothtrim:0.1,0.01");
    auto p = parse_params(text, colon, 2);
    return smooth_trim(p[0], p[1]);
  }
  if (name == "atm" || name == "attz" || name == "trate")
    throw InputError("weight '" + name +
                     "' is not smooth (lambda is not C^3 on (0,1)) and is not "
                     "supported; use smoothtrim:alpha,eps for trimming");
  throw InputError("unknown weight '" + name + "'");
}

std::string WeightSpec::name() const {
  auto num = [](double v) {
    std::string s = std::to_string(v);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  };
  switch (kind) {
    case WeightKind::ate: return "ate";
    case WeightKind::att: return "att";
    case WeightKind::atc: return "atc";
    case WeightKind::ato: return "ato";
    case WeightKind::aten: return "aten";
    case WeightKind::atb: return "atb:" + num(nu1) + "," + num(nu2);
    case WeightKind::smooth_trim: return "smoothtrim:" + num(alpha) + "," + num(eps);
  }
  return "?";
}

}  // namespace wate
