#include "wate/model.hpp"

#include <string>

#include "wate/errors.hpp"

namespace wate {

void Dataset::validate() const {
  if (samples.empty()) throw InputError("dataset is empty");
  if (d <= 0) throw InputError("dataset dimension must be positive");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    const std::string row = "row " + std::to_string(i + 1);
    if (static_cast<int>(s.x.size()) != d)
      throw InputError(row + ": expected " + std::to_string(d) + " covariates, got " +
                       std::to_string(s.x.size()));
    for (double xj : s.x)
      if (!(xj >= 0.0) || !(xj <= 1.0))
        throw InputError(row + ": covariate " + std::to_string(xj) +
                         " outside [0,1] (rescale or clean the input)");
    if (s.a != 0 && s.a != 1)
      throw InputError(row + ": treatment a = " + std::to_string(s.a) +
                       " is not binary");
    if (s.y != 0 && s.y != 1)
      throw InputError(row + ": outcome y = " + std::to_string(s.y) + " is not binary");
  }
}

Dataset Dataset::subset(const std::vector<std::size_t>& idx) const {
  Dataset out;
  out.d = d;
  out.samples.reserve(idx.size());
  for (std::size_t i : idx) out.samples.push_back(samples.at(i));
  return out;
}

void NuisanceValues::validate() const {
  if (e.empty()) throw InputError("nuisance values are empty");
  if (q1.size() != e.size() || q0.size() != e.size())
    throw InputError("nuisance value columns have unequal lengths");
  for (std::size_t i = 0; i < e.size(); ++i) {
    auto in01 = [](double v) { return v > 0.0 && v < 1.0; };
    if (!in01(q1[i]) || !in01(q0[i]) || !in01(e[i]))
      throw InputError("nuisance value outside (0,1) at support point " +
                       std::to_string(i));
  }
}

NuisanceValues evaluate(const NuisanceModel& u, const Dataset& at) {
  NuisanceValues v;
  const std::size_t m = at.size();
  v.q1.resize(m);
  v.q0.resize(m);
  v.e.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& x = at.samples[i].x;
    v.q1[i] = u.q1(x);
    v.q0[i] = u.q0(x);
    v.e[i] = u.e(x);
  }
  return v;
}

double conditional_pmf(const NuisanceValues& v, std::size_t i, int a, int y) {
  const double e = v.e[i];
  const double qa = a ? v.q1[i] : v.q0[i];
  const double pa = a ? e : 1.0 - e;
  return pa * (y ? qa : 1.0 - qa);
}

double omega(const NuisanceValues& v, const WeightSpec& w) {
  if (v.size() == 0) throw InputError("omega: empty nuisance values");
  double sum = 0.0;
  for (double ei : v.e) sum += lambda_eval(w, ei, 0);
  const double result = sum / static_cast<double>(v.size());
  constexpr double kFloor = 1e-12;
  if (!(result > kFloor))
    throw InputError("omega: mean weight " + std::to_string(result) +
                     " is at or below the numerical floor; the weight or the "
                     "positivity of e has failed");
  return result;
}

double psi(const NuisanceValues& v, const WeightSpec& w) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double li = lambda_eval(w, v.e[i], 0);
    num += li * (v.q1[i] - v.q0[i]);
    den += li;
  }
  if (!(den > 0.0)) throw InputError("psi: zero total weight");
  return num / den;
}

}  // namespace wate
