// Data model: dataset validation, the conditional law of (A,Y) given X, and
// the functionals Omega and psi under an empirical covariate marginal.

#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "wate/errors.hpp"
#include "wate/model.hpp"
#include "wate/rng.hpp"

using namespace wate;

namespace {

Dataset tiny_dataset() {
  Dataset data;
  data.d = 1;
  data.samples = {{{0.1}, 1, 1}, {{0.5}, 0, 1}, {{0.9}, 1, 0}};
  return data;
}

NuisanceValues random_values(std::size_t m, std::uint64_t seed,
                             double lo = 0.05, double hi = 0.95) {
  Rng rng(seed);
  NuisanceValues v;
  for (std::size_t i = 0; i < m; ++i) {
    v.q1.push_back(lo + (hi - lo) * rng.uniform());
    v.q0.push_back(lo + (hi - lo) * rng.uniform());
    v.e.push_back(lo + (hi - lo) * rng.uniform());
  }
  return v;
}

struct ConstantModel : NuisanceModel {
  double vq1, vq0, ve;
  ConstantModel(double a, double b, double c) : vq1(a), vq0(b), ve(c) {}
  double q1(const std::vector<double>&) const override { return vq1; }
  double q0(const std::vector<double>&) const override { return vq0; }
  double e(const std::vector<double>&) const override { return ve; }
};

}  // namespace

TEST_SUITE("model") {

TEST_CASE("dataset validation points at the offending row") {
  Dataset data = tiny_dataset();
  CHECK_NOTHROW(data.validate());

  data.samples[1].a = 2;
  try {
    data.validate();
    CHECK(false);
  } catch (const InputError& err) {
    const std::string msg = err.what();
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find("not binary") != std::string::npos);
  }

  data = tiny_dataset();
  data.samples[2].x[0] = 1.3;
  try {
    data.validate();
    CHECK(false);
  } catch (const InputError& err) {
    CHECK(std::string(err.what()).find("row 3") != std::string::npos);
  }

  data = tiny_dataset();
  data.samples[0].x = {0.1, 0.2};  // dimension mismatch
  CHECK_THROWS_AS(data.validate(), InputError);

  Dataset empty;
  empty.d = 1;
  CHECK_THROWS_AS(empty.validate(), InputError);
}

TEST_CASE("subset keeps the requested order") {
  const Dataset data = tiny_dataset();
  const Dataset sub = data.subset({2, 0});
  REQUIRE(sub.size() == 2);
  CHECK(sub.samples[0].x[0] == 0.9);
  CHECK(sub.samples[1].x[0] == 0.1);
  CHECK(sub.d == 1);
}

TEST_CASE("nuisance values validation") {
  NuisanceValues v = random_values(4, 1);
  CHECK_NOTHROW(v.validate());
  v.q0.pop_back();
  CHECK_THROWS_AS(v.validate(), InputError);

  v = random_values(4, 1);
  v.e[2] = 1.0;
  CHECK_THROWS_AS(v.validate(), InputError);
  v.e[2] = 0.0;
  CHECK_THROWS_AS(v.validate(), InputError);

  NuisanceValues empty;
  CHECK_THROWS_AS(empty.validate(), InputError);
}

TEST_CASE("evaluate maps a model over the dataset covariates") {
  const Dataset data = tiny_dataset();
  const ConstantModel model(0.8, 0.4, 0.5);
  const NuisanceValues v = evaluate(model, data);
  REQUIRE(v.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(v.q1[i] == 0.8);
    CHECK(v.q0[i] == 0.4);
    CHECK(v.e[i] == 0.5);
  }
}

TEST_CASE("conditional pmf: frozen products and normalization") {
  NuisanceValues v;
  v.q1 = {0.8};
  v.q0 = {0.4};
  v.e = {0.5};
  CHECK(conditional_pmf(v, 0, 1, 1) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(conditional_pmf(v, 0, 0, 0) == doctest::Approx(0.3).epsilon(1e-15));

  const NuisanceValues r = random_values(20, 7);
  for (std::size_t i = 0; i < r.size(); ++i) {
    double total = 0.0;
    for (int a = 0; a <= 1; ++a)
      for (int y = 0; y <= 1; ++y) {
        const double p = conditional_pmf(r, i, a, y);
        CHECK(p > 0.0);
        total += p;
      }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("omega: frozen instances") {
  NuisanceValues v = random_values(10, 3);
  CHECK(omega(v, WeightSpec::ate()) == doctest::Approx(1.0).epsilon(1e-15));

  NuisanceValues two;
  two.q1 = {0.8, 0.6};
  two.q0 = {0.4, 0.3};
  two.e = {0.5, 0.25};
  CHECK(omega(two, WeightSpec::ato()) == doctest::Approx(0.21875).epsilon(1e-15));

  NuisanceValues att_inst;
  att_inst.q1 = {0.5, 0.5};
  att_inst.q0 = {0.5, 0.5};
  att_inst.e = {0.3, 0.7};
  CHECK(omega(att_inst, WeightSpec::att()) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("omega: numerical floor signals a dead weight") {
  NuisanceValues v;
  v.q1 = {0.5};
  v.q0 = {0.5};
  v.e = {1e-300};  // ato weight ~ 1e-300, below the floor
  CHECK_THROWS_AS(omega(v, WeightSpec::ato()), InputError);
  NuisanceValues empty;
  CHECK_THROWS_AS(omega(empty, WeightSpec::ate()), InputError);
}

TEST_CASE("psi: frozen two-point overlap-weight instance") {
  NuisanceValues two;
  two.q1 = {0.8, 0.6};
  two.q0 = {0.4, 0.3};
  two.e = {0.5, 0.25};
  CHECK(psi(two, WeightSpec::ato()) ==
        doctest::Approx(5.0 / 14.0).epsilon(1e-15));
}

TEST_CASE("psi: constant blip is reproduced under every weight") {
  NuisanceValues v = random_values(15, 11);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v.q0[i] + 0.4 > 0.99) v.q0[i] = 0.3;
    v.q1[i] = v.q0[i] + 0.4;
  }
  for (const WeightSpec& w :
       {WeightSpec::ate(), WeightSpec::att(), WeightSpec::ato(),
        WeightSpec::aten(), WeightSpec::atb(2.5, 3.0)})
    CHECK(psi(v, w) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("psi: unweighted mean of blips under the constant weight") {
  NuisanceValues v;
  v.q1 = {0.999, 0.001};  // blips (1, 0) approached inside (0,1)
  v.q0 = {0.001, 0.001};
  v.e = {0.3, 0.8};
  // exact version of the (1,0)-blip example, with attainable entries
  CHECK(psi(v, WeightSpec::ate()) ==
        doctest::Approx((0.998 + 0.0) / 2).epsilon(1e-15));
}

TEST_CASE("psi is invariant under positive rescaling of the weight") {
  // atb(2,2) is exactly t(1-t); atb exponents shifted by a common factor
  // change lambda by a positive multiple at fixed e only through the ratio
  // structure, so compare the overlap weight against its beta-family twin.
  const NuisanceValues v = random_values(25, 13);
  CHECK(psi(v, WeightSpec::ato()) ==
        doctest::Approx(psi(v, WeightSpec::atb(2, 2))).epsilon(1e-12));
}

TEST_CASE("psi magnitude never exceeds the largest blip") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
    const NuisanceValues v = random_values(30, seed);
    double max_blip = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
      max_blip = std::max(max_blip, std::fabs(v.q1[i] - v.q0[i]));
    for (const WeightSpec& w :
         {WeightSpec::ate(), WeightSpec::ato(), WeightSpec::aten()})
      CHECK(std::fabs(psi(v, w)) <= max_blip + 1e-15);
  }
}

}  // TEST_SUITE
