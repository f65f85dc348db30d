// Weight catalog: parse grammar, closed-form derivatives, band extrema, and
// the regularity constant. Derivative values are checked against both frozen
// hand computations and centered finite differences.

#include <doctest.h>

#include <cmath>
#include <vector>

#include "wate/errors.hpp"
#include "wate/weights.hpp"

using namespace wate;

namespace {

double fd1(const WeightSpec& w, double t, double h = 1e-6) {
  return (lambda_eval(w, t + h) - lambda_eval(w, t - h)) / (2 * h);
}

double fd2(const WeightSpec& w, double t, double h = 1e-5) {
  return (lambda_eval(w, t + h, 1) - lambda_eval(w, t - h, 1)) / (2 * h);
}

double fd3(const WeightSpec& w, double t, double h = 1e-4) {
  // Richardson-extrapolated centered difference of the analytic second
  // derivative: the plain stencil is too coarse for the kernels whose
  // higher derivatives scale like inverse powers of the smoothing width.
  const auto d = [&](double step) {
    return (lambda_eval(w, t + step, 2) - lambda_eval(w, t - step, 2)) /
           (2 * step);
  };
  return (4.0 * d(h / 2) - d(h)) / 3.0;
}

std::vector<WeightSpec> catalog() {
  return {WeightSpec::ate(),  WeightSpec::att(),
          WeightSpec::atc(),  WeightSpec::ato(),
          WeightSpec::aten(), WeightSpec::atb(2.5, 3.0),
          WeightSpec::smooth_trim(0.1, 0.01)};
}

}  // namespace

TEST_SUITE("weights") {

TEST_CASE("parse accepts the catalog grammar and name() inverts it") {
  for (const char* text : {"ate", "att", "atc", "ato", "aten", "atb:2.5,3",
                           "smoothtrim:0.1,0.01"}) {
    const WeightSpec w = WeightSpec::parse(text);
    const WeightSpec again = WeightSpec::parse(w.name());
    CHECK(again.kind == w.kind);
    CHECK(again.nu1 == doctest::Approx(w.nu1).epsilon(1e-15));
    CHECK(again.nu2 == doctest::Approx(w.nu2).epsilon(1e-15));
    CHECK(again.alpha == doctest::Approx(w.alpha).epsilon(1e-15));
    CHECK(again.eps == doctest::Approx(w.eps).epsilon(1e-15));
  }
}

TEST_CASE("parse rejects non-smooth weights with an explanatory message") {
  for (const char* text : {"atm", "attz", "trate"}) {
    CHECK_THROWS_AS(WeightSpec::parse(text), InputError);
    try {
      WeightSpec::parse(text);
    } catch (const InputError& err) {
      CHECK(std::string(err.what()).find("smooth") != std::string::npos);
    }
  }
}

TEST_CASE("parse rejects malformed specs") {
  CHECK_THROWS_AS(WeightSpec::parse(""), InputError);
  CHECK_THROWS_AS(WeightSpec::parse("nope"), InputError);
  CHECK_THROWS_AS(WeightSpec::parse("atb"), InputError);        // params required
  CHECK_THROWS_AS(WeightSpec::parse("atb:0.5,1"), InputError);  // nu >= 1
  CHECK_THROWS_AS(WeightSpec::parse("atb:1"), InputError);
  CHECK_THROWS_AS(WeightSpec::parse("smoothtrim:0.6,0.01"), InputError);
  CHECK_THROWS_AS(WeightSpec::parse("smoothtrim:0.1,0"), InputError);
  CHECK_THROWS_AS(WeightSpec::parse("ato:1"), InputError);  // no params allowed
}

TEST_CASE("lambda closed forms at frozen points") {
  CHECK(lambda_eval(WeightSpec::ate(), 0.3) == 1.0);
  CHECK(lambda_eval(WeightSpec::att(), 0.3) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(lambda_eval(WeightSpec::atc(), 0.3) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(lambda_eval(WeightSpec::ato(), 0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(lambda_eval(WeightSpec::ato(), 0.5, 1) == doctest::Approx(0.0));
  // Entropy weight: value ln 2 at 1/2, second derivative -4, third 0.
  CHECK(lambda_eval(WeightSpec::aten(), 0.5) ==
        doctest::Approx(0.6931471805599453).epsilon(1e-15));
  CHECK(lambda_eval(WeightSpec::aten(), 0.5, 1) == doctest::Approx(0.0));
  CHECK(lambda_eval(WeightSpec::aten(), 0.5, 2) == doctest::Approx(-4.0).epsilon(1e-14));
  CHECK(lambda_eval(WeightSpec::aten(), 0.5, 3) == doctest::Approx(0.0));
}

TEST_CASE("beta-family special cases collapse to the named weights") {
  struct Pair {
    WeightSpec beta, named;
  };
  const Pair pairs[] = {{WeightSpec::atb(1, 1), WeightSpec::ate()},
                        {WeightSpec::atb(2, 1), WeightSpec::att()},
                        {WeightSpec::atb(1, 2), WeightSpec::atc()},
                        {WeightSpec::atb(2, 2), WeightSpec::ato()}};
  for (const auto& [beta, named] : pairs)
    for (double t : {0.1, 0.37, 0.5, 0.82})
      for (int order = 0; order <= 3; ++order)
        CHECK(lambda_eval(beta, t, order) ==
              doctest::Approx(lambda_eval(named, t, order)).epsilon(1e-12));
}

TEST_CASE("analytic derivatives agree with centered differences") {
  for (const WeightSpec& w : catalog())
    for (double t : {0.15, 0.4, 0.5, 0.73, 0.9}) {
      CHECK(lambda_eval(w, t, 1) == doctest::Approx(fd1(w, t)).epsilon(1e-6));
      CHECK(lambda_eval(w, t, 2) == doctest::Approx(fd2(w, t)).epsilon(1e-5));
      CHECK(lambda_eval(w, t, 3) ==
            doctest::Approx(fd3(w, t)).epsilon(1e-4).scale(1.0));
    }
}

TEST_CASE("lambda_eval input validation") {
  CHECK_THROWS_AS(lambda_eval(WeightSpec::ato(), 0.0), InputError);
  CHECK_THROWS_AS(lambda_eval(WeightSpec::ato(), 1.0), InputError);
  CHECK_THROWS_AS(lambda_eval(WeightSpec::ato(), -0.3), InputError);
  CHECK_THROWS_AS(lambda_eval(WeightSpec::ato(), 0.5, 4), InputError);
  CHECK_THROWS_AS(lambda_eval(WeightSpec::ato(), 0.5, -1), InputError);
}

TEST_CASE("band extrema: frozen instances") {
  const LambdaBounds ate = lambda_bounds(WeightSpec::ate(), 0.1);
  CHECK(ate.lambda_min == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ate.lambda_max == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ate.d1_max == doctest::Approx(0.0));
  CHECK(ate.d2_max == doctest::Approx(0.0));
  CHECK(ate.d3_max == doctest::Approx(0.0));

  const LambdaBounds ato = lambda_bounds(WeightSpec::ato(), 0.1);
  CHECK(ato.lambda_min == doctest::Approx(0.09).epsilon(1e-14));
  CHECK(ato.lambda_max == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(ato.d1_max == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(ato.d2_max == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(ato.d3_max == doctest::Approx(0.0));

  const LambdaBounds att = lambda_bounds(WeightSpec::att(), 0.2);
  CHECK(att.lambda_min == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(att.lambda_max == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(att.d1_max == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(att.d2_max == doctest::Approx(0.0));
  CHECK(att.d3_max == doctest::Approx(0.0));
}

TEST_CASE("band extrema dominate sampled values") {
  for (const WeightSpec& w : catalog()) {
    const double eta = 0.08;
    const LambdaBounds b = lambda_bounds(w, eta);
    for (int i = 0; i <= 200; ++i) {
      const double t = eta + (1 - 2 * eta) * i / 200.0;
      const double slack = 1e-9 * (1.0 + b.lambda_max);
      CHECK(lambda_eval(w, t) >= b.lambda_min - slack);
      CHECK(lambda_eval(w, t) <= b.lambda_max + slack);
      CHECK(std::fabs(lambda_eval(w, t, 1)) <= b.d1_max + 1e-6 * (1 + b.d1_max));
      CHECK(std::fabs(lambda_eval(w, t, 2)) <= b.d2_max + 1e-4 * (1 + b.d2_max));
      CHECK(std::fabs(lambda_eval(w, t, 3)) <= b.d3_max + 1e-2 * (1 + b.d3_max));
    }
    CHECK(b.lambda_min > 0.0);  // every catalog weight is positive on the band
  }
}

TEST_CASE("regularity constant: frozen instances and validation") {
  CHECK(frak_c(lambda_bounds(WeightSpec::ate(), 0.1)) ==
        doctest::Approx(0.1).epsilon(1e-15));
  CHECK(frak_c(lambda_bounds(WeightSpec::ato(), 0.1)) ==
        doctest::Approx(0.09).epsilon(1e-14));
  CHECK(frak_c(lambda_bounds(WeightSpec::att(), 0.2)) ==
        doctest::Approx(0.2).epsilon(1e-14));

  LambdaBounds degenerate;
  degenerate.lambda_min = 0.0;
  degenerate.lambda_max = 1.0;
  degenerate.eta = 0.1;
  CHECK_THROWS_AS(frak_c(degenerate), InputError);
}

TEST_CASE("lambda_bounds validates the band parameter") {
  CHECK_THROWS_AS(lambda_bounds(WeightSpec::ato(), 0.0), InputError);
  CHECK_THROWS_AS(lambda_bounds(WeightSpec::ato(), 0.25), InputError);
  CHECK_THROWS_AS(lambda_bounds(WeightSpec::ato(), -0.1), InputError);
}

}  // TEST_SUITE
