#include <cmath>

#include "doctest.h"
#include "pxsys/error.hpp"
#include "pxsys/grid.hpp"
#include "pxsys/nonlinearity.hpp"

using namespace pxsys;

namespace {

GridPtr square(int n = 9) { return build_grid_2d({0, 1}, {0, 1}, n, n); }

ExponentField cst(const GridPtr& g, double v) { return ExponentField(g, ConstantExponent{v}); }

// Golden-section minimization of a unimodal function on [lo, hi] in log s.
double golden_min(double (*fn)(double), double lo, double hi) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(lo), b = std::log(hi);
  for (int k = 0; k < 200; ++k) {
    const double c = b - r * (b - a), d = a + r * (b - a);
    if (fn(std::exp(c)) < fn(std::exp(d)))
      b = d;
    else
      a = c;
  }
  return fn(std::exp(0.5 * (a + b)));
}

double sum_catalog(double s) { return std::pow(s, 0.5) + std::pow(s, -0.3); }

struct Catalog {
  GridPtr g = square();
  ExponentField p = cst(g, 1.8);
  NonlinearitySpec f = NonlinearitySpec::product(1.0, cst(g, -0.3), cst(g, 0.5));
  NonlinearitySpec gg = NonlinearitySpec::product(1.0, cst(g, 0.5), cst(g, -0.3));
};

}  // namespace

TEST_CASE("evaluate catalog forms") {
  auto g = square();
  auto f = NonlinearitySpec::product(1.0, cst(g, -0.3), cst(g, 0.5));
  CHECK(evaluate(f, 1.0, 1.0, std::size_t{0}) == 4.0);
  CHECK(evaluate(f, 1e-8, 1.0, std::size_t{0}) == doctest::Approx(2.0 * (1.0 + std::pow(1e-8, -0.3))));
  CHECK(evaluate(f, 0.1, 1.0, std::size_t{0}) > evaluate(f, 0.2, 1.0, std::size_t{0}));
  auto s = NonlinearitySpec::sum(NonlinearitySpec::Argument::Second, cst(g, 0.5), cst(g, -0.3));
  CHECK(evaluate(s, 7.0, 1.0, std::size_t{0}) == 2.0);
  CHECK_THROWS_AS(evaluate(f, 0.0, 1.0, std::size_t{0}), DomainError);
  CHECK_THROWS_AS(evaluate(f, 1.0, -1.0, std::size_t{0}), DomainError);
  CHECK_THROWS_AS(NonlinearitySpec::product(0.0, cst(g, -0.3), cst(g, 0.5)), ConfigError);
}

TEST_CASE("sigma for product and sum forms") {
  Catalog c;
  auto rep = infimum_sigma(c.f, c.gg);
  CHECK(rep.sigma == 1.0);
  CHECK(rep.grid_f >= rep.inf_f);
  CHECK(rep.grid_f == doctest::Approx(1.0).epsilon(0.02));

  auto f2 = NonlinearitySpec::product(2.0, cst(c.g, -0.3), cst(c.g, 0.5));
  CHECK(infimum(f2) == 2.0);
  CHECK(infimum_sigma(f2, c.gg).sigma == 1.0);

  auto s = NonlinearitySpec::sum(NonlinearitySpec::Argument::Second, cst(c.g, 0.5), cst(c.g, -0.3));
  const double oracle = golden_min(sum_catalog, 1e-3, 1e3);
  CHECK(infimum(s) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(oracle == doctest::Approx(1.9378192408783845).epsilon(1e-12));
  CHECK(grid_search_minimum(s) >= infimum(s));

  auto bad = NonlinearitySpec::sum(NonlinearitySpec::Argument::Second, cst(c.g, 0.5), cst(c.g, 0.3));
  CHECK_THROWS_AS(infimum_sigma(bad, c.gg), HypothesisError);
}

TEST_CASE("validate_cooperative catalog and failures") {
  Catalog c;
  auto rep = validate_cooperative(c.f, c.gg, c.p, c.p, 2);
  CHECK(rep.passed());
  // p* = 18, coupling bound 18/18 * 17 = 17
  CHECK(rep.find("(c1*) beta1")->margin == doctest::Approx(17.0 - 0.5));
  REQUIRE(rep.sigma.has_value());
  CHECK(*rep.sigma == 1.0);

  auto f_bad = NonlinearitySpec::product(1.0, cst(c.g, -0.6), cst(c.g, 0.5));
  auto r1 = validate_cooperative(f_bad, c.gg, c.p, c.p, 2);
  CHECK_FALSE(r1.passed());
  CHECK(r1.first_failure() == "(c1) alpha1");
  CHECK(r1.find("(c1) alpha1")->node.has_value());
  CHECK(*r1.find("(c1) alpha1")->value == -0.6);

  auto f_big = NonlinearitySpec::product(1.0, cst(c.g, -0.3), cst(c.g, 20.0));
  auto r2 = validate_cooperative(f_big, c.gg, c.p, c.p, 2);
  CHECK_FALSE(r2.find("(c1*) beta1")->passed);
  CHECK(r2.find("(c1*) beta1")->margin == doctest::Approx(-3.0));

  auto p_bad = cst(c.g, 2.1);
  CHECK_FALSE(validate_cooperative(c.f, c.gg, p_bad, c.p, 2).find("exponent range p")->passed);
}

TEST_CASE("validate_competitive catalog and failures") {
  auto g = square();
  auto p = cst(g, 1.8);
  using A = NonlinearitySpec::Argument;
  auto f = NonlinearitySpec::sum(A::Second, cst(g, 0.5), cst(g, -0.3));
  auto gg = NonlinearitySpec::sum(A::First, cst(g, -0.3), cst(g, 0.5));
  auto rep = validate_competitive(f, gg, p, p, 2);
  CHECK(rep.passed());
  CHECK(rep.find("(c2)")->margin == doctest::Approx(0.2));

  auto f_hi = NonlinearitySpec::sum(A::Second, cst(g, 0.9), cst(g, -0.3));
  CHECK_FALSE(validate_competitive(f_hi, gg, p, p, 2).find("(c2)")->passed);
  auto f_lo = NonlinearitySpec::sum(A::Second, cst(g, 0.5), cst(g, -0.6));
  CHECK_FALSE(validate_competitive(f_lo, gg, p, p, 2).find("(c2)")->passed);

  // Sum in the singular argument with a leading exponent above p- - 1.
  auto f_sing = NonlinearitySpec::sum(A::First, cst(g, 0.9), cst(g, 1.2));
  CHECK_FALSE(validate_competitive(f_sing, gg, p, p, 2).find("H(f,g)2 f")->passed);
}

TEST_CASE("numeric blow-up helper") {
  CHECK(ratio_blows_up_numerically([](double s) { return std::pow(s, -0.3); }, 0.8));
  CHECK_FALSE(ratio_blows_up_numerically([](double s) { return std::pow(s, 0.9); }, 0.8));
  CHECK(ratio_blows_up_numerically([](double) { return 2.0; }, 0.8) == false);  // 10^0.8 < 10 per decade
  CHECK(ratio_blows_up_numerically([](double) { return 2.0; }, 1.5));
}

TEST_CASE("truncate clamps, is idempotent and monotone") {
  std::vector<double> floor{0.0, 0.2, 0.5, 0.0};
  auto out = truncate_values({5, 0, 1, 2}, floor, 3.0);
  CHECK(out == std::vector<double>{3.0, 0.2, 1.0, 2.0});
  CHECK(truncate_values(out, floor, 3.0) == out);
  auto lo = truncate_values({0.1, 0.1, 0.6, 2.5}, floor, 3.0);
  auto hi = truncate_values({0.2, 0.3, 0.9, 4.0}, floor, 3.0);
  for (std::size_t i = 0; i < lo.size(); ++i) CHECK(lo[i] <= hi[i]);
  CHECK_THROWS_AS(truncate_values({1, 1, 1, 1}, floor, 0.5), ConfigError);
}
