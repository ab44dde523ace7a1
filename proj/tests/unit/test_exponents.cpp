#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pxsys/error.hpp"
#include "pxsys/exponents.hpp"

using namespace pxsys;

namespace {
GridPtr square(int n = 9) { return build_grid_2d({0, 1}, {0, 1}, n, n); }
}  // namespace

TEST_CASE("field_extrema of constant, sinusoidal and affine fields") {
  const auto g = square(33);
  const auto c = field_extrema(ExponentField(g, ConstantExponent{1.8}));
  CHECK(c.min == 1.8);
  CHECK(c.max == 1.8);

  const auto s = field_extrema(ExponentField(g, SinusoidalExponent{1.6, 0.1, std::numbers::pi, 0.0}));
  REQUIRE(s.analytic_min);
  CHECK(*s.analytic_min == doctest::Approx(1.6));
  CHECK(*s.analytic_max == doctest::Approx(1.7));
  CHECK(s.max == doctest::Approx(1.7));

  const auto a = field_extrema(ExponentField(g, AffineExponent{1.5, 0.2, 0.0}));
  CHECK(a.min == doctest::Approx(1.5));
  CHECK(a.max == doctest::Approx(1.7));
}

TEST_CASE("sampled extrema never leave the analytic range") {
  const auto g = square(17);
  const ExponentField p(g, SinusoidalExponent{1.5, 0.3, 2.3, -1.7});
  CHECK(p.min() >= p.inf() - 1e-15);
  CHECK(p.max() <= p.sup() + 1e-15);
  for (std::size_t c = 0; c < g->cell_count(); ++c) {
    CHECK(p.at_cell(c) >= p.inf() - 1e-15);
    CHECK(p.at_cell(c) <= p.sup() + 1e-15);
  }
}

TEST_CASE("sobolev_conjugate") {
  const auto g = square();
  CHECK(sobolev_conjugate(ExponentField(g, ConstantExponent{1.5}), 2).at_node(7) == doctest::Approx(6.0));
  CHECK(sobolev_conjugate(ExponentField(g, ConstantExponent{1.8}), 2).sup() == doctest::Approx(18.0));
  CHECK_THROWS_AS(sobolev_conjugate(ExponentField(g, ConstantExponent{2.0}), 2), HypothesisError);
  CHECK(sobolev_conjugate(1.2, 3) == doctest::Approx(3.6 / 1.8));
}

TEST_CASE("log_holder_check") {
  const auto g = square(33);
  const auto c = log_holder_check(ExponentField(g, ConstantExponent{1.7}), 0.1);
  CHECK(c.passed);
  CHECK(c.smallest_constant == 0.0);

  CHECK(log_holder_check(ExponentField(g, SinusoidalExponent{1.6, 0.1, std::numbers::pi, 0.0}), 10.0).passed);

  std::vector<double> step(g->node_count());
  for (std::size_t n = 0; n < step.size(); ++n) step[n] = g->node_coords(n)[0] < 0.5 ? 1.5 : 1.9;
  const auto s = log_holder_check(ExponentField::from_samples(g, step), 0.5);
  CHECK_FALSE(s.passed);
  // Neighbours across the jump: 0.4 * ln(32).
  CHECK(s.smallest_constant == doctest::Approx(0.4 * std::log(32.0)));
}

TEST_CASE("scaled and mapped fields") {
  const auto g = square();
  const ExponentField p(g, AffineExponent{1.2, 0.3, 0.1});
  const auto q = p.scaled(4.0);
  CHECK(q.inf() == doctest::Approx(4.8));
  CHECK(q.sup() == doctest::Approx(4 * 1.6));
  CHECK(q.at_node(5) == doctest::Approx(4 * p.at_node(5)));
  CHECK(describe(AffineExponent{1.5, 0.25, 0}) == "affine 1.5 0.25 0");
}
