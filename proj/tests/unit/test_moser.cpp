#include <cmath>

#include "doctest.h"
#include "pxsys/moser.hpp"

using namespace pxsys;

namespace {
ExponentField cst(const GridPtr& g, double v) { return ExponentField(g, ConstantExponent{v}); }
}  // namespace

TEST_CASE("k sequences at constant exponent") {
  const auto g = build_grid_2d({0, 1}, {0, 1}, 5, 5);
  const auto c = k_sequences(cst(g, 1.5), 2, 3);
  CHECK(c.k_minus[1] == doctest::Approx(3));
  CHECK(c.k_minus[2] + 1 == doctest::Approx(16));
  CHECK(c.k_minus[3] + 1 == doctest::Approx(64));
  for (double k : c.k_nodes[2]) CHECK(k == doctest::Approx(15));
  CHECK(k_sequences(cst(g, 1.8), 2, 1).k_minus[1] == doctest::Approx(9));
}

TEST_CASE("series limit and partial sums") {
  const auto a = series_limit(1.5, 2);
  CHECK(a.p_minus_star == doctest::Approx(6));
  CHECK(a.limit == doctest::Approx(4.0 / 3));
  CHECK(std::abs(a.partial_sums.back() - a.limit) <= 1e-12);
  const auto b = series_limit(1.8, 2);
  CHECK(b.limit == doctest::Approx(10.0 / 9));
  for (std::size_t i = 1; i < b.partial_sums.size(); ++i)
    CHECK(b.limit - b.partial_sums[i] <= (b.limit - b.partial_sums[i - 1]) * 0.1 + 1e-15);

  const auto g = build_grid_1d({0, 1}, 5);
  const auto c = k_sequences(cst(g, 1.5), 2, 40);
  CHECK(std::abs(chain_partial_sums(c.k_minus).back() - a.limit) <= 1e-12);
}

TEST_CASE("norm chain of a function below one vanishes") {
  const auto g = build_grid_2d({0, 1}, {0, 1}, 9, 9);
  const auto u = GridFunction::sample(g, [](const auto& x) { return 0.9 * x[0]; }, false);
  auto c = k_sequences(cst(g, 1.5), 2, 6);
  norm_chain(u, c);
  for (double e : c.norms) CHECK(e == 0.0);
  CHECK(c.monotone);
  CHECK(fit_chain(c, 0.5, 0.5).trivial);
  CHECK(fit_chain(c, 0.5, 0.5).all_hold);
}

TEST_CASE("norm chain of a constant tends to the sup") {
  const auto g = build_grid_1d({0, 1}, 11);
  const GridFunction u(g, std::vector<double>(g->node_count(), 2.0), false);
  auto c = k_sequences(cst(g, 1.5), 2, 6);
  norm_chain(u, c);
  for (double e : c.norms) CHECK(e == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(c.sup_excess == 2.0 - 1.0);
  CHECK(c.final_ok);
}

TEST_CASE("structural bound exponent and branch selection") {
  const auto g = build_grid_2d({0, 1}, {0, 1}, 9, 9);
  const auto u = GridFunction::sample(g, [](const auto& x) { return 3 * x[0] * x[1]; }, false);
  auto chain = k_sequences(cst(g, 1.5), 2, 6);
  norm_chain(u, chain);
  const auto beta = ExponentField(g, AffineExponent{0.2, 0.3, 0.0});
  auto small = u, big = u;
  for (auto& v : small.values) v *= 0.1;
  for (auto& v : big.values) v *= 1000;
  const auto low = structural_bound(u, small, chain, cst(g, 1.5), beta, 2);
  CHECK(low.exponent == doctest::Approx(1 / 4.5));
  const auto high = structural_bound(u, big, chain, cst(g, 1.5), beta, 2);
  CHECK_FALSE(low.upper_branch);
  CHECK(high.upper_branch);
  CHECK(low.coupling_exponent == doctest::Approx(0.2));
  CHECK(high.coupling_exponent == doctest::Approx(0.5));
  CHECK(high.c_hat < low.c_hat);
}

TEST_CASE("constant stability") {
  CHECK(constant_stability({1.0, 1.1, 0.85}).stable);
  const auto s = constant_stability({1.0, 2.0});
  CHECK_FALSE(s.stable);
  CHECK(s.max_deviation == doctest::Approx(1.0));
}
