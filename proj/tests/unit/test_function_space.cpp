#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "pxsys/exponents.hpp"
#include "pxsys/function_space.hpp"

using namespace pxsys;

namespace {

// Integral of c^{2+x} over (0,1).
double exp_integral(double c) { return std::abs(c - 1.0) < 1e-14 ? 1.0 : c * c * (c - 1.0) / std::log(c); }

// Root a of the integral of (2/a)^{2+x} over (0,1) equal to 1, by bisection.
double oracle_norm_two() {
  double lo = 1.0, hi = 4.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (exp_integral(2.0 / mid) > 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

GridFunction constant(const GridPtr& g, double c) {
  return GridFunction(g, std::vector<double>(g->node_count(), c), false);
}

}  // namespace

TEST_CASE("modular of simple fields") {
  const auto g = build_grid_1d({0, 1}, 2001);
  CHECK(modular(constant(g, 0.0), ExponentField(g, ConstantExponent{2.0})) == 0.0);
  CHECK(modular(constant(g, 1.0), ExponentField(g, ConstantExponent{2.0})) == doctest::Approx(1.0));
  const ExponentField p(g, AffineExponent{2.0, 1.0, 0.0});
  CHECK(modular(constant(g, 2.0), p) == doctest::Approx(4.0 / std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("luxemburg norm of simple fields") {
  const auto g = build_grid_1d({0, 1}, 2001);
  CHECK(luxemburg_norm(constant(g, 1.0), ExponentField(g, ConstantExponent{2.0})) == doctest::Approx(1.0));
  CHECK(luxemburg_norm(constant(g, 0.0), ExponentField(g, ConstantExponent{2.0})) == 0.0);
  const ExponentField p(g, AffineExponent{2.0, 1.0, 0.0});
  CHECK(luxemburg_norm(constant(g, 2.0), p) == doctest::Approx(oracle_norm_two()).epsilon(1e-6));
}

TEST_CASE("norm and modular properties on random fields") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const auto g = build_grid_2d({0, 1}, {0, 1}, 17, 17);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = 1.55 + 0.1 * U(rng), b = 0.2 * std::abs(U(rng));
    const ExponentField p(g, SinusoidalExponent{a, b, 3 * U(rng), 3 * U(rng)});
    std::vector<double> vals(g->node_count());
    const double scale = std::exp(3 * U(rng));
    for (auto& v : vals) v = scale * U(rng);
    const GridFunction u(g, vals, false);
    const double n = luxemburg_norm(u, p), r = modular(u, p);
    const double pm = p.min(), pp = p.max();
    if (n > 1.0) {
      CHECK(std::pow(n, pm) <= r * (1 + 1e-9));
      CHECK(r <= std::pow(n, pp) * (1 + 1e-9));
    } else {
      CHECK(std::pow(n, pp) <= r * (1 + 1e-9));
      CHECK(r <= std::pow(n, pm) * (1 + 1e-9));
    }
    std::vector<double> scaled(vals);
    for (auto& v : scaled) v /= n;
    CHECK(std::abs(modular(GridFunction(g, scaled, false), p) - 1.0) <= 1e-9);
    for (auto& v : scaled) v *= 3 * n;
    CHECK(luxemburg_norm(GridFunction(g, scaled, false), p) == doctest::Approx(3 * n).epsilon(1e-10));
  }
}

TEST_CASE("constant exponent norm equals the Lp norm") {
  const auto g = build_grid_2d({0, 2}, {0, 1}, 9, 5);
  std::vector<double> vals(g->node_count());
  for (std::size_t n = 0; n < vals.size(); ++n) vals[n] = std::sin(1.0 + n);
  const GridFunction u(g, vals, false);
  const ExponentField p(g, ConstantExponent{1.7});
  CHECK(luxemburg_norm(u, p) == doctest::Approx(std::pow(modular(u, p), 1 / 1.7)).epsilon(1e-10));
}

TEST_CASE("sup_norm and positive_excess") {
  const auto g = build_grid_1d({0, 1}, 101);
  const auto u = GridFunction::sample(g, [](const auto& x) { return x[0] * (1 - x[0]) / 2; }, true);
  CHECK(sup_norm(u) == doctest::Approx(0.125));
  std::vector<double> neg(u.values);
  for (auto& v : neg) v = -v;
  CHECK(sup_norm(neg) == sup_norm(u));
  CHECK(sup_norm(constant(g, 0.0)) == 0.0);

  CHECK(sup_norm(positive_excess(constant(g, 0.5), 1.0)) == 0.0);
  const auto e3 = positive_excess(constant(g, 3.0), 1.0);
  for (double v : e3.values) CHECK(v == 2.0);
  std::vector<double> mixed(g->node_count());
  for (std::size_t n = 0; n < mixed.size(); ++n) mixed[n] = n % 2 ? 1.5 : 0.5;
  const auto em = positive_excess(GridFunction(g, mixed, false), 1.0);
  for (std::size_t n = 0; n < mixed.size(); ++n) CHECK(em[n] == (n % 2 ? 0.5 : 0.0));
  CHECK(sup_distance(e3, constant(g, 2.5)) == doctest::Approx(0.5));
}
