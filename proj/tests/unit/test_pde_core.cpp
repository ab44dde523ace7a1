#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "pxsys/function_space.hpp"
#include "pxsys/pde_core.hpp"

using namespace pxsys;

namespace {

// Sup of the torsion function of the unit square (value at the center),
// from the double sine series over odd m, n.
double square_torsion_center() {
  const double pi = std::numbers::pi;
  double s = 0.0;
  for (int m = 1; m < 4000; m += 2)
    for (int n = 1; n < 4000; n += 2) {
      const double sign = ((m + n) / 2 - 1) % 2 == 0 ? 1.0 : -1.0;
      s += sign * 16.0 / (std::pow(pi, 4) * m * n * (m * m + n * n));
    }
  return s;
}

double center_value(int n) {
  const auto g = build_grid_2d({0, 1}, {0, 1}, n, n);
  const auto r = solve_dirichlet(DirichletProblem::constant_source(ExponentField(g, ConstantExponent{2.0}), 1.0), {});
  REQUIRE(r.report.converged);
  return r.u[g->node_index(n / 2, n / 2)];
}

DirichletProblem problem(const GridPtr& g, const ExponentDescriptor& p, double h) {
  return DirichletProblem::constant_source(ExponentField(g, p), h);
}

}  // namespace

TEST_CASE("energy of zero and scaling at p = 2") {
  const auto g = build_grid_2d({0, 1}, {0, 2}, 9, 9);
  const auto zero = GridFunction::zeros(g);
  CHECK(energy(zero, problem(g, ConstantExponent{1.5}, 1.0), 0.0) == 0.0);
  CHECK(energy(zero, problem(g, ConstantExponent{1.5}, 1.0), 0.1) ==
        doctest::Approx(2.0 * std::pow(0.1, 1.5) / 1.5));

  const auto u = GridFunction::sample(g, [](const auto& x) { return std::sin(3 * x[0]) * x[1] * (2 - x[1]); }, true);
  auto u2 = u;
  for (auto& v : u2.values) v *= 2;
  const double e0 = energy(u, problem(g, ConstantExponent{2.0}, 0.0), 0.0);
  const double e1 = energy(u, problem(g, ConstantExponent{2.0}, 1.0), 0.0);
  const double load = e0 - e1;
  CHECK(energy(u2, problem(g, ConstantExponent{2.0}, 1.0), 0.0) == doctest::Approx(4 * e0 - 2 * load));
}

TEST_CASE("1-D energy of the exact solution tends to -1/24") {
  // int u'^2 / 2 - int u = 1/24 - 1/12.
  const auto g = build_grid_1d({0, 1}, 401);
  const auto u = GridFunction::sample(g, [](const auto& x) { return x[0] * (1 - x[0]) / 2; }, true);
  CHECK(energy(u, problem(g, ConstantExponent{2.0}, 1.0), 0.0) == doctest::Approx(-1.0 / 24).epsilon(1e-5));
}

TEST_CASE("weak residual is the gradient of the energy") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto g = build_grid_2d({0, 1}, {0, 1}, 7, 7);
  for (const ExponentDescriptor& pd :
       {ExponentDescriptor{ConstantExponent{1.5}}, ExponentDescriptor{SinusoidalExponent{1.6, 0.2, 3.0, 1.0}}}) {
    const auto prob = problem(g, pd, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
      auto u = GridFunction::zeros(g);
      for (std::size_t n : g->interior_nodes()) u[n] = U(rng);
      const auto r = weak_residual(u, prob, 1e-3);
      const double step = 1e-6;
      for (std::size_t n : g->interior_nodes()) {
        auto up = u, um = u;
        up[n] += step;
        um[n] -= step;
        const double fd = (energy(up, prob, 1e-3) - energy(um, prob, 1e-3)) / (2 * step);
        CHECK(std::abs(fd - r[n]) <= 1e-6 * std::max(1e-3, std::abs(r[n])));
      }
    }
  }
}

TEST_CASE("residual of zero is minus the load") {
  const auto g = build_grid_2d({0, 1}, {0, 1}, 5, 5);
  const auto r = weak_residual(GridFunction::zeros(g), problem(g, ConstantExponent{1.8}, 1.0), 1e-6);
  for (std::size_t n : g->interior_nodes()) CHECK(r[n] == doctest::Approx(-g->node_weights()[n]));
}

TEST_CASE("1-D linear case is exact at the nodes") {
  const auto g = build_grid_1d({0, 1}, 41);
  const auto r = solve_dirichlet(problem(g, ConstantExponent{2.0}, 1.0), {});
  REQUIRE(r.report.converged);
  for (std::size_t n = 0; n < g->node_count(); ++n) {
    const double x = g->node_coords(n)[0];
    CHECK(std::abs(r.u[n] - x * (1 - x) / 2) <= 1e-6);
  }
  CHECK(sup_norm(r.u) == doctest::Approx(0.125));
}

TEST_CASE("2-D torsion against the sine series, second order") {
  const double exact = square_torsion_center();
  CHECK(exact == doctest::Approx(0.0736713).epsilon(1e-5));
  const double e17 = std::abs(center_value(17) - exact), e33 = std::abs(center_value(33) - exact);
  CHECK(e33 < 1e-3);
  CHECK(std::log2(e17 / e33) >= 1.9);
}

TEST_CASE("p = 1.5 solution is symmetric and positive") {
  const int n = 17;
  const auto g = build_grid_2d({0, 1}, {0, 1}, n, n);
  const auto r = solve_dirichlet(problem(g, ConstantExponent{1.5}, 1.0), {});
  REQUIRE(r.report.converged);
  double asym = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double v = r.u[g->node_index(i, j)];
      asym = std::max({asym, std::abs(v - r.u[g->node_index(j, i)]), std::abs(v - r.u[g->node_index(n - 1 - i, j)])});
    }
  CHECK(asym <= 1e-9);
  for (std::size_t k : g->interior_nodes()) CHECK(r.u[k] > 0.0);
}

TEST_CASE("comparison and supersolution checks") {
  const auto g = build_grid_2d({0, 1}, {0, 1}, 13, 13);
  for (double p : {2.0, 1.5}) {
    const auto r1 = solve_dirichlet(problem(g, ConstantExponent{p}, 1.0), {});
    const auto r2 = solve_dirichlet(problem(g, ConstantExponent{p}, 2.0), {});
    CHECK(compare_solutions(r1.u, r2.u).ordered);
    CHECK_FALSE(compare_solutions(r2.u, r1.u).ordered);
    CHECK(compare_solutions(r1.u, r1.u).max_violation == 0.0);

    const auto eps = SolverConfig{}.final_eps();
    CHECK(verify_supersolution(r1.u, problem(g, ConstantExponent{p}, 1.0), eps, 1e-9).holds);
    CHECK(verify_supersolution(r1.u, problem(g, ConstantExponent{p}, 1.0), eps, 1e-9, Side::Sub).holds);
    CHECK(verify_supersolution(r2.u, problem(g, ConstantExponent{p}, 1.0), eps, 1e-9).holds);
    CHECK_FALSE(verify_supersolution(r1.u, problem(g, ConstantExponent{p}, 2.0), eps, 1e-9).holds);
  }
}
