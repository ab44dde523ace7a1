#include <cmath>

#include "doctest.h"
#include "pxsys/error.hpp"
#include "pxsys/grid.hpp"

using namespace pxsys;

TEST_CASE("build_grid counts nodes and boundary") {
  auto g = build_grid_2d({0, 1}, {0, 1}, 3, 3);
  CHECK(g->node_count() == 9);
  CHECK(g->interior_nodes().size() == 1);
  int boundary = 0;
  for (std::size_t n = 0; n < g->node_count(); ++n) boundary += g->is_boundary(n);
  CHECK(boundary == 8);
  CHECK(g->interior_nodes()[0] == 4);
}

TEST_CASE("build_grid spacing and cell volume") {
  CHECK(build_grid_1d({0, 1}, 5)->spacing(0) == doctest::Approx(0.25));
  auto g = build_grid_2d({0, 2}, {0, 1}, 5, 3);
  CHECK(g->cell_volume() == doctest::Approx(0.25));
  CHECK(g->cell_count() == 8);
  double total = 0.0;
  for (double w : g->node_weights()) total += w;
  CHECK(total == doctest::Approx(2.0));
}

TEST_CASE("build_grid rejects bad input") {
  CHECK_THROWS_AS(build_grid_1d({0, 1}, 2), ConfigError);
  CHECK_THROWS_AS(build_grid_1d({1, 1}, 5), ConfigError);
  CHECK_THROWS_AS(build_grid_2d({0, 1}, {0, -1}, 5, 5), ConfigError);
}

TEST_CASE("distance_to_boundary on the unit square") {
  auto g = build_grid_2d({0, 1}, {0, 1}, 5, 5);
  const auto d = distance_to_boundary(*g);
  CHECK(d[g->node_index(2, 2)] == 0.5);
  CHECK(d[g->node_index(1, 2)] == 0.25);
  for (std::size_t n = 0; n < g->node_count(); ++n) {
    if (g->is_boundary(n))
      CHECK(d[n] == 0.0);
    else
      CHECK(d[n] > 0.0);
  }
  auto g1 = build_grid_1d({0, 1}, 11);
  CHECK(distance_to_boundary(*g1)[0] == 0.0);
}

TEST_CASE("distance is 1-Lipschitz across neighbours") {
  auto g = build_grid_2d({0, 2}, {-1, 0.5}, 17, 13);
  const auto d = distance_to_boundary(*g);
  for (int j = 0; j < g->resolution(1); ++j)
    for (int i = 0; i + 1 < g->resolution(0); ++i)
      CHECK(std::abs(d[g->node_index(i + 1, j)] - d[g->node_index(i, j)]) <= g->spacing(0) + 1e-14);
  for (int j = 0; j + 1 < g->resolution(1); ++j)
    for (int i = 0; i < g->resolution(0); ++i)
      CHECK(std::abs(d[g->node_index(i, j + 1)] - d[g->node_index(i, j)]) <= g->spacing(1) + 1e-14);
}

TEST_CASE("boundary_strip membership and nesting") {
  auto g = build_grid_2d({0, 1}, {0, 1}, 5, 5);
  const auto s1 = boundary_strip(*g, 0.1);
  CHECK_FALSE(s1.contains_node(g->node_index(2, 2)));
  CHECK_FALSE(s1.warning.has_value());
  const auto s3 = boundary_strip(*g, 0.3);
  CHECK(s3.contains_node(g->node_index(1, 2)));
  for (std::size_t n = 0; n < g->node_count(); ++n)
    if (s1.contains_node(n)) CHECK(s3.contains_node(n));
  for (std::size_t c = 0; c < g->cell_count(); ++c)
    if (s1.contains_cell(c)) CHECK(s3.contains_cell(c));

  CHECK(boundary_strip(*g, 0.6).warning.has_value());
  const auto empty = boundary_strip(*g, 0.0);
  for (auto m : empty.nodes) CHECK(m == 0);
}
