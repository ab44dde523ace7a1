#include "pxsys/grid.hpp"

#include <algorithm>
#include <cmath>

#include "pxsys/error.hpp"

namespace pxsys {

double Grid::domain_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= extents_[a].length();
  return v;
}

double Grid::inradius() const {
  double r = extents_[0].length() / 2.0;
  for (int a = 1; a < dim_; ++a) r = std::min(r, extents_[a].length() / 2.0);
  return r;
}

std::array<double, 2> Grid::node_coords(std::size_t node) const {
  const auto i = static_cast<int>(node % nodes_[0]);
  const auto j = static_cast<int>(node / nodes_[0]);
  std::array<double, 2> x{extents_[0].lo + i * spacing_[0], 0.0};
  if (dim_ == 2) x[1] = extents_[1].lo + j * spacing_[1];
  // Pin the far boundary exactly so d vanishes there without rounding.
  if (i == nodes_[0] - 1) x[0] = extents_[0].hi;
  if (dim_ == 2 && j == nodes_[1] - 1) x[1] = extents_[1].hi;
  return x;
}

std::array<double, 2> Grid::cell_center(std::size_t cell) const {
  const int cx = nodes_[0] - 1;
  const auto i = static_cast<int>(cell % cx);
  const auto j = static_cast<int>(cell / cx);
  std::array<double, 2> x{extents_[0].lo + (i + 0.5) * spacing_[0], 0.0};
  if (dim_ == 2) x[1] = extents_[1].lo + (j + 0.5) * spacing_[1];
  return x;
}

std::array<std::size_t, 4> Grid::cell_corners(std::size_t cell) const {
  const int cx = nodes_[0] - 1;
  const auto i = static_cast<int>(cell % cx);
  const auto j = static_cast<int>(cell / cx);
  const std::size_t n00 = node_index(i, j);
  if (dim_ == 1) return {n00, n00 + 1, 0, 0};
  const auto stride = static_cast<std::size_t>(nodes_[0]);
  return {n00, n00 + 1, n00 + stride, n00 + stride + 1};
}

GridPtr build_grid(std::span<const Interval> extents, std::span<const int> resolution) {
  if (extents.empty() || extents.size() > Grid::kMaxDim || extents.size() != resolution.size())
    throw ConfigError("grid: need one extent and one resolution per axis (1 or 2 axes)");

  auto g = std::make_shared<Grid>();
  g->dim_ = static_cast<int>(extents.size());
  for (int a = 0; a < g->dim_; ++a) {
    const Interval& e = extents[a];
    if (!std::isfinite(e.lo) || !std::isfinite(e.hi) || !(e.hi > e.lo))
      throw ConfigError("grid: degenerate extent on axis " + std::to_string(a));
    if (resolution[a] < 3)
      throw ConfigError("grid: resolution must be at least 3 on axis " + std::to_string(a));
    g->extents_[a] = e;
    g->nodes_[a] = resolution[a];
    g->spacing_[a] = e.length() / (resolution[a] - 1);
  }

  g->node_count_ = static_cast<std::size_t>(g->nodes_[0]) * g->nodes_[1];
  g->cell_count_ = static_cast<std::size_t>(g->nodes_[0] - 1) *
                   (g->dim_ == 2 ? g->nodes_[1] - 1 : 1);
  g->cell_volume_ = g->spacing_[0] * (g->dim_ == 2 ? g->spacing_[1] : 1.0);

  g->boundary_.assign(g->node_count_, 0);
  g->interior_index_.assign(g->node_count_, -1);
  for (std::size_t n = 0; n < g->node_count_; ++n) {
    const int i = static_cast<int>(n % g->nodes_[0]);
    const int j = static_cast<int>(n / g->nodes_[0]);
    bool b = (i == 0 || i == g->nodes_[0] - 1);
    if (g->dim_ == 2) b = b || j == 0 || j == g->nodes_[1] - 1;
    g->boundary_[n] = b ? 1 : 0;
    if (!b) {
      g->interior_index_[n] = static_cast<long>(g->interior_.size());
      g->interior_.push_back(n);
    }
  }

  g->weights_.assign(g->node_count_, 0.0);
  const double share = g->cell_volume_ / g->corners_per_cell();
  for (std::size_t c = 0; c < g->cell_count_; ++c) {
    const auto corners = g->cell_corners(c);
    for (int k = 0; k < g->corners_per_cell(); ++k) g->weights_[corners[k]] += share;
  }
  return g;
}

GridPtr build_grid_1d(Interval x, int n) {
  const Interval e[] = {x};
  const int r[] = {n};
  return build_grid(e, r);
}

GridPtr build_grid_2d(Interval x, Interval y, int nx, int ny) {
  const Interval e[] = {x, y};
  const int r[] = {nx, ny};
  return build_grid(e, r);
}

namespace {

double rect_distance(const Grid& grid, const std::array<double, 2>& x) {
  double d = std::min(x[0] - grid.extent(0).lo, grid.extent(0).hi - x[0]);
  if (grid.dimension() == 2)
    d = std::min({d, x[1] - grid.extent(1).lo, grid.extent(1).hi - x[1]});
  return std::max(d, 0.0);
}

}  // namespace

std::vector<double> distance_to_boundary(const Grid& grid) {
  std::vector<double> d(grid.node_count());
  for (std::size_t n = 0; n < d.size(); ++n)
    d[n] = grid.is_boundary(n) ? 0.0 : rect_distance(grid, grid.node_coords(n));
  return d;
}

std::vector<double> cell_distance_to_boundary(const Grid& grid) {
  std::vector<double> d(grid.cell_count());
  for (std::size_t c = 0; c < d.size(); ++c) d[c] = rect_distance(grid, grid.cell_center(c));
  return d;
}

StripMask boundary_strip(const Grid& grid, double delta) {
  StripMask mask;
  mask.delta = delta;
  mask.nodes.assign(grid.node_count(), 0);
  mask.cells.assign(grid.cell_count(), 0);
  if (delta <= 0.0) return mask;

  const auto dn = distance_to_boundary(grid);
  const auto dc = cell_distance_to_boundary(grid);
  for (std::size_t n = 0; n < dn.size(); ++n) mask.nodes[n] = dn[n] < delta ? 1 : 0;
  for (std::size_t c = 0; c < dc.size(); ++c) mask.cells[c] = dc[c] < delta ? 1 : 0;
  if (delta >= grid.inradius())
    mask.warning = "strip width " + std::to_string(delta) + " reaches the inradius " +
                   std::to_string(grid.inradius()) + "; the strip covers the whole domain";
  return mask;
}

}  // namespace pxsys
