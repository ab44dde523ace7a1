#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pxsys {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
};

/// Uniform tensor-product grid on an axis-aligned interval (dim 1) or
/// rectangle (dim 2). Nodes are numbered row-major with the first axis
/// fastest; cells likewise. Immutable once built.
class Grid {
public:
  static constexpr int kMaxDim = 2;

  int dimension() const { return dim_; }
  const Interval& extent(int axis) const { return extents_[axis]; }
  int resolution(int axis) const { return axis < dim_ ? nodes_[axis] : 1; }
  double spacing(int axis) const { return spacing_[axis]; }

  std::size_t node_count() const { return node_count_; }
  std::size_t cell_count() const { return cell_count_; }
  /// Number of nodes shared by one cell (2 in 1-D, 4 in 2-D).
  int corners_per_cell() const { return dim_ == 1 ? 2 : 4; }

  double cell_volume() const { return cell_volume_; }
  double domain_volume() const;
  /// Largest distance from an interior point to the boundary.
  double inradius() const;

  std::array<double, 2> node_coords(std::size_t node) const;
  std::array<double, 2> cell_center(std::size_t cell) const;
  std::size_t node_index(int i, int j = 0) const { return static_cast<std::size_t>(i + nodes_[0] * j); }
  bool is_boundary(std::size_t node) const { return boundary_[node] != 0; }

  /// Corner nodes of a cell: (i,j), (i+1,j), (i,j+1), (i+1,j+1) in 2-D;
  /// (i), (i+1) in 1-D. Only the first corners_per_cell() entries are valid.
  std::array<std::size_t, 4> cell_corners(std::size_t cell) const;

  /// Trapezoidal node weights: each cell spreads its volume evenly over its
  /// corners. Sums to the domain volume.
  std::span<const double> node_weights() const { return weights_; }

  /// Interior nodes in ascending order, and the inverse map (-1 for boundary).
  std::span<const std::size_t> interior_nodes() const { return interior_; }
  std::span<const long> interior_index() const { return interior_index_; }

private:
  friend std::shared_ptr<const Grid> build_grid(std::span<const Interval>, std::span<const int>);

  int dim_ = 0;
  std::array<Interval, kMaxDim> extents_{};
  std::array<int, kMaxDim> nodes_{1, 1};
  std::array<double, kMaxDim> spacing_{0.0, 0.0};
  std::size_t node_count_ = 0;
  std::size_t cell_count_ = 0;
  double cell_volume_ = 0.0;
  std::vector<unsigned char> boundary_;
  std::vector<double> weights_;
  std::vector<std::size_t> interior_;
  std::vector<long> interior_index_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Builds a uniform grid; one extent/resolution entry per axis (1 or 2 axes).
/// Throws ConfigError on degenerate extents or fewer than 3 nodes per axis.
GridPtr build_grid(std::span<const Interval> extents, std::span<const int> resolution);
GridPtr build_grid_1d(Interval x, int n);
GridPtr build_grid_2d(Interval x, Interval y, int nx, int ny);

/// Exact Euclidean distance to the boundary of the rectangle at every node.
std::vector<double> distance_to_boundary(const Grid& grid);
/// Same, at cell centers (strictly positive).
std::vector<double> cell_distance_to_boundary(const Grid& grid);

/// Membership of nodes and cell centers in the boundary strip {d < delta}.
struct StripMask {
  double delta = 0.0;
  std::vector<unsigned char> nodes;
  std::vector<unsigned char> cells;
  std::optional<std::string> warning;

  bool contains_node(std::size_t n) const { return nodes[n] != 0; }
  bool contains_cell(std::size_t c) const { return cells[c] != 0; }
};

/// Empty when delta <= 0. Sets `warning` when delta reaches the inradius.
StripMask boundary_strip(const Grid& grid, double delta);

}  // namespace pxsys
