#pragma once

#include <functional>
#include <vector>

#include "pxsys/exponents.hpp"
#include "pxsys/grid.hpp"

namespace pxsys {

/// Nodal real field on a grid. When `dirichlet` is set the boundary values
/// are exactly zero.
struct GridFunction {
  GridPtr grid;
  std::vector<double> values;
  bool dirichlet = false;

  GridFunction() = default;
  GridFunction(GridPtr g, std::vector<double> v, bool zero_trace);

  static GridFunction zeros(GridPtr g, bool zero_trace = true);
  /// Samples `fn` at the nodes; boundary nodes are zeroed when `zero_trace`.
  static GridFunction sample(GridPtr g, const std::function<double(const std::array<double, 2>&)>& fn,
                             bool zero_trace);

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }

  /// Corner average per cell (the value of the piecewise-linear interpolant
  /// at the cell center).
  std::vector<double> cell_values() const;
};

/// rho_p(u) = integral of |u|^p(x), trapezoidal node quadrature.
double modular(const GridFunction& u, const ExponentField& p);

/// Luxemburg norm: 0 for u == 0, otherwise the unique a > 0 with
/// rho_p(u / a) = 1. Solved by bisection on log a in the log domain, so very
/// large exponents do not overflow.
double luxemburg_norm(const GridFunction& u, const ExponentField& p, double rel_tol = 1e-12);

double sup_norm(const GridFunction& u);
double sup_norm(const std::vector<double>& values);

/// Nodewise max(u - t, 0). The Dirichlet flag survives when t >= 0.
GridFunction positive_excess(const GridFunction& u, double t);

/// max |u - w| over the nodes.
double sup_distance(const GridFunction& u, const GridFunction& w);

}  // namespace pxsys
