#include "pxsys/function_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pxsys/error.hpp"

namespace pxsys {

GridFunction::GridFunction(GridPtr g, std::vector<double> v, bool zero_trace)
    : grid(std::move(g)), values(std::move(v)), dirichlet(zero_trace) {
  if (values.size() != grid->node_count()) throw ConfigError("grid function size does not match the grid");
  if (dirichlet)
    for (std::size_t n = 0; n < values.size(); ++n)
      if (grid->is_boundary(n)) values[n] = 0.0;
}

GridFunction GridFunction::zeros(GridPtr g, bool zero_trace) {
  const auto n = g->node_count();
  return GridFunction(std::move(g), std::vector<double>(n, 0.0), zero_trace);
}

GridFunction GridFunction::sample(GridPtr g, const std::function<double(const std::array<double, 2>&)>& fn,
                                  bool zero_trace) {
  std::vector<double> v(g->node_count());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = fn(g->node_coords(n));
  return GridFunction(std::move(g), std::move(v), zero_trace);
}

std::vector<double> GridFunction::cell_values() const {
  const int k = grid->corners_per_cell();
  std::vector<double> out(grid->cell_count());
  for (std::size_t c = 0; c < out.size(); ++c) {
    const auto corners = grid->cell_corners(c);
    double s = 0.0;
    for (int i = 0; i < k; ++i) s += values[corners[i]];
    out[c] = s / k;
  }
  return out;
}

double modular(const GridFunction& u, const ExponentField& p) {
  const auto w = u.grid->node_weights();
  double rho = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) {
    const double a = std::abs(u[n]);
    if (a > 0.0) rho += w[n] * std::pow(a, p.at_node(n));
  }
  return rho;
}

namespace {

// log rho_p(u e^{-t}) via log-sum-exp over the nonzero nodes.
struct LogModular {
  std::vector<double> log_weight;
  std::vector<double> log_abs;
  std::vector<double> exponent;

  double operator()(double t) const {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < exponent.size(); ++i)
      top = std::max(top, log_weight[i] + exponent[i] * (log_abs[i] - t));
    double sum = 0.0;
    for (std::size_t i = 0; i < exponent.size(); ++i)
      sum += std::exp(log_weight[i] + exponent[i] * (log_abs[i] - t) - top);
    return top + std::log(sum);
  }
};

}  // namespace

double luxemburg_norm(const GridFunction& u, const ExponentField& p, double rel_tol) {
  const auto w = u.grid->node_weights();
  LogModular f;
  double sup = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) {
    const double a = std::abs(u[n]);
    if (a == 0.0 || w[n] == 0.0) continue;
    f.log_weight.push_back(std::log(w[n]));
    f.log_abs.push_back(std::log(a));
    f.exponent.push_back(p.at_node(n));
    sup = std::max(sup, a);
  }
  if (f.exponent.empty()) return 0.0;

  // Initial bracket from the sup bound, expanded geometrically until
  // f(lo) >= 0 >= f(hi).
  const double vol = u.grid->domain_volume();
  const double pm = p.min();
  double a_lo = sup * std::pow(vol, -1.0 / pm);
  double a_hi = sup * std::max(1.0, std::pow(vol, 1.0 / pm));
  double lo = std::log(std::min(a_lo, a_hi));
  double hi = std::log(std::max(a_lo, a_hi));
  while (f(lo) < 0.0) lo -= std::log(2.0);
  while (f(hi) > 0.0) hi += std::log(2.0);

  // Bisect to the requested relative tolerance on a, then finish at machine
  // resolution of t (a few more halvings are free).
  const double stop = std::min(rel_tol, 1e-15);
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= stop * std::max(1.0, std::abs(mid)) * 0.25) break;
  }
  return std::exp(0.5 * (lo + hi));
}

double sup_norm(const std::vector<double>& values) {
  double s = 0.0;
  for (double x : values) s = std::max(s, std::abs(x));
  return s;
}

double sup_norm(const GridFunction& u) { return sup_norm(u.values); }

GridFunction positive_excess(const GridFunction& u, double t) {
  std::vector<double> v(u.size());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = std::max(u[n] - t, 0.0);
  return GridFunction(u.grid, std::move(v), u.dirichlet && t >= 0.0);
}

double sup_distance(const GridFunction& u, const GridFunction& w) {
  double s = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) s = std::max(s, std::abs(u[n] - w[n]));
  return s;
}

}  // namespace pxsys
