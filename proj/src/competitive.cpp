#include "pxsys/competitive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pxsys/error.hpp"

namespace pxsys {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::string where(const Grid& g, std::size_t node) {
  const auto x = g.node_coords(node);
  return "(" + fmt(x[0]) + ", " + fmt(x[1]) + ")";
}

// Source s and a comparison source h at cells: Sub requires s <= h, Super s >= h.
ComparisonCheck compare(std::string name, const GridFunction& w, const ExponentField& p,
                        const std::vector<double>& own_source, const std::vector<double>& h, Side side, double eps,
                        double tol) {
  ComparisonCheck c;
  c.name = std::move(name);
  c.weak = verify_supersolution(w, DirichletProblem(p, h), eps, tol, side);
  c.cellwise_worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double slack = side == Side::Sub ? h[k] - own_source[k] : own_source[k] - h[k];
    if (slack < c.cellwise_worst) {
      c.cellwise_worst = slack;
      c.cell = k;
    }
  }
  c.cellwise_ok = c.cellwise_worst >= 0.0;
  return c;
}

std::vector<double> subsolution_source(double lambda, const StripMask& strip) {
  std::vector<double> s(strip.cells.size());
  for (std::size_t c = 0; c < s.size(); ++c) s[c] = strip.cells[c] ? -1.0 / lambda : 1.0 / lambda;
  return s;
}

}  // namespace

Subsolution build_subsolution(double lambda, double delta, const ExponentField& p, const SolverConfig& cfg) {
  if (!(lambda > 1.0)) throw ConfigError("subsolution: lambda must exceed 1");
  const Grid& grid = *p.grid();
  if (!(delta > 0.0 && delta < grid.inradius())) throw ConfigError("subsolution: delta must lie in (0, inradius)");
  const auto strip = boundary_strip(grid, delta);
  auto r = solve_dirichlet(DirichletProblem(p, subsolution_source(lambda, strip)), cfg);
  if (!r.report.converged) throw SolverError("subsolution solve did not converge: " + r.report.message);

  Subsolution s;
  const auto d = distance_to_boundary(grid);
  s.c3 = std::numeric_limits<double>::infinity();
  std::size_t worst = 0;
  for (std::size_t n : grid.interior_nodes()) {
    const double ratio = r.u[n] / d[n];
    if (ratio < s.c3) {
      s.c3 = ratio;
      worst = n;
    }
  }
  if (!(s.c3 > 0.0))
    throw ConfigError("subsolution is not positive at " + where(grid, worst) + " (value " + fmt(r.u[worst]) +
                      "); reduce delta");
  s.c4 = sup_norm(r.u) * std::pow(lambda, 1.0 / (p.sup() - 1.0));
  s.w = std::move(r.u);
  s.report = std::move(r.report);
  return s;
}

SubsolutionPair build_subsolutions(double lambda, double delta, const ExponentField& p, const ExponentField& q,
                                   const SolverConfig& cfg) {
  return {build_subsolution(lambda, delta, p, cfg), build_subsolution(lambda, delta, q, cfg)};
}

Supersolution build_supersolution(double lambda, double delta, const ExponentField& p, const ExponentField& a,
                                  const SolverConfig& cfg, const InnerOptions& inner) {
  if (!(lambda > 1.0)) throw ConfigError("supersolution: lambda must exceed 1");
  const Grid& grid = *p.grid();
  if (!(delta > 0.0 && delta < grid.inradius())) throw ConfigError("supersolution: delta must lie in (0, inradius)");
  const auto strip = boundary_strip(grid, delta);
  const std::size_t cells = grid.cell_count();

  std::vector<double> source(cells);
  for (std::size_t c = 0; c < cells; ++c)
    source[c] = strip.cells[c] ? lambda * std::pow(delta, -a.at_cell(c)) : lambda;

  Supersolution s;
  auto r = solve_dirichlet(DirichletProblem(p, source), cfg);
  if (!r.report.converged) throw SolverError("supersolution solve did not converge: " + r.report.message);
  bool converged = false;
  for (int k = 1; k <= inner.max_iterations; ++k) {
    const auto wc = r.u.cell_values();
    for (std::size_t c = 0; c < cells; ++c)
      if (strip.cells[c]) source[c] = lambda * std::pow(std::max(wc[c], inner.floor), -a.at_cell(c));
    auto next = solve_dirichlet(DirichletProblem(p, source), cfg, &r.u);
    if (!next.report.converged)
      throw SolverError("supersolution solve did not converge at inner iteration " + std::to_string(k) + ": " +
                        next.report.message);
    const double change = sup_distance(next.u, r.u);
    s.inner_trace.push_back(change);
    s.inner_residuals.push_back(next.report.residual);
    r = std::move(next);
    s.inner_iterations = k;
    if (change <= inner.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::string tail;
    for (std::size_t i = s.inner_trace.size() >= 3 ? s.inner_trace.size() - 3 : 0; i < s.inner_trace.size(); ++i)
      tail += " " + fmt(s.inner_trace[i]);
    throw SolverError("supersolution inner iteration did not converge in " + std::to_string(inner.max_iterations) +
                      " iterations; last changes:" + tail);
  }

  const auto d = distance_to_boundary(grid);
  s.lower_bound_slack = std::numeric_limits<double>::infinity();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t n = 0; n < d.size(); ++n) {
    s.lower_bound_slack = std::min(s.lower_bound_slack, r.u[n] - std::min(delta, d[n]));
    if (d[n] > 0.0 && d[n] < delta) {
      const double x = std::log(d[n]), y = std::log(r.u[n]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++count;
    }
  }
  s.lower_bound_ok = s.lower_bound_slack >= 0.0;
  const double denom = count * sxx - sx * sx;
  if (count >= 2 && denom > 0.0) {
    s.theta = (count * sxy - sx * sy) / denom;
    s.theta_prefactor = std::exp((sy - s.theta * sx) / count);
  }
  s.c1 = sup_norm(r.u) * std::pow(lambda, -1.0 / (p.inf() - 1.0));
  s.w = std::move(r.u);
  s.report = std::move(r.report);
  s.source = std::move(source);
  return s;
}

SupersolutionPair build_supersolutions(double lambda, double delta, const SystemSpec& sys, const SolverConfig& cfg,
                                       const InnerOptions& inner) {
  return {build_supersolution(lambda, delta, sys.p, sys.f.alpha, cfg, inner),
          build_supersolution(lambda, delta, sys.q, sys.g.beta, cfg, inner)};
}

bool OrderInterval::sub_ok() const { return checks.size() == 4 && checks[0].holds() && checks[1].holds(); }
bool OrderInterval::super_ok() const { return checks.size() == 4 && checks[2].holds() && checks[3].holds(); }

OrderInterval build_order_interval(double lambda, double delta, const SystemSpec& sys, const SolverConfig& cfg,
                                   double tol, const InnerOptions& inner) {
  OrderInterval k;
  k.lambda = lambda;
  k.delta = delta;
  auto subs = build_subsolutions(lambda, delta, sys.p, sys.q, cfg);
  auto sups = build_supersolutions(lambda, delta, sys, cfg, inner);
  k.u_sub = subs.u.w;
  k.v_sub = subs.v.w;
  k.u_super = sups.u.w;
  k.v_super = sups.v.w;

  const double eps = cfg.final_eps();
  const auto strip = boundary_strip(*sys.grid(), delta);
  const auto sub_src = subsolution_source(lambda, strip);
  const auto us = k.u_sub.cell_values(), vs = k.v_sub.cell_values();
  const auto uS = k.u_super.cell_values(), vS = k.v_super.cell_values();

  k.checks.push_back(compare("sub u", k.u_sub, sys.p, sub_src, cell_source(sys.f, us, vS), Side::Sub, eps, tol));
  k.checks.push_back(compare("sub v", k.v_sub, sys.q, sub_src, cell_source(sys.g, uS, vs), Side::Sub, eps, tol));
  k.checks.push_back(
      compare("super u", k.u_super, sys.p, sups.u.source, cell_source(sys.f, uS, vs), Side::Super, eps, tol));
  k.checks.push_back(
      compare("super v", k.v_super, sys.q, sups.v.source, cell_source(sys.g, us, vS), Side::Super, eps, tol));
  k.order_u = compare_solutions(k.u_sub, k.u_super, 0.0);
  k.order_v = compare_solutions(k.v_sub, k.v_super, 0.0);

  k.sub_u_info = std::move(subs.u);
  k.sub_v_info = std::move(subs.v);
  k.super_u_info = std::move(sups.u);
  k.super_v_info = std::move(sups.v);
  return k;
}

void CompetitiveOptions::validate() const {
  solver.validate();
  if (!(delta > 0.0)) throw ConfigError("competitive: delta must be positive");
  if (!(lambda_start > 1.0)) throw ConfigError("competitive: lambda_start must exceed 1");
  if (!(lambda_cap >= lambda_start)) throw ConfigError("competitive: lambda_cap below lambda_start");
  if (!(tolerance > 0.0)) throw ConfigError("competitive: tolerance must be positive");
  if (max_iterations < 1) throw ConfigError("competitive: max_iterations must be at least 1");
  if (!(membership_tolerance >= 0.0)) throw ConfigError("competitive: membership tolerance must be nonnegative");
  if (!(residual_factor > 0.0)) throw ConfigError("competitive: residual factor must be positive");
  if (!(inner.tolerance > 0.0) || inner.max_iterations < 1 || !(inner.floor > 0.0))
    throw ConfigError("competitive: invalid inner iteration settings");
}

LambdaSearch find_lambda(const SystemSpec& sys, const CompetitiveOptions& opts) {
  opts.validate();
  LambdaSearch search;
  const double tol = opts.residual_factor * opts.solver.tolerance;
  for (double lambda = opts.lambda_start; lambda <= opts.lambda_cap; lambda *= 2.0) {
    LambdaAttempt attempt;
    attempt.lambda = lambda;
    try {
      auto k = build_order_interval(lambda, opts.delta, sys, opts.solver, tol, opts.inner);
      const Grid& g = *sys.grid();
      for (const auto& c : k.checks) {
        if (!c.weak.holds) {
          attempt.failure = c.name + " weak at " + where(g, c.weak.node) + " (residual " + fmt(c.weak.worst) + ")";
          break;
        }
        if (!c.cellwise_ok) {
          const auto x = g.cell_center(c.cell);
          attempt.failure = c.name + " cellwise at (" + fmt(x[0]) + ", " + fmt(x[1]) + ") (slack " +
                            fmt(c.cellwise_worst) + ")";
          break;
        }
      }
      if (attempt.failure.empty() && !k.order_u.ordered)
        attempt.failure = "ordering of u at " + where(g, k.order_u.node);
      if (attempt.failure.empty() && !k.order_v.ordered)
        attempt.failure = "ordering of v at " + where(g, k.order_v.node);
      attempt.admissible = attempt.failure.empty();
      search.attempts.push_back(attempt);
      if (attempt.admissible) {
        search.found = true;
        search.interval = std::move(k);
        search.message = "admissible lambda = " + fmt(lambda);
        return search;
      }
    } catch (const ConfigError& e) {
      attempt.failure = e.what();
      search.attempts.push_back(attempt);
      search.message = e.what();
      return search;
    } catch (const SolverError& e) {
      attempt.failure = e.what();
      search.attempts.push_back(attempt);
    }
  }
  search.message = "no admissible lambda up to " + fmt(opts.lambda_cap) + "; last failure: " +
                   (search.attempts.empty() ? std::string("none") : search.attempts.back().failure);
  return search;
}

SystemSolution run_order_interval_iteration(const OrderInterval& k, const SystemSpec& sys,
                                            const CompetitiveOptions& opts, bool from_super) {
  opts.validate();
  SystemSolution sol;
  const double eps = opts.solver.final_eps();
  const double residual_tol = opts.residual_factor * opts.solver.tolerance;
  const double mt = opts.membership_tolerance;
  const GridPtr& grid = sys.grid();

  GridFunction y1 = from_super ? k.u_super : k.u_sub;
  GridFunction y2 = from_super ? k.v_super : k.v_sub;
  sol.invariance_worst = std::numeric_limits<double>::infinity();
  std::size_t escape_node = 0;
  try {
    for (int it = 1; it <= opts.max_iterations; ++it) {
      const auto c1 = y1.cell_values(), c2 = y2.cell_values();
      auto ru = solve_dirichlet(DirichletProblem(sys.p, cell_source(sys.f, c1, c2)), opts.solver, &y1);
      if (!ru.report.converged) throw SolverError("T iteration, equation for u: " + ru.report.message);
      auto rv = solve_dirichlet(DirichletProblem(sys.q, cell_source(sys.g, c1, c2)), opts.solver, &y2);
      if (!rv.report.converged) throw SolverError("T iteration, equation for v: " + rv.report.message);

      for (std::size_t n : grid->interior_nodes()) {
        const double slack = std::min({ru.u[n] - k.u_sub[n], k.u_super[n] - ru.u[n], rv.u[n] - k.v_sub[n],
                                       k.v_super[n] - rv.u[n]});
        if (slack < sol.invariance_worst) {
          sol.invariance_worst = slack;
          escape_node = n;
        }
      }
      if (sol.invariance_worst < -mt) sol.invariance_ok = false;

      TraceRow row;
      row.iter = it;
      row.sup_delta = std::max(sup_distance(ru.u, y1), sup_distance(rv.u, y2));
      const auto res = system_residuals(ru.u, rv.u, sys, eps);
      row.residual = std::max(res.first, res.second);
      sol.trace.push_back(row);

      y1 = std::move(ru.u);
      y2 = std::move(rv.u);
      sol.report_u = std::move(ru.report);
      sol.report_v = std::move(rv.report);
      sol.iterations = it;
      if (row.sup_delta <= opts.tolerance && row.residual <= residual_tol) {
        sol.converged = true;
        break;
      }
    }
  } catch (const SolverError& e) {
    sol.u = std::move(y1);
    sol.v = std::move(y2);
    sol.message = e.what();
    return sol;
  }

  sol.u = std::move(y1);
  sol.v = std::move(y2);
  const auto res = system_residuals(sol.u, sol.v, sys, eps);
  sol.residual_u = res.first;
  sol.residual_v = res.second;
  sol.residual_tolerance = residual_tol;
  sol.residual_ok = std::max(res.first, res.second) <= residual_tol;
  if (!sol.converged)
    sol.message = "T iteration did not converge in " + std::to_string(opts.max_iterations) +
                  " iterations (last sup delta " + fmt(sol.trace.back().sup_delta) + ")";
  else if (!sol.invariance_ok)
    sol.message = "an iterate left the order interval at " + where(*grid, escape_node) + " (slack " +
                  fmt(sol.invariance_worst) + ")";
  else if (!sol.residual_ok)
    sol.message = "residual of the system above tolerance";
  else
    sol.message = "converged";
  return sol;
}

}  // namespace pxsys
