#include "pxsys/cooperative.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pxsys/error.hpp"

namespace pxsys {

namespace {

double interior_min_ratio(const GridFunction& z, const std::vector<double>& d_nodes,
                          const std::vector<double>& z_cells, const std::vector<double>& d_cells) {
  double r = std::numeric_limits<double>::infinity();
  for (std::size_t n : z.grid->interior_nodes()) r = std::min(r, z[n] / d_nodes[n]);
  for (std::size_t c = 0; c < z_cells.size(); ++c) r = std::min(r, z_cells[c] / d_cells[c]);
  return r;
}

double gradient_sup(const GridFunction& u) {
  const Grid& g = *u.grid;
  double m = 0.0;
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const auto k = g.cell_corners(c);
    m = std::max(m, std::abs(u[k[1]] - u[k[0]]) / g.spacing(0));
    if (g.dimension() == 2) {
      m = std::max(m, std::abs(u[k[3]] - u[k[2]]) / g.spacing(0));
      m = std::max(m, std::abs(u[k[2]] - u[k[0]]) / g.spacing(1));
      m = std::max(m, std::abs(u[k[3]] - u[k[1]]) / g.spacing(1));
    }
  }
  return m;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

TorsionEstimate estimate_c0(double sigma, const ExponentField& p, const ExponentField& q, const SolverConfig& cfg,
                            double safety) {
  if (!(sigma > 0.0)) throw ConfigError("estimate_c0: sigma must be positive");
  if (!(safety > 0.0 && safety <= 1.0)) throw ConfigError("estimate_c0: safety factor must lie in (0, 1]");
  TorsionEstimate est;
  auto r1 = solve_dirichlet(DirichletProblem::constant_source(p, sigma), cfg);
  if (!r1.report.converged) throw SolverError("torsion problem for p did not converge: " + r1.report.message);
  auto r2 = solve_dirichlet(DirichletProblem::constant_source(q, sigma), cfg);
  if (!r2.report.converged) throw SolverError("torsion problem for q did not converge: " + r2.report.message);

  const Grid& grid = *p.grid();
  const auto d = distance_to_boundary(grid);
  const auto dc = cell_distance_to_boundary(grid);
  const double ratio = std::min(interior_min_ratio(r1.u, d, r1.u.cell_values(), dc),
                                interior_min_ratio(r2.u, d, r2.u.cell_values(), dc));
  if (!(ratio > 0.0)) throw SolverError("torsion solution is not positive in the interior");

  BoxBounds& box = est.box;
  box.min_ratio = ratio;
  box.c0 = safety * ratio;
  box.floor.resize(d.size());
  box.cell_floor.resize(dc.size());
  for (std::size_t n = 0; n < d.size(); ++n) box.floor[n] = box.c0 * d[n];
  for (std::size_t c = 0; c < dc.size(); ++c) box.cell_floor[c] = box.c0 * dc[c];
  est.z1 = std::move(r1.u);
  est.z2 = std::move(r2.u);
  est.report_z1 = std::move(r1.report);
  est.report_z2 = std::move(r2.report);
  return est;
}

TruncationReport truncation_activity(const GridFunction& z1, const GridFunction& z2, const BoxBounds& box) {
  TruncationReport rep;
  const auto visit = [&](double z, double lo, std::size_t& floor_count, std::size_t& ceil_count) {
    if (z < lo) ++floor_count;
    if (z > box.R) ++ceil_count;
    rep.max_change = std::max(rep.max_change, std::abs(std::min(std::max(z, lo), box.R) - z));
  };
  for (const GridFunction* z : {&z1, &z2}) {
    for (std::size_t n : z->grid->interior_nodes())
      visit((*z)[n], box.floor[n], rep.floor_active_nodes, rep.ceiling_active_nodes);
    const auto zc = z->cell_values();
    for (std::size_t c = 0; c < zc.size(); ++c)
      visit(zc[c], box.cell_floor[c], rep.floor_active_cells, rep.ceiling_active_cells);
  }
  return rep;
}

AuxiliaryResult auxiliary_step(const GridFunction& z1, const GridFunction& z2, const BoxBounds& box,
                               const SystemSpec& sys, const SolverConfig& cfg, const GridFunction* warm_u,
                               const GridFunction* warm_v) {
  const auto t1 = truncate_values(z1.cell_values(), box.cell_floor, box.R);
  const auto t2 = truncate_values(z2.cell_values(), box.cell_floor, box.R);
  AuxiliaryResult out;
  out.truncation = truncation_activity(z1, z2, box);

  auto ru = solve_dirichlet(DirichletProblem(sys.p, cell_source(sys.f, t1, t2)), cfg, warm_u);
  if (!ru.report.converged) throw SolverError("auxiliary step, equation for u: " + ru.report.message);
  auto rv = solve_dirichlet(DirichletProblem(sys.q, cell_source(sys.g, t1, t2)), cfg, warm_v);
  if (!rv.report.converged) throw SolverError("auxiliary step, equation for v: " + rv.report.message);
  out.u = std::move(ru.u);
  out.v = std::move(rv.u);
  out.report_u = std::move(ru.report);
  out.report_v = std::move(rv.report);
  return out;
}

BoxReport verify_box(const GridFunction& u, const GridFunction& v, const BoxBounds& box,
                     std::optional<double> sup_bound) {
  BoxReport rep;
  rep.sup_u = sup_norm(u);
  rep.sup_v = sup_norm(v);
  rep.R = box.R;
  rep.tolerance = 1e-8 * (1.0 + std::max(rep.sup_u, rep.sup_v));
  rep.worst_floor_slack = std::numeric_limits<double>::infinity();
  for (std::size_t n : u.grid->interior_nodes()) {
    const double slack = std::min(u[n], v[n]) - box.floor[n];
    if (slack < rep.worst_floor_slack) {
      rep.worst_floor_slack = slack;
      rep.node = n;
    }
  }
  rep.location = u.grid->node_coords(rep.node);
  rep.floor_ok = rep.worst_floor_slack >= -rep.tolerance;
  rep.ceiling_ok = std::max(rep.sup_u, rep.sup_v) <= box.R;
  rep.gradient_sup_u = gradient_sup(u);
  rep.gradient_sup_v = gradient_sup(v);
  rep.passed = rep.floor_ok && rep.ceiling_ok;
  if (sup_bound) {
    rep.sup_bound = sup_bound;
    rep.sup_bound_ok = rep.sup_u <= *sup_bound + rep.tolerance;
    rep.passed = rep.passed && *rep.sup_bound_ok;
  }
  return rep;
}

std::pair<double, double> system_residuals(const GridFunction& u, const GridFunction& v, const SystemSpec& sys,
                                           double eps) {
  const auto uc = u.cell_values();
  const auto vc = v.cell_values();
  const auto ru = weak_residual(u, DirichletProblem(sys.p, cell_source(sys.f, uc, vc)), eps);
  const auto rv = weak_residual(v, DirichletProblem(sys.q, cell_source(sys.g, uc, vc)), eps);
  return {sup_norm(ru), sup_norm(rv)};
}

bool SystemSolution::verified() const {
  return converged && residual_ok && invariance_ok && (!box_report || box_report->passed) &&
         (!truncation || truncation->inactive());
}

void CooperativeOptions::validate() const {
  solver.validate();
  if (!(tolerance > 0.0)) throw ConfigError("fixed point tolerance must be positive");
  if (max_iterations < 1) throw ConfigError("fixed point max_iterations must be at least 1");
  if (!(ceiling_factor > 1.0)) throw ConfigError("ceiling factor must exceed 1");
  if (max_doublings < 0) throw ConfigError("max_doublings must be nonnegative");
  if (!(c0_safety > 0.0 && c0_safety <= 1.0)) throw ConfigError("c0 safety factor must lie in (0, 1]");
  if (!(residual_factor > 0.0)) throw ConfigError("residual factor must be positive");
}

SystemSolution run_fixed_point(const SystemSpec& sys, const CooperativeOptions& opts) {
  opts.validate();
  SystemSolution sol;
  const double sigma = infimum_sigma(sys.f, sys.g).sigma;
  const GridPtr& grid = sys.grid();
  const double eps = opts.solver.final_eps();
  const double residual_tol = opts.residual_factor * opts.solver.tolerance;

  try {
    auto est = estimate_c0(sigma, sys.p, sys.q, opts.solver, opts.c0_safety);
    sol.report_z1 = est.report_z1;
    sol.report_z2 = est.report_z2;
    BoxBounds box = std::move(est.box);

    for (int attempt = 0;; ++attempt) {
      sol.trace.clear();
      sol.invariance_ok = true;
      sol.invariance_worst = std::numeric_limits<double>::infinity();
      sol.converged = false;
      double L = 0.0;
      bool restart = false;
      GridFunction z1(grid, box.floor, true), z2(grid, box.floor, true);

      for (int it = 1; it <= opts.max_iterations; ++it) {
        const bool warm = it > 1;
        auto aux = auxiliary_step(z1, z2, box, sys, opts.solver, warm ? &z1 : nullptr, warm ? &z2 : nullptr);
        const double top = std::max(sup_norm(aux.u), sup_norm(aux.v));
        if (std::isinf(box.R)) box.R = opts.ceiling_factor * top;
        L = std::max(L, top);

        for (std::size_t n : grid->interior_nodes())
          sol.invariance_worst = std::min(sol.invariance_worst, std::min(aux.u[n], aux.v[n]) - box.floor[n]);
        if (sol.invariance_worst < -1e-8) sol.invariance_ok = false;

        TraceRow row;
        row.iter = it;
        row.sup_delta = std::max(sup_distance(aux.u, z1), sup_distance(aux.v, z2));
        const auto res = system_residuals(aux.u, aux.v, sys, eps);
        row.residual = std::max(res.first, res.second);
        sol.trace.push_back(row);

        z1 = std::move(aux.u);
        z2 = std::move(aux.v);
        sol.report_u = std::move(aux.report_u);
        sol.report_v = std::move(aux.report_v);
        sol.iterations = it;

        if (top > box.R) {
          restart = true;
          break;
        }
        // Iterate until the Picard lag is also invisible in the residual of the
        // untruncated system.
        if (row.sup_delta <= opts.tolerance && row.residual <= residual_tol) {
          sol.converged = true;
          break;
        }
      }

      sol.u = std::move(z1);
      sol.v = std::move(z2);
      box.L_R = L;
      if (restart) {
        if (attempt >= opts.max_doublings) {
          sol.message = "ceiling R = " + fmt(box.R) + " active after " + std::to_string(attempt) +
                        " doublings (R too small)";
          sol.box = box;
          return sol;
        }
        box.R *= 2.0;
        ++sol.ceiling_doublings;
        continue;
      }
      break;
    }

    sol.box = box;
    sol.truncation = truncation_activity(sol.u, sol.v, box);
    sol.box_report = verify_box(sol.u, sol.v, box);
    const auto res = system_residuals(sol.u, sol.v, sys, eps);
    sol.residual_u = res.first;
    sol.residual_v = res.second;
    sol.residual_tolerance = residual_tol;
    sol.residual_ok = std::max(res.first, res.second) <= sol.residual_tolerance;

    if (!sol.converged)
      sol.message = "Picard iteration did not converge in " + std::to_string(opts.max_iterations) +
                    " iterations (last sup delta " + fmt(sol.trace.back().sup_delta) + ")";
    else if (!sol.truncation->inactive())
      sol.message = "truncation active at the fixed point (box too small)";
    else if (!sol.box_report->passed)
      sol.message = "box verification failed";
    else if (!sol.residual_ok)
      sol.message = "residual of the untruncated system above tolerance";
    else if (!sol.invariance_ok)
      sol.message = "an iterate left the invariant set";
    else
      sol.message = "converged";
  } catch (const SolverError& e) {
    sol.converged = false;
    sol.message = e.what();
  }
  return sol;
}

}  // namespace pxsys
