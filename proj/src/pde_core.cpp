#include "pxsys/pde_core.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pxsys/error.hpp"

namespace pxsys {

DirichletProblem::DirichletProblem(ExponentField exponent, std::vector<double> cell_source)
    : grid(exponent.grid()), p(std::move(exponent)), source(std::move(cell_source)) {
  if (source.size() != grid->cell_count()) throw ConfigError("source must have one value per cell");
  if (!(p.min() > 1.0)) throw ConfigError("p- must exceed 1");
  for (double h : source)
    if (!std::isfinite(h)) throw ConfigError("source is not finite at some cell");
}

DirichletProblem DirichletProblem::constant_source(ExponentField exponent, double h) {
  const auto cells = exponent.grid()->cell_count();
  return DirichletProblem(std::move(exponent), std::vector<double>(cells, h));
}

void SolverConfig::validate() const {
  if (eps_schedule.empty()) throw ConfigError("solver: empty eps schedule");
  for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
    if (!(eps_schedule[i] > 0.0)) throw ConfigError("solver: eps values must be positive");
    if (i > 0 && !(eps_schedule[i] < eps_schedule[i - 1]))
      throw ConfigError("solver: eps schedule must be strictly decreasing");
  }
  if (!(tolerance > 0.0)) throw ConfigError("solver: tolerance must be positive");
  if (max_iterations < 1) throw ConfigError("solver: max_iterations must be at least 1");
  if (!(armijo > 0.0 && armijo < 0.5)) throw ConfigError("solver: armijo constant must lie in (0, 0.5)");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw ConfigError("solver: backtrack factor must lie in (0, 1)");
}

namespace {

// One-sided corner gradients of a cell. All cells share the same stencil on
// a uniform grid.
struct Stencil {
  int corners = 0;
  int terms = 0;
  double weight = 0.0;  // |cell| / terms
  std::array<std::array<double, 4>, 4> bx{};
  std::array<std::array<double, 4>, 4> by{};
};

Stencil make_stencil(const Grid& grid) {
  Stencil s;
  s.corners = grid.corners_per_cell();
  const double ix = 1.0 / grid.spacing(0);
  if (grid.dimension() == 1) {
    s.terms = 1;
    s.weight = grid.cell_volume();
    s.bx[0] = {-ix, ix, 0.0, 0.0};
    return s;
  }
  const double iy = 1.0 / grid.spacing(1);
  s.terms = 4;
  s.weight = grid.cell_volume() / 4.0;
  // Local corners: 0=(i,j) 1=(i+1,j) 2=(i,j+1) 3=(i+1,j+1). Term q uses the
  // two edges meeting at corner q.
  s.bx[0] = {-ix, ix, 0.0, 0.0};
  s.by[0] = {-iy, 0.0, iy, 0.0};
  s.bx[1] = {-ix, ix, 0.0, 0.0};
  s.by[1] = {0.0, -iy, 0.0, iy};
  s.bx[2] = {0.0, 0.0, -ix, ix};
  s.by[2] = {-iy, 0.0, iy, 0.0};
  s.bx[3] = {0.0, 0.0, -ix, ix};
  s.by[3] = {0.0, -iy, 0.0, iy};
  return s;
}

struct LocalGradient {
  double gx = 0.0;
  double gy = 0.0;
};

LocalGradient corner_gradient(const Stencil& s, int q, const std::array<double, 4>& ul) {
  LocalGradient g;
  for (int k = 0; k < s.corners; ++k) {
    g.gx += s.bx[q][k] * ul[k];
    g.gy += s.by[q][k] * ul[k];
  }
  return g;
}

std::array<double, 4> gather(const Grid& grid, const std::vector<double>& u, std::size_t cell) {
  const auto corners = grid.cell_corners(cell);
  std::array<double, 4> ul{};
  for (int k = 0; k < grid.corners_per_cell(); ++k) ul[k] = u[corners[k]];
  return ul;
}

// (s + eps^2)^{p/2} / p, with the degenerate point handled for eps = 0.
double density(double s2, double p) {
  if (s2 <= 0.0) return 0.0;
  return std::exp(0.5 * p * std::log(s2)) / p;
}

// (s + eps^2)^{(p-2)/2}; zero flux at a degenerate point.
double flux_coefficient(double s2, double p) {
  if (s2 <= 0.0) return 0.0;
  return std::exp(0.5 * (p - 2.0) * std::log(s2));
}

struct EnergyParts {
  double value = 0.0;
  double scale = 0.0;  // sum of magnitudes, for roundoff allowance
};

EnergyParts energy_parts(const Grid& grid, const Stencil& st, const std::vector<double>& u,
                         const DirichletProblem& prob, double eps) {
  EnergyParts e;
  const double eps2 = eps * eps;
  const int k = st.corners;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const auto ul = gather(grid, u, c);
    const double pc = prob.p.at_cell(c);
    double grad = 0.0;
    for (int q = 0; q < st.terms; ++q) {
      const auto g = corner_gradient(st, q, ul);
      grad += density(g.gx * g.gx + g.gy * g.gy + eps2, pc);
    }
    grad *= st.weight;
    double mean = 0.0;
    for (int i = 0; i < k; ++i) mean += ul[i];
    mean /= k;
    const double load = grid.cell_volume() * prob.source[c] * mean;
    e.value += grad - load;
    e.scale += std::abs(grad) + std::abs(load);
  }
  return e;
}

std::vector<double> nodal_gradient(const Grid& grid, const Stencil& st, const std::vector<double>& u,
                                   const DirichletProblem& prob, double eps) {
  std::vector<double> r(grid.node_count(), 0.0);
  const double eps2 = eps * eps;
  const int k = st.corners;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const auto corners = grid.cell_corners(c);
    const auto ul = gather(grid, u, c);
    const double pc = prob.p.at_cell(c);
    std::array<double, 4> local{};
    for (int q = 0; q < st.terms; ++q) {
      const auto g = corner_gradient(st, q, ul);
      const double a = st.weight * flux_coefficient(g.gx * g.gx + g.gy * g.gy + eps2, pc);
      for (int i = 0; i < k; ++i) local[i] += a * (g.gx * st.bx[q][i] + g.gy * st.by[q][i]);
    }
    const double load = grid.cell_volume() * prob.source[c] / k;
    for (int i = 0; i < k; ++i) r[corners[i]] += local[i] - load;
  }
  for (std::size_t n = 0; n < r.size(); ++n)
    if (grid.is_boundary(n)) r[n] = 0.0;
  return r;
}

// Fixed-pattern sparse Hessian over the interior unknowns.
class HessianAssembler {
public:
  HessianAssembler(const Grid& grid, const Stencil& st) : grid_(grid), st_(st) {
    const auto idx = grid.interior_index();
    const auto m = static_cast<Eigen::Index>(grid.interior_nodes().size());
    std::vector<Eigen::Triplet<double>> trip;
    const int k = st.corners;
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
      const auto corners = grid.cell_corners(c);
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
          const long ia = idx[corners[a]], ib = idx[corners[b]];
          if (ia >= 0 && ib >= 0) trip.emplace_back(ia, ib, 1.0);
        }
    }
    matrix_.resize(m, m);
    matrix_.setFromTriplets(trip.begin(), trip.end());
    matrix_.makeCompressed();

    slots_.assign(grid.cell_count() * 16, -1);
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
      const auto corners = grid.cell_corners(c);
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
          const long ia = idx[corners[a]], ib = idx[corners[b]];
          if (ia < 0 || ib < 0) continue;
          const double* base = matrix_.valuePtr();
          slots_[c * 16 + a * 4 + b] = &matrix_.coeffRef(ia, ib) - base;
        }
    }
  }

  /// Hessian of the energy; `unit_coefficient` gives the p = 2 stiffness.
  const Eigen::SparseMatrix<double>& assemble(const std::vector<double>& u, const DirichletProblem* prob,
                                              double eps, bool unit_coefficient) {
    std::fill(matrix_.valuePtr(), matrix_.valuePtr() + matrix_.nonZeros(), 0.0);
    double* val = matrix_.valuePtr();
    const double eps2 = eps * eps;
    const int k = st_.corners;
    for (std::size_t c = 0; c < grid_.cell_count(); ++c) {
      std::array<double, 16> local{};
      const auto ul = unit_coefficient ? std::array<double, 4>{} : gather(grid_, u, c);
      const double pc = unit_coefficient ? 2.0 : prob->p.at_cell(c);
      for (int q = 0; q < st_.terms; ++q) {
        const auto g = corner_gradient(st_, q, ul);
        const double s2 = g.gx * g.gx + g.gy * g.gy + eps2;
        double a = 1.0, b = 0.0;
        if (!unit_coefficient) {
          a = flux_coefficient(s2, pc);
          b = (pc - 2.0) * a / s2;
        }
        for (int i = 0; i < k; ++i) {
          const double gi = g.gx * st_.bx[q][i] + g.gy * st_.by[q][i];
          for (int j = 0; j < k; ++j) {
            const double gj = g.gx * st_.bx[q][j] + g.gy * st_.by[q][j];
            const double bb = st_.bx[q][i] * st_.bx[q][j] + st_.by[q][i] * st_.by[q][j];
            local[i * 4 + j] += st_.weight * (a * bb + b * gi * gj);
          }
        }
      }
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
          const long slot = slots_[c * 16 + i * 4 + j];
          if (slot >= 0) val[slot] += local[i * 4 + j];
        }
    }
    return matrix_;
  }

private:
  const Grid& grid_;
  const Stencil& st_;
  Eigen::SparseMatrix<double> matrix_;
  std::vector<long> slots_;
};

double interior_sup(const Grid& grid, const std::vector<double>& r) {
  double s = 0.0;
  for (std::size_t n : grid.interior_nodes()) s = std::max(s, std::abs(r[n]));
  return s;
}

}  // namespace

double energy(const GridFunction& u, const DirichletProblem& prob, double eps) {
  const Stencil st = make_stencil(*prob.grid);
  return energy_parts(*prob.grid, st, u.values, prob, eps).value;
}

GridFunction weak_residual(const GridFunction& u, const DirichletProblem& prob, double eps) {
  const Stencil st = make_stencil(*prob.grid);
  return GridFunction(prob.grid, nodal_gradient(*prob.grid, st, u.values, prob, eps), true);
}

SolveResult solve_dirichlet(const DirichletProblem& prob, const SolverConfig& cfg, const GridFunction* initial) {
  cfg.validate();
  const Grid& grid = *prob.grid;
  const Stencil st = make_stencil(grid);
  const auto interior = grid.interior_nodes();
  const auto m = static_cast<Eigen::Index>(interior.size());

  SolveResult result;
  result.u = initial ? GridFunction(prob.grid, initial->values, true) : GridFunction::zeros(prob.grid);
  std::vector<double>& u = result.u.values;
  SolveReport& report = result.report;

  std::vector<double> schedule = cfg.eps_schedule;
  if (initial && cfg.warm_start_final_only) schedule = {cfg.final_eps()};

  HessianAssembler hess(grid, st);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> newton;
  newton.analyzePattern(hess.assemble(u, &prob, schedule.front(), true));
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> fallback;
  bool fallback_ready = false;

  std::vector<double> trial(u.size());
  Eigen::VectorXd rhs(m), dir(m);

  bool all_converged = true;
  for (double eps : schedule) {
    StageRecord stage;
    stage.eps = eps;
    bool converged = false;
    EnergyParts e = energy_parts(grid, st, u, prob, eps);
    std::vector<double> r = nodal_gradient(grid, st, u, prob, eps);
    double rn = interior_sup(grid, r);

    for (int it = 0; it <= cfg.max_iterations; ++it) {
      if (rn <= cfg.tolerance) {
        converged = true;
        break;
      }
      if (it == cfg.max_iterations) break;
      ++stage.iterations;

      for (Eigen::Index i = 0; i < m; ++i) rhs[i] = -r[interior[i]];
      newton.factorize(hess.assemble(u, &prob, eps, false));
      bool use_newton = newton.info() == Eigen::Success;
      if (use_newton) {
        dir = newton.solve(rhs);
        use_newton = dir.allFinite() && dir.dot(rhs) > 0.0;
      }

      auto line_search = [&](const Eigen::VectorXd& d) {
        const double slope = -d.dot(rhs);
        const double noise = 64.0 * std::numeric_limits<double>::epsilon() * e.scale;
        double t = 1.0;
        for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
          trial = u;
          for (Eigen::Index i = 0; i < m; ++i) trial[interior[i]] += t * d[i];
          const EnergyParts et = energy_parts(grid, st, trial, prob, eps);
          if (et.value <= e.value + cfg.armijo * t * slope + noise) {
            u.swap(trial);
            e = et;
            return true;
          }
          t *= cfg.backtrack;
        }
        return false;
      };

      bool accepted = use_newton && line_search(dir);
      if (!accepted) {
        // Preconditioned gradient step with the p = 2 stiffness.
        if (!fallback_ready) {
          fallback.compute(hess.assemble(u, nullptr, 0.0, true));
          fallback_ready = true;
        }
        dir = fallback.solve(rhs);
        ++stage.gradient_fallbacks;
        accepted = line_search(dir);
      }
      if (!accepted) {
        std::ostringstream os;
        os << "line search stalled at eps=" << eps << " with residual " << rn;
        report.message = os.str();
        break;
      }
      r = nodal_gradient(grid, st, u, prob, eps);
      rn = interior_sup(grid, r);
    }

    stage.residual = rn;
    stage.energy = e.value;
    report.iterations += stage.iterations;
    report.continuation.push_back(stage);
    report.residual = rn;
    report.energy = e.value;
    if (!converged) {
      all_converged = false;
      if (report.message.empty()) {
        std::ostringstream os;
        os << "no convergence within " << cfg.max_iterations << " iterations at eps=" << eps
           << " (residual " << rn << ")";
        report.message = os.str();
      }
      break;
    }
  }
  report.converged = all_converged;
  if (all_converged) report.message = "converged";
  return result;
}

OrderingReport compare_solutions(const GridFunction& u1, const GridFunction& u2, double tol) {
  OrderingReport rep;
  rep.tolerance = tol;
  for (std::size_t n = 0; n < u1.size(); ++n) {
    const double v = u1[n] - u2[n];
    if (v > rep.max_violation) {
      rep.max_violation = v;
      rep.node = n;
    }
  }
  rep.location = u1.grid->node_coords(rep.node);
  rep.ordered = rep.max_violation <= tol;
  return rep;
}

InequalityReport verify_supersolution(const GridFunction& u, const DirichletProblem& prob, double eps, double tol,
                                      Side side) {
  const GridFunction r = weak_residual(u, prob, eps);
  InequalityReport rep;
  rep.side = side;
  rep.tolerance = tol;
  const auto interior = prob.grid->interior_nodes();
  if (interior.empty()) return rep;
  rep.worst = r[interior.front()];
  rep.node = interior.front();
  for (std::size_t n : interior) {
    const bool worse = side == Side::Super ? r[n] < rep.worst : r[n] > rep.worst;
    if (worse) {
      rep.worst = r[n];
      rep.node = n;
    }
  }
  rep.location = prob.grid->node_coords(rep.node);
  rep.holds = side == Side::Super ? rep.worst >= -tol : rep.worst <= tol;
  return rep;
}

}  // namespace pxsys
