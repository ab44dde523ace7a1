#pragma once

#include <array>
#include <string>
#include <vector>

#include "pxsys/exponents.hpp"
#include "pxsys/function_space.hpp"
#include "pxsys/grid.hpp"

namespace pxsys {

/// -div(|grad u|^{p(x)-2} grad u) = h in the domain, u = 0 on the boundary.
/// The source is sampled at cell centers, which are strictly interior.
struct DirichletProblem {
  GridPtr grid;
  ExponentField p;
  std::vector<double> source;

  DirichletProblem() = default;
  DirichletProblem(ExponentField exponent, std::vector<double> cell_source);
  static DirichletProblem constant_source(ExponentField exponent, double h);
};

struct SolverConfig {
  /// Gradient regularization levels, strictly decreasing, all positive.
  std::vector<double> eps_schedule{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  /// Sup norm of the weak residual accepted at every stage.
  double tolerance = 1e-11;
  /// Newton iterations allowed per stage.
  int max_iterations = 100;
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 60;
  /// With an initial guess, run only the last stage of the schedule.
  bool warm_start_final_only = true;

  void validate() const;
  double final_eps() const { return eps_schedule.back(); }
};

struct StageRecord {
  double eps = 0.0;
  int iterations = 0;
  double residual = 0.0;
  double energy = 0.0;
  int gradient_fallbacks = 0;
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  double energy = 0.0;
  std::vector<StageRecord> continuation;
  std::string message;
};

struct SolveResult {
  GridFunction u;
  SolveReport report;
};

/// Discrete energy
///   sum_cells sum_corners |cell|/k (|g|^2 + eps^2)^{p_c/2} / p_c - sum_cells |cell| h_c u_c
/// where g runs over the k one-sided corner gradients of each cell (the two
/// triangulations of a square, averaged) and u_c is the cell-center value.
double energy(const GridFunction& u, const DirichletProblem& prob, double eps);

/// Gradient of `energy` with respect to the interior nodal values; boundary
/// entries are zero.
GridFunction weak_residual(const GridFunction& u, const DirichletProblem& prob, double eps);

/// Damped Newton with Armijo backtracking on the regularized energy,
/// continued along the eps schedule. On failure the best iterate is returned
/// with `converged == false`.
SolveResult solve_dirichlet(const DirichletProblem& prob, const SolverConfig& cfg,
                            const GridFunction* initial = nullptr);

struct OrderingReport {
  bool ordered = true;
  double max_violation = 0.0;  ///< max(u1 - u2), clipped at 0
  std::size_t node = 0;
  std::array<double, 2> location{0.0, 0.0};
  double tolerance = 0.0;
};

/// Is u1 <= u2 + tol at every node?
OrderingReport compare_solutions(const GridFunction& u1, const GridFunction& u2, double tol = 1e-8);

enum class Side { Super, Sub };

struct InequalityReport {
  Side side = Side::Super;
  bool holds = true;
  /// Super: min residual (must be >= -tol). Sub: max residual (<= tol).
  double worst = 0.0;
  std::size_t node = 0;
  std::array<double, 2> location{0.0, 0.0};
  double tolerance = 0.0;
};

/// Weak inequality -Delta_p u >= h (Super) or <= h (Sub), tested against
/// every interior hat function.
InequalityReport verify_supersolution(const GridFunction& u, const DirichletProblem& prob, double eps,
                                      double tol, Side side = Side::Super);

}  // namespace pxsys
