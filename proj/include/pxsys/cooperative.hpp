#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pxsys/exponents.hpp"
#include "pxsys/function_space.hpp"
#include "pxsys/nonlinearity.hpp"
#include "pxsys/pde_core.hpp"

namespace pxsys {

/// f, g together with the exponents of the two operators.
struct SystemSpec {
  NonlinearitySpec f;
  NonlinearitySpec g;
  ExponentField p;
  ExponentField q;

  const GridPtr& grid() const { return p.grid(); }
};

/// Confinement box c0 d(x) <= z <= R.
struct BoxBounds {
  double c0 = 0.0;
  /// min over interior nodes and cells of min(z1, z2) / d, before the safety factor
  double min_ratio = 0.0;
  std::vector<double> floor;       ///< c0 d at nodes
  std::vector<double> cell_floor;  ///< c0 d at cell centers
  double R = std::numeric_limits<double>::infinity();
  /// Largest sup norm seen over all Picard iterates (empirical a priori bound).
  std::optional<double> L_R;
};

struct TorsionEstimate {
  BoxBounds box;
  GridFunction z1;
  GridFunction z2;
  SolveReport report_z1;
  SolveReport report_z2;
};

/// Solves -Delta_p z1 = sigma, -Delta_q z2 = sigma and sets
/// c0 = safety * min over interior nodes and cells of min(z1, z2) / d.
/// Throws SolverError when either torsion solve fails.
TorsionEstimate estimate_c0(double sigma, const ExponentField& p, const ExponentField& q, const SolverConfig& cfg,
                            double safety = 0.9);

struct TruncationReport {
  std::size_t floor_active_nodes = 0;
  std::size_t floor_active_cells = 0;
  std::size_t ceiling_active_nodes = 0;
  std::size_t ceiling_active_cells = 0;
  double max_change = 0.0;  ///< max |z~ - z| over interior nodes and cells

  bool inactive() const {
    return floor_active_nodes + floor_active_cells + ceiling_active_nodes + ceiling_active_cells == 0;
  }
  bool ceiling_active() const { return ceiling_active_nodes + ceiling_active_cells > 0; }
};

/// Activity of the clamp [c0 d, R] on (z1, z2) at interior nodes and cells.
TruncationReport truncation_activity(const GridFunction& z1, const GridFunction& z2, const BoxBounds& box);

struct AuxiliaryResult {
  GridFunction u;
  GridFunction v;
  SolveReport report_u;
  SolveReport report_v;
  TruncationReport truncation;
};

/// One application of the auxiliary map: truncate (z1, z2) at cell centers,
/// evaluate f, g there and solve the two decoupled Dirichlet problems. Warm
/// starts are optional. Throws SolverError naming the failed equation.
AuxiliaryResult auxiliary_step(const GridFunction& z1, const GridFunction& z2, const BoxBounds& box,
                               const SystemSpec& sys, const SolverConfig& cfg, const GridFunction* warm_u = nullptr,
                               const GridFunction* warm_v = nullptr);

struct TraceRow {
  int iter = 0;
  double sup_delta = 0.0;
  double residual = 0.0;
};

struct BoxReport {
  bool passed = false;
  bool floor_ok = false;
  bool ceiling_ok = false;
  double tolerance = 0.0;
  double worst_floor_slack = 0.0;  ///< min over nodes of min(u, v) - floor
  std::size_t node = 0;
  std::array<double, 2> location{0.0, 0.0};
  double sup_u = 0.0;
  double sup_v = 0.0;
  double R = 0.0;
  /// Largest one-sided discrete gradient; informational only.
  double gradient_sup_u = 0.0;
  double gradient_sup_v = 0.0;
  std::optional<double> sup_bound;
  std::optional<bool> sup_bound_ok;
};

/// Nodewise floor check with tolerance 1e-8 (1 + sup u), sup norms against R
/// and against an optional external bound.
BoxReport verify_box(const GridFunction& u, const GridFunction& v, const BoxBounds& box,
                     std::optional<double> sup_bound = std::nullopt);

/// Weak residuals of both equations of the untruncated system at (u, v).
std::pair<double, double> system_residuals(const GridFunction& u, const GridFunction& v, const SystemSpec& sys,
                                           double eps);

struct SystemSolution {
  GridFunction u;
  GridFunction v;
  SolveReport report_u;
  SolveReport report_v;
  std::vector<TraceRow> trace;
  bool converged = false;
  int iterations = 0;
  std::string message;

  double residual_u = 0.0;
  double residual_v = 0.0;
  double residual_tolerance = 0.0;
  bool residual_ok = false;

  /// Every iterate stays in the invariant set within 1e-8.
  bool invariance_ok = true;
  double invariance_worst = 0.0;

  // Cooperative only.
  std::optional<BoxBounds> box;
  std::optional<BoxReport> box_report;
  std::optional<TruncationReport> truncation;
  int ceiling_doublings = 0;
  SolveReport report_z1;
  SolveReport report_z2;

  bool verified() const;
};

struct CooperativeOptions {
  SolverConfig solver;
  double tolerance = 1e-6;
  int max_iterations = 200;
  double ceiling_factor = 4.0;
  int max_doublings = 5;
  double c0_safety = 0.9;
  double residual_factor = 10.0;

  void validate() const;
};

/// Picard iteration of the auxiliary map from (floor, floor). R is set from
/// the first iterate and doubled (with a restart) while the ceiling is active.
/// Non-convergence and solver failures are reported in the result, not thrown.
SystemSolution run_fixed_point(const SystemSpec& sys, const CooperativeOptions& opts);

}  // namespace pxsys
