#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pxsys/cooperative.hpp"

namespace pxsys {

/// Solution of -Delta_p w = lambda^{-1} (1 off the strip, -1 in it).
struct Subsolution {
  GridFunction w;
  SolveReport report;
  double c3 = 0.0;  ///< min over interior nodes of w / d
  double c4 = 0.0;  ///< sup w * lambda^{1/(p+ - 1)}
};

/// Throws ConfigError when the solution is not positive in the interior
/// (delta too large).
Subsolution build_subsolution(double lambda, double delta, const ExponentField& p, const SolverConfig& cfg);

struct SubsolutionPair {
  Subsolution u;
  Subsolution v;
};
SubsolutionPair build_subsolutions(double lambda, double delta, const ExponentField& p, const ExponentField& q,
                                   const SolverConfig& cfg);

struct InnerOptions {
  double tolerance = 1e-8;
  int max_iterations = 200;
  double floor = 1e-8;
};

/// Solution of -Delta_p w = lambda (1 off the strip, w^{-a(x)} in it).
struct Supersolution {
  GridFunction w;
  SolveReport report;
  std::vector<double> source;  ///< cell source of the final solve
  std::vector<double> inner_trace;      ///< sup change per inner iteration
  std::vector<double> inner_residuals;  ///< Newton residual per inner iteration
  int inner_iterations = 0;
  bool lower_bound_ok = false;  ///< min(delta, d) <= w at every node
  double lower_bound_slack = 0.0;
  double c1 = 0.0;  ///< sup w * lambda^{-1/(p- - 1)}
  /// Least-squares slope of log w against log d over strip nodes.
  double theta = 0.0;
  double theta_prefactor = 0.0;
};

/// Inner Picard iteration started from the strip source lambda delta^{-a}.
/// Throws SolverError when the inner iteration does not converge.
Supersolution build_supersolution(double lambda, double delta, const ExponentField& p, const ExponentField& a,
                                  const SolverConfig& cfg, const InnerOptions& inner = {});

struct SupersolutionPair {
  Supersolution u;
  Supersolution v;
};
/// u uses the exponent alpha1 of f, v the exponent beta2 of g.
SupersolutionPair build_supersolutions(double lambda, double delta, const SystemSpec& sys, const SolverConfig& cfg,
                                       const InnerOptions& inner = {});

/// One comparison inequality, checked both weakly (against every interior hat
/// function) and cellwise on the sources.
struct ComparisonCheck {
  std::string name;
  InequalityReport weak;
  bool cellwise_ok = false;
  double cellwise_worst = 0.0;  ///< signed slack, negative when violated
  std::size_t cell = 0;
  bool holds() const { return weak.holds && cellwise_ok; }
};

struct OrderInterval {
  GridFunction u_sub, v_sub, u_super, v_super;
  double lambda = 0.0;
  double delta = 0.0;
  Subsolution sub_u_info, sub_v_info;
  Supersolution super_u_info, super_v_info;
  std::vector<ComparisonCheck> checks;  ///< sub u, sub v, super u, super v
  OrderingReport order_u, order_v;

  bool sub_ok() const;
  bool super_ok() const;
  bool ordered() const { return order_u.ordered && order_v.ordered; }
  bool verified() const { return sub_ok() && super_ok() && ordered(); }
};

/// Builds both pairs for one lambda and runs every check.
OrderInterval build_order_interval(double lambda, double delta, const SystemSpec& sys, const SolverConfig& cfg,
                                   double tol, const InnerOptions& inner = {});

struct LambdaAttempt {
  double lambda = 0.0;
  bool admissible = false;
  std::string failure;  ///< first failing check with its location
};

struct LambdaSearch {
  bool found = false;
  std::vector<LambdaAttempt> attempts;
  std::optional<OrderInterval> interval;
  std::string message;
};

struct CompetitiveOptions {
  SolverConfig solver;
  double delta = 0.05;
  double lambda_start = 2.0;
  double lambda_cap = 32768.0;
  double tolerance = 1e-6;
  int max_iterations = 200;
  double membership_tolerance = 1e-6;
  double residual_factor = 10.0;
  InnerOptions inner;

  void validate() const;
};

/// Geometric search lambda = start, 2 start, ... up to the cap.
LambdaSearch find_lambda(const SystemSpec& sys, const CompetitiveOptions& opts);

/// Picard iteration of T from (u_super, v_super), checking membership in the
/// order interval after every step. Failures are reported, not thrown.
SystemSolution run_order_interval_iteration(const OrderInterval& k, const SystemSpec& sys,
                                            const CompetitiveOptions& opts, bool from_super = true);

}  // namespace pxsys
