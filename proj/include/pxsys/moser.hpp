#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "pxsys/exponents.hpp"
#include "pxsys/function_space.hpp"

namespace pxsys {

/// Exponent recursion (k_n(x) + 1) = (p*(x) / p(x))^n and the norm chain
/// ||(u - 1)^+|| in L^{(k_n^- + 1) p*(x)}, n = 0 .. n_max (k_0 = 0).
struct MoserChain {
  int N = 0;
  int n_max = 0;
  ExponentField p;
  ExponentField p_star;
  std::vector<std::vector<double>> k_nodes;  ///< [n][node], n = 0 .. n_max
  std::vector<double> k_minus;               ///< n = 0 .. n_max

  // Filled by norm_chain.
  std::vector<double> norms;
  double sup_excess = 0.0;   ///< sup of (u - 1)^+
  double allowance = 0.0;    ///< quadrature allowance of the last entry
  bool monotone = false;     ///< |entry_n - sup| nonincreasing in n
  bool final_ok = false;     ///< |entry_last - sup| <= allowance + 1e-3
};

/// Throws HypothesisError("exponent range") when p+ >= N, ConfigError when n_max < 1.
MoserChain k_sequences(const ExponentField& p, int N, int n_max);

struct SeriesReport {
  double p_minus = 0.0;
  double p_minus_star = 0.0;
  double limit = 0.0;                 ///< (p-)* / ((p-)* - p-)
  std::vector<double> partial_sums;   ///< 1 + sum_{i=1}^{n-1} 1/(k_i^- + 1), n = 1 .. terms
};

SeriesReport series_limit(double p_minus, int N, int terms = 40);
/// Partial sums taken from an explicit k^- sequence (k_minus[0] = 0 ignored).
std::vector<double> chain_partial_sums(const std::vector<double>& k_minus);

/// Luxemburg norms of (u - 1)^+ for every level of the chain.
void norm_chain(const GridFunction& u, MoserChain& chain);

/// The chain inequality with one constant C:
///   e_n <= C^{1/(k_n+1)} A_n e_{n-1}^{p+/p-} (1 + ||v||^{b})^{1/((k_{n-1}+1)(p-)*)}
/// where A_n = ((k_n+1)/(k_n p+ + 1)^{1/p+})^{p+/((k_n+1) p^{+-})}. Constants
/// are handled through their logarithms.
struct ChainFit {
  std::vector<double> log_c;   ///< implied log C per n = 1 .. n_max (-inf when e_n = 0)
  double log_c_fit = -std::numeric_limits<double>::infinity();
  std::vector<bool> holds;     ///< inequality with the fitted constant, per n
  bool all_hold = false;
  bool trivial = false;        ///< every entry is zero (u <= 1)
};

ChainFit fit_chain(const MoserChain& chain, double other_norm, double coupling_exponent);

struct BoundReport {
  double sup = 0.0;               ///< ||u||_inf
  double own_norm = 0.0;          ///< ||u||_{p*(x)}
  double other_norm = 0.0;        ///< ||v||_{q*(x)}
  double coupling_exponent = 0.0; ///< beta1^+ or beta1^- per the norm-vs-1 test
  bool upper_branch = false;      ///< other_norm > 1
  double exponent = 0.0;          ///< 1 / ((p-)* - p-)
  double rhs = 0.0;               ///< structural right-hand side with C = 1
  double c_hat = 0.0;             ///< sup / rhs
  ChainFit chain;
};

/// Structural right-hand side of the a priori bound for one component.
BoundReport structural_bound(const GridFunction& u, const GridFunction& v, const MoserChain& chain_u,
                             const ExponentField& q, const ExponentField& coupling, int N);

struct MoserReport {
  MoserChain chain_u;
  MoserChain chain_v;
  SeriesReport series_u;
  SeriesReport series_v;
  double series_error_u = 0.0;  ///< |chain partial sum - closed form| at 40 terms
  double series_error_v = 0.0;
  BoundReport bound_u;  ///< uses beta1 of f
  BoundReport bound_v;  ///< uses alpha2 of g
};

/// Full evaluation for a solution pair: chains, series, (u) and (v) bounds.
MoserReport fit_and_bound(const GridFunction& u, const GridFunction& v, const ExponentField& p,
                          const ExponentField& q, const ExponentField& beta1, const ExponentField& alpha2, int N,
                          int n_max = 6);

struct StabilityReport {
  std::vector<double> values;
  double reference = 0.0;
  double max_deviation = 0.0;  ///< max |value / reference - 1|
  double tolerance = 0.2;
  bool stable = false;
};

/// Relative spread of a family of fitted constants against the first one.
StabilityReport constant_stability(const std::vector<double>& values, double tolerance = 0.2);

}  // namespace pxsys
