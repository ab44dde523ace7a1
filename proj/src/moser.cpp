#include "pxsys/moser.hpp"

#include <algorithm>
#include <cmath>

#include "pxsys/error.hpp"

namespace pxsys {

MoserChain k_sequences(const ExponentField& p, int N, int n_max) {
  if (n_max < 1) throw ConfigError("moser: n_max must be at least 1");
  MoserChain chain;
  chain.N = N;
  chain.n_max = n_max;
  chain.p = p;
  chain.p_star = sobolev_conjugate(p, N);
  const std::size_t nodes = p.node_values().size();
  chain.k_nodes.assign(n_max + 1, std::vector<double>(nodes, 0.0));
  chain.k_minus.assign(n_max + 1, 0.0);
  for (int n = 1; n <= n_max; ++n) {
    double kmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes; ++i) {
      const double ratio = chain.p_star.at_node(i) / p.at_node(i);
      const double k = (chain.k_nodes[n - 1][i] + 1.0) * ratio - 1.0;
      chain.k_nodes[n][i] = k;
      kmin = std::min(kmin, k);
    }
    chain.k_minus[n] = kmin;
  }
  return chain;
}

SeriesReport series_limit(double p_minus, int N, int terms) {
  if (!(p_minus > 1.0 && p_minus < N)) throw ConfigError("series_limit: need 1 < p- < N");
  SeriesReport rep;
  rep.p_minus = p_minus;
  rep.p_minus_star = sobolev_conjugate(p_minus, N);
  rep.limit = rep.p_minus_star / (rep.p_minus_star - p_minus);
  const double r = p_minus / rep.p_minus_star;
  double term = 1.0, sum = 0.0;
  for (int n = 1; n <= terms; ++n) {
    sum += term;
    rep.partial_sums.push_back(sum);
    term *= r;
  }
  return rep;
}

std::vector<double> chain_partial_sums(const std::vector<double>& k_minus) {
  std::vector<double> sums;
  double s = 1.0;
  sums.push_back(s);
  for (std::size_t i = 1; i + 1 < k_minus.size(); ++i) {
    s += 1.0 / (k_minus[i] + 1.0);
    sums.push_back(s);
  }
  return sums;
}

void norm_chain(const GridFunction& u, MoserChain& chain) {
  const GridFunction excess = positive_excess(u, 1.0);
  chain.sup_excess = sup_norm(excess);
  chain.norms.clear();
  for (int n = 0; n <= chain.n_max; ++n)
    chain.norms.push_back(luxemburg_norm(excess, chain.p_star.scaled(chain.k_minus[n] + 1.0)));

  const Grid& grid = *u.grid;
  const auto& w = grid.node_weights();
  const double w_min = *std::min_element(w.begin(), w.end());
  const double scale = chain.k_minus[chain.n_max] + 1.0;
  double a = 0.0;
  for (double r : {scale * chain.p_star.inf(), scale * chain.p_star.sup()})
    a = std::max({a, std::abs(1.0 - std::pow(grid.domain_volume(), 1.0 / r)), 1.0 - std::pow(w_min, 1.0 / r)});
  chain.allowance = chain.sup_excess * a;

  chain.monotone = true;
  for (int n = 1; n <= chain.n_max; ++n)
    if (std::abs(chain.norms[n] - chain.sup_excess) > std::abs(chain.norms[n - 1] - chain.sup_excess) + 1e-12)
      chain.monotone = false;
  chain.final_ok = std::abs(chain.norms.back() - chain.sup_excess) <= chain.allowance + 1e-3;
}

namespace {

// log of every factor of the chain inequality except C, at level n.
double log_rhs_without_c(const MoserChain& chain, int n, double other_norm, double b) {
  const double pp = chain.p.sup(), pm = chain.p.inf();
  const double pm_star = sobolev_conjugate(pm, chain.N);
  const double k = chain.k_minus[n], kprev = chain.k_minus[n - 1];
  const double e = chain.norms[n], prev = chain.norms[n - 1];
  const double p_sel = e > 1.0 ? pp : pm;
  const double log_a = pp / ((k + 1.0) * p_sel) * (std::log(k + 1.0) - std::log(k * pp + 1.0) / pp);
  const double log_v = std::log1p(std::pow(other_norm, b)) / ((kprev + 1.0) * pm_star);
  return log_a + (pp / pm) * std::log(prev) + log_v;
}

}  // namespace

ChainFit fit_chain(const MoserChain& chain, double other_norm, double coupling_exponent) {
  ChainFit fit;
  fit.trivial = std::all_of(chain.norms.begin(), chain.norms.end(), [](double e) { return e == 0.0; });
  for (int n = 1; n <= chain.n_max; ++n) {
    const double e = chain.norms[n];
    double lc = -std::numeric_limits<double>::infinity();
    if (e > 0.0) {
      const double k = chain.k_minus[n];
      lc = chain.norms[n - 1] > 0.0
               ? (k + 1.0) * (std::log(e) - log_rhs_without_c(chain, n, other_norm, coupling_exponent))
               : std::numeric_limits<double>::infinity();
    }
    fit.log_c.push_back(lc);
    fit.log_c_fit = std::max(fit.log_c_fit, lc);
  }
  fit.all_hold = fit.log_c_fit < std::numeric_limits<double>::infinity();
  for (int n = 1; n <= chain.n_max; ++n) {
    const double e = chain.norms[n];
    bool ok = true;
    if (e > 0.0) {
      const double k = chain.k_minus[n];
      const double bound = fit.log_c_fit / (k + 1.0) + log_rhs_without_c(chain, n, other_norm, coupling_exponent);
      ok = std::log(e) <= bound + 1e-12 * (1.0 + std::abs(bound));
    }
    fit.holds.push_back(ok);
    fit.all_hold = fit.all_hold && ok;
  }
  return fit;
}

BoundReport structural_bound(const GridFunction& u, const GridFunction& v, const MoserChain& chain_u,
                             const ExponentField& q, const ExponentField& coupling, int N) {
  BoundReport rep;
  const double pp = chain_u.p.sup(), pm = chain_u.p.inf();
  rep.sup = sup_norm(u);
  rep.own_norm = luxemburg_norm(u, chain_u.p_star);
  rep.other_norm = luxemburg_norm(v, sobolev_conjugate(q, N));
  rep.upper_branch = rep.other_norm > 1.0;
  rep.coupling_exponent = rep.upper_branch ? coupling.sup() : coupling.inf();
  const double pm_star = sobolev_conjugate(pm, N);
  rep.exponent = 1.0 / (pm_star - pm);
  rep.rhs = std::pow(std::max(1.0, rep.own_norm), pp / pm) *
            std::pow(1.0 + std::max(1.0, std::pow(rep.other_norm, rep.coupling_exponent)), rep.exponent);
  rep.c_hat = rep.sup / rep.rhs;
  if (!chain_u.norms.empty()) rep.chain = fit_chain(chain_u, rep.other_norm, rep.coupling_exponent);
  return rep;
}

MoserReport fit_and_bound(const GridFunction& u, const GridFunction& v, const ExponentField& p,
                          const ExponentField& q, const ExponentField& beta1, const ExponentField& alpha2, int N,
                          int n_max) {
  MoserReport rep;
  rep.chain_u = k_sequences(p, N, n_max);
  rep.chain_v = k_sequences(q, N, n_max);
  norm_chain(u, rep.chain_u);
  norm_chain(v, rep.chain_v);
  rep.series_u = series_limit(p.inf(), N);
  rep.series_v = series_limit(q.inf(), N);
  const auto long_u = k_sequences(p, N, 40);
  const auto long_v = k_sequences(q, N, 40);
  rep.series_error_u = std::abs(chain_partial_sums(long_u.k_minus).back() - rep.series_u.limit);
  rep.series_error_v = std::abs(chain_partial_sums(long_v.k_minus).back() - rep.series_v.limit);
  rep.bound_u = structural_bound(u, v, rep.chain_u, q, beta1, N);
  rep.bound_v = structural_bound(v, u, rep.chain_v, p, alpha2, N);
  return rep;
}

StabilityReport constant_stability(const std::vector<double>& values, double tolerance) {
  StabilityReport rep;
  rep.values = values;
  rep.tolerance = tolerance;
  if (values.empty()) return rep;
  rep.reference = values.front();
  for (double v : values) rep.max_deviation = std::max(rep.max_deviation, std::abs(v / rep.reference - 1.0));
  rep.stable = rep.max_deviation <= tolerance;
  return rep;
}

}  // namespace pxsys
