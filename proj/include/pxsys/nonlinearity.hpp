#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pxsys/exponents.hpp"
#include "pxsys/function_space.hpp"

namespace pxsys {

/// Catalog of right-hand sides.
///   Product: m (1 + s1^alpha(x)) (1 + s2^beta(x))
///   Sum:     m (s^alpha(x) + s^beta(x)), s = s1 or s2 per `argument`
struct NonlinearitySpec {
  enum class Form { Product, Sum };
  enum class Argument { First, Second };

  Form form = Form::Product;
  double m = 1.0;
  ExponentField alpha;
  ExponentField beta;
  Argument argument = Argument::Second;

  static NonlinearitySpec product(double m, ExponentField alpha, ExponentField beta);
  static NonlinearitySpec sum(Argument arg, ExponentField alpha, ExponentField beta, double m = 1.0);

  std::string describe() const;
};

/// Closed-form value with the exponents given explicitly. Throws DomainError
/// unless s1, s2 > 0.
double evaluate(const NonlinearitySpec& spec, double s1, double s2, double alpha, double beta);
/// Exponents taken at a node.
double evaluate(const NonlinearitySpec& spec, double s1, double s2, std::size_t node);
/// Exponents taken at a cell center.
double evaluate_at_cell(const NonlinearitySpec& spec, double s1, double s2, std::size_t cell);

/// Cellwise source f(z1_c, z2_c) for cell-center arguments.
std::vector<double> cell_source(const NonlinearitySpec& spec, const std::vector<double>& z1_cells,
                                const std::vector<double>& z2_cells);

struct SigmaReport {
  double sigma = 0.0;
  double inf_f = 0.0;
  double inf_g = 0.0;
  /// Minimum over a 60 x 60 log grid on (1e-6, 1e6)^2; always >= the exact
  /// infimum.
  double grid_f = 0.0;
  double grid_g = 0.0;
};

/// Exact infimum over s1, s2 > 0 (and over the domain) of one spec.
double infimum(const NonlinearitySpec& spec);
double grid_search_minimum(const NonlinearitySpec& spec, int points = 60);

/// sigma = min(inf f, inf g). Throws HypothesisError("H(f,g)1") when zero.
SigmaReport infimum_sigma(const NonlinearitySpec& f, const NonlinearitySpec& g);

struct ConditionResult {
  std::string name;
  bool passed = false;
  double margin = 0.0;  ///< positive when satisfied
  std::string detail;
  std::optional<std::size_t> node;  ///< violating node for nodewise checks
  std::optional<double> value;
};

struct HypothesisReport {
  std::string structure;  ///< "cooperative" or "competitive"
  std::vector<ConditionResult> conditions;
  std::optional<double> sigma;

  bool passed() const;
  const ConditionResult* find(const std::string& name) const;
  std::string first_failure() const;
};

/// Cooperative hypotheses: exponent range, (h1), H(f,g)1, (c1*), (c1).
HypothesisReport validate_cooperative(const NonlinearitySpec& f, const NonlinearitySpec& g,
                                      const ExponentField& p, const ExponentField& q, int N);

/// Competitive hypotheses: exponent range, (h2), (c2), (c2*), H(f,g)2.
HypothesisReport validate_competitive(const NonlinearitySpec& f, const NonlinearitySpec& g,
                                      const ExponentField& p, const ExponentField& q, int N);

/// Numeric blow-up test for lim_{s -> 0} h(s) / s^{r} = +inf: samples
/// s = 1e-1 ... 1e-8 and requires the ratio to grow at least 10x per decade
/// over the last three decades.
bool ratio_blows_up_numerically(const std::function<double(double)>& h, double r);

/// Nodewise clamp min(max(z, floor), ceiling). Throws ConfigError when the
/// ceiling does not exceed the floor everywhere.
GridFunction truncate(const GridFunction& z, const std::vector<double>& floor, double ceiling);
std::vector<double> truncate_values(const std::vector<double>& z, const std::vector<double>& floor, double ceiling);

}  // namespace pxsys
