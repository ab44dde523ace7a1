#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pxsys/grid.hpp"

namespace pxsys {

/// s(x) = value
struct ConstantExponent {
  double value = 0.0;
};

/// s(x) = a + b1*x1 + b2*x2
struct AffineExponent {
  double a = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
};

/// s(x) = a + b*sin(c*x1 + e*x2)
struct SinusoidalExponent {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double e = 0.0;
};

using ExponentDescriptor = std::variant<ConstantExponent, AffineExponent, SinusoidalExponent>;

double evaluate(const ExponentDescriptor& desc, const std::array<double, 2>& x);
/// Exact range of the descriptor over the closed grid rectangle.
std::pair<double, double> analytic_range(const ExponentDescriptor& desc, const Grid& grid);
std::string describe(const ExponentDescriptor& desc);

/// A variable exponent sampled at the nodes and at the cell centers of a
/// grid, with cached nodal extrema. Fields built from a descriptor evaluate
/// it exactly; derived fields (conjugates, scalings) carry the image of the
/// analytic range when the transformation is increasing.
class ExponentField {
public:
  ExponentField() = default;
  ExponentField(GridPtr grid, const ExponentDescriptor& desc);
  /// Raw nodal samples; cell values are corner averages. No analytic range.
  static ExponentField from_samples(GridPtr grid, std::vector<double> node_values);

  const GridPtr& grid() const { return grid_; }
  double at_node(std::size_t n) const { return nodes_[n]; }
  double at_cell(std::size_t c) const { return cells_[c]; }
  const std::vector<double>& node_values() const { return nodes_; }
  const std::vector<double>& cell_values() const { return cells_; }

  double min() const { return min_; }
  double max() const { return max_; }
  /// Analytic extrema when known, else the sampled ones.
  double inf() const { return analytic_ ? analytic_->first : min_; }
  double sup() const { return analytic_ ? analytic_->second : max_; }
  const std::optional<std::pair<double, double>>& analytic_range() const { return analytic_; }
  const std::optional<ExponentDescriptor>& descriptor() const { return desc_; }
  bool is_constant() const { return min_ == max_; }

  /// Pointwise image under `fn`. When `increasing` is set, the analytic
  /// range is carried through `fn`.
  ExponentField map(const std::function<double(double)>& fn, bool increasing) const;
  ExponentField scaled(double factor) const;

private:
  void refresh_extrema();

  GridPtr grid_;
  std::optional<ExponentDescriptor> desc_;
  std::vector<double> nodes_;
  std::vector<double> cells_;
  double min_ = 0.0;
  double max_ = 0.0;
  std::optional<std::pair<double, double>> analytic_;
};

struct Extrema {
  double min = 0.0;
  double max = 0.0;
  std::optional<double> analytic_min;
  std::optional<double> analytic_max;
};

Extrema field_extrema(const ExponentField& s);

/// p*(x) = N p(x) / (N - p(x)). Throws HypothesisError ("exponent range") when p+ >= N.
ExponentField sobolev_conjugate(const ExponentField& p, int N);
/// Scalar conjugate N s / (N - s).
double sobolev_conjugate(double s, int N);

struct LogHolderReport {
  double smallest_constant = 0.0;  ///< sup over sampled pairs of |s(x)-s(y)| * (-ln|x-y|)
  double supplied_constant = 0.0;
  bool passed = false;
  std::size_t pairs_checked = 0;
  std::size_t worst_a = 0;
  std::size_t worst_b = 0;
  std::string note = "sampled over node pairs with |x-y| < 1/2; not a proof";
};

/// Checks |s(x)-s(y)| <= C / (-ln|x-y|) over all node pairs closer than 1/2.
LogHolderReport log_holder_check(const ExponentField& s, double C);

}  // namespace pxsys
