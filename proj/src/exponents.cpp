#include "pxsys/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pxsys/error.hpp"

namespace pxsys {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::array<std::array<double, 2>, 4> rectangle_corners(const Grid& grid) {
  const Interval x = grid.extent(0);
  const Interval y = grid.dimension() == 2 ? grid.extent(1) : Interval{0.0, 0.0};
  return {{{x.lo, y.lo}, {x.hi, y.lo}, {x.lo, y.hi}, {x.hi, y.hi}}};
}

// Range of sin over [lo, hi].
std::pair<double, double> sine_range(double lo, double hi) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (hi - lo >= two_pi) return {-1.0, 1.0};
  double smin = std::min(std::sin(lo), std::sin(hi));
  double smax = std::max(std::sin(lo), std::sin(hi));
  // Smallest crest/trough at or above lo.
  const double crest = std::numbers::pi / 2.0 + two_pi * std::ceil((lo - std::numbers::pi / 2.0) / two_pi);
  const double trough = -std::numbers::pi / 2.0 + two_pi * std::ceil((lo + std::numbers::pi / 2.0) / two_pi);
  if (crest <= hi) smax = 1.0;
  if (trough <= hi) smin = -1.0;
  return {smin, smax};
}

}  // namespace

double evaluate(const ExponentDescriptor& desc, const std::array<double, 2>& x) {
  return std::visit(overloaded{
                        [](const ConstantExponent& c) { return c.value; },
                        [&](const AffineExponent& a) { return a.a + a.b1 * x[0] + a.b2 * x[1]; },
                        [&](const SinusoidalExponent& s) {
                          return s.a + s.b * std::sin(s.c * x[0] + s.e * x[1]);
                        },
                    },
                    desc);
}

std::pair<double, double> analytic_range(const ExponentDescriptor& desc, const Grid& grid) {
  const auto corners = rectangle_corners(grid);
  return std::visit(
      overloaded{
          [](const ConstantExponent& c) { return std::pair{c.value, c.value}; },
          [&](const AffineExponent& a) {
            double lo = evaluate(a, corners[0]), hi = lo;
            for (const auto& x : corners) {
              lo = std::min(lo, evaluate(a, x));
              hi = std::max(hi, evaluate(a, x));
            }
            return std::pair{lo, hi};
          },
          [&](const SinusoidalExponent& s) {
            double plo = s.c * corners[0][0] + s.e * corners[0][1], phi = plo;
            for (const auto& x : corners) {
              plo = std::min(plo, s.c * x[0] + s.e * x[1]);
              phi = std::max(phi, s.c * x[0] + s.e * x[1]);
            }
            auto [smin, smax] = sine_range(plo, phi);
            const double v1 = s.a + s.b * smin;
            const double v2 = s.a + s.b * smax;
            return std::pair{std::min(v1, v2), std::max(v1, v2)};
          },
      },
      desc);
}

std::string describe(const ExponentDescriptor& desc) {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const ConstantExponent& c) { os << "constant " << c.value; },
                 [&](const AffineExponent& a) { os << "affine " << a.a << ' ' << a.b1 << ' ' << a.b2; },
                 [&](const SinusoidalExponent& s) {
                   os << "sinusoidal " << s.a << ' ' << s.b << ' ' << s.c << ' ' << s.e;
                 },
             },
             desc);
  return os.str();
}

ExponentField::ExponentField(GridPtr grid, const ExponentDescriptor& desc)
    : grid_(std::move(grid)), desc_(desc) {
  nodes_.resize(grid_->node_count());
  cells_.resize(grid_->cell_count());
  for (std::size_t n = 0; n < nodes_.size(); ++n) nodes_[n] = evaluate(desc, grid_->node_coords(n));
  for (std::size_t c = 0; c < cells_.size(); ++c) cells_[c] = evaluate(desc, grid_->cell_center(c));
  analytic_ = pxsys::analytic_range(desc, *grid_);
  refresh_extrema();
}

ExponentField ExponentField::from_samples(GridPtr grid, std::vector<double> node_values) {
  if (node_values.size() != grid->node_count())
    throw ConfigError("exponent samples do not match the grid node count");
  ExponentField s;
  s.grid_ = std::move(grid);
  s.nodes_ = std::move(node_values);
  s.cells_.resize(s.grid_->cell_count());
  const int k = s.grid_->corners_per_cell();
  for (std::size_t c = 0; c < s.cells_.size(); ++c) {
    const auto corners = s.grid_->cell_corners(c);
    double sum = 0.0;
    for (int i = 0; i < k; ++i) sum += s.nodes_[corners[i]];
    s.cells_[c] = sum / k;
  }
  s.refresh_extrema();
  return s;
}

void ExponentField::refresh_extrema() {
  const auto [lo, hi] = std::minmax_element(nodes_.begin(), nodes_.end());
  min_ = *lo;
  max_ = *hi;
}

ExponentField ExponentField::map(const std::function<double(double)>& fn, bool increasing) const {
  ExponentField out;
  out.grid_ = grid_;
  out.nodes_.resize(nodes_.size());
  out.cells_.resize(cells_.size());
  std::transform(nodes_.begin(), nodes_.end(), out.nodes_.begin(), fn);
  std::transform(cells_.begin(), cells_.end(), out.cells_.begin(), fn);
  if (increasing && analytic_) out.analytic_ = std::pair{fn(analytic_->first), fn(analytic_->second)};
  out.refresh_extrema();
  return out;
}

ExponentField ExponentField::scaled(double factor) const {
  return map([factor](double s) { return factor * s; }, factor > 0.0);
}

Extrema field_extrema(const ExponentField& s) {
  Extrema e{s.min(), s.max(), std::nullopt, std::nullopt};
  if (s.analytic_range()) {
    e.analytic_min = s.analytic_range()->first;
    e.analytic_max = s.analytic_range()->second;
  }
  return e;
}

double sobolev_conjugate(double s, int N) { return N * s / (N - s); }

ExponentField sobolev_conjugate(const ExponentField& p, int N) {
  if (!(p.sup() < N))
    throw HypothesisError("exponent range", "exponent supremum " + std::to_string(p.sup()) +
                                      " must be below the dimension N = " + std::to_string(N));
  return p.map([N](double s) { return sobolev_conjugate(s, N); }, true);
}

LogHolderReport log_holder_check(const ExponentField& s, double C) {
  const Grid& grid = *s.grid();
  LogHolderReport report;
  report.supplied_constant = C;
  const std::size_t n = grid.node_count();
  std::vector<std::array<double, 2>> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = grid.node_coords(i);

  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double dx = x[a][0] - x[b][0];
      const double dy = x[a][1] - x[b][1];
      const double r = std::sqrt(dx * dx + dy * dy);
      if (!(r < 0.5) || r == 0.0) continue;
      ++report.pairs_checked;
      const double needed = std::abs(s.at_node(a) - s.at_node(b)) * -std::log(r);
      if (needed > report.smallest_constant) {
        report.smallest_constant = needed;
        report.worst_a = a;
        report.worst_b = b;
      }
    }
  }
  report.passed = report.smallest_constant <= C;
  return report;
}

}  // namespace pxsys
