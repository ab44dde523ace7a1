#include "pxsys/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "pxsys/error.hpp"

namespace pxsys {

NonlinearitySpec NonlinearitySpec::product(double m, ExponentField alpha, ExponentField beta) {
  if (!(m > 0.0)) throw ConfigError("nonlinearity: constant m must be positive");
  NonlinearitySpec s;
  s.form = Form::Product;
  s.m = m;
  s.alpha = std::move(alpha);
  s.beta = std::move(beta);
  return s;
}

NonlinearitySpec NonlinearitySpec::sum(Argument arg, ExponentField alpha, ExponentField beta, double m) {
  if (!(m > 0.0)) throw ConfigError("nonlinearity: constant m must be positive");
  NonlinearitySpec s;
  s.form = Form::Sum;
  s.m = m;
  s.argument = arg;
  s.alpha = std::move(alpha);
  s.beta = std::move(beta);
  return s;
}

std::string NonlinearitySpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  const auto exp_desc = [](const ExponentField& e) {
    return e.descriptor() ? pxsys::describe(*e.descriptor()) : std::string("sampled");
  };
  if (form == Form::Product)
    os << "product m=" << m << " alpha=[" << exp_desc(alpha) << "] beta=[" << exp_desc(beta) << "]";
  else
    os << "sum in " << (argument == Argument::First ? "s1" : "s2") << " m=" << m << " alpha=["
       << exp_desc(alpha) << "] beta=[" << exp_desc(beta) << "]";
  return os.str();
}

double evaluate(const NonlinearitySpec& spec, double s1, double s2, double alpha, double beta) {
  if (!(s1 > 0.0) || !(s2 > 0.0)) {
    std::ostringstream os;
    os << "nonlinearity evaluated at non-positive argument (s1=" << s1 << ", s2=" << s2 << ")";
    throw DomainError(os.str());
  }
  if (spec.form == NonlinearitySpec::Form::Product)
    return spec.m * (1.0 + std::pow(s1, alpha)) * (1.0 + std::pow(s2, beta));
  const double s = spec.argument == NonlinearitySpec::Argument::First ? s1 : s2;
  return spec.m * (std::pow(s, alpha) + std::pow(s, beta));
}

double evaluate(const NonlinearitySpec& spec, double s1, double s2, std::size_t node) {
  return evaluate(spec, s1, s2, spec.alpha.at_node(node), spec.beta.at_node(node));
}

double evaluate_at_cell(const NonlinearitySpec& spec, double s1, double s2, std::size_t cell) {
  return evaluate(spec, s1, s2, spec.alpha.at_cell(cell), spec.beta.at_cell(cell));
}

std::vector<double> cell_source(const NonlinearitySpec& spec, const std::vector<double>& z1_cells,
                                const std::vector<double>& z2_cells) {
  std::vector<double> h(z1_cells.size());
  for (std::size_t c = 0; c < h.size(); ++c) h[c] = evaluate_at_cell(spec, z1_cells[c], z2_cells[c], c);
  return h;
}

namespace {

// inf over s > 0 of 1 + s^e
double product_factor_inf(double e) { return e == 0.0 ? 2.0 : 1.0; }

// inf over s > 0 of s^a + s^b
double sum_inf(double a, double b) {
  if (a == 0.0 && b == 0.0) return 2.0;
  if (a == 0.0 || b == 0.0) return 1.0;
  if (a * b > 0.0) return 0.0;
  const double hi = std::max(a, b), lo = std::min(a, b);
  const double s = std::pow(-lo / hi, 1.0 / (hi - lo));
  return std::pow(s, hi) + std::pow(s, lo);
}

double local_inf(const NonlinearitySpec& spec, double a, double b) {
  if (spec.form == NonlinearitySpec::Form::Product)
    return spec.m * product_factor_inf(a) * product_factor_inf(b);
  return spec.m * sum_inf(a, b);
}

std::set<std::pair<double, double>> exponent_pairs(const NonlinearitySpec& spec) {
  std::set<std::pair<double, double>> pairs;
  const auto& an = spec.alpha.node_values();
  const auto& bn = spec.beta.node_values();
  for (std::size_t i = 0; i < an.size(); ++i) pairs.emplace(an[i], bn[i]);
  const auto& ac = spec.alpha.cell_values();
  const auto& bc = spec.beta.cell_values();
  for (std::size_t i = 0; i < ac.size(); ++i) pairs.emplace(ac[i], bc[i]);
  return pairs;
}

ConditionResult condition(std::string name, double margin, std::string detail) {
  ConditionResult c;
  c.name = std::move(name);
  c.margin = margin;
  c.passed = margin > 0.0;
  c.detail = std::move(detail);
  return c;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

// One extremal inequality: `margin` is decided by the min (or max) of `field`.
struct Term {
  double margin;
  const ExponentField* field;
  bool at_min;
};

// Condition passing iff every term margin is positive; on failure the node
// attaining the extremum of the worst term is attached.
ConditionResult from_terms(std::string name, std::initializer_list<Term> terms, std::string detail) {
  const Term* worst = nullptr;
  for (const auto& t : terms)
    if (!worst || t.margin < worst->margin) worst = &t;
  ConditionResult c = condition(std::move(name), worst->margin, std::move(detail));
  if (!c.passed && worst->field) {
    const auto& v = worst->field->node_values();
    const auto it = worst->at_min ? std::min_element(v.begin(), v.end()) : std::max_element(v.begin(), v.end());
    c.node = static_cast<std::size_t>(it - v.begin());
    c.value = *it;
  }
  return c;
}

ConditionResult check_range(const char* name, const ExponentField& s, int N) {
  const double lo = s.inf(), hi = s.sup();
  return from_terms(name, {{lo - 1.0, &s, true}, {N - hi, &s, false}},
                    "1 < " + fmt(lo) + " <= " + fmt(hi) + " < N = " + std::to_string(N));
}

// Nodewise e(x) <= r*(x)/s*(x) * (s*(x) - 1) for the coupling exponent e.
ConditionResult check_coupling(const char* name, const ExponentField& e, const ExponentField& own,
                               const ExponentField& other, int N) {
  if (!(own.sup() < N) || !(other.sup() < N))
    return condition(name, -1.0, "Sobolev conjugates undefined (exponent reaches N)");
  const auto own_star = sobolev_conjugate(own, N);
  const auto other_star = sobolev_conjugate(other, N);
  double margin = std::numeric_limits<double>::infinity();
  std::size_t worst = 0;
  for (std::size_t n = 0; n < e.node_values().size(); ++n) {
    const double bound = other_star.at_node(n) / own_star.at_node(n) * (own_star.at_node(n) - 1.0);
    const double m = bound - e.at_node(n);
    if (m < margin) {
      margin = m;
      worst = n;
    }
  }
  // Equality is admissible here.
  ConditionResult c = condition(name, margin, "nodewise coupling bound, worst slack " + fmt(margin));
  c.passed = margin >= 0.0;
  if (!c.passed) {
    c.node = worst;
    c.value = e.at_node(worst);
  }
  return c;
}

ConditionResult check_negative_singular(const char* name, const ExponentField& e, int N) {
  const double lo = e.inf(), hi = e.sup();
  return from_terms(name, {{lo + 1.0 / N, &e, true}, {-hi, &e, false}},
                    "-1/N < " + fmt(lo) + " <= " + fmt(hi) + " < 0");
}

// Blow-up of h / s^r as the singular argument tends to zero.
ConditionResult check_blow_up(const char* name, const NonlinearitySpec& spec,
                              NonlinearitySpec::Argument singular, double r) {
  using F = NonlinearitySpec::Form;
  if (spec.form == F::Product || spec.argument != singular)
    return condition(name, 1.0, "symbolic: positive lower limit as the singular argument vanishes");
  // Sum in the singular argument: behaves like s^{min(alpha, beta)}.
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < spec.alpha.node_values().size(); ++n)
    worst = std::max(worst, std::min(spec.alpha.at_node(n), spec.beta.at_node(n)));
  return condition(name, r - worst, "symbolic: leading exponent " + fmt(worst) + " < " + fmt(r));
}

}  // namespace

double infimum(const NonlinearitySpec& spec) {
  double inf = std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : exponent_pairs(spec)) inf = std::min(inf, local_inf(spec, a, b));
  return inf;
}

double grid_search_minimum(const NonlinearitySpec& spec, int points) {
  std::vector<double> s(points);
  for (int i = 0; i < points; ++i) s[i] = std::pow(10.0, -6.0 + 12.0 * i / (points - 1));
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : exponent_pairs(spec))
    for (double s1 : s)
      for (double s2 : s) best = std::min(best, evaluate(spec, s1, s2, a, b));
  return best;
}

SigmaReport infimum_sigma(const NonlinearitySpec& f, const NonlinearitySpec& g) {
  SigmaReport rep;
  rep.inf_f = infimum(f);
  rep.inf_g = infimum(g);
  rep.grid_f = grid_search_minimum(f);
  rep.grid_g = grid_search_minimum(g);
  rep.sigma = std::min(rep.inf_f, rep.inf_g);
  if (!(rep.sigma > 0.0))
    throw HypothesisError("H(f,g)1", "infimum of the nonlinearities is zero (f: " + fmt(rep.inf_f) +
                                         ", g: " + fmt(rep.inf_g) + ")");
  return rep;
}

bool HypothesisReport::passed() const {
  return std::all_of(conditions.begin(), conditions.end(), [](const auto& c) { return c.passed; });
}

const ConditionResult* HypothesisReport::find(const std::string& name) const {
  for (const auto& c : conditions)
    if (c.name == name) return &c;
  return nullptr;
}

std::string HypothesisReport::first_failure() const {
  for (const auto& c : conditions)
    if (!c.passed) return c.name;
  return {};
}

HypothesisReport validate_cooperative(const NonlinearitySpec& f, const NonlinearitySpec& g,
                                      const ExponentField& p, const ExponentField& q, int N) {
  HypothesisReport rep;
  rep.structure = "cooperative";
  rep.conditions.push_back(check_range("exponent range p", p, N));
  rep.conditions.push_back(check_range("exponent range q", q, N));
  rep.conditions.push_back(from_terms("(h1)", {{g.alpha.inf(), &g.alpha, true}, {f.beta.inf(), &f.beta, true}},
                                      "alpha2- = " + fmt(g.alpha.inf()) + ", beta1- = " + fmt(f.beta.inf())));
  try {
    const auto s = infimum_sigma(f, g);
    rep.sigma = s.sigma;
    rep.conditions.push_back(condition("H(f,g)1", s.sigma, "sigma = " + fmt(s.sigma)));
  } catch (const HypothesisError& e) {
    rep.sigma = 0.0;
    rep.conditions.push_back(condition("H(f,g)1", 0.0, e.what()));
  }
  rep.conditions.push_back(check_coupling("(c1*) beta1", f.beta, p, q, N));
  rep.conditions.push_back(check_coupling("(c1*) alpha2", g.alpha, q, p, N));
  rep.conditions.push_back(check_negative_singular("(c1) alpha1", f.alpha, N));
  rep.conditions.push_back(check_negative_singular("(c1) beta2", g.beta, N));
  return rep;
}

HypothesisReport validate_competitive(const NonlinearitySpec& f, const NonlinearitySpec& g,
                                      const ExponentField& p, const ExponentField& q, int N) {
  HypothesisReport rep;
  rep.structure = "competitive";
  rep.conditions.push_back(check_range("exponent range p", p, N));
  rep.conditions.push_back(check_range("exponent range q", q, N));
  rep.conditions.push_back(from_terms("(h2)", {{-g.alpha.sup(), &g.alpha, false}, {-f.beta.sup(), &f.beta, false}},
                                      "alpha2+ = " + fmt(g.alpha.sup()) + ", beta1+ = " + fmt(f.beta.sup())));

  const double inv_n = 1.0 / N;
  {
    const double a_lo = f.alpha.inf(), a_hi = f.alpha.sup();
    const double b_lo = f.beta.inf(), b_hi = f.beta.sup();
    rep.conditions.push_back(from_terms("(c2)",
                                        {{b_lo - std::max(-inv_n, -a_lo), &f.beta, true},
                                         {-b_hi, &f.beta, false},
                                         {a_lo, &f.alpha, true},
                                         {p.inf() - 1.0 - a_hi, &f.alpha, false}},
                                       "max(-1/N, -alpha1-) < beta1- = " + fmt(b_lo) + " <= beta1+ = " +
                                           fmt(b_hi) + " < 0 < alpha1- = " + fmt(a_lo) +
                                           " <= alpha1+ = " + fmt(a_hi) + " < p- - 1 = " + fmt(p.inf() - 1.0)));
  }
  {
    const double a_lo = g.alpha.inf(), a_hi = g.alpha.sup();
    const double b_lo = g.beta.inf(), b_hi = g.beta.sup();
    rep.conditions.push_back(from_terms("(c2*)",
                                        {{a_lo - std::max(-inv_n, -b_lo), &g.alpha, true},
                                         {-a_hi, &g.alpha, false},
                                         {b_lo, &g.beta, true},
                                         {q.inf() - 1.0 - b_hi, &g.beta, false}},
                                       "max(-1/N, -beta2-) < alpha2- = " + fmt(a_lo) + " <= alpha2+ = " +
                                           fmt(a_hi) + " < 0 < beta2- = " + fmt(b_lo) + " <= beta2+ = " +
                                           fmt(b_hi) + " < q- - 1 = " + fmt(q.inf() - 1.0)));
  }
  rep.conditions.push_back(check_blow_up("H(f,g)2 f", f, NonlinearitySpec::Argument::First, p.inf() - 1.0));
  rep.conditions.push_back(check_blow_up("H(f,g)2 g", g, NonlinearitySpec::Argument::Second, q.inf() - 1.0));
  return rep;
}

bool ratio_blows_up_numerically(const std::function<double(double)>& h, double r) {
  std::vector<double> ratio;
  for (int k = 1; k <= 8; ++k) {
    const double s = std::pow(10.0, -k);
    ratio.push_back(h(s) / std::pow(s, r));
  }
  for (std::size_t i = ratio.size() - 3; i < ratio.size(); ++i)
    if (!(ratio[i] >= 10.0 * ratio[i - 1])) return false;
  return true;
}

std::vector<double> truncate_values(const std::vector<double>& z, const std::vector<double>& floor, double ceiling) {
  const double top = *std::max_element(floor.begin(), floor.end());
  if (!(ceiling > top))
    throw ConfigError("truncation box is empty: ceiling " + fmt(ceiling) + " <= sup of floor " + fmt(top));
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = std::min(std::max(z[i], floor[i]), ceiling);
  return out;
}

GridFunction truncate(const GridFunction& z, const std::vector<double>& floor, double ceiling) {
  return GridFunction(z.grid, truncate_values(z.values, floor, ceiling), false);
}

}  // namespace pxsys
