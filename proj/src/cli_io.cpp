#include "pxsys/cli_io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pxsys/moser.hpp"

namespace pxsys {

using json = nlohmann::ordered_json;

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

std::optional<double> parse_number(const std::string& t) {
  if (t.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE) return std::nullopt;
  return v;
}

// A number, or a multiple of pi written "pi", "-pi", "2pi" or "2*pi".
std::optional<double> parse_scalar(const std::string& t) {
  if (t.size() >= 2 && t.compare(t.size() - 2, 2, "pi") == 0) {
    std::string head = t.substr(0, t.size() - 2);
    if (!head.empty() && head.back() == '*') head.pop_back();
    if (head.empty() || head == "+") return std::numbers::pi;
    if (head == "-") return -std::numbers::pi;
    const auto k = parse_number(head);
    if (!k) return std::nullopt;
    return *k * std::numbers::pi;
  }
  return parse_number(t);
}

struct Entry {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, Entry>;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"run", {"mode", "structure"}},
      {"grid", {"dimension", "x1", "x2", "resolution"}},
      {"exponents", {"p", "q"}},
      {"f", {"form", "m", "alpha", "beta", "argument"}},
      {"g", {"form", "m", "alpha", "beta", "argument"}},
      {"solver",
       {"eps_schedule", "tolerance", "max_iterations", "armijo", "backtrack", "max_backtracks",
        "warm_start_final_only"}},
      {"fixed_point",
       {"tolerance", "max_iterations", "ceiling_factor", "max_doublings", "c0_safety", "residual_factor"}},
      {"competitive",
       {"delta", "lambda_start", "lambda_cap", "tolerance", "max_iterations", "membership_tolerance",
        "residual_factor", "inner_tolerance", "inner_max_iterations", "inner_floor"}},
      {"single", {"source"}},
      {"moser", {"n_max", "m1_family", "refinement"}},
      {"output", {"fields", "report", "trace"}},
  };
  return s;
}

const std::set<std::string> kModes{"validate", "single", "cooperative", "competitive", "verify-moser"};

class Reader {
public:
  std::map<std::string, Section> sections;
  std::map<std::string, int> section_line;
  std::vector<std::string> errors;

  void error(int line, const std::string& msg) {
    errors.push_back(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg);
  }

  bool has(const std::string& sec) const { return sections.count(sec) > 0; }

  const Entry* find(const std::string& sec, const std::string& key) const {
    const auto s = sections.find(sec);
    if (s == sections.end()) return nullptr;
    const auto e = s->second.find(key);
    return e == s->second.end() ? nullptr : &e->second;
  }

  void real(const std::string& sec, const std::string& key, double& out) {
    if (const Entry* e = find(sec, key)) {
      const auto v = parse_scalar(trim(e->value));
      if (v)
        out = *v;
      else
        error(e->line, "[" + sec + "] " + key + ": expected a number, got '" + e->value + "'");
    }
  }

  void integer(const std::string& sec, const std::string& key, int& out) {
    if (const Entry* e = find(sec, key)) {
      const auto v = parse_number(trim(e->value));
      if (v && std::floor(*v) == *v && std::abs(*v) < 1e9)
        out = static_cast<int>(*v);
      else
        error(e->line, "[" + sec + "] " + key + ": expected an integer, got '" + e->value + "'");
    }
  }

  void boolean(const std::string& sec, const std::string& key, bool& out) {
    if (const Entry* e = find(sec, key)) {
      const std::string v = trim(e->value);
      if (v == "true")
        out = true;
      else if (v == "false")
        out = false;
      else
        error(e->line, "[" + sec + "] " + key + ": expected true or false, got '" + v + "'");
    }
  }

  void word(const std::string& sec, const std::string& key, std::string& out) {
    if (const Entry* e = find(sec, key)) out = trim(e->value);
  }

  std::optional<std::vector<double>> reals(const std::string& sec, const std::string& key) {
    const Entry* e = find(sec, key);
    if (!e) return std::nullopt;
    std::vector<double> out;
    for (const auto& t : tokens(e->value)) {
      const auto v = parse_scalar(t);
      if (!v) {
        error(e->line, "[" + sec + "] " + key + ": expected numbers, got '" + t + "'");
        return std::nullopt;
      }
      out.push_back(*v);
    }
    if (out.empty()) error(e->line, "[" + sec + "] " + key + ": empty list");
    return out;
  }

  std::optional<ExponentDescriptor> exponent(const std::string& sec, const std::string& key) {
    const Entry* e = find(sec, key);
    if (!e) return std::nullopt;
    const auto t = tokens(e->value);
    const auto bad = [&](const std::string& why) {
      error(e->line, "[" + sec + "] " + key + ": " + why);
      return std::optional<ExponentDescriptor>{};
    };
    if (t.empty()) return bad("empty exponent");
    std::vector<double> a;
    for (std::size_t i = 1; i < t.size(); ++i) {
      const auto v = parse_scalar(t[i]);
      if (!v) return bad("expected a number, got '" + t[i] + "'");
      a.push_back(*v);
    }
    if (t[0] == "constant") {
      if (a.size() != 1) return bad("constant takes 1 value");
      return ConstantExponent{a[0]};
    }
    if (t[0] == "affine") {
      if (a.size() != 3) return bad("affine takes 3 values (a b1 b2)");
      return AffineExponent{a[0], a[1], a[2]};
    }
    if (t[0] == "sinusoidal") {
      if (a.size() != 4) return bad("sinusoidal takes 4 values (a b c e)");
      return SinusoidalExponent{a[0], a[1], a[2], a[3]};
    }
    // A bare number is a constant exponent.
    if (t.size() == 1)
      if (const auto v = parse_scalar(t[0])) return ConstantExponent{*v};
    return bad("unknown exponent kind '" + t[0] + "' (constant, affine, sinusoidal)");
  }
};

void read_nonlinearity(Reader& r, const std::string& sec, NonlinearityConfig& nc) {
  if (!r.has(sec)) return;
  nc.present = true;
  r.word(sec, "form", nc.form);
  if (nc.form != "product" && nc.form != "sum")
    r.error(r.find(sec, "form") ? r.find(sec, "form")->line : r.section_line[sec],
            "[" + sec + "] form must be product or sum");
  r.real(sec, "m", nc.m);
  if (!(nc.m > 0.0)) r.error(r.section_line[sec], "[" + sec + "] m must be positive");
  r.word(sec, "argument", nc.argument);
  if (nc.argument != "s1" && nc.argument != "s2")
    r.error(r.find(sec, "argument") ? r.find(sec, "argument")->line : r.section_line[sec],
            "[" + sec + "] argument must be s1 or s2");
  for (const char* key : {"alpha", "beta"}) {
    auto e = r.exponent(sec, key);
    if (!r.find(sec, key))
      r.error(r.section_line[sec], "[" + sec + "] missing " + key);
    else if (e)
      (std::string(key) == "alpha" ? nc.alpha : nc.beta) = *e;
  }
}

}  // namespace

ConfigParseError::ConfigParseError(std::vector<std::string> errors)
    : ConfigError("configuration errors:\n  " + join(errors, "\n  ")), errors_(std::move(errors)) {}

RunConfig parse_config(const std::string& text) {
  Reader r;
  {
    std::istringstream is(text);
    std::string raw, current;
    int line = 0;
    while (std::getline(is, raw)) {
      ++line;
      const auto hash = raw.find('#');
      const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') {
          r.error(line, "malformed section header '" + s + "'");
          current.clear();
          continue;
        }
        current = trim(s.substr(1, s.size() - 2));
        if (!schema().count(current)) {
          r.error(line, "unknown section [" + current + "]");
          current.clear();
          continue;
        }
        if (r.sections.count(current)) r.error(line, "duplicate section [" + current + "]");
        r.sections[current];
        r.section_line[current] = line;
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string::npos) {
        r.error(line, "expected 'key = value', got '" + s + "'");
        continue;
      }
      const std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
      if (current.empty()) {
        r.error(line, "key '" + key + "' outside of a known section");
        continue;
      }
      if (!schema().at(current).count(key)) {
        r.error(line, "unknown key '" + key + "' in [" + current + "]");
        continue;
      }
      if (value.empty()) {
        r.error(line, "empty value for '" + key + "' in [" + current + "]");
        continue;
      }
      auto& sec = r.sections[current];
      if (sec.count(key)) r.error(line, "duplicate key '" + key + "' in [" + current + "]");
      sec[key] = Entry{value, line};
    }
  }

  RunConfig cfg;
  r.word("run", "mode", cfg.mode);
  if (!kModes.count(cfg.mode))
    r.error(r.find("run", "mode") ? r.find("run", "mode")->line : 0, "unknown mode '" + cfg.mode + "'");
  cfg.structure = cfg.mode == "competitive" ? "competitive" : "cooperative";
  r.word("run", "structure", cfg.structure);
  if (cfg.structure != "cooperative" && cfg.structure != "competitive")
    r.error(r.find("run", "structure")->line, "structure must be cooperative or competitive");

  if (!r.has("grid")) r.error(0, "missing section [grid]");
  r.integer("grid", "dimension", cfg.dimension);
  if (cfg.dimension != 1 && cfg.dimension != 2) {
    r.error(r.find("grid", "dimension") ? r.find("grid", "dimension")->line : 0, "dimension must be 1 or 2");
    cfg.dimension = 2;
  }
  cfg.extents.assign(cfg.dimension, Interval{0.0, 1.0});
  for (int a = 0; a < cfg.dimension; ++a) {
    const std::string key = a == 0 ? "x1" : "x2";
    if (auto v = r.reals("grid", key)) {
      if (v->size() != 2 || !((*v)[1] > (*v)[0]))
        r.error(r.find("grid", key)->line, "[grid] " + key + " must be 'lo hi' with lo < hi");
      else
        cfg.extents[a] = Interval{(*v)[0], (*v)[1]};
    }
  }
  if (cfg.dimension == 1 && r.find("grid", "x2")) r.error(r.find("grid", "x2")->line, "[grid] x2 given for dimension 1");
  cfg.resolution.assign(cfg.dimension, 65);
  if (auto v = r.reals("grid", "resolution")) {
    const int line = r.find("grid", "resolution")->line;
    if (v->size() != 1 && v->size() != static_cast<std::size_t>(cfg.dimension))
      r.error(line, "[grid] resolution takes 1 or dimension values");
    for (int a = 0; a < cfg.dimension; ++a) {
      const double n = (*v)[v->size() == 1 ? 0 : std::min<std::size_t>(a, v->size() - 1)];
      if (std::floor(n) != n || n < 3)
        r.error(line, "[grid] resolution must be an integer >= 3");
      else
        cfg.resolution[a] = static_cast<int>(n);
    }
  }

  cfg.p = r.exponent("exponents", "p");
  cfg.q = r.exponent("exponents", "q");
  read_nonlinearity(r, "f", cfg.f);
  read_nonlinearity(r, "g", cfg.g);

  if (auto v = r.reals("solver", "eps_schedule")) cfg.solver.eps_schedule = *v;
  r.real("solver", "tolerance", cfg.solver.tolerance);
  r.integer("solver", "max_iterations", cfg.solver.max_iterations);
  r.real("solver", "armijo", cfg.solver.armijo);
  r.real("solver", "backtrack", cfg.solver.backtrack);
  r.integer("solver", "max_backtracks", cfg.solver.max_backtracks);
  r.boolean("solver", "warm_start_final_only", cfg.solver.warm_start_final_only);

  auto& fp = cfg.fixed_point;
  r.real("fixed_point", "tolerance", fp.tolerance);
  r.integer("fixed_point", "max_iterations", fp.max_iterations);
  r.real("fixed_point", "ceiling_factor", fp.ceiling_factor);
  r.integer("fixed_point", "max_doublings", fp.max_doublings);
  r.real("fixed_point", "c0_safety", fp.c0_safety);
  r.real("fixed_point", "residual_factor", fp.residual_factor);

  auto& co = cfg.competitive;
  double half = 0.5 * cfg.extents[0].length();
  for (const auto& e : cfg.extents) half = std::min(half, 0.5 * e.length());
  co.delta = 0.1 * half;
  cfg.delta_given = r.find("competitive", "delta") != nullptr;
  r.real("competitive", "delta", co.delta);
  r.real("competitive", "lambda_start", co.lambda_start);
  r.real("competitive", "lambda_cap", co.lambda_cap);
  r.real("competitive", "tolerance", co.tolerance);
  r.integer("competitive", "max_iterations", co.max_iterations);
  r.real("competitive", "membership_tolerance", co.membership_tolerance);
  r.real("competitive", "residual_factor", co.residual_factor);
  r.real("competitive", "inner_tolerance", co.inner.tolerance);
  r.integer("competitive", "inner_max_iterations", co.inner.max_iterations);
  r.real("competitive", "inner_floor", co.inner.floor);

  r.real("single", "source", cfg.single_source);

  r.integer("moser", "n_max", cfg.moser_n_max);
  if (auto v = r.reals("moser", "m1_family")) cfg.m1_family = *v;
  if (r.find("moser", "refinement")) {
    int n = 0;
    r.integer("moser", "refinement", n);
    if (n < 3)
      r.error(r.find("moser", "refinement")->line, "[moser] refinement must be an integer >= 3");
    else
      cfg.refinement = n;
  }

  r.word("output", "fields", cfg.fields_file);
  r.word("output", "report", cfg.report_file);
  r.word("output", "trace", cfg.trace_file);

  // Mode-required blocks.
  if (cfg.mode == "single") {
    if (!cfg.p) r.error(0, "mode single requires p in section [exponents]");
  } else {
    if (!cfg.p || !cfg.q) r.error(0, "mode " + cfg.mode + " requires p and q in section [exponents]");
    if (!cfg.f.present) r.error(0, "mode " + cfg.mode + " requires section [f]");
    if (!cfg.g.present) r.error(0, "mode " + cfg.mode + " requires section [g]");
  }

  // Numeric validation of the option blocks.
  const auto check = [&](const std::function<void()>& fn) {
    try {
      fn();
    } catch (const ConfigError& e) {
      r.error(0, e.what());
    }
  };
  check([&] { cfg.solver.validate(); });
  fp.solver = cfg.solver;
  co.solver = cfg.solver;
  check([&] { fp.validate(); });
  check([&] { co.validate(); });
  if (cfg.moser_n_max < 1) r.error(0, "[moser] n_max must be at least 1");
  for (double m : cfg.m1_family)
    if (!(m > 0.0)) r.error(0, "[moser] m1_family entries must be positive");

  if (!r.errors.empty()) throw ConfigParseError(r.errors);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_resolution_override(RunConfig& cfg, int n) {
  if (n < 3) throw ConfigError("resolution override must be at least 3");
  for (int& r : cfg.resolution) r = n;
}

GridPtr make_grid(const RunConfig& cfg) { return build_grid(cfg.extents, cfg.resolution); }

NonlinearitySpec make_nonlinearity(const NonlinearityConfig& nc, const GridPtr& grid) {
  ExponentField alpha(grid, nc.alpha), beta(grid, nc.beta);
  if (nc.form == "product") return NonlinearitySpec::product(nc.m, std::move(alpha), std::move(beta));
  return NonlinearitySpec::sum(nc.argument == "s1" ? NonlinearitySpec::Argument::First
                                                   : NonlinearitySpec::Argument::Second,
                               std::move(alpha), std::move(beta), nc.m);
}

SystemSpec make_system(const RunConfig& cfg, const GridPtr& grid) {
  if (!cfg.p || !cfg.q) throw ConfigError("missing p or q in section [exponents]");
  if (!cfg.f.present) throw ConfigError("missing section [f]");
  if (!cfg.g.present) throw ConfigError("missing section [g]");
  return SystemSpec{make_nonlinearity(cfg.f, grid), make_nonlinearity(cfg.g, grid), ExponentField(grid, *cfg.p),
                    ExponentField(grid, *cfg.q)};
}

std::string format_config(const RunConfig& cfg) {
  std::ostringstream os;
  const auto list = [](const std::vector<double>& v) {
    std::vector<std::string> s;
    for (double x : v) s.push_back(num(x));
    return join(s, " ");
  };
  os << "[run]\nmode = " << cfg.mode << "\nstructure = " << cfg.structure << "\n\n";
  os << "[grid]\ndimension = " << cfg.dimension << "\n";
  for (int a = 0; a < cfg.dimension; ++a)
    os << (a == 0 ? "x1" : "x2") << " = " << num(cfg.extents[a].lo) << " " << num(cfg.extents[a].hi) << "\n";
  os << "resolution =";
  for (int n : cfg.resolution) os << " " << n;
  os << "\n\n";
  if (cfg.p || cfg.q) {
    os << "[exponents]\n";
    if (cfg.p) os << "p = " << describe(*cfg.p) << "\n";
    if (cfg.q) os << "q = " << describe(*cfg.q) << "\n";
    os << "\n";
  }
  for (const auto& [name, nc] : {std::pair{"f", &cfg.f}, std::pair{"g", &cfg.g}}) {
    if (!nc->present) continue;
    os << "[" << name << "]\nform = " << nc->form << "\nm = " << num(nc->m) << "\nalpha = " << describe(nc->alpha)
       << "\nbeta = " << describe(nc->beta) << "\nargument = " << nc->argument << "\n\n";
  }
  const auto& s = cfg.solver;
  os << "[solver]\neps_schedule = " << list(s.eps_schedule) << "\ntolerance = " << num(s.tolerance)
     << "\nmax_iterations = " << s.max_iterations << "\narmijo = " << num(s.armijo)
     << "\nbacktrack = " << num(s.backtrack) << "\nmax_backtracks = " << s.max_backtracks
     << "\nwarm_start_final_only = " << (s.warm_start_final_only ? "true" : "false") << "\n\n";
  const auto& fp = cfg.fixed_point;
  os << "[fixed_point]\ntolerance = " << num(fp.tolerance) << "\nmax_iterations = " << fp.max_iterations
     << "\nceiling_factor = " << num(fp.ceiling_factor) << "\nmax_doublings = " << fp.max_doublings
     << "\nc0_safety = " << num(fp.c0_safety) << "\nresidual_factor = " << num(fp.residual_factor) << "\n\n";
  const auto& co = cfg.competitive;
  os << "[competitive]\ndelta = " << num(co.delta) << "\nlambda_start = " << num(co.lambda_start)
     << "\nlambda_cap = " << num(co.lambda_cap) << "\ntolerance = " << num(co.tolerance)
     << "\nmax_iterations = " << co.max_iterations << "\nmembership_tolerance = " << num(co.membership_tolerance)
     << "\nresidual_factor = " << num(co.residual_factor) << "\ninner_tolerance = " << num(co.inner.tolerance)
     << "\ninner_max_iterations = " << co.inner.max_iterations << "\ninner_floor = " << num(co.inner.floor)
     << "\n\n";
  os << "[single]\nsource = " << num(cfg.single_source) << "\n\n";
  os << "[moser]\nn_max = " << cfg.moser_n_max << "\n";
  if (!cfg.m1_family.empty()) os << "m1_family = " << list(cfg.m1_family) << "\n";
  if (cfg.refinement) os << "refinement = " << *cfg.refinement << "\n";
  os << "\n[output]\nfields = " << cfg.fields_file << "\nreport = " << cfg.report_file
     << "\ntrace = " << cfg.trace_file << "\n";
  return os.str();
}

std::string fields_csv(const GridFunction& u, const GridFunction* v) {
  const Grid& g = *u.grid;
  const auto d = distance_to_boundary(g);
  std::string out = "x1,x2,u,v,d\n";
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    const auto x = g.node_coords(n);
    out += num(x[0]) + "," + num(x[1]) + "," + num(u[n]) + "," + num(v ? (*v)[n] : 0.0) + "," + num(d[n]) + "\n";
  }
  return out;
}

std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::string out = "iter,sup_delta,residual\n";
  for (const auto& r : rows) out += std::to_string(r.iter) + "," + num(r.sup_delta) + "," + num(r.residual) + "\n";
  return out;
}

namespace {

json descriptor_json(const ExponentDescriptor& d) { return describe(d); }

json config_json(const RunConfig& c) {
  json j;
  j["mode"] = c.mode;
  j["structure"] = c.structure;
  json grid;
  grid["dimension"] = c.dimension;
  grid["N"] = c.N();
  json ext = json::array();
  for (const auto& e : c.extents) ext.push_back({e.lo, e.hi});
  grid["extents"] = ext;
  grid["resolution"] = c.resolution;
  j["grid"] = grid;
  json ex = json::object();
  if (c.p) ex["p"] = descriptor_json(*c.p);
  if (c.q) ex["q"] = descriptor_json(*c.q);
  j["exponents"] = ex;
  for (const auto& [name, nc] : {std::pair{"f", &c.f}, std::pair{"g", &c.g}}) {
    if (!nc->present) continue;
    j[name] = {{"form", nc->form},
               {"m", nc->m},
               {"alpha", descriptor_json(nc->alpha)},
               {"beta", descriptor_json(nc->beta)},
               {"argument", nc->argument}};
  }
  const auto& s = c.solver;
  j["solver"] = {{"eps_schedule", s.eps_schedule},       {"tolerance", s.tolerance},
                 {"max_iterations", s.max_iterations},   {"armijo", s.armijo},
                 {"backtrack", s.backtrack},             {"max_backtracks", s.max_backtracks},
                 {"warm_start_final_only", s.warm_start_final_only}};
  const auto& fp = c.fixed_point;
  j["fixed_point"] = {{"tolerance", fp.tolerance},           {"max_iterations", fp.max_iterations},
                      {"ceiling_factor", fp.ceiling_factor}, {"max_doublings", fp.max_doublings},
                      {"c0_safety", fp.c0_safety},           {"residual_factor", fp.residual_factor}};
  const auto& co = c.competitive;
  j["competitive"] = {{"delta", co.delta},
                      {"lambda_start", co.lambda_start},
                      {"lambda_cap", co.lambda_cap},
                      {"tolerance", co.tolerance},
                      {"max_iterations", co.max_iterations},
                      {"membership_tolerance", co.membership_tolerance},
                      {"residual_factor", co.residual_factor},
                      {"inner_tolerance", co.inner.tolerance},
                      {"inner_max_iterations", co.inner.max_iterations},
                      {"inner_floor", co.inner.floor}};
  j["single"] = {{"source", c.single_source}};
  json m = {{"n_max", c.moser_n_max}, {"m1_family", c.m1_family}};
  m["refinement"] = c.refinement ? json(*c.refinement) : json(nullptr);
  j["moser"] = m;
  j["output"] = {{"fields", c.fields_file}, {"report", c.report_file}, {"trace", c.trace_file}};
  return j;
}

json location_json(const std::array<double, 2>& x) { return json::array({x[0], x[1]}); }

json hypothesis_json(const HypothesisReport& h) {
  json j;
  j["structure"] = h.structure;
  j["passed"] = h.passed();
  json conds = json::array();
  for (const auto& c : h.conditions) {
    json e = {{"name", c.name}, {"passed", c.passed}, {"margin", c.margin}, {"detail", c.detail}};
    if (c.node) e["node"] = *c.node;
    if (c.value) e["value"] = *c.value;
    conds.push_back(e);
  }
  j["conditions"] = conds;
  j["sigma"] = h.sigma ? json(*h.sigma) : json(nullptr);
  return j;
}

json solve_json(const SolveReport& r) {
  json stages = json::array();
  for (const auto& s : r.continuation)
    stages.push_back({{"eps", s.eps},
                      {"iterations", s.iterations},
                      {"residual", s.residual},
                      {"energy", s.energy},
                      {"gradient_fallbacks", s.gradient_fallbacks}});
  return {{"converged", r.converged}, {"iterations", r.iterations}, {"residual", r.residual},
          {"energy", r.energy},       {"message", r.message},       {"continuation", stages}};
}

json system_json(const SystemSolution& s) {
  return {{"converged", s.converged},
          {"verified", s.verified()},
          {"iterations", s.iterations},
          {"message", s.message},
          {"sup_u", sup_norm(s.u)},
          {"sup_v", sup_norm(s.v)},
          {"residual_u", s.residual_u},
          {"residual_v", s.residual_v},
          {"residual_tolerance", s.residual_tolerance},
          {"residual_ok", s.residual_ok},
          {"invariance_ok", s.invariance_ok},
          {"invariance_worst", s.invariance_worst},
          {"final_sup_delta", s.trace.empty() ? json(nullptr) : json(s.trace.back().sup_delta)},
          {"solve_u", solve_json(s.report_u)},
          {"solve_v", solve_json(s.report_v)}};
}

json box_json(const BoxBounds& b, const BoxReport* r, const TruncationReport* t) {
  json j = {{"c0", b.c0}, {"min_ratio", b.min_ratio}, {"R", b.R}};
  j["L_R"] = b.L_R ? json(*b.L_R) : json(nullptr);
  if (r) {
    j["verification"] = {{"passed", r->passed},
                         {"floor_ok", r->floor_ok},
                         {"ceiling_ok", r->ceiling_ok},
                         {"tolerance", r->tolerance},
                         {"worst_floor_slack", r->worst_floor_slack},
                         {"worst_node", r->node},
                         {"worst_location", location_json(r->location)},
                         {"sup_u", r->sup_u},
                         {"sup_v", r->sup_v},
                         {"gradient_sup_u", r->gradient_sup_u},
                         {"gradient_sup_v", r->gradient_sup_v}};
  }
  if (t) {
    j["truncation"] = {{"inactive", t->inactive()},
                       {"floor_active_nodes", t->floor_active_nodes},
                       {"floor_active_cells", t->floor_active_cells},
                       {"ceiling_active_nodes", t->ceiling_active_nodes},
                       {"ceiling_active_cells", t->ceiling_active_cells},
                       {"max_change", t->max_change}};
  }
  return j;
}

json interval_json(const LambdaSearch& s) {
  json j;
  j["found"] = s.found;
  j["message"] = s.message;
  json attempts = json::array();
  for (const auto& a : s.attempts)
    attempts.push_back({{"lambda", a.lambda}, {"admissible", a.admissible}, {"failure", a.failure}});
  j["attempts"] = attempts;
  if (!s.interval) return j;
  const auto& k = *s.interval;
  j["lambda"] = k.lambda;
  j["delta"] = k.delta;
  json checks = json::array();
  for (const auto& c : k.checks)
    checks.push_back({{"name", c.name},
                      {"holds", c.holds()},
                      {"weak_worst", c.weak.worst},
                      {"weak_tolerance", c.weak.tolerance},
                      {"weak_location", location_json(c.weak.location)},
                      {"cellwise_ok", c.cellwise_ok},
                      {"cellwise_worst", c.cellwise_worst},
                      {"cell", c.cell}});
  j["checks"] = checks;
  j["ordered_u"] = k.order_u.ordered;
  j["ordered_v"] = k.order_v.ordered;
  const auto sub = [](const Subsolution& s) {
    return json{{"c3", s.c3}, {"c4", s.c4}, {"sup", sup_norm(s.w)}};
  };
  const auto sup = [](const Supersolution& s) {
    return json{{"c1", s.c1},
                {"sup", sup_norm(s.w)},
                {"inner_iterations", s.inner_iterations},
                {"lower_bound_ok", s.lower_bound_ok},
                {"lower_bound_slack", s.lower_bound_slack},
                {"theta", s.theta},
                {"theta_prefactor", s.theta_prefactor}};
  };
  j["subsolution_u"] = sub(k.sub_u_info);
  j["subsolution_v"] = sub(k.sub_v_info);
  j["supersolution_u"] = sup(k.super_u_info);
  j["supersolution_v"] = sup(k.super_v_info);
  return j;
}

json chain_json(const MoserChain& c) {
  return {{"k_minus", c.k_minus},     {"norms", c.norms},       {"sup_excess", c.sup_excess},
          {"allowance", c.allowance}, {"monotone", c.monotone}, {"final_ok", c.final_ok}};
}

json bound_json(const BoundReport& b) {
  return {{"sup", b.sup},
          {"own_norm", b.own_norm},
          {"other_norm", b.other_norm},
          {"coupling_exponent", b.coupling_exponent},
          {"upper_branch", b.upper_branch},
          {"exponent", b.exponent},
          {"rhs", b.rhs},
          {"c_hat", b.c_hat},
          {"chain_log_c", b.chain.log_c},
          {"chain_log_c_fit", b.chain.log_c_fit},
          {"chain_holds", b.chain.holds},
          {"chain_all_hold", b.chain.all_hold},
          {"chain_trivial", b.chain.trivial}};
}

bool moser_ok(const MoserReport& m) {
  return m.chain_u.monotone && m.chain_u.final_ok && m.chain_v.monotone && m.chain_v.final_ok &&
         m.series_error_u <= 1e-12 && m.series_error_v <= 1e-12 && m.bound_u.chain.all_hold &&
         m.bound_v.chain.all_hold;
}

json moser_json(const MoserReport& m) {
  return {{"chain_u", chain_json(m.chain_u)},
          {"chain_v", chain_json(m.chain_v)},
          {"series_limit_u", m.series_u.limit},
          {"series_limit_v", m.series_v.limit},
          {"series_error_u", m.series_error_u},
          {"series_error_v", m.series_error_v},
          {"bound_u", bound_json(m.bound_u)},
          {"bound_v", bound_json(m.bound_v)},
          {"passed", moser_ok(m)}};
}

json stability_json(const StabilityReport& s) {
  return {{"values", s.values},
          {"reference", s.reference},
          {"max_deviation", s.max_deviation},
          {"tolerance", s.tolerance},
          {"stable", s.stable}};
}

void write_file(const std::filesystem::path& path, const std::string& content, RunOutcome& out) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << content;
  out.written.push_back(path);
}

int system_status(const SystemSolution& s) {
  if (!s.converged) return kExitNonConvergence;
  return s.verified() ? kExitOk : kExitVerification;
}

struct CoopRun {
  SystemSolution sol;
  json j;
};

CoopRun cooperative_run(const SystemSpec& sys, const RunConfig& cfg) {
  CoopRun r;
  r.sol = run_fixed_point(sys, cfg.fixed_point);
  r.j["solution"] = system_json(r.sol);
  r.j["torsion"] = {{"solve_z1", solve_json(r.sol.report_z1)}, {"solve_z2", solve_json(r.sol.report_z2)}};
  r.j["ceiling_doublings"] = r.sol.ceiling_doublings;
  if (r.sol.box)
    r.j["box"] = box_json(*r.sol.box, r.sol.box_report ? &*r.sol.box_report : nullptr,
                          r.sol.truncation ? &*r.sol.truncation : nullptr);
  return r;
}

}  // namespace

RunOutcome run(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  RunOutcome out;
  std::filesystem::create_directories(out_dir);
  json report;
  report["config"] = config_json(cfg);
  const GridPtr grid = make_grid(cfg);

  const auto finish = [&](int code, const std::string& message) {
    out.exit_code = code;
    out.message = message;
    report["status"] = {{"exit_code", code}, {"message", message}};
    out.report_json = report.dump(2) + "\n";
    write_file(out_dir / cfg.report_file, out.report_json, out);
    return out;
  };

  if (cfg.mode == "single") {
    const ExponentField p(grid, *cfg.p);
    const auto res = solve_dirichlet(DirichletProblem::constant_source(p, cfg.single_source), cfg.solver);
    report["solve"] = solve_json(res.report);
    report["sup_u"] = sup_norm(res.u);
    write_file(out_dir / cfg.fields_file, fields_csv(res.u, nullptr), out);
    return finish(res.report.converged ? kExitOk : kExitNonConvergence, res.report.message);
  }

  const SystemSpec sys = make_system(cfg, grid);
  const std::string structure =
      cfg.mode == "competitive" ? "competitive" : (cfg.mode == "validate" ? cfg.structure : "cooperative");
  const HypothesisReport hyp = structure == "competitive" ? validate_competitive(sys.f, sys.g, sys.p, sys.q, cfg.N())
                                                          : validate_cooperative(sys.f, sys.g, sys.p, sys.q, cfg.N());
  report["hypotheses"] = hypothesis_json(hyp);
  if (!hyp.passed()) return finish(kExitHypothesis, "hypothesis " + hyp.first_failure() + " violated");
  if (cfg.mode == "validate") return finish(kExitOk, "all hypotheses hold");

  if (cfg.mode == "cooperative") {
    auto r = cooperative_run(sys, cfg);
    for (auto& [k, v] : r.j.items()) report[k] = v;
    write_file(out_dir / cfg.fields_file, fields_csv(r.sol.u, &r.sol.v), out);
    write_file(out_dir / cfg.trace_file, trace_csv(r.sol.trace), out);
    return finish(system_status(r.sol), r.sol.message);
  }

  if (cfg.mode == "competitive") {
    const auto search = find_lambda(sys, cfg.competitive);
    report["interval"] = interval_json(search);
    if (!search.found) return finish(kExitNonConvergence, search.message);
    const auto& k = *search.interval;
    const auto inner_trace = [](const Supersolution& s) {
      std::vector<TraceRow> rows;
      for (std::size_t i = 0; i < s.inner_trace.size(); ++i)
        rows.push_back({static_cast<int>(i + 1), s.inner_trace[i], s.inner_residuals[i]});
      return rows;
    };
    const std::filesystem::path trace(cfg.trace_file);
    const std::string stem = trace.stem().string(), ext = trace.extension().string();
    write_file(out_dir / (stem + "_super_u" + ext), trace_csv(inner_trace(k.super_u_info)), out);
    write_file(out_dir / (stem + "_super_v" + ext), trace_csv(inner_trace(k.super_v_info)), out);
    const auto sol = run_order_interval_iteration(k, sys, cfg.competitive);
    report["solution"] = system_json(sol);
    write_file(out_dir / cfg.fields_file, fields_csv(sol.u, &sol.v), out);
    write_file(out_dir / cfg.trace_file, trace_csv(sol.trace), out);
    const bool ok = sol.verified() && k.verified();
    return finish(!sol.converged ? kExitNonConvergence : (ok ? kExitOk : kExitVerification), sol.message);
  }

  // verify-moser: cooperative solve, then the chain and bound evaluation.
  auto r = cooperative_run(sys, cfg);
  for (auto& [k, v] : r.j.items()) report[k] = v;
  write_file(out_dir / cfg.fields_file, fields_csv(r.sol.u, &r.sol.v), out);
  write_file(out_dir / cfg.trace_file, trace_csv(r.sol.trace), out);
  if (!r.sol.converged) return finish(kExitNonConvergence, r.sol.message);

  const auto moser = fit_and_bound(r.sol.u, r.sol.v, sys.p, sys.q, sys.f.beta, sys.g.alpha, cfg.N(), cfg.moser_n_max);
  json mj = moser_json(moser);
  bool ok = r.sol.verified() && moser_ok(moser);
  std::vector<std::string> failures;
  if (!r.sol.verified()) failures.push_back("cooperative verification: " + r.sol.message);
  if (!moser_ok(moser)) failures.push_back("norm chain or series check");

  const auto c_hat_for = [&](const RunConfig& variant) -> std::optional<double> {
    const GridPtr g2 = make_grid(variant);
    const SystemSpec s2 = make_system(variant, g2);
    const auto sol = run_fixed_point(s2, variant.fixed_point);
    if (!sol.converged) return std::nullopt;
    return fit_and_bound(sol.u, sol.v, s2.p, s2.q, s2.f.beta, s2.g.alpha, variant.N(), variant.moser_n_max)
        .bound_u.c_hat;
  };
  if (!cfg.m1_family.empty()) {
    std::vector<double> values;
    json members = json::array();
    for (double m1 : cfg.m1_family) {
      RunConfig variant = cfg;
      variant.f.m = m1;
      const auto c = c_hat_for(variant);
      members.push_back({{"m1", m1}, {"c_hat", c ? json(*c) : json(nullptr)}});
      if (c) values.push_back(*c);
    }
    const auto st = constant_stability(values);
    json sj = stability_json(st);
    sj["members"] = members;
    const bool fam_ok = st.stable && values.size() == cfg.m1_family.size();
    sj["stable"] = fam_ok;
    mj["m1_family"] = sj;
    if (!fam_ok) failures.push_back("fitted constant unstable across m1 family");
    ok = ok && fam_ok;
  }
  if (cfg.refinement) {
    RunConfig fine = cfg;
    apply_resolution_override(fine, *cfg.refinement);
    const auto c = c_hat_for(fine);
    std::vector<double> values{moser.bound_u.c_hat};
    if (c) values.push_back(*c);
    const auto st = constant_stability(values);
    json sj = stability_json(st);
    sj["resolution"] = *cfg.refinement;
    const bool ref_ok = st.stable && c.has_value();
    sj["stable"] = ref_ok;
    mj["refinement"] = sj;
    if (!ref_ok) failures.push_back("fitted constant unstable under refinement");
    ok = ok && ref_ok;
  }
  report["moser"] = mj;
  return finish(ok ? kExitOk : kExitVerification, ok ? "verified" : join(failures, "; "));
}

}  // namespace pxsys
