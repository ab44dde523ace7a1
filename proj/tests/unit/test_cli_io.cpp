#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "pxsys/cli_io.hpp"

using namespace pxsys;
namespace fs = std::filesystem;

namespace {

const char* kSingle = R"(
[run]
mode = single
[grid]
dimension = 1
x1 = 0 1
resolution = 21
[exponents]
p = constant 2
)";

std::string cooperative(int resolution, const std::string& alpha1 = "-0.3") {
  return "[run]\nmode = cooperative\n[grid]\ndimension = 2\nx1 = 0 1\nx2 = 0 1\nresolution = " +
         std::to_string(resolution) +
         "\n[exponents]\np = constant 1.8\nq = constant 1.8\n"
         "[f]\nform = product\nm = 1\nalpha = constant " +
         alpha1 +
         "\nbeta = constant 0.5\n"
         "[g]\nform = product\nm = 1\nalpha = constant 0.5\nbeta = constant -0.3\n";
}

std::vector<std::string> errors_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigParseError& e) {
    return e.errors();
  }
  return {};
}

bool any_contains(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("pxsys_unit_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("minimal single config gets defaults") {
  const auto cfg = parse_config(kSingle);
  CHECK(cfg.mode == "single");
  CHECK(cfg.N() == 1);
  CHECK(cfg.resolution == std::vector<int>{21});
  CHECK(cfg.solver.tolerance == 1e-11);
  CHECK(cfg.fixed_point.max_iterations == 200);
  CHECK(cfg.competitive.delta == doctest::Approx(0.05));
  CHECK_FALSE(cfg.delta_given);
  CHECK(cfg.fields_file == "fields.csv");
}

TEST_CASE("errors carry line numbers") {
  const auto e = errors_of("[run]\nmode = single\n[grid]\nresolution = -5\nbogus = 1\n[nope]\n[exponents]\np = wavy 1\n");
  CHECK(any_contains(e, "line 4: [grid] resolution"));
  CHECK(any_contains(e, "line 5: unknown key 'bogus'"));
  CHECK(any_contains(e, "line 6: unknown section [nope]"));
  CHECK(any_contains(e, "line 8: [exponents] p: unknown exponent kind"));
  CHECK(any_contains(errors_of("[grid]\ndimension = two\n"), "line 2: [grid] dimension: expected an integer"));
  CHECK(any_contains(errors_of("[run]\nmode = single\nmode = single\n"), "line 3: duplicate key"));
}

TEST_CASE("cooperative config without g names the section") {
  std::string text = cooperative(9);
  text = text.substr(0, text.find("[g]"));
  CHECK(any_contains(errors_of(text), "requires section [g]"));
}

TEST_CASE("exponent tokens accept multiples of pi") {
  const auto cfg = parse_config(std::string(kSingle) + "q = sinusoidal 1.6 0.1 pi -2*pi\n");
  const auto& s = std::get<SinusoidalExponent>(*cfg.q);
  CHECK(s.c == std::numbers::pi);
  CHECK(s.e == -2 * std::numbers::pi);
}

TEST_CASE("formatted config parses back to the same text") {
  auto cfg = parse_config(cooperative(17));
  cfg.m1_family = {1, 2, 4};
  cfg.refinement = 33;
  const std::string once = format_config(cfg);
  CHECK(format_config(parse_config(once)) == once);
}

TEST_CASE("resolution override") {
  auto cfg = parse_config(cooperative(17));
  apply_resolution_override(cfg, 9);
  CHECK(cfg.resolution == std::vector<int>{9, 9});
  CHECK_THROWS_AS(apply_resolution_override(cfg, 2), ConfigError);
}

TEST_CASE("table writers") {
  const auto g = build_grid_2d({0, 1}, {0, 1}, 3, 3);
  const auto u = GridFunction::sample(g, [](const auto& x) { return x[0] + 2 * x[1]; }, false);
  const std::string csv = fields_csv(u, nullptr);
  CHECK(csv.rfind("x1,x2,u,v,d\n0,0,0,0,0\n0.5,0,0.5,0,0\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);
  CHECK(csv.find("0.5,0.5,1.5,0,0.5\n") != std::string::npos);
  CHECK(trace_csv({{1, 0.5, 0.25}}) == "iter,sup_delta,residual\n1,0.5,0.25\n");
}

TEST_CASE("validate mode writes the report only") {
  const auto dir = scratch("validate");
  auto cfg = parse_config(cooperative(9));
  cfg.mode = "validate";
  const auto out = run(cfg, dir);
  CHECK(out.exit_code == kExitOk);
  REQUIRE(out.written.size() == 1);
  CHECK(out.written[0].filename() == "report.json");

  auto bad = parse_config(cooperative(9, "-0.6"));
  const auto out_bad = run(bad, scratch("bad"));
  CHECK(out_bad.exit_code == kExitHypothesis);
  CHECK(out_bad.report_json.find("\"(c1) alpha1\"") != std::string::npos);
}

TEST_CASE("cooperative run writes three artifacts deterministically") {
  const auto cfg = parse_config(cooperative(9));
  const auto a = scratch("coop_a"), b = scratch("coop_b");
  const auto ra = run(cfg, a);
  const auto rb = run(cfg, b);
  CHECK(ra.exit_code == kExitOk);
  CHECK(ra.written.size() == 3);
  for (const char* f : {"fields.csv", "trace.csv", "report.json"}) {
    CHECK(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK(slurp(a / "report.json").find("\"resolution\": [\n        9,\n        9\n      ]") != std::string::npos);
}

TEST_CASE("single mode solves the 1-D torsion problem") {
  const auto out = run(parse_config(kSingle), scratch("single"));
  CHECK(out.exit_code == kExitOk);
  CHECK(out.report_json.find("\"sup_u\": 0.125") != std::string::npos);
}
