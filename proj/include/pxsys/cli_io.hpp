#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pxsys/competitive.hpp"
#include "pxsys/cooperative.hpp"
#include "pxsys/error.hpp"
#include "pxsys/exponents.hpp"
#include "pxsys/grid.hpp"

namespace pxsys {

/// Every problem found while parsing, each prefixed with its line number.
class ConfigParseError : public ConfigError {
public:
  explicit ConfigParseError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const noexcept { return errors_; }

private:
  std::vector<std::string> errors_;
};

struct NonlinearityConfig {
  bool present = false;
  std::string form = "product";  ///< product | sum
  double m = 1.0;
  ExponentDescriptor alpha = ConstantExponent{0.0};
  ExponentDescriptor beta = ConstantExponent{0.0};
  std::string argument = "s2";  ///< s1 | s2, sum form only
};

/// Exit statuses of a run.
enum ExitStatus : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitVerification = 2,
  kExitNonConvergence = 3,
  kExitHypothesis = 4,
};

struct RunConfig {
  std::string mode = "validate";  ///< validate | single | cooperative | competitive | verify-moser
  /// Which hypotheses `validate` checks; derived from the mode in the file.
  std::string structure = "cooperative";

  int dimension = 2;
  std::vector<Interval> extents{{0.0, 1.0}, {0.0, 1.0}};
  std::vector<int> resolution{65, 65};

  std::optional<ExponentDescriptor> p;
  std::optional<ExponentDescriptor> q;
  NonlinearityConfig f;
  NonlinearityConfig g;

  SolverConfig solver;
  CooperativeOptions fixed_point;
  CompetitiveOptions competitive;
  bool delta_given = false;

  double single_source = 1.0;

  int moser_n_max = 6;
  std::vector<double> m1_family;
  std::optional<int> refinement;

  std::string fields_file = "fields.csv";
  std::string report_file = "report.json";
  std::string trace_file = "trace.csv";

  /// N, the space dimension.
  int N() const { return dimension; }
};

/// Parses the sectioned key = value format. Throws ConfigParseError listing
/// every problem found.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Sets the node count along every axis.
void apply_resolution_override(RunConfig& cfg, int n);

GridPtr make_grid(const RunConfig& cfg);
NonlinearitySpec make_nonlinearity(const NonlinearityConfig& nc, const GridPtr& grid);
/// Throws ConfigError naming the missing section.
SystemSpec make_system(const RunConfig& cfg, const GridPtr& grid);

/// The resolved configuration in the config grammar (defaults included).
std::string format_config(const RunConfig& cfg);

struct RunOutcome {
  int exit_code = kExitOk;
  std::string message;
  std::string report_json;
  std::vector<std::filesystem::path> written;
};

/// Runs the configured mode and writes its artifacts into `out_dir`.
RunOutcome run(const RunConfig& cfg, const std::filesystem::path& out_dir);

/// Fields table: header x1,x2,u,v,d and one row per node.
std::string fields_csv(const GridFunction& u, const GridFunction* v);
/// Trace table: header iter,sup_delta,residual.
std::string trace_csv(const std::vector<TraceRow>& rows);

}  // namespace pxsys
