#pragma once

#include <map>
#include <string>
#include <vector>

#include "libess/milp.hpp"

namespace ess {

enum class SolveStatus {
  Optimal,     // proven within the requested gap
  Feasible,    // stopped early with an incumbent
  Infeasible,
  Unbounded,
  TimeLimit,   // stopped early with no incumbent
  Error,
};

const char* status_name(SolveStatus s);

struct SolveOptions {
  std::string backend = "auto";  // auto | internal | scipy | cmd:<template>
  double gap = 1e-3;             // relative MIP gap
  double time_limit_s = 120.0;
  bool verbose = false;
  bool keep_files = false;       // keep subprocess scratch files
  // Optional feasible point, variable name -> value.  Passed to the solver
  // as a starting incumbent; names absent from the model are an error.
  std::map<std::string, double> warm_start;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Error;
  double objective = 0;
  std::vector<double> values;  // aligned with the model's variables
  double seconds = 0;
  long nodes = 0;
  std::string solver;
  std::string log;
};

// Dispatches on options.backend.  "auto" keeps small models in process and
// hands larger ones to the subprocess driver.
SolveResult solve(const MilpModel& model, const SolveOptions& opts);

// Branch and bound on the built-in bounded simplex.  Suitable for models up
// to a few hundred rows and a few dozen binaries.
SolveResult solve_internal(const MilpModel& model, const SolveOptions& opts);

// Writes MPS to a scratch directory, runs the external solver command and
// reads the solution file back.  The default command runs the bundled
// python driver; override with ESS_SOLVER_DRIVER or a cmd: backend string.
SolveResult solve_subprocess(const MilpModel& model, const SolveOptions& opts,
                             const std::string& command_template = "");

// "name value" per line, '#' comments, '=key value' metadata lines.
void write_solution(const MilpModel& model, const SolveResult& r, const std::string& path);

// Parses a solution file into values aligned with the model's variables.
// Unknown variable names are an error; absent ones default to zero.
std::vector<double> read_solution_values(const MilpModel& model, const std::string& path,
                                         std::string* status_out = nullptr,
                                         double* objective_out = nullptr);

}  // namespace ess
