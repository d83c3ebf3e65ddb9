#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "libess/linearize.hpp"
#include "libess/params.hpp"

namespace ess {

enum class VarKind { Continuous, Binary };
enum class RowSense { LE, GE, EQ };

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lb = 0;
  double ub = 0;
  double obj = 0;
};

struct Row {
  std::string name;
  RowSense sense = RowSense::EQ;
  double rhs = 0;
  std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)
};

struct ModelStats {
  int rows = 0;
  int continuous = 0;
  int binary = 0;
};

// Sparse mixed-integer linear model.  Every variable carries finite bounds;
// senses live on the rows.  Variable and row names double as MPS names, so
// they are capped at eight characters and must be unique.
class MilpModel {
 public:
  std::string name = "MODEL";
  bool maximize = true;
  std::vector<Variable> vars;
  std::vector<Row> rows;

  // Builder bookkeeping: named variable families (per subinterval or per
  // hour) and scalar metadata, used when pulling schedules out of solutions.
  std::map<std::string, std::vector<int>> groups;
  std::map<std::string, double> info;

  int add_var(const std::string& name, double lb, double ub, double obj,
              VarKind kind = VarKind::Continuous);
  int add_binary(const std::string& name, double obj = 0.0);
  void add_row(const std::string& name, RowSense sense, double rhs,
               std::vector<std::pair<int, double>> terms);

  int var_index(const std::string& name) const;  // -1 when absent
  ModelStats stats() const;

  double objective_value(const std::vector<double>& x) const;
  double row_activity(const Row& r, const std::vector<double>& x) const;
  // Worst constraint violation of a candidate point: row senses, variable
  // bounds and binary integrality all count.
  double max_violation(const std::vector<double>& x) const;

  void validate() const;

 private:
  std::unordered_map<std::string, int> var_lookup_;
};

struct ArbitrageConfig {
  int subintervals = 5;           // per hour
  double eta_roundtrip = 0.9;     // charge-side efficiency, power-energy model
  double soe0_frac = 1.0;         // initial state as a fraction of capacity
  int ocp_segments = 1;
  int square_segments = 7;
  double power_band_frac = 0.01;  // intra-hour power band, fraction of p_max
};

// Classic storage arbitrage: hourly prices, charge/discharge power split,
// state of energy recursion with a fixed round-trip efficiency on charge,
// binary per hour forbidding simultaneous charge and discharge, degradation
// cost on discharged energy.
MilpModel build_power_energy(const CellParams& p, const std::vector<double>& prices,
                             const ArbitrageConfig& cfg);

// Electrochemistry-aware arbitrage: per subinterval the reduced cell model
// (current, fluxes, average and surface stoichiometry, linear overpotential,
// open-circuit chords) decides terminal voltage, and pack power comes from
// the rotated bilinear term v*i = y1^2 - y2^2 with piecewise-linear squares.
MilpModel build_physics(const CellParams& p, const std::vector<double>& prices,
                        const ArbitrageConfig& cfg);

// Feasible starting point for the physics-based model: dynamic programming
// over hourly constant-power targets simulated on the same chord physics,
// then an exact replay that assigns every model variable.  Branch and bound
// only has to prove optimality, not discover a good schedule.
struct WarmStart {
  std::map<std::string, double> values;  // variable name -> value
  double objective = 0;                  // objective at the starting point
};
WarmStart physics_warm_start(const CellParams& p, const std::vector<double>& prices,
                             const ArbitrageConfig& cfg);

struct Schedule {
  int hours = 0;
  int subintervals = 0;
  double tau_h = 0;  // subinterval length in hours
  // Per subinterval, pack level, MW.
  std::vector<double> charge_mw;
  std::vector<double> discharge_mw;
  std::vector<double> power_mw;  // discharge positive
  // Per hour.
  std::vector<double> energy_mwh;
  std::vector<double> deg_cost;
  std::vector<double> soe_mwh;  // end-of-hour state of energy (or estimate)
  double objective = 0;
  double solve_seconds = 0;
  std::string solver;
  std::string status;
  std::vector<double> var_values;  // aligned with the model's variables
};

struct SolveResult;  // solver.hpp

Schedule extract_schedule(const MilpModel& model, const SolveResult& result);

}  // namespace ess
