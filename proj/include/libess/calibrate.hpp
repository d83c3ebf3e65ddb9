#pragma once

#include <string>
#include <vector>

#include "libess/milp.hpp"
#include "libess/params.hpp"
#include "libess/spm.hpp"

namespace ess {

struct EfficiencyResult {
  double eta = 0;            // discharged over charged energy
  double charge_wh = 0;      // pack energy absorbed
  double discharge_wh = 0;   // pack energy delivered
  double charge_s = 0;       // duration of the charge leg
  double discharge_s = 0;
  double seconds = 0;        // wall time spent simulating
};

// Round-trip efficiency at a constant current: charge from empty until the
// voltage ceiling, full state or one C-adjusted hour, then discharge until
// the voltage floor, empty state or the same time cap.  Any recorded
// violation aborts the calibration.
EfficiencyResult round_trip_efficiency(const CellParams& p, double c_rate = 1.0,
                                       double dt = 1.0);

// Affine map between negative-electrode surface concentration and state of
// charge, anchored at (c_min, floor) and (full-surface concentration, 1).
double soc_from_surface(double c_surf_n, const CellParams& p);
double surface_from_soc(double soc, const CellParams& p);

struct AuditHour {
  double committed_mwh = 0;  // settled energy the model promised
  double achieved_mwh = 0;   // replayed energy
  double price = 0;
  bool active = false;       // any nonzero scheduled power
  int steps = 0;
  int violating_steps = 0;
};

struct AuditReport {
  std::vector<AuditHour> hours;
  double violation_pct = 0;  // share of 10 s steps in active hours with any flag
  long steps_total = 0;      // in active hours
  long steps_violating = 0;
  long count_voltage = 0;
  long count_current = 0;
  long count_stoich = 0;
  long count_power = 0;
  double committed_profit = 0;   // model objective
  double achieved_profit = 0;    // replayed energies at the same prices
  double achieved_discharge_mwh = 0;
  double achieved_charge_mwh = 0;
  SimTrace trace;
};

// Replays a schedule against the full nonlinear cell from a fully charged
// start, holding each subinterval's power setpoint with step_s resolution.
AuditReport audit_schedule(const CellParams& p, const Schedule& schedule,
                           const std::vector<double>& prices, double step_s = 10.0);

}  // namespace ess
