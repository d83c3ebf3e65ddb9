#include "libess/calibrate.hpp"

#include <chrono>
#include <cmath>

namespace ess {

namespace {

// One constant-current leg.  Steps until a terminal condition triggers and
// accumulates pack energy; throws on any limit violation before termination.
struct LegResult {
  double energy_wh = 0;
  double duration_s = 0;
};

LegResult run_leg(SpmCell& cell, double i_app, double t_cap_s, double dt,
                  const char* leg_name) {
  const CellParams& p = cell.params();
  LegResult leg;
  bool charging = i_app < 0.0;
  while (leg.duration_s + 1e-9 < t_cap_s) {
    double v = cell.terminal_voltage(i_app);
    if (charging && v >= p.v_max) break;
    if (!charging && v <= p.v_min) break;
    double soc = cell.soc();
    if (charging && soc >= 1.0 - 1e-9) break;
    if (!charging && soc <= 1e-9) break;

    // The legs sweep the cell's full physical range on purpose, so the
    // acceptable-band concentration flag is expected; only hard electrical
    // limits abort the calibration.
    uint8_t flags = cell.violation_flags(i_app) &
                    (kViolationVoltage | kViolationCurrent);
    if (flags)
      throw solve_error(std::string("calibration aborted: ") + violation_names(flags) +
                        " violation during the " + leg_name + " leg");

    double h = std::min(dt, t_cap_s - leg.duration_s);
    cell.advance(i_app, h);
    leg.duration_s += h;
    leg.energy_wh += p.n_cells * i_app * cell.terminal_voltage(i_app) * h / 3600.0;
  }
  return leg;
}

}  // namespace

EfficiencyResult round_trip_efficiency(const CellParams& p, double c_rate, double dt) {
  if (!(c_rate > 0.0)) throw config_error("calibration C-rate must be positive");
  auto t0 = std::chrono::steady_clock::now();

  SpmCell cell(p);
  cell.reset_to_soc(0.0);

  double i = c_rate * p.i_max_a;
  double t_cap = 3600.0 / c_rate;

  LegResult ch = run_leg(cell, -i, t_cap, dt, "charge");
  if (ch.energy_wh >= 0.0 || ch.duration_s <= 0.0)
    throw solve_error("calibration charge leg stored no energy");
  LegResult dis = run_leg(cell, i, t_cap, dt, "discharge");

  EfficiencyResult out;
  out.charge_wh = -ch.energy_wh;
  out.discharge_wh = dis.energy_wh;
  out.charge_s = ch.duration_s;
  out.discharge_s = dis.duration_s;
  out.eta = out.discharge_wh / out.charge_wh;
  out.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

double soc_from_surface(double c_surf_n, const CellParams& p) {
  double c_full = p.neg.stoich_full * p.neg.c_max;
  double floor = p.soc_floor;
  return floor + (1.0 - floor) * (c_surf_n - p.neg.c_min) / (c_full - p.neg.c_min);
}

double surface_from_soc(double soc, const CellParams& p) {
  double c_full = p.neg.stoich_full * p.neg.c_max;
  double floor = p.soc_floor;
  return p.neg.c_min + (soc - floor) / (1.0 - floor) * (c_full - p.neg.c_min);
}

AuditReport audit_schedule(const CellParams& p, const Schedule& schedule,
                           const std::vector<double>& prices, double step_s) {
  if (static_cast<int>(prices.size()) != schedule.hours)
    throw config_error("audit: price series length does not match the schedule");
  if (schedule.power_mw.empty())
    throw config_error("audit: schedule has no per-subinterval powers");

  AuditReport rep;
  rep.hours.resize(schedule.hours);
  rep.committed_profit = schedule.objective;

  SpmCell cell(p);
  cell.reset_to_soc(1.0);

  const int M = schedule.subintervals;
  const double tau_s = 3600.0 / M;

  SimTrace& trace = rep.trace;
  double t = 0.0;

  for (int h = 0; h < schedule.hours; ++h) {
    AuditHour& hour = rep.hours[h];
    hour.price = prices[h];
    hour.committed_mwh = h < static_cast<int>(schedule.energy_mwh.size())
                             ? schedule.energy_mwh[h]
                             : 0.0;
    for (int r = 0; r < M; ++r)
      if (std::abs(schedule.power_mw[h * M + r]) > 1e-9) hour.active = true;

    for (int r = 0; r < M; ++r) {
      double target_w = schedule.power_mw[h * M + r] * 1e6;
      double left = tau_s;
      while (left > 1e-9) {
        double dt = std::min(step_s, left);
        left -= dt;
        uint8_t flags = 0;
        double i = 0.0;
        if (target_w != 0.0) {
          bool ok = true;
          i = cell.current_for_power(target_w, ok);
          if (!ok) flags |= kViolationPowerUnreachable;
        }
        cell.advance(i, dt);
        t += dt;

        TracePoint pt;
        pt.t_s = t;
        pt.dt_s = dt;
        pt.i_a = i;
        pt.soc = cell.soc();
        pt.c_surf_n = cell.c_surf(Electrode::Negative, i);
        pt.c_surf_p = cell.c_surf(Electrode::Positive, i);
        try {
          pt.v_v = cell.terminal_voltage(i);
          pt.p_w = p.n_cells * i * pt.v_v;
        } catch (const Error& e) {
          throw audit_error(std::string("replay failed in hour ") + std::to_string(h + 1) +
                            ": " + e.what());
        }
        pt.flags = flags | cell.violation_flags(i);
        trace.points.push_back(pt);

        hour.achieved_mwh += pt.p_w * dt / 3600.0 / 1e6;
        if (pt.p_w > 0.0) rep.achieved_discharge_mwh += pt.p_w * dt / 3600.0 / 1e6;
        if (pt.p_w < 0.0) rep.achieved_charge_mwh -= pt.p_w * dt / 3600.0 / 1e6;

        hour.steps += 1;
        if (pt.flags) {
          hour.violating_steps += 1;
          if (pt.flags & kViolationVoltage) rep.count_voltage += 1;
          if (pt.flags & kViolationCurrent) rep.count_current += 1;
          if (pt.flags & kViolationStoich) rep.count_stoich += 1;
          if (pt.flags & kViolationPowerUnreachable) rep.count_power += 1;
        }
      }
    }
  }

  double deg_rate = p.econ.capital_cost_per_mwh / p.econ.cycle_life;
  for (int h = 0; h < schedule.hours; ++h) {
    const AuditHour& hour = rep.hours[h];
    rep.achieved_profit += hour.price * hour.achieved_mwh;
    if (hour.active) {
      rep.steps_total += hour.steps;
      rep.steps_violating += hour.violating_steps;
    }
  }
  rep.achieved_profit -= deg_rate * rep.achieved_discharge_mwh;
  rep.violation_pct =
      rep.steps_total == 0 ? 0.0 : 100.0 * rep.steps_violating / rep.steps_total;
  return rep;
}

}  // namespace ess
