#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "libess/calibrate.hpp"
#include "libess/errors.hpp"

#include "support/fixtures.hpp"

using namespace ess;

TEST_CASE("round-trip efficiency at 1C sits near ninety percent") {
  const CellParams& p = esstest::lgm50();
  EfficiencyResult r = round_trip_efficiency(p, 1.0);
  CHECK(r.eta > 0.86);
  CHECK(r.eta < 0.94);
  CHECK(r.charge_wh > r.discharge_wh);  // losses both ways
  CHECK(r.charge_s > 0);
  CHECK(r.discharge_s > 0);
  CHECK(r.eta == doctest::Approx(r.discharge_wh / r.charge_wh));
}

TEST_CASE("efficiency falls as the rate rises") {
  const CellParams& p = esstest::lgm50();
  double slow = round_trip_efficiency(p, 0.5).eta;
  double fast = round_trip_efficiency(p, 2.0).eta;
  CHECK(slow > fast);
  CHECK(slow < 1.0);
}

TEST_CASE("surface-to-soc map is affine and anchored") {
  const CellParams& p = esstest::lgm50();

  // anchors: the stored concentration floor maps to the soc floor
  CHECK(soc_from_surface(p.neg.c_min, p) == doctest::Approx(p.soc_floor));
  double c_full = surface_from_soc(1.0, p);
  CHECK(soc_from_surface(c_full, p) == doctest::Approx(1.0));

  // round trip across the window
  for (double soc : {0.1, 0.37, 0.5, 0.88, 1.0}) {
    if (soc < p.soc_floor) continue;
    double c = surface_from_soc(soc, p);
    CHECK(soc_from_surface(c, p) == doctest::Approx(soc).epsilon(1e-12));
  }

  // affine: midpoint maps to midpoint
  double lo = surface_from_soc(0.2, p), hi = surface_from_soc(0.8, p);
  CHECK(surface_from_soc(0.5, p) == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-12));
}

TEST_CASE("auditing an idle schedule reports no violations and no profit") {
  const CellParams& p = esstest::lgm50();
  Schedule s;
  s.hours = 3;
  s.subintervals = 5;
  s.tau_h = 0.2;
  s.power_mw.assign(15, 0.0);
  s.charge_mw.assign(15, 0.0);
  s.discharge_mw.assign(15, 0.0);
  s.energy_mwh.assign(3, 0.0);
  s.objective = 0.0;

  std::vector<double> prices = {50.0, 60.0, 70.0};
  AuditReport rep = audit_schedule(p, s, prices);
  CHECK(rep.violation_pct == 0.0);
  CHECK(rep.steps_total == 0);  // no active hours, so no counted steps
  CHECK(rep.achieved_profit == doctest::Approx(0.0));
  CHECK(rep.achieved_discharge_mwh == doctest::Approx(0.0));
  for (const auto& h : rep.hours) CHECK_FALSE(h.active);
}

TEST_CASE("auditing a gentle discharge tracks the committed energy") {
  const CellParams& p = esstest::lgm50();
  double mw = 0.25 * p.p_max_discharge_mw;

  Schedule s;
  s.hours = 2;
  s.subintervals = 5;
  s.tau_h = 0.2;
  s.power_mw.assign(10, 0.0);
  s.charge_mw.assign(10, 0.0);
  s.discharge_mw.assign(10, 0.0);
  for (int k = 0; k < 5; ++k) {
    s.power_mw[k] = mw;
    s.discharge_mw[k] = mw;
  }
  s.energy_mwh = {mw, 0.0};
  s.objective = 80.0 * mw;

  std::vector<double> prices = {80.0, 40.0};
  AuditReport rep = audit_schedule(p, s, prices);

  CHECK(rep.hours[0].active);
  CHECK_FALSE(rep.hours[1].active);
  CHECK(rep.steps_total == 360);  // one active hour at 10 s resolution
  CHECK(rep.violation_pct == doctest::Approx(0.0));
  // a quarter-rate discharge from full is comfortably deliverable
  CHECK(rep.hours[0].achieved_mwh == doctest::Approx(mw).epsilon(1e-3));
  CHECK(rep.achieved_profit == doctest::Approx(80.0 * mw).epsilon(1e-3));
  CHECK(rep.achieved_discharge_mwh == doctest::Approx(mw).epsilon(1e-3));
}

TEST_CASE("audit counts unreachable power as violations") {
  CellParams p = esstest::lgm50();
  Schedule s;
  s.hours = 1;
  s.subintervals = 1;
  s.tau_h = 1.0;
  // ask for far more than the cell can deliver near empty
  s.power_mw = {p.p_max_discharge_mw};
  s.charge_mw = {0.0};
  s.discharge_mw = {p.p_max_discharge_mw};
  s.energy_mwh = {p.p_max_discharge_mw};
  s.objective = 0.0;

  CellParams drained = p;
  // start the audit from full anyway; a full hour at the rating will hit the
  // voltage floor on this small pack and flag the tail steps
  std::vector<double> prices = {100.0};
  AuditReport rep = audit_schedule(drained, s, prices);
  CHECK(rep.steps_total == 360);
  CHECK(rep.steps_violating > 0);
  CHECK(rep.violation_pct > 0.0);
}

TEST_CASE("audit rejects mismatched inputs") {
  const CellParams& p = esstest::lgm50();
  Schedule s;
  s.hours = 2;
  s.subintervals = 1;
  s.tau_h = 1.0;
  s.power_mw = {0.0, 0.0};
  std::vector<double> one_price = {50.0};
  CHECK_THROWS_AS(audit_schedule(p, s, one_price), Error);
  Schedule empty;
  empty.hours = 1;
  std::vector<double> p1 = {50.0};
  CHECK_THROWS_AS(audit_schedule(p, empty, p1), Error);
}
