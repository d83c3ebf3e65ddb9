#pragma once

#include <string>
#include <vector>

#include "libess/calibrate.hpp"
#include "libess/milp.hpp"

namespace ess {

// One market day of hourly prices, $/MWh.
struct PriceSeries {
  std::vector<double> hourly;  // exactly 24 entries, hour 1 first
  void validate() const;
};

// Reads "hour,price" CSV rows (header line optional).  Hours 1..24 must each
// appear exactly once; any order is accepted and rows are sorted by hour.
PriceSeries ingest_prices(const std::string& path);

void write_schedule_csv(const Schedule& s, const std::string& path);

void write_hourly_csv(const Schedule& s, const std::vector<double>& prices,
                      const std::string& path);

void write_audit_json(const AuditReport& rep, const std::string& path);

struct ReportEntry {
  std::string model;
  std::string solver;
  std::string status;
  double objective = 0;
  double solve_seconds = 0;
  int rows = 0;
  int continuous = 0;
  int binary = 0;
  double violation_pct = 0;
  double achieved_profit = 0;
  double achieved_discharge_mwh = 0;
};

// Side-by-side run report, machine readable plus a short human summary.
void write_report(const std::vector<ReportEntry>& entries, double eta_used,
                  const std::string& json_path, const std::string& text_path);

}  // namespace ess
