#include "libess/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "libess/errors.hpp"

namespace ess {

using nlohmann::json;

void PriceSeries::validate() const {
  if (hourly.size() != 24)
    throw config_error("price series must contain exactly 24 hourly prices, got " +
                       std::to_string(hourly.size()));
  for (size_t i = 0; i < hourly.size(); ++i)
    if (!std::isfinite(hourly[i]))
      throw config_error("price for hour " + std::to_string(i + 1) + " is not finite");
}

namespace {

// Splits a CSV line on commas and trims surrounding spaces from each field.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    size_t a = field.find_first_not_of(" \t\r");
    size_t b = field.find_last_not_of(" \t\r");
    out.push_back(a == std::string::npos ? "" : field.substr(a, b - a + 1));
  }
  return out;
}

bool parse_double(const std::string& s, double& out) {
  try {
    size_t pos = 0;
    out = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

PriceSeries ingest_prices(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open price file: " + path);

  std::vector<double> prices(24, 0.0);
  std::vector<bool> seen(24, false);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split_csv(line);
    if (fields.size() != 2)
      throw config_error(path + ":" + std::to_string(lineno) +
                         ": expected two fields (hour,price), got " +
                         std::to_string(fields.size()));
    double hraw = 0;
    if (!parse_double(fields[0], hraw)) {
      // A single non-numeric first row is treated as the header.
      if (lineno == 1) continue;
      throw config_error(path + ":" + std::to_string(lineno) +
                         ": hour is not a number: '" + fields[0] + "'");
    }
    int hour = static_cast<int>(std::lround(hraw));
    if (std::abs(hraw - hour) > 1e-9 || hour < 1 || hour > 24)
      throw config_error(path + ":" + std::to_string(lineno) +
                         ": hour must be an integer in 1..24, got '" + fields[0] + "'");
    double price = 0;
    if (!parse_double(fields[1], price) || !std::isfinite(price))
      throw config_error(path + ":" + std::to_string(lineno) +
                         ": price is not a finite number: '" + fields[1] + "'");
    if (seen[hour - 1])
      throw config_error(path + ":" + std::to_string(lineno) + ": duplicate hour " +
                         std::to_string(hour));
    seen[hour - 1] = true;
    prices[hour - 1] = price;
  }
  for (int h = 0; h < 24; ++h)
    if (!seen[h])
      throw config_error(path + ": missing price for hour " + std::to_string(h + 1));

  PriceSeries out;
  out.hourly = std::move(prices);
  out.validate();
  return out;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write file: " + path);
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

void write_schedule_csv(const Schedule& s, const std::string& path) {
  auto out = open_out(path);
  out << "hour,subinterval,charge_mw,discharge_mw,power_mw\n";
  for (int t = 0; t < s.hours; ++t) {
    for (int m = 0; m < s.subintervals; ++m) {
      int idx = t * s.subintervals + m;
      out << (t + 1) << ',' << (m + 1) << ',' << fmt(s.charge_mw[idx]) << ','
          << fmt(s.discharge_mw[idx]) << ',' << fmt(s.power_mw[idx]) << '\n';
    }
  }
  if (!out) throw io_error("failed writing " + path);
}

void write_hourly_csv(const Schedule& s, const std::vector<double>& prices,
                      const std::string& path) {
  if (static_cast<int>(prices.size()) != s.hours)
    throw config_error("hourly report: price count does not match schedule hours");
  auto out = open_out(path);
  out << "hour,price,energy_mwh,degradation_cost,soe_mwh\n";
  for (int t = 0; t < s.hours; ++t) {
    out << (t + 1) << ',' << fmt(prices[t]) << ',' << fmt(s.energy_mwh[t]) << ','
        << fmt(s.deg_cost[t]) << ',' << fmt(s.soe_mwh[t]) << '\n';
  }
  if (!out) throw io_error("failed writing " + path);
}

void write_audit_json(const AuditReport& rep, const std::string& path) {
  json j;
  j["steps_total"] = rep.steps_total;
  j["steps_violating"] = rep.steps_violating;
  j["violation_pct"] = rep.violation_pct;
  j["violations_by_kind"] = {{"voltage", rep.count_voltage},
                             {"current", rep.count_current},
                             {"stoich", rep.count_stoich},
                             {"power", rep.count_power}};
  j["committed_profit"] = rep.committed_profit;
  j["achieved_profit"] = rep.achieved_profit;
  j["achieved_discharge_mwh"] = rep.achieved_discharge_mwh;
  j["achieved_charge_mwh"] = rep.achieved_charge_mwh;
  json hours = json::array();
  for (size_t t = 0; t < rep.hours.size(); ++t) {
    const auto& h = rep.hours[t];
    hours.push_back({{"hour", t + 1},
                     {"price", h.price},
                     {"active", h.active},
                     {"committed_mwh", h.committed_mwh},
                     {"achieved_mwh", h.achieved_mwh},
                     {"steps", h.steps},
                     {"violating_steps", h.violating_steps}});
  }
  j["hours"] = std::move(hours);
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw io_error("failed writing " + path);
}

void write_report(const std::vector<ReportEntry>& entries, double eta_used,
                  const std::string& json_path, const std::string& text_path) {
  json j;
  j["round_trip_efficiency"] = eta_used;
  json runs = json::array();
  for (const auto& e : entries) {
    runs.push_back({{"model", e.model},
                    {"solver", e.solver},
                    {"status", e.status},
                    {"objective", e.objective},
                    {"solve_seconds", e.solve_seconds},
                    {"rows", e.rows},
                    {"continuous_vars", e.continuous},
                    {"binary_vars", e.binary},
                    {"audit_violation_pct", e.violation_pct},
                    {"audit_achieved_profit", e.achieved_profit},
                    {"audit_achieved_discharge_mwh", e.achieved_discharge_mwh}});
  }
  j["runs"] = std::move(runs);
  {
    auto out = open_out(json_path);
    out << j.dump(2) << '\n';
    if (!out) throw io_error("failed writing " + json_path);
  }

  auto out = open_out(text_path);
  out << "Arbitrage run report\n";
  out << "round-trip efficiency used: " << fmt(eta_used) << "\n\n";
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-14s %-8s %-10s %12s %10s %8s %8s %8s %10s %12s\n",
                "model", "solver", "status", "objective", "solve_s", "rows", "cont",
                "bin", "viol_pct", "achieved_$");
  out << buf;
  for (const auto& e : entries) {
    std::snprintf(buf, sizeof(buf),
                  "%-14s %-8s %-10s %12.2f %10.2f %8d %8d %8d %10.2f %12.2f\n",
                  e.model.c_str(), e.solver.c_str(), e.status.c_str(), e.objective,
                  e.solve_seconds, e.rows, e.continuous, e.binary, e.violation_pct,
                  e.achieved_profit);
    out << buf;
  }
  if (!out) throw io_error("failed writing " + text_path);
}

}  // namespace ess
