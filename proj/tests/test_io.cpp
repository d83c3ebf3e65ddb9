#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "libess/errors.hpp"
#include "libess/io.hpp"

#include "support/fixtures.hpp"

using namespace ess;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  std::ofstream out(name);
  out << text;
  return name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Schedule tiny_schedule() {
  Schedule s;
  s.hours = 2;
  s.subintervals = 2;
  s.tau_h = 0.5;
  s.charge_mw = {0.0, 0.0, 1.0, 1.0};
  s.discharge_mw = {2.0, 2.0, 0.0, 0.0};
  s.power_mw = {2.0, 2.0, -1.0, -1.0};
  s.energy_mwh = {2.0, -1.0};
  s.deg_cost = {0.5, 0.0};
  s.soe_mwh = {2.0, 3.0};
  s.objective = 123.25;
  s.solve_seconds = 0.75;
  s.solver = "internal";
  s.status = "Optimal";
  return s;
}

}  // namespace

TEST_CASE("bundled price fixture loads in order") {
  const auto& prices = esstest::day_prices();
  REQUIRE(prices.size() == 24);
  CHECK(prices[0] == doctest::Approx(132.0));
  CHECK(prices[20] == doctest::Approx(220.0));  // evening peak, hour 21
  for (double v : prices) CHECK(v > 0);
}

TEST_CASE("price rows may arrive in any order") {
  auto path = write_temp("io_shuffled_tmp.csv", [] {
    std::string text = "hour,price\n";
    for (int h = 24; h >= 1; --h)
      text += std::to_string(h) + "," + std::to_string(100 + h) + "\n";
    return text;
  }());
  PriceSeries s = ingest_prices(path);
  std::remove(path.c_str());
  for (int h = 1; h <= 24; ++h) CHECK(s.hourly[h - 1] == doctest::Approx(100 + h));
}

TEST_CASE("ingestion errors cite the offending line") {
  SUBCASE("non-numeric price") {
    auto path = write_temp("io_bad1_tmp.csv", "hour,price\n1,12.5\n2,oops\n");
    CHECK_THROWS_WITH_AS(ingest_prices(path), doctest::Contains(":3"), Error);
    std::remove(path.c_str());
  }
  SUBCASE("hour out of range") {
    auto path = write_temp("io_bad2_tmp.csv", "25,10\n");
    CHECK_THROWS_WITH_AS(ingest_prices(path), doctest::Contains(":1"), Error);
    std::remove(path.c_str());
  }
  SUBCASE("duplicate hour") {
    auto path = write_temp("io_bad3_tmp.csv", "1,10\n1,11\n");
    CHECK_THROWS_WITH_AS(ingest_prices(path), doctest::Contains("duplicate"), Error);
    std::remove(path.c_str());
  }
  SUBCASE("missing hours") {
    auto path = write_temp("io_bad4_tmp.csv", "1,10\n2,11\n");
    CHECK_THROWS_WITH_AS(ingest_prices(path), doctest::Contains("missing"), Error);
    std::remove(path.c_str());
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(ingest_prices("io_absent_tmp.csv"), Error);
  }
}

TEST_CASE("schedule csv carries one row per subinterval") {
  Schedule s = tiny_schedule();
  std::string path = "io_sched_tmp.csv";
  write_schedule_csv(s, path);
  std::string text = slurp(path);
  std::remove(path.c_str());

  std::istringstream in(text);
  std::string line;
  int rows = 0;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      CHECK(line.find("power_mw") != std::string::npos);
      header = false;
      continue;
    }
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 4);
}

TEST_CASE("hourly csv joins prices with settled energy") {
  Schedule s = tiny_schedule();
  std::vector<double> prices = {80.0, 45.0};
  std::string path = "io_hourly_tmp.csv";
  write_hourly_csv(s, prices, path);
  std::string text = slurp(path);
  std::remove(path.c_str());
  CHECK(text.find("80") != std::string::npos);
  CHECK(text.find("price") != std::string::npos);

  std::vector<double> wrong = {80.0};
  CHECK_THROWS_AS(write_hourly_csv(s, wrong, "io_hourly_bad_tmp.csv"), Error);
}

TEST_CASE("audit json parses back with the headline numbers") {
  const CellParams& p = esstest::lgm50();
  Schedule s;
  s.hours = 1;
  s.subintervals = 1;
  s.tau_h = 1.0;
  s.power_mw = {0.0};
  s.charge_mw = {0.0};
  s.discharge_mw = {0.0};
  s.energy_mwh = {0.0};
  s.objective = 0.0;
  std::vector<double> prices = {55.0};
  AuditReport rep = audit_schedule(p, s, prices);

  std::string path = "io_audit_tmp.json";
  write_audit_json(rep, path);
  auto j = nlohmann::json::parse(slurp(path));
  std::remove(path.c_str());

  CHECK(j.contains("violation_pct"));
  CHECK(j["violation_pct"].get<double>() == 0.0);
  CHECK(j.contains("hours"));
  CHECK(j["hours"].size() == 1);
  CHECK(j["hours"][0]["price"].get<double>() == 55.0);
}

TEST_CASE("run report writes machine and human variants") {
  ReportEntry a;
  a.model = "power_energy";
  a.solver = "internal";
  a.status = "Optimal";
  a.objective = 39.11;
  a.solve_seconds = 0.2;
  a.rows = 100;
  a.continuous = 200;
  a.binary = 24;
  a.violation_pct = 12.9;
  ReportEntry b = a;
  b.model = "physics";
  b.objective = 40.5;
  b.violation_pct = 1.8;

  std::string jpath = "io_report_tmp.json", tpath = "io_report_tmp.txt";
  write_report({a, b}, 0.9, jpath, tpath);
  auto j = nlohmann::json::parse(slurp(jpath));
  std::string text = slurp(tpath);
  std::remove(jpath.c_str());
  std::remove(tpath.c_str());

  REQUIRE(j.contains("runs"));
  CHECK(j["runs"].size() == 2);
  CHECK(j["runs"][0]["model"] == "power_energy");
  CHECK(j["runs"][1]["objective"].get<double>() == doctest::Approx(40.5));
  CHECK(j["round_trip_efficiency"].get<double>() == doctest::Approx(0.9));
  CHECK(text.find("physics") != std::string::npos);
  CHECK(text.find("power_energy") != std::string::npos);
}
