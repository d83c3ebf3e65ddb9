#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "libess/milp.hpp"
#include "libess/mps.hpp"

#include "support/fixtures.hpp"
#include "support/mps_reader.hpp"

using namespace ess;

namespace {

// Field-by-field equality; bit-exact on every numeric value.
void check_same(const MilpModel& a, const MilpModel& b) {
  CHECK(a.name == b.name);
  CHECK(a.maximize == b.maximize);
  REQUIRE(a.vars.size() == b.vars.size());
  for (size_t i = 0; i < a.vars.size(); ++i) {
    INFO("variable ", a.vars[i].name);
    CHECK(a.vars[i].name == b.vars[i].name);
    CHECK(a.vars[i].kind == b.vars[i].kind);
    CHECK(a.vars[i].lb == b.vars[i].lb);
    CHECK(a.vars[i].ub == b.vars[i].ub);
    CHECK(a.vars[i].obj == b.vars[i].obj);
  }
  REQUIRE(a.rows.size() == b.rows.size());
  for (size_t r = 0; r < a.rows.size(); ++r) {
    INFO("row ", a.rows[r].name);
    CHECK(a.rows[r].name == b.rows[r].name);
    CHECK(a.rows[r].sense == b.rows[r].sense);
    CHECK(a.rows[r].rhs == b.rows[r].rhs);
    REQUIRE(a.rows[r].terms.size() == b.rows[r].terms.size());
    // the COLUMNS section is column-major, so term order is not preserved
    auto ta = a.rows[r].terms, tb = b.rows[r].terms;
    std::sort(ta.begin(), ta.end());
    std::sort(tb.begin(), tb.end());
    for (size_t k = 0; k < ta.size(); ++k) {
      CHECK(ta[k].first == tb[k].first);
      CHECK(ta[k].second == tb[k].second);
    }
  }
}

}  // namespace

TEST_CASE("format_exact round-trips doubles bit for bit") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-30, 30);
  for (int k = 0; k < 2000; ++k) {
    double v = std::ldexp(mant(rng), expo(rng));
    double back = std::strtod(format_exact(v).c_str(), nullptr);
    CHECK(back == v);
  }
  CHECK(std::strtod(format_exact(0.1).c_str(), nullptr) == 0.1);
  CHECK(std::strtod(format_exact(-1.0 / 3.0).c_str(), nullptr) == -1.0 / 3.0);
  CHECK(format_exact(1.0) == "1");
  CHECK(format_exact(0.0) == "0");
}

TEST_CASE("hand-built mixed model round-trips through MPS text") {
  MilpModel m;
  m.name = "TINY";
  m.maximize = true;
  int x = m.add_var("x", 0.0, 4.0, 3.0);
  int y = m.add_var("y", -2.5, 7.25, -1.0 / 3.0);
  int b = m.add_binary("b", 0.125);
  int f = m.add_var("f", 1.5, 1.5, 0.0);  // fixed variable
  m.add_row("cap", RowSense::LE, 10.0, {{x, 1.0}, {y, 2.0}, {b, 5.0}});
  m.add_row("bal", RowSense::EQ, 0.3, {{x, 0.1}, {y, -0.2}, {f, 1.0}});
  m.add_row("flr", RowSense::GE, -3.0, {{y, 1.0}, {b, -0.7}});
  m.validate();

  MilpModel back = esstest::read_mps_text(mps_to_string(m));
  check_same(m, back);
}

TEST_CASE("negative lower bounds and empty-objective columns survive") {
  MilpModel m;
  m.name = "SIGNS";
  int u = m.add_var("u", -5.0, -1.0, 0.0);  // entirely negative box, no objective
  int v = m.add_var("v", 0.0, 1e9, 2.0);
  m.add_row("r", RowSense::GE, -4.0, {{u, 1.0}, {v, 1.0}});
  MilpModel back = esstest::read_mps_text(mps_to_string(m));
  check_same(m, back);
}

TEST_CASE("both production models round-trip bit-exactly") {
  const CellParams& p = esstest::lgm50();
  ArbitrageConfig cfg;

  MilpModel pe = build_power_energy(p, esstest::day_prices(), cfg);
  check_same(pe, esstest::read_mps_text(mps_to_string(pe)));

  MilpModel ph = build_physics(p, esstest::day_prices(), cfg);
  check_same(ph, esstest::read_mps_text(mps_to_string(ph)));
}

TEST_CASE("write_mps writes a parseable file") {
  MilpModel m;
  m.name = "FILE";
  int x = m.add_var("x", 0.0, 2.0, 1.0);
  m.add_row("r", RowSense::LE, 1.5, {{x, 1.0}});
  std::string path = "mps_test_tmp.mps";
  write_mps(m, path);
  MilpModel back = esstest::read_mps_file(path);
  std::remove(path.c_str());
  check_same(m, back);
}

TEST_CASE("mps names stay within eight characters in big models") {
  const CellParams& p = esstest::lgm50();
  ArbitrageConfig cfg;
  MilpModel ph = build_physics(p, esstest::day_prices(), cfg);
  for (const auto& v : ph.vars) CHECK(v.name.size() <= 8);
  for (const auto& r : ph.rows) CHECK(r.name.size() <= 8);
}
