#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "libess/errors.hpp"
#include "libess/milp.hpp"
#include "libess/solver.hpp"

#include "support/fixtures.hpp"
#include "support/toy_oracle.hpp"

using namespace ess;
using esstest::ToySpec;

namespace {

MilpModel toy_model(const ToySpec& spec) {
  return build_power_energy(esstest::cell_for_toy(spec),
                            spec.prices, esstest::config_for_toy(spec));
}

SolveOptions internal_opts() {
  SolveOptions o;
  o.backend = "internal";
  o.gap = 1e-9;
  return o;
}

}  // namespace

TEST_CASE("internal branch and bound solves a knapsack exactly") {
  MilpModel m;
  m.name = "KNAP";
  m.maximize = true;
  double value[] = {6, 5, 4, 3, 2};
  double weight[] = {5, 4, 3, 2, 1};
  std::vector<std::pair<int, double>> terms;
  for (int k = 0; k < 5; ++k) {
    int b = m.add_binary("b" + std::to_string(k), value[k]);
    terms.push_back({b, weight[k]});
  }
  m.add_row("cap", RowSense::LE, 7.0, terms);

  SolveResult r = solve_internal(m, internal_opts());
  REQUIRE(r.status == SolveStatus::Optimal);
  // best packing: items of weight 4+2+1 = 7 worth 5+3+2 = 10
  CHECK(r.objective == doctest::Approx(10.0));
  for (double v : r.values) CHECK(std::abs(v - std::round(v)) < 1e-9);
}

TEST_CASE("internal solver detects infeasibility") {
  MilpModel m;
  m.name = "INF";
  int x = m.add_var("x", 0.0, 1.0, 1.0);
  m.add_row("lo", RowSense::GE, 2.0, {{x, 1.0}});
  SolveResult r = solve_internal(m, internal_opts());
  CHECK(r.status == SolveStatus::Infeasible);
}

TEST_CASE("internal solver matches brute force on random arbitrage days") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> price(10.0, 200.0);
  for (int trial = 0; trial < 12; ++trial) {
    ToySpec spec;
    spec.q_mwh = 3;
    spec.soe0_mwh = (trial % 2) ? 3.0 : 1.0;
    spec.floor_mwh = trial % 3 == 0 ? 1.0 : 0.0;
    spec.deg_per_mwh = (trial % 4) * 5.0;
    spec.prices.clear();
    for (int t = 0; t < 8; ++t) spec.prices.push_back(price(rng));

    auto oracle = esstest::brute_force_arbitrage(spec);
    REQUIRE(oracle.feasible);

    SolveResult r = solve_internal(toy_model(spec), internal_opts());
    REQUIRE(r.status == SolveStatus::Optimal);
    INFO("trial ", trial);
    CHECK(r.objective == doctest::Approx(oracle.objective).epsilon(1e-9));
  }
}

TEST_CASE("solution files round-trip through write and read") {
  ToySpec spec;
  spec.prices = {50, 120, 40, 160};
  MilpModel m = toy_model(spec);
  SolveResult r = solve_internal(m, internal_opts());
  REQUIRE(r.status == SolveStatus::Optimal);

  std::string path = "solver_test_tmp.sol";
  write_solution(m, r, path);
  std::string status;
  double obj = 0;
  std::vector<double> vals = read_solution_values(m, path, &status, &obj);
  std::remove(path.c_str());

  CHECK(status == std::string(status_name(r.status)));
  CHECK(obj == r.objective);
  REQUIRE(vals.size() == r.values.size());
  for (size_t i = 0; i < vals.size(); ++i) CHECK(vals[i] == r.values[i]);
}

TEST_CASE("read_solution_values rejects unknown variables") {
  ToySpec spec;
  spec.prices = {50, 120};
  MilpModel m = toy_model(spec);
  std::string path = "solver_bad_tmp.sol";
  {
    std::ofstream out(path);
    out << "nosuch 1.0\n";
  }
  CHECK_THROWS_AS(read_solution_values(m, path), Error);
  std::remove(path.c_str());
}

TEST_CASE("subprocess solver agrees with the internal one") {
  ToySpec spec;
  spec.q_mwh = 2;
  spec.soe0_mwh = 2;
  spec.deg_per_mwh = 3.0;
  spec.prices = {60, 150, 45, 170, 30, 140};

  MilpModel m = toy_model(spec);
  SolveResult inproc = solve_internal(m, internal_opts());
  REQUIRE(inproc.status == SolveStatus::Optimal);

  SolveOptions sub;
  sub.backend = "scipy";
  sub.gap = 1e-9;
  SolveResult ext = solve_subprocess(m, sub);
  INFO(ext.log);
  REQUIRE(ext.status == SolveStatus::Optimal);
  CHECK(ext.objective == doctest::Approx(inproc.objective).epsilon(1e-7));
  CHECK(m.max_violation(ext.values) < 1e-6);
}

TEST_CASE("warm start is validated and accepted by the subprocess driver") {
  ToySpec spec;
  spec.q_mwh = 2;
  spec.soe0_mwh = 2;
  spec.prices = {60, 150, 45, 170};

  MilpModel m = toy_model(spec);
  SolveResult best = solve_internal(m, internal_opts());
  REQUIRE(best.status == SolveStatus::Optimal);

  SolveOptions sub;
  sub.backend = "scipy";
  sub.gap = 1e-9;
  for (size_t j = 0; j < m.vars.size(); ++j)
    sub.warm_start[m.vars[j].name] = best.values[j];
  SolveResult ext = solve_subprocess(m, sub);
  INFO(ext.log);
  REQUIRE(ext.status == SolveStatus::Optimal);
  CHECK(ext.objective == doctest::Approx(best.objective).epsilon(1e-7));

  // unknown names are rejected before the subprocess launches
  sub.warm_start["bogus"] = 1.0;
  CHECK_THROWS_AS(solve_subprocess(m, sub), Error);
}

TEST_CASE("auto backend keeps small models in process") {
  ToySpec spec;
  spec.prices = {50, 120, 40};
  SolveOptions o;
  o.backend = "auto";
  o.gap = 1e-9;
  SolveResult r = solve(toy_model(spec), o);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.solver == "internal");
}

TEST_CASE("unknown backend is a configuration error") {
  ToySpec spec;
  spec.prices = {50, 120};
  SolveOptions o;
  o.backend = "warp-drive";
  CHECK_THROWS_AS(solve(toy_model(spec), o), Error);
}
