#include <cstdio>
#include <filesystem>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "libess/calibrate.hpp"
#include "libess/errors.hpp"
#include "libess/io.hpp"
#include "libess/milp.hpp"
#include "libess/mps.hpp"
#include "libess/params.hpp"
#include "libess/solver.hpp"
#include "libess/spm.hpp"

namespace fs = std::filesystem;
using namespace ess;

namespace {

const char* category_tag(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Config: return "config";
    case ErrorCategory::Solve: return "solve";
    case ErrorCategory::Audit: return "audit";
    case ErrorCategory::Io: return "io";
  }
  return "error";
}

struct RunOutput {
  std::string tag;  // "power_energy" or "physics"
  ModelStats stats;
  Schedule schedule;
  AuditReport audit;
  std::string solver;
  std::string status;
};

RunOutput run_model(const std::string& tag, const MilpModel& model,
                    const CellParams& params, const std::vector<double>& prices,
                    const SolveOptions& opts, const std::string& out_dir,
                    bool emit_mps) {
  if (emit_mps) write_mps(model, out_dir + "/" + tag + ".mps");

  SolveResult res = solve(model, opts);
  if (res.status != SolveStatus::Optimal && res.status != SolveStatus::Feasible) {
    throw solve_error(tag + ": solver returned " + status_name(res.status) +
                      (res.log.empty() ? "" : ("\n" + res.log)));
  }

  RunOutput out;
  out.tag = tag;
  out.stats = model.stats();
  out.schedule = extract_schedule(model, res);
  out.solver = res.solver;
  out.status = status_name(res.status);
  out.audit = audit_schedule(params, out.schedule, prices);

  write_schedule_csv(out.schedule, out_dir + "/" + tag + "_schedule.csv");
  write_hourly_csv(out.schedule, prices, out_dir + "/" + tag + "_hourly.csv");
  write_audit_json(out.audit, out_dir + "/" + tag + "_audit.json");
  write_trace_csv(out.audit.trace, out_dir + "/" + tag + "_trace.csv");
  return out;
}

ReportEntry to_entry(const RunOutput& r, const std::string& label) {
  ReportEntry e;
  e.model = label;
  e.solver = r.solver;
  e.status = r.status;
  e.objective = r.schedule.objective;
  e.solve_seconds = r.schedule.solve_seconds;
  e.rows = r.stats.rows;
  e.continuous = r.stats.continuous;
  e.binary = r.stats.binary;
  e.violation_pct = r.audit.violation_pct;
  e.achieved_profit = r.audit.achieved_profit;
  e.achieved_discharge_mwh = r.audit.achieved_discharge_mwh;
  return e;
}

int run(int argc, char** argv) {
  CLI::App app{"Battery energy arbitrage scheduling and audit"};

  std::string model_kind = "both";
  std::string prices_path = std::string(ESS_DATA_DIR) + "/prices_alberta_24h.csv";
  std::string params_path = std::string(ESS_DATA_DIR) + "/lgm50.json";
  std::string out_dir = "./out";
  std::string solver_backend = "auto";
  int subintervals = 5;
  double eta = -1.0;
  int ocp_segs = 1;
  int square_segs = 7;
  double power_band = 0.01;
  double gap = 1e-3;
  double time_limit = 120.0;
  bool emit_mps = false;
  bool verbose = false;

  app.add_option("--model", model_kind, "power-energy, physics or both")
      ->check(CLI::IsMember({"power-energy", "physics", "both"}))
      ->capture_default_str();
  app.add_option("--prices", prices_path, "hourly price CSV (hour,price)")
      ->capture_default_str();
  app.add_option("--params", params_path, "cell parameter JSON")
      ->capture_default_str();
  app.add_option("--subintervals", subintervals, "dispatch subintervals per hour")
      ->check(CLI::Range(1, 60))
      ->capture_default_str();
  app.add_option("--eta", eta,
                 "round-trip efficiency for the power-energy model "
                 "(default: calibrate from the cell at 1C)");
  app.add_option("--pwl-ocp-segs", ocp_segs, "open-circuit chord segments")
      ->check(CLI::Range(1, 64))
      ->capture_default_str();
  app.add_option("--pwl-square-segs", square_segs, "square-term segments")
      ->check(CLI::Range(1, 64))
      ->capture_default_str();
  app.add_option("--power-band", power_band,
                 "intra-hour power band as a fraction of rated power")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--solver", solver_backend,
                 "auto, internal, scipy or cmd:<template with {mps} {sol}>")
      ->capture_default_str();
  app.add_option("--gap", gap, "relative optimality gap")->capture_default_str();
  app.add_option("--time-limit", time_limit, "solver time limit, seconds")
      ->capture_default_str();
  app.add_flag("--emit-mps", emit_mps, "write the model in MPS format");
  app.add_flag("--verbose", verbose, "chatty solver output");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorCategory::Config);
  }

  CellParams params = load_params(params_path);
  PriceSeries prices = ingest_prices(prices_path);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw io_error("cannot create output directory " + out_dir);

  bool want_pe = model_kind != "physics";
  bool want_phys = model_kind != "power-energy";

  double eta_used = eta;
  if (want_pe && eta_used < 0) {
    EfficiencyResult cal = round_trip_efficiency(params, 1.0);
    eta_used = cal.eta;
    std::printf("calibrated round-trip efficiency at 1C: %.4f (%.1f Wh out / %.1f Wh in)\n",
                cal.eta, cal.discharge_wh, cal.charge_wh);
  }
  if (want_pe && (eta_used <= 0 || eta_used > 1))
    throw config_error("--eta must lie in (0, 1]");

  ArbitrageConfig cfg;
  cfg.subintervals = subintervals;
  cfg.eta_roundtrip = want_pe ? eta_used : 0.9;
  cfg.ocp_segments = ocp_segs;
  cfg.square_segments = square_segs;
  cfg.power_band_frac = power_band;

  SolveOptions opts;
  opts.backend = solver_backend;
  opts.gap = gap;
  opts.time_limit_s = time_limit;
  opts.verbose = verbose;

  // The physics model gets a heuristic schedule as a starting incumbent so
  // the solver only has to prove optimality.  Dropped if it fails the row
  // check, which would mean a builder/heuristic mismatch.
  auto with_warm_start = [&](const MilpModel& ph) {
    SolveOptions po = opts;
    WarmStart ws = physics_warm_start(params, prices.hourly, cfg);
    std::vector<double> x(ph.vars.size(), 0.0);
    for (const auto& [vname, v] : ws.values) {
      int idx = ph.var_index(vname);
      if (idx < 0) throw solve_error("warm start names unknown variable " + vname);
      x[idx] = v;
    }
    double viol = ph.max_violation(x);
    if (viol <= 1e-6) {
      po.warm_start = std::move(ws.values);
      if (verbose)
        std::printf("physics warm start: profit $%.2f (max violation %.2e)\n",
                    ws.objective, viol);
    } else {
      std::printf("physics warm start rejected: max violation %.2e\n", viol);
    }
    return po;
  };

  std::vector<ReportEntry> entries;
  if (want_pe && want_phys) {
    MilpModel pe = build_power_energy(params, prices.hourly, cfg);
    MilpModel ph = build_physics(params, prices.hourly, cfg);
    SolveOptions popts = with_warm_start(ph);
    auto pe_task = std::async(std::launch::async, run_model, "power_energy",
                              std::cref(pe), std::cref(params), std::cref(prices.hourly),
                              std::cref(opts), std::cref(out_dir), emit_mps);
    RunOutput phys = run_model("physics", ph, params, prices.hourly, popts, out_dir,
                               emit_mps);
    RunOutput pew = pe_task.get();
    entries.push_back(to_entry(pew, "power-energy"));
    entries.push_back(to_entry(phys, "physics"));
  } else if (want_pe) {
    MilpModel pe = build_power_energy(params, prices.hourly, cfg);
    entries.push_back(
        to_entry(run_model("power_energy", pe, params, prices.hourly, opts, out_dir,
                           emit_mps),
                 "power-energy"));
  } else {
    MilpModel ph = build_physics(params, prices.hourly, cfg);
    SolveOptions popts = with_warm_start(ph);
    entries.push_back(to_entry(
        run_model("physics", ph, params, prices.hourly, popts, out_dir, emit_mps),
        "physics"));
  }

  write_report(entries, want_pe ? eta_used : 0.0, out_dir + "/report.json",
               out_dir + "/report.txt");

  for (const auto& e : entries) {
    std::printf("%-12s  profit $%.2f  (achieved $%.2f, %.1f%% violating steps, %s in %.2fs)\n",
                e.model.c_str(), e.objective, e.achieved_profit, e.violation_pct,
                e.status.c_str(), e.solve_seconds);
  }
  std::printf("wrote %s/report.json\n", out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error[" << category_tag(e.category()) << "]: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
