#include "libess/solver.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <atomic>
#include <memory>
#include <queue>
#include <sstream>

#include "libess/mps.hpp"
#include "libess/simplex.hpp"

namespace ess {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::TimeLimit: return "time_limit";
    case SolveStatus::Error: return "error";
  }
  return "error";
}

namespace {

double elapsed_s(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Fix {
  int var;
  double val;
  std::shared_ptr<const Fix> parent;
};

struct Node {
  double bound;
  long seq;
  std::shared_ptr<const Fix> fixes;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;  // max-heap on bound
    return a.seq > b.seq;                              // then FIFO
  }
};

void apply_fixes(const std::shared_ptr<const Fix>& fixes, std::vector<double>& lb,
                 std::vector<double>& ub) {
  for (const Fix* f = fixes.get(); f; f = f->parent.get()) {
    lb[f->var] = f->val;
    ub[f->var] = f->val;
  }
}

}  // namespace

SolveResult solve_internal(const MilpModel& model, const SolveOptions& opts) {
  auto start = Clock::now();
  model.validate();

  SolveResult out;
  out.solver = "internal";

  std::vector<int> binaries;
  for (size_t j = 0; j < model.vars.size(); ++j)
    if (model.vars[j].kind == VarKind::Binary) binaries.push_back(static_cast<int>(j));

  std::vector<double> lb0(model.vars.size()), ub0(model.vars.size());
  for (size_t j = 0; j < model.vars.size(); ++j) {
    lb0[j] = model.vars[j].lb;
    ub0[j] = model.vars[j].ub;
  }

  double sense = model.maximize ? 1.0 : -1.0;
  auto better = [sense](double a, double b) { return sense * (a - b) > 0; };

  auto lp_at = [&](const std::shared_ptr<const Fix>& fixes) {
    std::vector<double> lb = lb0, ub = ub0;
    apply_fixes(fixes, lb, ub);
    return solve_lp(model, lb, ub);
  };

  auto fractional = [&](const std::vector<double>& x) {
    int var = -1;
    double best = 1e-6;
    for (int j : binaries) {
      double f = x[j] - std::floor(x[j]);
      double dist = std::min(f, 1.0 - f);
      if (dist > best) {
        best = dist;
        var = j;
      }
    }
    return var;
  };

  bool have_inc = false;
  double inc_obj = 0.0;
  std::vector<double> inc_x;
  long nodes = 0;

  LpResult root = solve_lp(model, lb0, ub0);
  if (root.status == LpStatus::Infeasible) {
    out.status = SolveStatus::Infeasible;
    out.seconds = elapsed_s(start);
    return out;
  }
  if (root.status == LpStatus::Unbounded) {
    out.status = SolveStatus::Unbounded;
    out.seconds = elapsed_s(start);
    return out;
  }
  if (root.status != LpStatus::Optimal)
    throw solve_error("built-in simplex failed on the root relaxation");

  // Cheap incumbent: round the root binaries and re-solve.
  if (!binaries.empty() && fractional(root.x) >= 0) {
    std::shared_ptr<const Fix> fixes;
    for (int j : binaries)
      fixes = std::make_shared<Fix>(Fix{j, std::round(root.x[j]), fixes});
    LpResult h = lp_at(fixes);
    if (h.status == LpStatus::Optimal && model.max_violation(h.x) < 1e-6) {
      have_inc = true;
      inc_obj = h.objective;
      inc_x = h.x;
    }
  }

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long seq = 0;
  open.push({sense * root.objective, seq++, nullptr});

  while (!open.empty()) {
    if (elapsed_s(start) > opts.time_limit_s) {
      out.status = have_inc ? SolveStatus::Feasible : SolveStatus::TimeLimit;
      if (have_inc) {
        out.objective = inc_obj;
        out.values = inc_x;
      }
      out.seconds = elapsed_s(start);
      out.nodes = nodes;
      return out;
    }

    Node node = open.top();
    open.pop();
    double node_bound = sense * node.bound;  // stored signed for the heap

    if (have_inc) {
      double slack = std::abs(inc_obj) * opts.gap + 1e-9;
      if (!better(node_bound, inc_obj + sense * slack)) continue;
    }

    LpResult rel = node.fixes ? lp_at(node.fixes) : root;
    ++nodes;
    if (rel.status == LpStatus::Infeasible) continue;
    if (rel.status != LpStatus::Optimal)
      throw solve_error("built-in simplex failed at a branch-and-bound node");
    if (have_inc) {
      double slack = std::abs(inc_obj) * opts.gap + 1e-9;
      if (!better(rel.objective, inc_obj + sense * slack)) continue;
    }

    int branch = fractional(rel.x);
    if (branch < 0) {
      if (!have_inc || better(rel.objective, inc_obj)) {
        have_inc = true;
        inc_obj = rel.objective;
        inc_x = rel.x;
      }
      continue;
    }
    for (double v : {std::round(rel.x[branch]), 1.0 - std::round(rel.x[branch])}) {
      auto fixes = std::make_shared<Fix>(Fix{branch, v, node.fixes});
      open.push({sense * rel.objective, seq++, fixes});
    }
  }

  out.seconds = elapsed_s(start);
  out.nodes = nodes;
  if (!have_inc) {
    out.status = SolveStatus::Infeasible;
    return out;
  }
  out.status = SolveStatus::Optimal;
  out.objective = inc_obj;
  out.values = inc_x;

  // Snap binaries onto their integers; the LP already has them within
  // tolerance of the bounds.
  for (int j : binaries) out.values[j] = std::round(out.values[j]);
  out.objective = model.objective_value(out.values);
  return out;
}

namespace {

std::string driver_path() {
  if (const char* env = std::getenv("ESS_SOLVER_DRIVER")) return env;
#ifdef ESS_DRIVER_DEFAULT
  return ESS_DRIVER_DEFAULT;
#else
  return "tools/highs_solve.py";
#endif
}

std::string python_exe() {
  if (const char* env = std::getenv("ESS_PYTHON")) return env;
  return "python3";
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  out += "'";
  return out;
}

}  // namespace

std::vector<double> read_solution_values(const MilpModel& model, const std::string& path,
                                         std::string* status_out, double* objective_out) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open solution file " + path);
  std::vector<double> values(model.vars.size(), 0.0);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    if (line[0] == '=') {
      std::string key;
      ss >> key;
      if (key == "=status" && status_out) ss >> *status_out;
      if (key == "=objective" && objective_out) ss >> *objective_out;
      continue;
    }
    std::string name;
    double v;
    if (!(ss >> name >> v))
      throw solve_error(path + ":" + std::to_string(lineno) + ": malformed solution line");
    int idx = model.var_index(name);
    if (idx < 0)
      throw solve_error(path + ":" + std::to_string(lineno) +
                        ": solution references unknown variable '" + name + "'");
    values[idx] = v;
  }
  return values;
}

void write_solution(const MilpModel& model, const SolveResult& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write solution file " + path);
  out << "=status " << status_name(r.status) << "\n";
  out << "=objective " << format_exact(r.objective) << "\n";
  for (size_t j = 0; j < model.vars.size(); ++j)
    out << model.vars[j].name << ' ' << format_exact(r.values.empty() ? 0.0 : r.values[j])
        << '\n';
}

SolveResult solve_subprocess(const MilpModel& model, const SolveOptions& opts,
                             const std::string& command_template) {
  auto start = Clock::now();
  model.validate();

  SolveResult out;
  out.solver = command_template.empty() ? "scipy-highs" : "cmd";

  static std::atomic<int> counter{0};
  fs::path dir = fs::temp_directory_path() /
                 ("ess-" + std::to_string(getpid()) + "-" + std::to_string(counter++));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io_error("cannot create scratch directory " + dir.string());
  fs::path mps = dir / (model.name + ".mps");
  fs::path sol = dir / (model.name + ".sol");

  write_mps(model, mps.string());

  fs::path start_file;
  if (!opts.warm_start.empty()) {
    for (const auto& [vname, v] : opts.warm_start)
      if (model.var_index(vname) < 0)
        throw config_error("warm start references unknown variable '" + vname + "'");
    start_file = dir / (model.name + ".start");
    std::ofstream sf(start_file);
    if (!sf) throw io_error("cannot write start file " + start_file.string());
    for (const auto& [vname, v] : opts.warm_start)
      sf << vname << ' ' << format_exact(v) << '\n';
  }

  std::string cmd;
  if (command_template.empty()) {
    cmd = python_exe() + " " + shell_quote(driver_path()) + " " + shell_quote(mps.string()) +
          " " + shell_quote(sol.string()) + " --gap " + format_exact(opts.gap) +
          " --time-limit " + format_exact(opts.time_limit_s);
    if (!start_file.empty()) cmd += " --mip-start " + shell_quote(start_file.string());
  } else {
    cmd = command_template;
    replace_all(cmd, "{mps}", shell_quote(mps.string()));
    replace_all(cmd, "{sol}", shell_quote(sol.string()));
    replace_all(cmd, "{gap}", format_exact(opts.gap));
    replace_all(cmd, "{timelimit}", format_exact(opts.time_limit_s));
    if (cmd == command_template)
      throw config_error("solver command template must use {mps} and {sol} placeholders");
  }
  cmd += " 2>&1";

  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw solve_error("cannot start solver subprocess: " + cmd);
  char buf[4096];
  while (size_t got = fread(buf, 1, sizeof buf, pipe)) out.log.append(buf, got);
  int rc = pclose(pipe);

  auto cleanup = [&dir, &opts]() {
    if (!opts.keep_files) {
      std::error_code e2;
      fs::remove_all(dir, e2);
    }
  };

  if (rc != 0) {
    std::string tail = out.log.size() > 2000 ? out.log.substr(out.log.size() - 2000) : out.log;
    if (opts.keep_files)
      tail += "\n(scratch kept in " + dir.string() + ")";
    else
      cleanup();
    throw solve_error("solver subprocess failed (exit " + std::to_string(rc) + "): " + tail);
  }

  std::string status;
  double reported_obj = 0.0;
  out.values = read_solution_values(model, sol.string(), &status, &reported_obj);
  cleanup();

  if (status == "optimal")
    out.status = SolveStatus::Optimal;
  else if (status == "feasible" || status == "time_limit_feasible")
    out.status = SolveStatus::Feasible;
  else if (status == "infeasible")
    out.status = SolveStatus::Infeasible;
  else if (status == "unbounded")
    out.status = SolveStatus::Unbounded;
  else if (status == "time_limit")
    out.status = SolveStatus::TimeLimit;
  else
    out.status = SolveStatus::Error;

  if (out.status == SolveStatus::Optimal || out.status == SolveStatus::Feasible) {
    out.objective = model.objective_value(out.values);
    // The driver's own objective should agree with our recomputation.
    if (std::abs(out.objective - reported_obj) >
        1e-5 * std::max(1.0, std::abs(out.objective)))
      out.log += "\nwarning: driver objective " + std::to_string(reported_obj) +
                 " differs from recomputed " + std::to_string(out.objective);
  }
  out.seconds = elapsed_s(start);
  return out;
}

SolveResult solve(const MilpModel& model, const SolveOptions& opts) {
  const std::string& b = opts.backend;
  if (b == "internal") return solve_internal(model, opts);
  if (b == "scipy") return solve_subprocess(model, opts);
  if (b.rfind("cmd:", 0) == 0) return solve_subprocess(model, opts, b.substr(4));
  if (b == "auto" || b.empty()) {
    ModelStats st = model.stats();
    if (st.binary <= 64 && st.rows <= 2000) return solve_internal(model, opts);
    return solve_subprocess(model, opts);
  }
  throw config_error("unknown solver backend '" + b +
                     "' (expected auto, internal, scipy or cmd:<template>)");
}

}  // namespace ess
