#include "libess/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ess {

namespace {

constexpr double kFeasTol = 1e-7;
constexpr double kOptTol = 1e-9;
constexpr double kPivotTol = 1e-8;

enum class VarState : uint8_t { AtLb, AtUb, Basic };

// Equations are kept as x_B + T x_N = 0 with a slack appended to every row,
// so the starting basis is the identity and a pivot is plain Gauss-Jordan.
struct Tableau {
  int nv = 0, nr = 0, n = 0;
  std::vector<double> t;  // nr x n, row major
  std::vector<double> lb, ub, cost, x;
  std::vector<int> basic;        // row -> variable
  std::vector<VarState> state;   // variable -> state

  double& at(int r, int j) { return t[static_cast<size_t>(r) * n + j]; }
  double at(int r, int j) const { return t[static_cast<size_t>(r) * n + j]; }
};

// Recomputes basic values from the original constraint data by solving the
// basis system with partially pivoted elimination.  Returns false when the
// basis matrix is numerically singular.
bool refresh_basics(const MilpModel& model, Tableau& tb) {
  int nr = tb.nr;
  std::vector<double> b(nr, 0.0);
  // Right-hand side: minus the nonbasic part of each row activity.
  for (int r = 0; r < nr; ++r) {
    double acc = 0.0;
    for (const auto& [idx, coef] : model.rows[r].terms)
      if (tb.state[idx] != VarState::Basic) acc += coef * tb.x[idx];
    int sj = tb.nv + r;
    if (tb.state[sj] != VarState::Basic) acc += tb.x[sj];
    b[r] = -acc;
  }
  // Basis matrix columns in original coordinates.
  std::vector<double> m(static_cast<size_t>(nr) * nr, 0.0);
  for (int k = 0; k < nr; ++k) {
    int j = tb.basic[k];
    if (j >= tb.nv) {
      m[static_cast<size_t>(j - tb.nv) * nr + k] = 1.0;
    } else {
      for (int r = 0; r < nr; ++r) m[static_cast<size_t>(r) * nr + k] = 0.0;
      // Fill from the sparse rows.
    }
  }
  for (int r = 0; r < nr; ++r)
    for (const auto& [idx, coef] : model.rows[r].terms)
      for (int k = 0; k < nr; ++k)
        if (tb.basic[k] == idx) m[static_cast<size_t>(r) * nr + k] = coef;

  // LU solve of m * xB = b.
  std::vector<int> perm(nr);
  for (int i = 0; i < nr; ++i) perm[i] = i;
  for (int col = 0; col < nr; ++col) {
    int piv = col;
    double best = std::abs(m[static_cast<size_t>(col) * nr + col]);
    for (int r = col + 1; r < nr; ++r) {
      double a = std::abs(m[static_cast<size_t>(r) * nr + col]);
      if (a > best) {
        best = a;
        piv = r;
      }
    }
    if (best < 1e-12) return false;
    if (piv != col) {
      for (int j = 0; j < nr; ++j)
        std::swap(m[static_cast<size_t>(piv) * nr + j], m[static_cast<size_t>(col) * nr + j]);
      std::swap(b[piv], b[col]);
    }
    double d = m[static_cast<size_t>(col) * nr + col];
    for (int r = col + 1; r < nr; ++r) {
      double f = m[static_cast<size_t>(r) * nr + col] / d;
      if (f == 0.0) continue;
      m[static_cast<size_t>(r) * nr + col] = 0.0;
      for (int j = col + 1; j < nr; ++j)
        m[static_cast<size_t>(r) * nr + j] -= f * m[static_cast<size_t>(col) * nr + j];
      b[r] -= f * b[col];
    }
  }
  for (int r = nr - 1; r >= 0; --r) {
    double acc = b[r];
    for (int j = r + 1; j < nr; ++j)
      acc -= m[static_cast<size_t>(r) * nr + j] * b[j];
    b[r] = acc / m[static_cast<size_t>(r) * nr + r];
  }
  for (int k = 0; k < nr; ++k) tb.x[tb.basic[k]] = b[k];
  return true;
}

void pivot(Tableau& tb, int row, int col) {
  double piv = tb.at(row, col);
  double* pr = &tb.t[static_cast<size_t>(row) * tb.n];
  double inv = 1.0 / piv;
  for (int j = 0; j < tb.n; ++j) pr[j] *= inv;
  pr[col] = 1.0;
  for (int r = 0; r < tb.nr; ++r) {
    if (r == row) continue;
    double f = tb.at(r, col);
    if (f == 0.0) continue;
    double* tr = &tb.t[static_cast<size_t>(r) * tb.n];
    for (int j = 0; j < tb.n; ++j) tr[j] -= f * pr[j];
    tr[col] = 0.0;
  }
}

}  // namespace

LpResult solve_lp(const MilpModel& model, const std::vector<double>& lb,
                  const std::vector<double>& ub, int iteration_limit) {
  LpResult res;
  const int nv = static_cast<int>(model.vars.size());
  const int nr = static_cast<int>(model.rows.size());
  const int n = nv + nr;
  if (iteration_limit <= 0) iteration_limit = std::max(20000, 60 * nr);

  if (static_cast<long long>(nr) * n > 40'000'000)
    throw solve_error("model too large for the built-in simplex; use a subprocess backend");

  Tableau tb;
  tb.nv = nv;
  tb.nr = nr;
  tb.n = n;
  tb.t.assign(static_cast<size_t>(nr) * n, 0.0);
  tb.lb.resize(n);
  tb.ub.resize(n);
  tb.cost.assign(n, 0.0);
  tb.x.assign(n, 0.0);
  tb.basic.resize(nr);
  tb.state.assign(n, VarState::AtLb);

  double sign = model.maximize ? 1.0 : -1.0;
  for (int j = 0; j < nv; ++j) {
    tb.lb[j] = lb[j];
    tb.ub[j] = ub[j];
    tb.cost[j] = sign * model.vars[j].obj;
    if (tb.lb[j] > tb.ub[j] + kFeasTol) {
      res.status = LpStatus::Infeasible;
      return res;
    }
    // Start at the bound closer to zero.
    if (std::abs(tb.lb[j]) <= std::abs(tb.ub[j])) {
      tb.x[j] = tb.lb[j];
      tb.state[j] = VarState::AtLb;
    } else {
      tb.x[j] = tb.ub[j];
      tb.state[j] = VarState::AtUb;
    }
  }

  for (int r = 0; r < nr; ++r) {
    const Row& row = model.rows[r];
    double act_lo = 0.0, act_hi = 0.0, act = 0.0;
    for (const auto& [idx, coef] : row.terms) {
      tb.at(r, idx) += coef;
      act += coef * tb.x[idx];
      double a = coef * tb.lb[idx], b = coef * tb.ub[idx];
      act_lo += std::min(a, b);
      act_hi += std::max(a, b);
    }
    double sense_lo = row.sense == RowSense::LE ? act_lo : row.rhs;
    double sense_hi = row.sense == RowSense::GE ? act_hi : row.rhs;
    double a_lo = std::max(act_lo, sense_lo);
    double a_hi = std::min(act_hi, sense_hi);
    if (a_lo > a_hi + kFeasTol) {
      res.status = LpStatus::Infeasible;
      return res;
    }
    int sj = nv + r;
    tb.at(r, sj) = 1.0;
    tb.lb[sj] = -a_hi;
    tb.ub[sj] = -a_lo;
    tb.basic[r] = sj;
    tb.state[sj] = VarState::Basic;
    tb.x[sj] = -act;
  }

  const double kInf = std::numeric_limits<double>::infinity();
  int iters = 0;
  int degen_run = 0;
  bool phase1 = true;

  std::vector<double> dir(nr, 0.0);    // phase-1 row gradients
  std::vector<double> price(n, 0.0);   // reduced costs / violation rates

  while (true) {
    if (++iters > iteration_limit) {
      res.status = LpStatus::IterationLimit;
      res.iterations = iters;
      return res;
    }
    if (iters % 2048 == 0) {
      if (!refresh_basics(model, tb)) {
        res.status = LpStatus::Numerical;
        return res;
      }
    }

    // Phase check: any basic variable outside its box?
    if (phase1) {
      bool any = false;
      for (int r = 0; r < nr; ++r) {
        int j = tb.basic[r];
        double scale = std::max(1.0, std::abs(tb.x[j]));
        if (tb.x[j] > tb.ub[j] + kFeasTol * scale) {
          dir[r] = 1.0;
          any = true;
        } else if (tb.x[j] < tb.lb[j] - kFeasTol * scale) {
          dir[r] = -1.0;
          any = true;
        } else {
          dir[r] = 0.0;
        }
      }
      if (!any) phase1 = false;
    }

    // Pricing.
    bool bland = degen_run > 400;
    int enter = -1;
    double best = 0.0;
    double enter_dir = 0.0;
    for (int j = 0; j < n; ++j) {
      if (tb.state[j] == VarState::Basic) continue;
      if (tb.ub[j] - tb.lb[j] <= 0.0) continue;  // fixed
      double score;
      if (phase1) {
        double w = 0.0;
        for (int r = 0; r < nr; ++r)
          if (dir[r] != 0.0) w += dir[r] * tb.at(r, j);
        score = w;
      } else {
        double cb = tb.cost[j];
        for (int r = 0; r < nr; ++r) {
          double c = tb.cost[tb.basic[r]];
          if (c != 0.0) cb -= c * tb.at(r, j);
        }
        score = cb;
      }
      price[j] = score;
      bool improving = tb.state[j] == VarState::AtLb ? score > kOptTol : score < -kOptTol;
      if (!improving) continue;
      if (bland) {
        enter = j;
        enter_dir = tb.state[j] == VarState::AtLb ? 1.0 : -1.0;
        break;
      }
      if (std::abs(score) > best) {
        best = std::abs(score);
        enter = j;
        enter_dir = tb.state[j] == VarState::AtLb ? 1.0 : -1.0;
      }
    }

    if (enter < 0) {
      if (phase1) {
        // No way to reduce the violations.
        res.status = LpStatus::Infeasible;
        res.iterations = iters;
        return res;
      }
      break;  // optimal
    }

    // Ratio test.
    double theta = tb.ub[enter] - tb.lb[enter];
    int leave_row = -1;
    double leave_bound = 0.0;
    for (int r = 0; r < nr; ++r) {
      double rate = -enter_dir * tb.at(r, enter);  // change of basic r per step
      if (std::abs(rate) < kPivotTol) continue;
      int bj = tb.basic[r];
      double cand = kInf;
      double bound = 0.0;
      if (rate > 0.0) {
        if (dir[r] == 1.0 && phase1) continue;  // already above, tracked by pricing
        bound = phase1 && dir[r] == -1.0 ? tb.lb[bj] : tb.ub[bj];
        cand = (bound - tb.x[bj]) / rate;
      } else {
        if (dir[r] == -1.0 && phase1) continue;
        bound = phase1 && dir[r] == 1.0 ? tb.ub[bj] : tb.lb[bj];
        cand = (bound - tb.x[bj]) / rate;
      }
      if (cand < -1e-12) cand = 0.0;
      if (cand < theta - 1e-12 || (cand < theta + 1e-12 && leave_row >= 0 &&
                                   tb.basic[r] < tb.basic[leave_row])) {
        theta = cand;
        leave_row = r;
        leave_bound = bound;
      }
    }
    if (theta >= kInf) {
      res.status = LpStatus::Unbounded;  // unreachable with boxed variables
      res.iterations = iters;
      return res;
    }

    degen_run = theta < 1e-11 ? degen_run + 1 : 0;

    // Apply the step.
    if (theta != 0.0) {
      tb.x[enter] += enter_dir * theta;
      for (int r = 0; r < nr; ++r) {
        double rate = -enter_dir * tb.at(r, enter);
        if (rate != 0.0) tb.x[tb.basic[r]] += rate * theta;
      }
    }

    if (leave_row < 0) {
      // Bound flip.
      tb.state[enter] = tb.state[enter] == VarState::AtLb ? VarState::AtUb : VarState::AtLb;
      tb.x[enter] = tb.state[enter] == VarState::AtLb ? tb.lb[enter] : tb.ub[enter];
      continue;
    }

    int out = tb.basic[leave_row];
    tb.x[out] = leave_bound;  // snap exactly
    tb.state[out] = leave_bound == tb.lb[out] ? VarState::AtLb : VarState::AtUb;
    tb.basic[leave_row] = enter;
    tb.state[enter] = VarState::Basic;
    pivot(tb, leave_row, enter);
  }

  if (!refresh_basics(model, tb)) {
    res.status = LpStatus::Numerical;
    return res;
  }
  res.status = LpStatus::Optimal;
  res.iterations = iters;
  res.x.assign(tb.x.begin(), tb.x.begin() + nv);
  res.objective = model.objective_value(res.x);
  return res;
}

}  // namespace ess
