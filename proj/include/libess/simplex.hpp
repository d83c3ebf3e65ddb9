#pragma once

#include <vector>

#include "libess/milp.hpp"

namespace ess {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit, Numerical };

struct LpResult {
  LpStatus status = LpStatus::Numerical;
  double objective = 0;
  std::vector<double> x;  // structural variables only
  int iterations = 0;
};

// Dense bounded-variable primal simplex over the model rows, with the given
// structural bounds replacing the model's own (branch and bound overrides
// them per node).  All variables must be boxed; the LP can therefore never
// be unbounded.  Intended for models up to a few hundred rows.
LpResult solve_lp(const MilpModel& model, const std::vector<double>& lb,
                  const std::vector<double>& ub, int iteration_limit = 0);

}  // namespace ess
