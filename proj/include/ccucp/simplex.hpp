#pragma once

#include <utility>
#include <vector>

#include "ccucp/rational.hpp"

namespace ccucp {

// Small LP in exact rational arithmetic:
//   minimize  cost . x
//   s.t.      sum_j terms_ij x_j <= rhs_i      for every row
//             lower_j <= x_j <= upper_j        (finite box)
// All variables are box-bounded, so a feasible LP always has a vertex optimum.
struct LpProblem {
  int num_vars = 0;
  std::vector<Rational> lower, upper, cost;
  struct Row {
    std::vector<std::pair<int, Rational>> terms;
    Rational rhs;
  };
  std::vector<Row> rows;
};

struct LpResult {
  bool feasible = false;
  Rational objective;
  std::vector<Rational> x;
};

// Two-phase bounded-variable primal simplex. Dantzig pricing with a switch to
// Bland's rule after a run of degenerate steps, so cycling cannot occur; with
// exact arithmetic the result is the true optimum, deterministically.
LpResult solve_lp(const LpProblem& lp);

}  // namespace ccucp
