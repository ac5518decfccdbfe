#include "ccucp/simplex.hpp"

#include "ccucp/errors.hpp"

namespace ccucp {

namespace {

constexpr int kMaxIterations = 100000;
constexpr int kDegenerateBeforeBland = 50;

enum class Status { basic, at_lower, at_upper };

class Simplex {
 public:
  explicit Simplex(const LpProblem& lp) : n_(lp.num_vars), m_(static_cast<int>(lp.rows.size())) {
    const int ncols = n_ + m_;
    tableau_.assign(m_, std::vector<Rational>(ncols, Rational(0)));
    lb_.assign(ncols, Rational(0));
    ub_.assign(ncols, Rational(0));
    has_ub_.assign(ncols, true);
    status_.assign(ncols, Status::at_lower);
    val_.assign(ncols, Rational(0));
    is_artificial_.assign(ncols, false);

    for (int j = 0; j < n_; ++j) {
      lb_[j] = lp.lower[j];
      ub_[j] = lp.upper[j];
      if (ub_[j] < lb_[j]) throw ValidationError("lp variable with upper bound below lower bound");
      val_[j] = lb_[j];
    }
    for (int i = 0; i < m_; ++i) {
      has_ub_[n_ + i] = false;  // slack in [0, inf)
      for (const auto& [j, a] : lp.rows[i].terms) tableau_[i][j] += a;
      tableau_[i][n_ + i] = Rational(1);
    }

    basis_.assign(m_, -1);
    bval_.assign(m_, Rational(0));
    for (int i = 0; i < m_; ++i) {
      Rational residual = lp.rows[i].rhs;
      for (int j = 0; j < n_; ++j)
        if (tableau_[i][j].num != 0) residual -= tableau_[i][j] * val_[j];
      if (residual >= Rational(0)) {
        basis_[i] = n_ + i;
        status_[n_ + i] = Status::basic;
        bval_[i] = residual;
      } else {
        // Flip the row so an artificial variable can start basic at +|residual|.
        for (auto& a : tableau_[i]) a = -a;
        for (auto& row : tableau_) row.push_back(Rational(0));
        const int art = static_cast<int>(tableau_[0].size()) - 1;
        tableau_[i][art] = Rational(1);
        lb_.push_back(Rational(0));
        ub_.push_back(Rational(0));
        has_ub_.push_back(false);
        status_.push_back(Status::basic);
        val_.push_back(Rational(0));
        is_artificial_.push_back(true);
        basis_[i] = art;
        bval_[i] = -residual;
      }
    }
  }

  LpResult run(const LpProblem& lp) {
    // Phase 1: drive the artificial variables to zero.
    bool any_artificial = false;
    for (bool a : is_artificial_) any_artificial = any_artificial || a;
    if (any_artificial) {
      std::vector<Rational> phase1(cols(), Rational(0));
      for (int j = 0; j < cols(); ++j)
        if (is_artificial_[j]) phase1[j] = Rational(1);
      iterate(phase1);
      Rational infeasibility(0);
      for (int i = 0; i < m_; ++i)
        if (is_artificial_[basis_[i]]) infeasibility += bval_[i];
      if (infeasibility > Rational(0)) return LpResult{false, Rational(0), {}};
      evict_artificials();
    }

    // Phase 2: original objective; artificials are pinned at zero.
    std::vector<Rational> cost(cols(), Rational(0));
    for (int j = 0; j < n_; ++j) cost[j] = lp.cost[j];
    iterate(cost);

    LpResult result;
    result.feasible = true;
    result.x.assign(n_, Rational(0));
    for (int j = 0; j < n_; ++j) result.x[j] = current_value(j);
    result.objective = Rational(0);
    for (int j = 0; j < n_; ++j)
      if (lp.cost[j].num != 0) result.objective += lp.cost[j] * result.x[j];
    return result;
  }

 private:
  int cols() const { return static_cast<int>(lb_.size()); }

  Rational current_value(int j) const {
    if (status_[j] != Status::basic) return val_[j];
    for (int i = 0; i < m_; ++i)
      if (basis_[i] == j) return bval_[i];
    throw LimitError("lp internal error: basic variable without a row");
  }

  bool fixed(int j) const { return has_ub_[j] && ub_[j] == lb_[j]; }

  // Reduced cost of column j under cost vector c.
  Rational reduced_cost(const std::vector<Rational>& c, int j) const {
    Rational d = c[j];
    for (int i = 0; i < m_; ++i)
      if (c[basis_[i]].num != 0 && tableau_[i][j].num != 0) d -= c[basis_[i]] * tableau_[i][j];
    return d;
  }

  void iterate(const std::vector<Rational>& cost) {
    int degenerate_run = 0;
    for (int iter = 0; iter < kMaxIterations; ++iter) {
      const bool bland = degenerate_run >= kDegenerateBeforeBland;

      int enter = -1, dir = 0;
      Rational best(0);
      for (int j = 0; j < cols(); ++j) {
        if (status_[j] == Status::basic || fixed(j)) continue;
        if (is_artificial_[j] && status_[j] != Status::basic) continue;  // never re-enters
        const Rational d = reduced_cost(cost, j);
        int candidate_dir = 0;
        if (status_[j] == Status::at_lower && d < Rational(0)) candidate_dir = 1;
        if (status_[j] == Status::at_upper && d > Rational(0)) candidate_dir = -1;
        if (candidate_dir == 0) continue;
        if (bland) {
          enter = j;
          dir = candidate_dir;
          break;
        }
        const Rational mag = candidate_dir > 0 ? -d : d;
        if (enter == -1 || best < mag) {
          enter = j;
          dir = candidate_dir;
          best = mag;
        }
      }
      if (enter == -1) return;  // optimal for this phase

      // Ratio test: how far can the entering variable move?
      bool limited = false;
      Rational theta(0);
      int leave_row = -1;       // -1 with limited=true means a bound-to-bound flip
      bool leave_to_upper = false;
      if (has_ub_[enter]) {
        theta = ub_[enter] - lb_[enter];
        limited = true;
      }
      for (int i = 0; i < m_; ++i) {
        const Rational& a = tableau_[i][enter];
        if (a.num == 0) continue;
        // x_basis(i) moves at rate -dir * a as the entering variable advances.
        const Rational rate = dir > 0 ? -a : a;
        Rational step;
        bool to_upper;
        if (rate < Rational(0)) {
          step = (bval_[i] - lb_[basis_[i]]) / -rate;
          to_upper = false;
        } else {
          if (!has_ub_[basis_[i]]) continue;
          step = (ub_[basis_[i]] - bval_[i]) / rate;
          to_upper = true;
        }
        if (!limited || step < theta ||
            (step == theta && leave_row >= 0 && basis_[i] < basis_[leave_row])) {
          limited = true;
          theta = step;
          leave_row = i;
          leave_to_upper = to_upper;
        }
      }
      if (!limited) throw LimitError("lp is unbounded; all variables should be box-bounded");

      if (theta == Rational(0)) {
        ++degenerate_run;
      } else {
        degenerate_run = 0;
      }

      // Advance the entering variable by theta and update basic values.
      const Rational move = dir > 0 ? theta : -theta;
      for (int i = 0; i < m_; ++i)
        if (tableau_[i][enter].num != 0) bval_[i] -= move * tableau_[i][enter];

      if (leave_row < 0) {
        // Bound flip, no basis change.
        status_[enter] = status_[enter] == Status::at_lower ? Status::at_upper : Status::at_lower;
        val_[enter] = status_[enter] == Status::at_lower ? lb_[enter] : ub_[enter];
        continue;
      }

      const int leave = basis_[leave_row];
      const Rational enter_value = val_[enter] + move;
      status_[leave] = leave_to_upper ? Status::at_upper : Status::at_lower;
      val_[leave] = leave_to_upper ? ub_[leave] : lb_[leave];
      pivot(leave_row, enter);
      bval_[leave_row] = enter_value;
      status_[enter] = Status::basic;
    }
    throw LimitError("lp iteration limit exceeded");
  }

  // Row-reduces so column `col` becomes the identity column of `row`. This is
  // pure equation manipulation: bval_ holds variable VALUES (updated by the
  // motion step, not here), so it must stay untouched for other rows.
  void pivot(int row, int col) {
    const Rational piv = tableau_[row][col];
    if (piv.num == 0) throw LimitError("lp internal error: zero pivot");
    for (auto& a : tableau_[row]) {
      if (a.num != 0) a /= piv;
    }
    tableau_[row][col] = Rational(1);
    for (int i = 0; i < m_; ++i) {
      if (i == row) continue;
      const Rational factor = tableau_[i][col];
      if (factor.num == 0) continue;
      for (int j = 0; j < cols(); ++j)
        if (tableau_[row][j].num != 0) tableau_[i][j] -= factor * tableau_[row][j];
      tableau_[i][col] = Rational(0);
    }
    basis_[row] = col;
  }

  // After phase 1, pivot zero-valued basic artificials out where possible; rows
  // where no real column has a nonzero coefficient are redundant and keep their
  // artificial pinned at zero.
  void evict_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (!is_artificial_[basis_[i]]) continue;
      int col = -1;
      for (int j = 0; j < cols() && col == -1; ++j)
        if (!is_artificial_[j] && status_[j] != Status::basic && tableau_[i][j].num != 0) col = j;
      if (col == -1) continue;
      const int art = basis_[i];
      const Rational entering_value = val_[col];
      pivot(i, col);
      bval_[i] = entering_value;  // degenerate: artificial sat at zero
      status_[col] = Status::basic;
      status_[art] = Status::at_lower;
      val_[art] = Rational(0);
    }
  }

  int n_, m_;
  std::vector<std::vector<Rational>> tableau_;
  std::vector<Rational> lb_, ub_, val_, bval_;
  std::vector<bool> has_ub_, is_artificial_;
  std::vector<Status> status_;
  std::vector<int> basis_;
};

}  // namespace

LpResult solve_lp(const LpProblem& lp) {
  if (static_cast<int>(lp.lower.size()) != lp.num_vars ||
      static_cast<int>(lp.upper.size()) != lp.num_vars ||
      static_cast<int>(lp.cost.size()) != lp.num_vars)
    throw ValidationError("lp bound/cost vectors must match num_vars");
  Simplex simplex(lp);
  return simplex.run(lp);
}

}  // namespace ccucp
