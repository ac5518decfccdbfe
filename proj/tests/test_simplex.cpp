#include <doctest.h>

#include <optional>
#include <vector>

#include "ccucp/rational.hpp"
#include "ccucp/rng.hpp"
#include "ccucp/simplex.hpp"

using namespace ccucp;

namespace {

// Exact Gaussian elimination for a square rational system; empty on a
// singular matrix.
std::optional<std::vector<Rational>> solve_square(std::vector<std::vector<Rational>> a,
                                                  std::vector<Rational> b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r) {
      if (a[r][col] != Rational(0)) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) return std::nullopt;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (int r = 0; r < n; ++r) {
      if (r == col || a[r][col] == Rational(0)) continue;
      const Rational f = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<Rational> x(n);
  for (int i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

bool satisfies(const LpProblem& lp, const std::vector<Rational>& x) {
  for (int j = 0; j < lp.num_vars; ++j)
    if (x[j] < lp.lower[j] || x[j] > lp.upper[j]) return false;
  for (const auto& row : lp.rows) {
    Rational lhs(0);
    for (const auto& [j, c] : row.terms) lhs += c * x[j];
    if (lhs > row.rhs) return false;
  }
  return true;
}

// Independent optimum finder: a box-bounded feasible region is a polytope, so
// some optimum sits on a vertex, and every vertex is the intersection of
// num_vars active constraints drawn from the rows and the two bound walls.
// Enumerating all such intersections and keeping the feasible ones yields the
// exact minimum (or proves infeasibility when no intersection is feasible).
struct OracleResult {
  bool feasible = false;
  Rational objective;
};

OracleResult enumerate_vertices(const LpProblem& lp) {
  const int n = lp.num_vars;
  struct Wall {
    std::vector<Rational> a;
    Rational b;
  };
  std::vector<Wall> walls;
  for (const auto& row : lp.rows) {
    Wall w;
    w.a.assign(n, Rational(0));
    for (const auto& [j, c] : row.terms) w.a[j] += c;
    w.b = row.rhs;
    walls.push_back(w);
  }
  for (int j = 0; j < n; ++j) {
    Wall lo;
    lo.a.assign(n, Rational(0));
    lo.a[j] = Rational(1);
    lo.b = lp.lower[j];
    walls.push_back(lo);
    Wall hi = lo;
    hi.b = lp.upper[j];
    walls.push_back(hi);
  }

  OracleResult result;
  const int m = static_cast<int>(walls.size());
  std::vector<int> pick(n);
  // Iterate over all n-subsets of the walls.
  auto consider = [&](const std::vector<int>& subset) {
    std::vector<std::vector<Rational>> a;
    std::vector<Rational> b;
    for (int idx : subset) {
      a.push_back(walls[idx].a);
      b.push_back(walls[idx].b);
    }
    const auto x = solve_square(a, b);
    if (!x || !satisfies(lp, *x)) return;
    Rational obj(0);
    for (int j = 0; j < n; ++j) obj += lp.cost[j] * (*x)[j];
    if (!result.feasible || obj < result.objective) {
      result.feasible = true;
      result.objective = obj;
    }
  };
  std::vector<int> subset;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(subset.size()) == n) {
      consider(subset);
      return;
    }
    for (int i = start; i < m; ++i) {
      subset.push_back(i);
      self(self, i + 1);
      subset.pop_back();
    }
  };
  rec(rec, 0);
  return result;
}

LpProblem random_lp(Rng& rng) {
  LpProblem lp;
  lp.num_vars = 1 + static_cast<int>(rng.next_below(3));
  for (int j = 0; j < lp.num_vars; ++j) {
    const std::int64_t lo = -static_cast<std::int64_t>(rng.next_below(4));
    lp.lower.push_back(Rational(lo));
    lp.upper.push_back(Rational(lo + static_cast<std::int64_t>(rng.next_below(7))));
    lp.cost.push_back(Rational(static_cast<std::int64_t>(rng.next_below(11)) - 5));
  }
  const int rows = static_cast<int>(rng.next_below(4));
  for (int r = 0; r < rows; ++r) {
    LpProblem::Row row;
    for (int j = 0; j < lp.num_vars; ++j) {
      const std::int64_t c = static_cast<std::int64_t>(rng.next_below(9)) - 4;
      if (c != 0) row.terms.emplace_back(j, Rational(c));
    }
    row.rhs = Rational(static_cast<std::int64_t>(rng.next_below(17)) - 6);
    lp.rows.push_back(row);
  }
  return lp;
}

}  // namespace

TEST_SUITE("simplex") {

TEST_CASE("one-variable boxes") {
  LpProblem lp;
  lp.num_vars = 1;
  lp.lower = {Rational(0)};
  lp.upper = {Rational(5)};
  lp.cost = {Rational(1)};

  LpResult r = solve_lp(lp);
  REQUIRE(r.feasible);
  CHECK(r.objective == Rational(0));
  CHECK(r.x[0] == Rational(0));

  lp.cost = {Rational(-1)};
  r = solve_lp(lp);
  REQUIRE(r.feasible);
  CHECK(r.objective == Rational(-5));
  CHECK(r.x[0] == Rational(5));

  SUBCASE("a row below the box is infeasible") {
    lp.rows.push_back({{{0, Rational(1)}}, Rational(-1)});  // x <= -1 vs x >= 0
    CHECK_FALSE(solve_lp(lp).feasible);
  }
}

TEST_CASE("opposing rows pin an equality") {
  LpProblem lp;
  lp.num_vars = 2;
  lp.lower = {Rational(0), Rational(0)};
  lp.upper = {Rational(10), Rational(10)};
  lp.cost = {Rational(-1), Rational(0)};
  lp.rows.push_back({{{0, Rational(1)}, {1, Rational(1)}}, Rational(3)});
  lp.rows.push_back({{{0, Rational(-1)}, {1, Rational(-1)}}, Rational(-3)});

  const LpResult r = solve_lp(lp);
  REQUIRE(r.feasible);
  CHECK(r.objective == Rational(-3));
  CHECK(r.x[0] == Rational(3));
  CHECK(r.x[0] + r.x[1] == Rational(3));
}

TEST_CASE("fractional vertex optimum is hit exactly") {
  // min -x1 - x2 over the polygon cut by 2x1 + x2 <= 4 and x1 + 3x2 <= 6:
  // the optimal corner is (6/5, 8/5) with value -14/5.
  LpProblem lp;
  lp.num_vars = 2;
  lp.lower = {Rational(0), Rational(0)};
  lp.upper = {Rational(3), Rational(3)};
  lp.cost = {Rational(-1), Rational(-1)};
  lp.rows.push_back({{{0, Rational(2)}, {1, Rational(1)}}, Rational(4)});
  lp.rows.push_back({{{0, Rational(1)}, {1, Rational(3)}}, Rational(6)});

  const LpResult r = solve_lp(lp);
  REQUIRE(r.feasible);
  CHECK(r.objective == Rational(-14, 5));
  CHECK(r.x[0] == Rational(6, 5));
  CHECK(r.x[1] == Rational(8, 5));
}

TEST_CASE("redundant and degenerate rows do not confuse the pivoting") {
  LpProblem lp;
  lp.num_vars = 2;
  lp.lower = {Rational(0), Rational(0)};
  lp.upper = {Rational(4), Rational(4)};
  lp.cost = {Rational(1), Rational(-2)};
  for (int k = 0; k < 3; ++k)
    lp.rows.push_back({{{0, Rational(1)}, {1, Rational(1)}}, Rational(4)});  // copies
  lp.rows.push_back({{{1, Rational(1)}}, Rational(4)});  // redundant with the box

  const LpResult r = solve_lp(lp);
  REQUIRE(r.feasible);
  CHECK(r.objective == Rational(-8));
  CHECK(r.x[0] == Rational(0));
  CHECK(r.x[1] == Rational(4));
}

TEST_CASE("random problems agree with vertex enumeration") {
  Rng rng(314);
  int feasible_seen = 0, infeasible_seen = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const LpProblem lp = random_lp(rng);
    const OracleResult oracle = enumerate_vertices(lp);
    const LpResult got = solve_lp(lp);
    CAPTURE(trial);
    REQUIRE(got.feasible == oracle.feasible);
    if (oracle.feasible) {
      ++feasible_seen;
      CHECK(got.objective == oracle.objective);
      CHECK(satisfies(lp, got.x));
    } else {
      ++infeasible_seen;
    }
  }
  // The generator must exercise both outcomes for the loop to mean anything.
  CHECK(feasible_seen > 50);
  CHECK(infeasible_seen > 10);
}

}  // TEST_SUITE
