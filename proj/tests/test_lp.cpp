// Solver boundary tests: known-answer programs, dual sign conventions,
// cross-checks between the two independent backends, duality/complementary
// slackness identities on random instances, and branch-and-bound versus
// exhaustive enumeration on small binary programs.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "gaslight/lp.hpp"

using namespace gaslight;
using namespace gaslight::lp;

namespace {

const std::vector<std::string> kBackends = {"simplex", "dense"};

SolveOptions with_backend(const std::string& be) {
  SolveOptions opt;
  opt.backend = be;
  return opt;
}

// Primal feasibility of a solution against the model rows and bounds.
void check_feasible(const Model& m, const Solution& s, double tol = 1e-6) {
  for (int j = 0; j < m.num_cols(); ++j) {
    const Column& c = m.column(j);
    double scale = 1.0 + std::max(std::abs(c.lb), std::abs(c.ub) == kInf ? 0.0 : std::abs(c.ub));
    CHECK(s.col_value[j] >= c.lb - tol * scale);
    CHECK(s.col_value[j] <= c.ub + tol * scale);
  }
  for (int i = 0; i < m.num_rows(); ++i) {
    const Row& r = m.row_at(i);
    double a = s.activity(m, i);
    double scale = 1.0 + std::abs(r.rhs);
    switch (r.sense) {
      case Sense::LE: CHECK(a <= r.rhs + tol * scale); break;
      case Sense::GE: CHECK(a >= r.rhs - tol * scale); break;
      case Sense::EQ: CHECK(std::abs(a - r.rhs) <= tol * scale); break;
    }
  }
}

// Strong duality plus complementary slackness:
//   obj == offset + y'b + sum_j d_j x_j   with d = c - A'y,
//   y_i != 0 only on tight rows, sign matching the row sense,
//   d_j > 0 only at lower bound, d_j < 0 only at upper bound.
void check_duality(const Model& m, const Solution& s) {
  REQUIRE(s.row_dual.size() == static_cast<std::size_t>(m.num_rows()));
  std::vector<double> d(m.num_cols());
  for (int j = 0; j < m.num_cols(); ++j) d[j] = m.column(j).obj;
  double yb = 0.0;
  for (int i = 0; i < m.num_rows(); ++i) {
    const Row& r = m.row_at(i);
    double y = s.row_dual[i];
    yb += y * r.rhs;
    for (auto& [j, a] : r.terms) d[j] -= y * a;

    double act = s.activity(m, i);
    double scale = 1.0 + std::abs(r.rhs);
    if (std::abs(y) > 1e-6) {
      CHECK(std::abs(act - r.rhs) <= 1e-5 * scale);  // tight when priced
      if (r.sense == Sense::LE) CHECK(y <= 1e-7);
      if (r.sense == Sense::GE) CHECK(y >= -1e-7);
    }
  }
  double dx = 0.0;
  for (int j = 0; j < m.num_cols(); ++j) {
    const Column& c = m.column(j);
    dx += d[j] * s.col_value[j];
    if (c.lb == c.ub) continue;  // fixed column: any reduced cost is fine
    double scale = 1.0 + std::abs(d[j]);
    if (d[j] > 1e-6 * scale) CHECK(std::abs(s.col_value[j] - c.lb) <= 1e-5 * (1.0 + std::abs(c.lb)));
    if (d[j] < -1e-6 * scale) CHECK(std::abs(s.col_value[j] - c.ub) <= 1e-5 * (1.0 + std::abs(c.ub)));
  }
  double lhs = s.objective;
  double rhs = m.obj_offset + yb + dx;
  double scale = 1.0 + std::abs(lhs) + std::abs(yb) + std::abs(dx);
  CHECK(std::abs(lhs - rhs) <= 1e-6 * scale);
}

}  // namespace

TEST_CASE("single bound row: min x subject to x >= 3") {
  for (const auto& be : kBackends) {
    CAPTURE(be);
    Model m;
    int x = m.add_col("x", 0.0, kInf, 1.0);
    m.add_row("floor", Sense::GE, 3.0, {{x, 1.0}});
    Solution s = solve_lp(m, with_backend(be));
    REQUIRE(s.optimal());
    CHECK(s.objective == doctest::Approx(3.0));
    CHECK(s.value(m, "x") == doctest::Approx(3.0));
    check_feasible(m, s);
    check_duality(m, s);
  }
}

TEST_CASE("binary substitution: min x subject to x + y = 1, y binary") {
  Model m;
  int x = m.add_col("x", 0.0, kInf, 1.0);
  int y = m.add_col("y", 0.0, 1.0, 0.0, ColKind::Binary);
  m.add_row("mix", Sense::EQ, 1.0, {{x, 1.0}, {y, 1.0}});
  Solution s = solve_milp(m);
  REQUIRE(s.optimal());
  CHECK(s.objective == doctest::Approx(0.0));
  CHECK(s.value(m, "y") == doctest::Approx(1.0));
  CHECK(s.row_dual.empty());  // binary solves report no duals
}

TEST_CASE("dual convention: equality row dual equals marginal cost") {
  for (const auto& be : kBackends) {
    CAPTURE(be);
    Model m;
    int p = m.add_col("p", 0.0, kInf, 10.0);
    m.add_row("bal", Sense::EQ, 5.0, {{p, 1.0}});
    Solution s = solve_lp(m, with_backend(be));
    REQUIRE(s.optimal());
    CHECK(s.objective == doctest::Approx(50.0));
    CHECK(s.dual(m, "bal") == doctest::Approx(10.0));
  }
}

TEST_CASE("dual signs: LE rows price nonpositive, GE rows nonnegative") {
  for (const auto& be : kBackends) {
    CAPTURE(be);
    Model m;
    int x = m.add_col("x", 0.0, kInf, -1.0);
    m.add_row("cap", Sense::LE, 4.0, {{x, 1.0}});
    Solution s = solve_lp(m, with_backend(be));
    REQUIRE(s.optimal());
    CHECK(s.objective == doctest::Approx(-4.0));
    CHECK(s.dual(m, "cap") == doctest::Approx(-1.0));

    Model g;
    int z = g.add_col("z", 0.0, kInf, 2.0);
    g.add_row("min_take", Sense::GE, 3.0, {{z, 1.0}});
    Solution t = solve_lp(g, with_backend(be));
    REQUIRE(t.optimal());
    CHECK(t.dual(g, "min_take") == doctest::Approx(2.0));
  }
}

TEST_CASE("negated LE row keeps the model-row dual convention") {
  for (const auto& be : kBackends) {
    CAPTURE(be);
    Model m;
    int x = m.add_col("x", -kInf, 5.0, 1.0);
    m.add_row("lower_via_le", Sense::LE, -2.0, {{x, -1.0}});  // -x <= -2  ==  x >= 2
    Solution s = solve_lp(m, with_backend(be));
    REQUIRE(s.optimal());
    CHECK(s.objective == doctest::Approx(2.0));
    CHECK(s.dual(m, "lower_via_le") == doctest::Approx(-1.0));
    check_duality(m, s);
  }
}

TEST_CASE("pure bound problems without rows") {
  for (const auto& be : kBackends) {
    CAPTURE(be);
    Model m;
    m.add_col("x", 0.0, 3.0, -2.0);
    m.add_col("y", -1.0, 4.0, 1.0);
    Solution s = solve_lp(m, with_backend(be));
    REQUIRE(s.optimal());
    CHECK(s.objective == doctest::Approx(-7.0));
    CHECK(s.value(m, "x") == doctest::Approx(3.0));
    CHECK(s.value(m, "y") == doctest::Approx(-1.0));

    Model u;
    u.add_col("f", -kInf, kInf, 1.0);
    Solution su = solve_lp(u, with_backend(be));
    CHECK(su.status == SolveStatus::Unbounded);
  }
}

TEST_CASE("free variable bounded only by a row") {
  for (const auto& be : kBackends) {
    CAPTURE(be);
    Model m;
    int x = m.add_col("x", -kInf, kInf, 1.0);
    m.add_row("floor", Sense::GE, -7.0, {{x, 1.0}});
    Solution s = solve_lp(m, with_backend(be));
    REQUIRE(s.optimal());
    CHECK(s.objective == doctest::Approx(-7.0));
    check_duality(m, s);
  }
}

TEST_CASE("fixed columns are substituted into rows") {
  for (const auto& be : kBackends) {
    CAPTURE(be);
    Model m;
    int x = m.add_col("x", 2.0, 2.0, 3.0);
    int y = m.add_col("y", 0.0, kInf, 1.0);
    m.add_row("sum", Sense::EQ, 5.0, {{x, 1.0}, {y, 1.0}});
    Solution s = solve_lp(m, with_backend(be));
    REQUIRE(s.optimal());
    CHECK(s.value(m, "x") == doctest::Approx(2.0));
    CHECK(s.value(m, "y") == doctest::Approx(3.0));
    CHECK(s.objective == doctest::Approx(6.0 + 3.0));
    CHECK(s.dual(m, "sum") == doctest::Approx(1.0));
  }
}

TEST_CASE("duplicate rows: first occurrence carries the dual") {
  Model m;
  int p = m.add_col("p", 0.0, kInf, 10.0);
  m.add_row("bal", Sense::EQ, 5.0, {{p, 1.0}});
  m.add_row("bal_copy", Sense::EQ, 5.0, {{p, 1.0}});
  Solution s = solve_lp(m, with_backend("simplex"));
  REQUIRE(s.optimal());
  CHECK(s.dual(m, "bal") == doctest::Approx(10.0));
  CHECK(s.dual(m, "bal_copy") == doctest::Approx(0.0));
  CHECK(s.dual(m, "bal") + s.dual(m, "bal_copy") == doctest::Approx(10.0));
}

TEST_CASE("infeasible programs are reported, not mis-solved") {
  for (const auto& be : kBackends) {
    CAPTURE(be);
    Model m;
    int x = m.add_col("x", 0.0, kInf, 1.0);
    m.add_row("hi", Sense::GE, 3.0, {{x, 1.0}});
    m.add_row("lo", Sense::LE, 2.0, {{x, 1.0}});
    Solution s = solve_lp(m, with_backend(be));
    CHECK(s.status == SolveStatus::Infeasible);

    Model c;
    int f = c.add_col("f", 1.0, 1.0, 0.0);
    c.add_row("broken", Sense::GE, 2.0, {{f, 1.0}});  // constant 1 >= 2
    Solution sc = solve_lp(c, with_backend(be));
    CHECK(sc.status == SolveStatus::Infeasible);
  }
}

TEST_CASE("objective offset and cost scaling behave linearly") {
  for (const auto& be : kBackends) {
    CAPTURE(be);
    Model m;
    int x = m.add_col("x", 0.0, kInf, 4.0);
    int y = m.add_col("y", 0.0, kInf, 7.0);
    m.add_row("demand", Sense::GE, 10.0, {{x, 1.0}, {y, 1.0}});
    m.add_row("cap_x", Sense::LE, 6.0, {{x, 1.0}});
    m.obj_offset = 100.0;
    Solution s = solve_lp(m, with_backend(be));
    REQUIRE(s.optimal());
    CHECK(s.objective == doctest::Approx(100.0 + 4.0 * 6.0 + 7.0 * 4.0));

    Model m2 = m;
    m2.column_mut(x).obj *= 3.0;
    m2.column_mut(y).obj *= 3.0;
    m2.obj_offset *= 3.0;
    Solution s2 = solve_lp(m2, with_backend(be));
    REQUIRE(s2.optimal());
    CHECK(s2.objective == doctest::Approx(3.0 * s.objective));
    CHECK(s2.dual(m2, "demand") == doctest::Approx(3.0 * s.dual(m, "demand")));
  }
}

TEST_CASE("degenerate transport program stays finite and optimal") {
  for (const auto& be : kBackends) {
    CAPTURE(be);
    Model m;
    // Two sources, two sinks, equal supplies: plenty of ties.
    int a1 = m.add_col("a1", 0.0, kInf, 1.0);
    int a2 = m.add_col("a2", 0.0, kInf, 1.0);
    int b1 = m.add_col("b1", 0.0, kInf, 1.0);
    int b2 = m.add_col("b2", 0.0, kInf, 1.0);
    m.add_row("src_a", Sense::LE, 5.0, {{a1, 1.0}, {a2, 1.0}});
    m.add_row("src_b", Sense::LE, 5.0, {{b1, 1.0}, {b2, 1.0}});
    m.add_row("snk_1", Sense::EQ, 5.0, {{a1, 1.0}, {b1, 1.0}});
    m.add_row("snk_2", Sense::EQ, 5.0, {{a2, 1.0}, {b2, 1.0}});
    Solution s = solve_lp(m, with_backend(be));
    REQUIRE(s.optimal());
    CHECK(s.objective == doctest::Approx(10.0));
    check_feasible(m, s);
    check_duality(m, s);
  }
}

namespace {

Model random_lp(std::mt19937& rng, int n, int mrows) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> cost(-5.0, 5.0);
  Model m;
  std::vector<double> point(n);
  for (int j = 0; j < n; ++j) {
    double lb = -10.0 * u01(rng);
    double ub = 10.0 * u01(rng);
    m.add_col("x" + std::to_string(j), lb, ub, cost(rng));
    point[j] = lb + (ub - lb) * u01(rng);
  }
  for (int i = 0; i < mrows; ++i) {
    std::vector<std::pair<int, double>> terms;
    double act = 0.0;
    for (int j = 0; j < n; ++j) {
      if (u01(rng) < 0.6) continue;
      double a = cost(rng);
      if (a == 0.0) continue;
      terms.emplace_back(j, a);
      act += a * point[j];
    }
    if (terms.empty()) continue;
    double shift = 4.0 * (u01(rng) - 0.5);
    int kind = static_cast<int>(3.0 * u01(rng));
    if (kind == 0)
      m.add_row("r" + std::to_string(i), Sense::LE, act + shift, {terms});
    else if (kind == 1)
      m.add_row("r" + std::to_string(i), Sense::GE, act + shift, {terms});
    else
      m.add_row("r" + std::to_string(i), Sense::EQ, act, {terms});  // feasible at `point`
  }
  return m;
}

}  // namespace

TEST_CASE("backends agree on random bounded programs") {
  std::mt19937 rng(20240915);
  std::uniform_int_distribution<int> nd(3, 12), md(2, 10);
  int optimal_seen = 0, infeasible_seen = 0;
  for (int t = 0; t < 60; ++t) {
    Model m = random_lp(rng, nd(rng), md(rng));
    Solution a = solve_lp(m, with_backend("simplex"));
    Solution b = solve_lp(m, with_backend("dense"));
    CAPTURE(t);
    REQUIRE(a.status == b.status);
    if (a.optimal()) {
      ++optimal_seen;
      double scale = 1.0 + std::abs(a.objective);
      CHECK(std::abs(a.objective - b.objective) <= 1e-6 * scale);
      check_feasible(m, a);
      check_feasible(m, b);
      check_duality(m, a);
      check_duality(m, b);
    } else {
      ++infeasible_seen;
      CHECK(a.status == SolveStatus::Infeasible);
    }
  }
  // The generator must exercise both outcomes to mean anything.
  CHECK(optimal_seen >= 10);
  CHECK(infeasible_seen >= 5);
}

TEST_CASE("larger random program solves and satisfies optimality identities") {
  std::mt19937 rng(77);
  Model m = random_lp(rng, 80, 60);
  Solution s = solve_lp(m, with_backend("simplex"));
  if (s.optimal()) {
    check_feasible(m, s);
    check_duality(m, s);
    Solution d = solve_lp(m, with_backend("dense"));
    REQUIRE(d.optimal());
    CHECK(std::abs(s.objective - d.objective) <= 1e-6 * (1.0 + std::abs(s.objective)));
  } else {
    CHECK(s.status == SolveStatus::Infeasible);
  }
}

namespace {

Model random_milp(std::mt19937& rng, int nbin, int ncont, int mrows) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> cost(-5.0, 5.0);
  Model m;
  for (int j = 0; j < nbin; ++j) m.add_col("y" + std::to_string(j), 0.0, 1.0, cost(rng), ColKind::Binary);
  for (int j = 0; j < ncont; ++j) m.add_col("x" + std::to_string(j), 0.0, 10.0 * u01(rng), cost(rng));
  int n = nbin + ncont;
  for (int i = 0; i < mrows; ++i) {
    std::vector<std::pair<int, double>> terms;
    for (int j = 0; j < n; ++j) {
      if (u01(rng) < 0.5) continue;
      double a = cost(rng);
      if (a != 0.0) terms.emplace_back(j, a);
    }
    if (terms.empty()) continue;
    // Generous rhs so most instances stay feasible; some will not be.
    m.add_row("r" + std::to_string(i), Sense::LE, 3.0 + 6.0 * u01(rng), {terms});
  }
  return m;
}

double enumerate_best(const Model& m) {
  auto bins = m.binary_cols();
  int k = static_cast<int>(bins.size());
  double best = kInf;
  for (int mask = 0; mask < (1 << k); ++mask) {
    std::unordered_map<int, int> fix;
    for (int b = 0; b < k; ++b) fix[bins[b]] = (mask >> b) & 1;
    Solution s = solve_lp_fixed(m, fix);
    if (s.optimal()) best = std::min(best, s.objective);
  }
  return best;
}

}  // namespace

TEST_CASE("branch-and-bound matches exhaustive enumeration") {
  std::mt19937 rng(424242);
  int solved = 0;
  for (int t = 0; t < 25; ++t) {
    Model m = random_milp(rng, 2 + t % 6, 2, 3 + t % 4);
    CAPTURE(t);
    double best = enumerate_best(m);
    Solution s = solve_milp(m);
    if (best == kInf) {
      CHECK(s.status == SolveStatus::Infeasible);
      continue;
    }
    ++solved;
    REQUIRE(s.optimal());
    double scale = 1.0 + std::abs(best);
    CHECK(std::abs(s.objective - best) <= 1e-6 * scale);
    CHECK(s.best_bound <= s.objective + 1e-6 * scale);
    for (int j : m.binary_cols()) {
      double v = s.col_value[j];
      CHECK(std::abs(v - std::round(v)) <= 1e-6);
    }
    check_feasible(m, s);
  }
  CHECK(solved >= 15);
}

TEST_CASE("knapsack selection via binaries") {
  Model m;
  std::vector<double> value = {6.0, 5.0, 4.0, 3.0};
  std::vector<double> weight = {4.0, 3.0, 2.0, 1.0};
  std::vector<std::pair<int, double>> cap_terms;
  for (int j = 0; j < 4; ++j) {
    int c = m.add_col("take" + std::to_string(j), 0.0, 1.0, -value[j], ColKind::Binary);
    cap_terms.emplace_back(c, weight[j]);
  }
  m.add_row("capacity", Sense::LE, 6.0, {cap_terms});
  Solution s = solve_milp(m);
  REQUIRE(s.optimal());
  CHECK(s.objective == doctest::Approx(-12.0));
  CHECK(s.value(m, "take1") == doctest::Approx(1.0));
  CHECK(s.value(m, "take2") == doctest::Approx(1.0));
  CHECK(s.value(m, "take3") == doctest::Approx(1.0));
}

TEST_CASE("fixed-binary refix reproduces the integral objective with duals") {
  std::mt19937 rng(9001);
  for (int t = 0; t < 10; ++t) {
    Model m = random_milp(rng, 5, 3, 4);
    Solution milp = solve_milp(m);
    if (!milp.optimal()) continue;
    CAPTURE(t);
    Solution fixed = solve_lp_fixed(m, milp);
    REQUIRE(fixed.optimal());
    double scale = 1.0 + std::abs(milp.objective);
    CHECK(std::abs(fixed.objective - milp.objective) <= 1e-6 * scale);
    CHECK(fixed.row_dual.size() == static_cast<std::size_t>(m.num_rows()));
    // Slackness holds against the bounds actually solved: binaries pinned.
    Model pinned = m;
    for (int j : m.binary_cols()) {
      double v = std::round(milp.col_value[j]);
      pinned.column_mut(j).lb = v;
      pinned.column_mut(j).ub = v;
    }
    check_duality(pinned, fixed);
  }
}

TEST_CASE("solve_lp_fixed validates the assignment") {
  Model m;
  m.add_col("y", 0.0, 1.0, 1.0, ColKind::Binary);
  CHECK_THROWS_AS(solve_lp_fixed(m, std::unordered_map<int, int>{}), Error);
  CHECK_THROWS_AS(solve_lp_fixed(m, std::unordered_map<int, int>{{0, 2}}), Error);
  Solution s = solve_lp_fixed(m, std::unordered_map<int, int>{{0, 1}});
  REQUIRE(s.optimal());
  CHECK(s.value(m, "y") == doctest::Approx(1.0));
}

TEST_CASE("unbounded relaxation is flagged") {
  Model m;
  m.add_col("x", 0.0, kInf, -1.0);
  m.add_col("y", 0.0, 1.0, 0.0, ColKind::Binary);
  Solution s = solve_milp(m);
  CHECK(s.status == SolveStatus::Unbounded);
}

TEST_CASE("dense backend refuses free binaries") {
  Model m;
  m.add_col("y", 0.0, 1.0, -1.0, ColKind::Binary);
  SolveOptions opt = with_backend("dense");
  CHECK_THROWS_AS(backend("dense").solve_milp(m, opt), Error);
}

TEST_CASE("an optimal LP carries one dual per row even when all rows drop") {
  // Every column fixed by its bounds makes every row constant; such rows are
  // eliminated before the simplex runs, but their (zero) duals must survive.
  for (const auto& be : kBackends) {
    CAPTURE(be);
    Model m;
    int x = m.add_col("x", 2.0, 2.0, 1.0);
    int y = m.add_col("y", 0.0, 0.0, 3.0);
    m.add_row("sum", Sense::EQ, 2.0, {{x, 1.0}, {y, 1.0}});
    m.add_row("cap", Sense::LE, 5.0, {{x, 1.0}});
    Solution s = solve_lp(m, with_backend(be));
    REQUIRE(s.optimal());
    CHECK(s.objective == doctest::Approx(2.0));
    REQUIRE(s.row_dual.size() == 2);
    CHECK(s.dual(m, "sum") == doctest::Approx(0.0));
    CHECK(s.dual(m, "cap") == doctest::Approx(0.0));
  }
}

TEST_CASE("unknown backend names the available ones") {
  try {
    backend("gurobi");
    FAIL("expected an error");
  } catch (const Error& e) {
    std::string msg = e.what();
    CHECK(msg.find("simplex") != std::string::npos);
    CHECK(msg.find("dense") != std::string::npos);
  }
}

TEST_CASE("model validation catches structural mistakes") {
  Model m;
  CHECK_THROWS_AS(m.add_col("", 0.0, 1.0, 0.0), Error);
  m.add_col("x", 0.0, 1.0, 0.0);
  CHECK_THROWS_AS(m.add_col("x", 0.0, 1.0, 0.0), Error);

  Model rev;
  rev.add_col("a", 2.0, 1.0, 0.0);
  CHECK_THROWS_AS(rev.validate(), Error);

  Model bb;
  bb.add_col("y", -0.5, 1.0, 0.0, ColKind::Binary);
  CHECK_THROWS_AS(bb.validate(), Error);
}

TEST_CASE("LP text export covers objective, rows, bounds and binaries") {
  Model m;
  int x = m.add_col("x", 0.0, 4.0, 2.5);
  int y = m.add_col("y", 0.0, 1.0, -1.0, ColKind::Binary);
  m.add_row("link", Sense::LE, 3.0, {{x, 1.0}, {y, -2.0}});
  std::string text = write_lp_format(m);
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("link:") != std::string::npos);
  CHECK(text.find("<= 3") != std::string::npos);
  CHECK(text.find("Binaries") != std::string::npos);
  CHECK(text.find("End") != std::string::npos);
}
