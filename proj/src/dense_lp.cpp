// Self-contained dense tableau simplex, registered as the "dense" backend.
// Deliberately independent of the sparse engine: it converts the Model to
// classic standard form itself (shift/mirror/split substitutions, slack,
// surplus and artificial columns) and runs two-phase Gauss-Jordan pivoting on
// an explicit tableau. Used to cross-check the primary backend and as a
// fallback for linear programs; it does not search over binaries.

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "gaslight/lp.hpp"

namespace gaslight::lp::detail {

namespace {

enum class Map { Constant, Shift, Mirror, Split };

// How one model column is expressed in nonnegative standard-form columns.
struct ColPlan {
  Map map = Map::Constant;
  int u = -1;        // primary standard column
  int u2 = -1;       // second column (Split only)
  double base = 0.0; // lb (Shift), ub (Mirror), fixed value (Constant)
};

class DenseBackend : public SolverBackend {
 public:
  std::string name() const override { return "dense"; }

  Solution solve_milp(const Model& m, const SolveOptions& opt) override {
    for (int j : m.binary_cols())
      if (m.column(j).lb != m.column(j).ub)
        throw Error(Error::Kind::Solver,
                    "dense backend solves linear programs only; free binary column " +
                        m.column(j).id + " needs the simplex backend");
    return solve_lp(m, opt);
  }

  Solution solve_lp(const Model& model, const SolveOptions& opt) override {
    model.validate();
    const int nm = model.num_cols();
    const int mm = model.num_rows();

    // ----- columns: substitute into nonnegative u variables -----------------
    std::vector<ColPlan> plan(nm);
    std::vector<double> ucost;
    struct BoundRow {
      int u;
      double range;
    };
    std::vector<BoundRow> bound_rows;  // u <= range, for doubly bounded columns
    for (int j = 0; j < nm; ++j) {
      const Column& c = model.column(j);
      ColPlan& p = plan[j];
      if (c.lb == c.ub) {
        p.map = Map::Constant;
        p.base = c.lb;
      } else if (std::isfinite(c.lb)) {
        p.map = Map::Shift;  // x = lb + u
        p.base = c.lb;
        p.u = static_cast<int>(ucost.size());
        ucost.push_back(c.obj);
        if (std::isfinite(c.ub)) bound_rows.push_back({p.u, c.ub - c.lb});
      } else if (std::isfinite(c.ub)) {
        p.map = Map::Mirror;  // x = ub - u
        p.base = c.ub;
        p.u = static_cast<int>(ucost.size());
        ucost.push_back(-c.obj);
      } else {
        p.map = Map::Split;  // x = u - u2
        p.u = static_cast<int>(ucost.size());
        ucost.push_back(c.obj);
        p.u2 = static_cast<int>(ucost.size());
        ucost.push_back(-c.obj);
      }
    }
    const int nu = static_cast<int>(ucost.size());

    // ----- rows: model rows then bound rows, rhs normalized nonnegative -----
    const int ms = mm + static_cast<int>(bound_rows.size());
    std::vector<std::vector<double>> rowa(ms, std::vector<double>(nu, 0.0));
    std::vector<double> rowrhs(ms, 0.0);
    std::vector<Sense> rowsense(ms, Sense::LE);
    std::vector<char> flipped(ms, 0);
    for (int i = 0; i < mm; ++i) {
      const Row& r = model.row_at(i);
      double rhs = r.rhs;
      auto& a = rowa[i];
      for (auto& [j, v] : r.terms) {
        const ColPlan& p = plan[j];
        switch (p.map) {
          case Map::Constant: rhs -= v * p.base; break;
          case Map::Shift:
            a[p.u] += v;
            rhs -= v * p.base;
            break;
          case Map::Mirror:
            a[p.u] -= v;
            rhs -= v * p.base;
            break;
          case Map::Split:
            a[p.u] += v;
            a[p.u2] -= v;
            break;
        }
      }
      rowrhs[i] = rhs;
      rowsense[i] = r.sense;
    }
    for (int k = 0; k < static_cast<int>(bound_rows.size()); ++k) {
      int i = mm + k;
      rowa[i][bound_rows[k].u] = 1.0;
      rowrhs[i] = bound_rows[k].range;
    }
    for (int i = 0; i < ms; ++i) {
      if (rowrhs[i] >= 0.0) continue;
      for (double& v : rowa[i]) v = -v;
      rowrhs[i] = -rowrhs[i];
      flipped[i] = 1;
      if (rowsense[i] == Sense::LE)
        rowsense[i] = Sense::GE;
      else if (rowsense[i] == Sense::GE)
        rowsense[i] = Sense::LE;
    }

    // ----- logical columns: slacks/surplus, then artificials ----------------
    int nslack = 0;
    std::vector<int> slack_col(ms, -1), art_col(ms, -1);
    for (int i = 0; i < ms; ++i)
      if (rowsense[i] != Sense::EQ) slack_col[i] = nu + nslack++;
    int nart = 0;
    for (int i = 0; i < ms; ++i)
      if (rowsense[i] != Sense::LE) art_col[i] = nu + nslack + nart++;
    const int nc = nu + nslack + nart;
    auto is_art = [&](int j) { return j >= nu + nslack; };

    // ----- tableau -----------------------------------------------------------
    std::vector<std::vector<double>> T(ms, std::vector<double>(nc + 1, 0.0));
    std::vector<int> basic(ms, -1);
    double bscale = 1.0;
    for (int i = 0; i < ms; ++i) {
      for (int j = 0; j < nu; ++j) T[i][j] = rowa[i][j];
      if (slack_col[i] >= 0) T[i][slack_col[i]] = rowsense[i] == Sense::LE ? 1.0 : -1.0;
      if (art_col[i] >= 0) T[i][art_col[i]] = 1.0;
      T[i][nc] = rowrhs[i];
      basic[i] = art_col[i] >= 0 ? art_col[i] : slack_col[i];
      bscale = std::max(bscale, std::abs(rowrhs[i]));
    }
    rowa.clear();
    rowa.shrink_to_fit();

    std::vector<double> d(nc + 1, 0.0);  // reduced costs under current basis
    auto rebuild_d = [&](const std::vector<double>& cost) {
      for (int j = 0; j <= nc; ++j) d[j] = j < nc ? cost[j] : 0.0;
      for (std::size_t i = 0; i < T.size(); ++i) {
        double cb = cost[basic[i]];
        if (cb == 0.0) continue;
        for (int j = 0; j <= nc; ++j) d[j] -= cb * T[i][j];
      }
    };

    auto pivot = [&](int r, int c) {
      double piv = T[r][c];
      for (int j = 0; j <= nc; ++j) T[r][j] /= piv;
      T[r][c] = 1.0;
      for (std::size_t i = 0; i < T.size(); ++i) {
        if (static_cast<int>(i) == r) continue;
        double f = T[i][c];
        if (f == 0.0) continue;
        for (int j = 0; j <= nc; ++j) T[i][j] -= f * T[r][j];
        T[i][c] = 0.0;
      }
      double f = d[c];
      if (f != 0.0) {
        for (int j = 0; j <= nc; ++j) d[j] -= f * T[r][j];
        d[c] = 0.0;
      }
      basic[r] = c;
    };

    long iters = 0;
    auto run_phase = [&](bool allow_art, std::string& msg) -> SolveStatus {
      double cmax = 1.0;
      for (int j = 0; j < nc; ++j) cmax = std::max(cmax, std::abs(d[j]));
      const double dtol = 1e-9 * cmax;
      const double ptol = 1e-9;
      int degen_streak = 0;
      bool bland = false;
      while (true) {
        if (iters >= opt.max_iters) {
          msg = "iteration limit reached";
          return SolveStatus::IterLimit;
        }
        int enter = -1;
        double best = -dtol;
        for (int j = 0; j < nc; ++j) {
          if (!allow_art && is_art(j)) continue;
          if (d[j] < best) {
            enter = j;
            if (bland) break;
            best = d[j];
          }
        }
        if (enter < 0) return SolveStatus::Optimal;
        int leave = -1;
        double best_ratio = kInf;
        for (std::size_t i = 0; i < T.size(); ++i) {
          double a = T[i][enter];
          if (a <= ptol) continue;
          double ratio = T[i][nc] / a;
          if (ratio < best_ratio - 1e-12 ||
              (ratio < best_ratio + 1e-12 && (leave < 0 || basic[i] < basic[leave]))) {
            best_ratio = ratio;
            leave = static_cast<int>(i);
          }
        }
        if (leave < 0) {
          msg = "unbounded improving direction";
          return SolveStatus::Unbounded;
        }
        if (best_ratio < 1e-10) {
          if (++degen_streak > 200) bland = true;
        } else {
          degen_streak = 0;
          bland = false;
        }
        pivot(leave, enter);
        ++iters;
      }
    };

    auto fail = [&](SolveStatus st, const std::string& msg) {
      Solution s;
      s.status = st;
      s.message = msg;
      s.simplex_iters = iters;
      return s;
    };

    std::string msg;
    if (nart > 0) {
      std::vector<double> c1(nc, 0.0);
      for (int j = nu + nslack; j < nc; ++j) c1[j] = 1.0;
      rebuild_d(c1);
      SolveStatus st = run_phase(true, msg);
      if (st == SolveStatus::Unbounded)
        return fail(SolveStatus::Error, "phase-1 objective cannot be unbounded: " + msg);
      if (st != SolveStatus::Optimal) return fail(st, msg);
      double infeas = 0.0;
      for (std::size_t i = 0; i < T.size(); ++i)
        if (is_art(basic[i])) infeas += T[i][nc];
      if (infeas > 10.0 * opt.feas_tol * bscale)
        return fail(SolveStatus::Infeasible,
                    "infeasible (phase-1 residual " + std::to_string(infeas) + ")");
      // Pivot leftover artificials out; rows that cannot release one are
      // linearly dependent and get removed.
      for (int i = static_cast<int>(T.size()) - 1; i >= 0; --i) {
        if (!is_art(basic[i])) continue;
        int piv = -1;
        for (int j = 0; j < nu + nslack; ++j)
          if (std::abs(T[i][j]) > 1e-7) {
            piv = j;
            break;
          }
        if (piv >= 0) {
          pivot(i, piv);
        } else {
          T.erase(T.begin() + i);
          basic.erase(basic.begin() + i);
        }
      }
    }

    std::vector<double> c2(nc, 0.0);
    for (int j = 0; j < nu; ++j) c2[j] = ucost[j];
    rebuild_d(c2);
    SolveStatus st2 = run_phase(false, msg);
    if (st2 != SolveStatus::Optimal) return fail(st2, msg);

    // ----- map back ----------------------------------------------------------
    std::vector<double> uval(nc, 0.0);
    for (std::size_t i = 0; i < T.size(); ++i) uval[basic[i]] = T[i][nc];
    Solution s;
    s.status = SolveStatus::Optimal;
    s.col_value.assign(nm, 0.0);
    for (int j = 0; j < nm; ++j) {
      const ColPlan& p = plan[j];
      switch (p.map) {
        case Map::Constant: s.col_value[j] = p.base; break;
        case Map::Shift: s.col_value[j] = p.base + uval[p.u]; break;
        case Map::Mirror: s.col_value[j] = p.base - uval[p.u]; break;
        case Map::Split: s.col_value[j] = uval[p.u] - uval[p.u2]; break;
      }
    }
    double obj = model.obj_offset;
    for (int j = 0; j < nm; ++j) obj += model.column(j).obj * s.col_value[j];
    s.objective = obj;
    s.best_bound = obj;
    // Row dual = -reduced cost of the row's +1 unit logical column (artificial
    // for >=/=, slack for <=), undoing the sign normalization.
    s.row_dual.assign(mm, 0.0);
    for (int i = 0; i < mm; ++i) {
      int uc = art_col[i] >= 0 ? art_col[i] : slack_col[i];
      double y = -d[uc];
      s.row_dual[i] = flipped[i] ? -y : y;
    }
    s.simplex_iters = iters;
    return s;
  }
};

}  // namespace

std::unique_ptr<SolverBackend> make_dense_backend() {
  return std::make_unique<DenseBackend>();
}

}  // namespace gaslight::lp::detail
