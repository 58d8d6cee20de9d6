// Bounded-variable revised primal simplex with two phases, Devex pricing,
// product-form (eta) basis updates over an Eigen sparse LU factorization, and
// a Bland-rule fallback against cycling. Solves min c'x s.t. Ax + s = b with
// column bounds on x and sense bounds on the logical s.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>

#include "solver_core.hpp"

namespace gaslight::lp::detail {

namespace {
constexpr std::int8_t NB_LB = 0, NB_UB = 1, BASIC = 2, NB_FREE = 3;
constexpr int kRefactorEvery = 64;
constexpr double kPivotTol = 1e-9;    // minimum acceptable pivot magnitude
constexpr double kDropTol = 1e-12;    // eta / vector entry drop tolerance
constexpr int kBlandTrigger = 400;    // consecutive degenerate pivots
}  // namespace

struct Simplex::Impl {
  const CompForm& f;
  int m, n, nv;

  std::vector<double> cost;      // per variable (phase 2)
  std::vector<double> vlb, vub;  // per variable bounds for this solve

  std::vector<std::int8_t> vstat;
  std::vector<int> basic;  // row -> var
  std::vector<int> bpos;   // var -> row (or -1)
  std::vector<double> xb;  // basic values by row

  // mutable: Eigen's SparseLU::adjoint() view is a non-const member even
  // though the transposed solve leaves the factorization untouched.
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  bool lu_ok = false;
  struct Eta {
    int p;
    double pivot;
    std::vector<std::pair<int, double>> col;  // off-pivot entries
  };
  std::vector<Eta> etas;

  std::vector<double> d;      // reduced costs, phase 2
  std::vector<double> devex;  // pricing weights
  long iters = 0;
  int degen_streak = 0;
  bool bland = false;

  explicit Impl(const CompForm& form) : f(form) {
    m = f.m;
    n = f.n;
    nv = n + m;
  }

  // --- column access -------------------------------------------------------
  template <class Fn>
  void for_col(int j, Fn&& fn) const {  // fn(row, coeff)
    if (j < n) {
      for (int k = f.col_start[j]; k < f.col_start[j + 1]; ++k) fn(f.row_ind[k], f.a_val[k]);
    } else {
      fn(j - n, 1.0);
    }
  }

  double dot_col(int j, const Eigen::VectorXd& v) const {
    if (j >= n) return v[j - n];
    double s = 0.0;
    for (int k = f.col_start[j]; k < f.col_start[j + 1]; ++k) s += f.a_val[k] * v[f.row_ind[k]];
    return s;
  }

  double nb_value(int j) const {
    switch (vstat[j]) {
      case NB_LB: return vlb[j];
      case NB_UB: return vub[j];
      default: return 0.0;  // NB_FREE
    }
  }

  // --- factorization -------------------------------------------------------
  bool factorize() {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(f.a_val.size()) + m);
    for (int p = 0; p < m; ++p) {
      int j = basic[p];
      for_col(j, [&](int i, double a) { trip.emplace_back(i, p, a); });
    }
    Eigen::SparseMatrix<double> B(m, m);
    B.setFromTriplets(trip.begin(), trip.end());
    lu.compute(B);
    lu_ok = (lu.info() == Eigen::Success);
    etas.clear();
    return lu_ok;
  }

  void ftran(Eigen::VectorXd& v) const {
    v = lu.solve(v);
    for (const Eta& e : etas) {
      double vp = v[e.p] / e.pivot;
      if (vp != 0.0)
        for (auto& [i, a] : e.col) v[i] -= a * vp;
      v[e.p] = vp;
    }
  }

  void btran(Eigen::VectorXd& v) const {
    for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
      double s = 0.0;
      for (auto& [i, a] : it->col) s += a * v[i];
      v[it->p] = (v[it->p] - s) / it->pivot;
    }
    v = lu.adjoint().solve(v);
  }

  void compute_xb() {
    Eigen::VectorXd rhs(m);
    for (int i = 0; i < m; ++i) rhs[i] = f.b[i];
    for (int j = 0; j < nv; ++j) {
      if (vstat[j] == BASIC) continue;
      double v = nb_value(j);
      if (v == 0.0) continue;
      for_col(j, [&](int i, double a) { rhs[i] -= a * v; });
    }
    ftran(rhs);
    xb.assign(rhs.data(), rhs.data() + m);
  }

  void slack_basis() {
    vstat.assign(nv, NB_LB);
    for (int j = 0; j < nv; ++j) {
      if (std::isfinite(vlb[j]))
        vstat[j] = NB_LB;
      else if (std::isfinite(vub[j]))
        vstat[j] = NB_UB;
      else
        vstat[j] = NB_FREE;
    }
    basic.resize(m);
    bpos.assign(nv, -1);
    for (int i = 0; i < m; ++i) {
      basic[i] = n + i;
      vstat[n + i] = BASIC;
      bpos[n + i] = i;
    }
  }

  bool adopt_basis(const Basis& bs) {
    if (static_cast<int>(bs.vstat.size()) != nv || static_cast<int>(bs.basic.size()) != m)
      return false;
    vstat = bs.vstat;
    basic = bs.basic;
    bpos.assign(nv, -1);
    int nb = 0;
    for (int i = 0; i < m; ++i) {
      int j = basic[i];
      if (j < 0 || j >= nv || vstat[j] != BASIC || bpos[j] != -1) return false;
      bpos[j] = i;
      ++nb;
    }
    for (int j = 0; j < nv; ++j)
      if (vstat[j] == BASIC && bpos[j] < 0) return false;
    // Nonbasic at an infinite bound is invalid after bound changes; repair.
    for (int j = 0; j < nv; ++j) {
      if (vstat[j] == NB_LB && !std::isfinite(vlb[j]))
        vstat[j] = std::isfinite(vub[j]) ? NB_UB : NB_FREE;
      else if (vstat[j] == NB_UB && !std::isfinite(vub[j]))
        vstat[j] = std::isfinite(vlb[j]) ? NB_LB : NB_FREE;
    }
    return nb == m;
  }

  // --- pricing -------------------------------------------------------------
  void compute_phase2_duals(Eigen::VectorXd& y) const {
    y.resize(m);
    for (int i = 0; i < m; ++i) y[i] = cost[basic[i]];
    btran(y);
  }

  void full_price() {
    Eigen::VectorXd y;
    compute_phase2_duals(y);
    d.assign(nv, 0.0);
    for (int j = 0; j < nv; ++j) {
      if (vstat[j] == BASIC) continue;
      d[j] = cost[j] - dot_col(j, y);
    }
  }

  // --- main solve ----------------------------------------------------------
  LpResult run(const SolveOptions& opt, Basis* warm);

  LpResult finish(SolveStatus st, const std::string& msg) {
    LpResult r;
    r.status = st;
    r.iters = iters;
    r.message = msg;
    return r;
  }
};

Simplex::Simplex(const CompForm& f) : impl_(new Impl(f)) {}
Simplex::~Simplex() { delete impl_; }

LpResult Simplex::solve(const std::vector<double>& xl, const std::vector<double>& xu,
                        const SolveOptions& opt, Basis* basis) {
  Impl& s = *impl_;
  s.vlb.assign(xl.begin(), xl.end());
  s.vub.assign(xu.begin(), xu.end());
  s.vlb.insert(s.vlb.end(), s.f.sl.begin(), s.f.sl.end());
  s.vub.insert(s.vub.end(), s.f.su.begin(), s.f.su.end());
  s.cost.assign(s.f.c.begin(), s.f.c.end());
  s.cost.resize(s.nv, 0.0);
  s.iters = 0;
  s.degen_streak = 0;
  s.bland = false;

  for (int j = 0; j < s.nv; ++j)
    if (s.vlb[j] > s.vub[j] + 1e-12) {
      LpResult r;
      r.status = SolveStatus::Infeasible;
      r.message = "conflicting bounds on a column";
      return r;
    }

  LpResult r = s.run(opt, basis);
  if (r.status == SolveStatus::Optimal && basis) {
    basis->vstat = s.vstat;
    basis->basic = s.basic;
  }
  return r;
}

LpResult Simplex::Impl::run(const SolveOptions& opt, Basis* warm) {
  const double ftol = opt.feas_tol;
  double cmax = 1.0;
  for (double cj : f.c) cmax = std::max(cmax, std::abs(cj));
  const double dtol = 1e-9 * cmax;

  if (m == 0) {
    // Pure bound problem: each structural sits at its cheapest bound.
    LpResult r;
    r.x.assign(n, 0.0);
    double obj = f.obj_offset;
    for (int j = 0; j < n; ++j) {
      double v;
      if (f.c[j] > 0.0)
        v = vlb[j];
      else if (f.c[j] < 0.0)
        v = vub[j];
      else
        v = std::isfinite(vlb[j]) ? vlb[j] : (std::isfinite(vub[j]) ? vub[j] : 0.0);
      if (!std::isfinite(v)) return finish(SolveStatus::Unbounded, "free improving column");
      r.x[j] = v;
      obj += f.c[j] * v;
    }
    r.status = SolveStatus::Optimal;
    r.obj = obj;
    r.iters = 0;
    return r;
  }

  bool have_basis = warm && warm->valid() && adopt_basis(*warm);
  if (!have_basis) slack_basis();
  if (!factorize()) {
    slack_basis();
    if (!factorize()) return finish(SolveStatus::Error, "basis factorization failed");
  }
  compute_xb();

  devex.assign(nv, 1.0);
  bool d_valid = false;
  Eigen::VectorXd alpha(m), rho(m), work(m);
  int etas_since_factor = 0;
  int polish_rounds = 0;

  auto basic_infeas = [&](int i, double* viol) -> int {
    int j = basic[i];
    if (xb[i] < vlb[j] - ftol) {
      if (viol) *viol = vlb[j] - xb[i];
      return -1;
    }
    if (xb[i] > vub[j] + ftol) {
      if (viol) *viol = xb[i] - vub[j];
      return +1;
    }
    return 0;
  };

  while (true) {
    if (iters >= opt.max_iters) return finish(SolveStatus::IterLimit, "simplex iteration limit");

    // Decide phase.
    double infeas = 0.0;
    bool feasible = true;
    for (int i = 0; i < m; ++i) {
      double v = 0.0;
      if (basic_infeas(i, &v) != 0) {
        feasible = false;
        infeas += v;
      }
    }

    int q = -1, sigma = 0;
    double best_score = 0.0;

    if (!feasible) {
      // Phase 1: price against the composite infeasibility gradient.
      Eigen::VectorXd g(m);
      for (int i = 0; i < m; ++i) g[i] = static_cast<double>(basic_infeas(i, nullptr));
      btran(g);  // g becomes y1
      const double p1tol = 1e-9;
      for (int j = 0; j < nv; ++j) {
        if (vstat[j] == BASIC) continue;
        double dj = -dot_col(j, g);
        bool up_ok = (vstat[j] == NB_LB || vstat[j] == NB_FREE);
        bool dn_ok = (vstat[j] == NB_UB || vstat[j] == NB_FREE);
        double score = 0.0;
        int sig = 0;
        if (up_ok && dj < -p1tol) {
          score = -dj;
          sig = +1;
        }
        if (dn_ok && dj > p1tol && dj > score) {
          score = dj;
          sig = -1;
        }
        if (sig == 0) continue;
        if (bland) {
          if (q < 0) {
            q = j;
            sigma = sig;
          }
        } else if (score * score / devex[j] > best_score) {
          best_score = score * score / devex[j];
          q = j;
          sigma = sig;
        }
      }
      if (q < 0) {
        if (infeas > 10 * ftol * m) {
          LpResult r = finish(SolveStatus::Infeasible, "phase-1 optimum with residual infeasibility");
          return r;
        }
        // Infeasibility is below tolerance noise; continue as feasible.
        feasible = true;
      }
      d_valid = false;
    }

    if (feasible) {
      if (!d_valid) {
        full_price();
        d_valid = true;
      }
      q = -1;
      sigma = 0;
      best_score = 0.0;
      for (int j = 0; j < nv; ++j) {
        if (vstat[j] == BASIC) continue;
        double dj = d[j];
        bool up_ok = (vstat[j] == NB_LB || vstat[j] == NB_FREE);
        bool dn_ok = (vstat[j] == NB_UB || vstat[j] == NB_FREE);
        double score = 0.0;
        int sig = 0;
        if (up_ok && dj < -dtol) {
          score = -dj;
          sig = +1;
        }
        if (dn_ok && dj > dtol && dj > score) {
          score = dj;
          sig = -1;
        }
        if (sig == 0) continue;
        if (bland) {
          if (q < 0) {
            q = j;
            sigma = sig;
          }
        } else if (score * score / devex[j] > best_score) {
          best_score = score * score / devex[j];
          q = j;
          sigma = sig;
        }
      }
      if (q < 0) {
        // Optimal. Polish: refactorize, recompute, and double-check feasibility.
        if (polish_rounds++ < 2) {
          if (!factorize()) return finish(SolveStatus::Error, "refactorization failed at optimum");
          etas_since_factor = 0;
          compute_xb();
          d_valid = false;
          bool still_ok = true;
          for (int i = 0; i < m; ++i)
            if (basic_infeas(i, nullptr) != 0) still_ok = false;
          if (!still_ok) continue;  // drift: resume iterating
          // Re-check optimality after clean recompute.
          full_price();
          d_valid = true;
          bool opt_ok = true;
          for (int j = 0; j < nv && opt_ok; ++j) {
            if (vstat[j] == BASIC) continue;
            bool up_ok = (vstat[j] == NB_LB || vstat[j] == NB_FREE);
            bool dn_ok = (vstat[j] == NB_UB || vstat[j] == NB_FREE);
            if ((up_ok && d[j] < -10 * dtol) || (dn_ok && d[j] > 10 * dtol)) opt_ok = false;
          }
          if (!opt_ok) continue;
        }
        LpResult r;
        r.status = SolveStatus::Optimal;
        r.iters = iters;
        r.x.assign(n, 0.0);
        double obj = f.obj_offset;
        for (int j = 0; j < n; ++j) {
          double v = vstat[j] == BASIC ? xb[bpos[j]] : nb_value(j);
          // Snap tiny bound violations left by tolerances.
          if (std::isfinite(vlb[j])) v = std::max(v, std::min(vlb[j], v + ftol));
          if (std::isfinite(vub[j])) v = std::min(v, std::max(vub[j], v - ftol));
          r.x[j] = v;
          obj += f.c[j] * v;
        }
        r.obj = obj;
        Eigen::VectorXd y;
        compute_phase2_duals(y);
        r.y.assign(y.data(), y.data() + m);
        return r;
      }
    }

    // FTRAN the entering column.
    alpha.setZero(m);
    for_col(q, [&](int i, double a) { alpha[i] = a; });
    ftran(alpha);

    // Ratio test. Basic values move at rate -sigma * alpha_i per unit step.
    const bool phase1 = !feasible;
    double span = vub[q] - vlb[q];  // may be inf
    double limit = std::isfinite(span) ? span : kInf;
    int leave = -1;          // row index of leaving variable, -1 -> bound flip
    std::int8_t leave_to = NB_LB;
    double best_alpha = 0.0;

    // Pass 1 (Harris): relaxed step.
    double relaxed = limit;
    for (int i = 0; i < m; ++i) {
      double a = alpha[i];
      if (std::abs(a) < kPivotTol) continue;
      double rate = -sigma * a;
      int j = basic[i];
      int gi = phase1 ? basic_infeas(i, nullptr) : 0;
      double step = kInf;
      if (gi == 0) {
        if (rate < 0.0 && std::isfinite(vlb[j]))
          step = (xb[i] - vlb[j] + ftol) / (-rate);
        else if (rate > 0.0 && std::isfinite(vub[j]))
          step = (vub[j] - xb[i] + ftol) / rate;
      } else if (gi < 0 && rate > 0.0) {
        step = (vlb[j] - xb[i] + ftol) / rate;
      } else if (gi > 0 && rate < 0.0) {
        step = (xb[i] - vub[j] + ftol) / (-rate);
      }
      relaxed = std::min(relaxed, step);
    }
    relaxed = std::max(relaxed, 0.0);

    // Pass 2: among blockers within the relaxed step, take the largest pivot.
    double chosen = limit;
    for (int i = 0; i < m; ++i) {
      double a = alpha[i];
      if (std::abs(a) < kPivotTol) continue;
      double rate = -sigma * a;
      int j = basic[i];
      int gi = phase1 ? basic_infeas(i, nullptr) : 0;
      double step = kInf;
      std::int8_t to = NB_LB;
      if (gi == 0) {
        if (rate < 0.0 && std::isfinite(vlb[j])) {
          step = (xb[i] - vlb[j]) / (-rate);
          to = NB_LB;
        } else if (rate > 0.0 && std::isfinite(vub[j])) {
          step = (vub[j] - xb[i]) / rate;
          to = NB_UB;
        }
      } else if (gi < 0 && rate > 0.0) {
        step = (vlb[j] - xb[i]) / rate;
        to = NB_LB;
      } else if (gi > 0 && rate < 0.0) {
        step = (xb[i] - vub[j]) / (-rate);
        to = NB_UB;
      }
      if (step == kInf || step > relaxed) continue;
      step = std::max(step, 0.0);
      bool better;
      if (bland)
        better = (leave < 0) || basic[i] < basic[leave];
      else
        better = (leave < 0) || std::abs(a) > best_alpha ||
                 (std::abs(a) == best_alpha && basic[i] < basic[leave]);
      if (better) {
        leave = i;
        leave_to = to;
        best_alpha = std::abs(a);
        chosen = step;
      }
    }

    if (leave < 0 && !std::isfinite(limit)) {
      if (phase1) return finish(SolveStatus::Error, "phase-1 step unbounded (numerical)");
      return finish(SolveStatus::Unbounded, "improving direction with no blocking bound");
    }

    double step = leave < 0 ? limit : chosen;
    step = std::max(step, 0.0);
    ++iters;
    if (step <= 1e-10) {
      if (++degen_streak > kBlandTrigger) bland = true;
    } else {
      degen_streak = 0;
      bland = false;
    }

    // Apply the step to basic values.
    if (step != 0.0) {
      for (int i = 0; i < m; ++i) {
        double a = alpha[i];
        if (a != 0.0) xb[i] -= sigma * step * a;
      }
    }

    if (leave < 0) {
      // Bound flip: entering variable crosses to its other bound.
      vstat[q] = (vstat[q] == NB_LB) ? NB_UB : NB_LB;
      continue;  // reduced costs unchanged
    }

    // Basis change.
    int r_var = basic[leave];
    double enter_val = nb_value(q) + sigma * step;
    double pivot = alpha[leave];
    if (std::abs(pivot) < kPivotTol) {
      // Numerically hopeless pivot: refactorize and retry this iteration.
      if (!factorize()) return finish(SolveStatus::Error, "refactorization failed");
      etas_since_factor = 0;
      compute_xb();
      d_valid = false;
      continue;
    }

    if (feasible && d_valid) {
      // Incremental pricing + Devex along the pivot row.
      rho.setZero(m);
      rho[leave] = 1.0;
      btran(rho);
      double theta_d = d[q] / pivot;
      double gamma_q = devex[q];
      for (int j = 0; j < nv; ++j) {
        if (vstat[j] == BASIC || j == q) continue;
        double apj = dot_col(j, rho);
        if (apj == 0.0) continue;
        d[j] -= theta_d * apj;
        double w = (apj / pivot) * (apj / pivot) * gamma_q;
        if (w > devex[j]) devex[j] = w;
      }
      d[r_var] = -theta_d;
      d[q] = 0.0;
      devex[r_var] = std::max(gamma_q / (pivot * pivot), 1.0);
    } else {
      d_valid = false;
    }

    vstat[q] = BASIC;
    vstat[r_var] = leave_to;
    basic[leave] = q;
    bpos[q] = leave;
    bpos[r_var] = -1;
    xb[leave] = enter_val;

    Impl::Eta e;
    e.p = leave;
    e.pivot = pivot;
    for (int i = 0; i < m; ++i)
      if (i != leave && std::abs(alpha[i]) > kDropTol) e.col.emplace_back(i, alpha[i]);
    etas.push_back(std::move(e));

    if (++etas_since_factor >= kRefactorEvery) {
      if (!factorize()) {
        slack_basis();
        if (!factorize()) return finish(SolveStatus::Error, "refactorization failed");
      }
      etas_since_factor = 0;
      compute_xb();
      d_valid = false;
      devex.assign(nv, 1.0);
    }
  }
}

}  // namespace gaslight::lp::detail
