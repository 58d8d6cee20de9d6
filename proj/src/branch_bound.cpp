// Depth-first branch-and-bound over binary columns, warm-starting the sparse
// simplex from the parent basis at every node. Exact up to the configured
// relative gap; deterministic (index-ordered tie breaking, LIFO stack).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

#include "solver_core.hpp"

namespace gaslight::lp::detail {

namespace {

class SimplexBackend : public SolverBackend {
 public:
  std::string name() const override { return "simplex"; }

  Solution solve_lp(const Model& model, const SolveOptions& opt) override {
    CompForm f = build_comp_form(model);
    if (f.trivially_infeasible) {
      Solution s;
      s.status = SolveStatus::Infeasible;
      s.message = f.infeasible_note;
      return s;
    }
    Simplex sx(f);
    Basis basis;
    LpResult r = sx.solve(f.xl, f.xu, opt, &basis);
    Solution s = assemble_solution(model, f, r);
    // Rows dropped at compile time (constant or duplicate) have dual 0. When
    // every row was dropped the simplex returns no dual vector at all, but an
    // optimal LP solution must still carry one entry per model row.
    if (s.status == SolveStatus::Optimal && s.row_dual.empty())
      s.row_dual.assign(model.num_rows(), 0.0);
    return s;
  }

  Solution solve_milp(const Model& model, const SolveOptions& opt) override {
    CompForm f = build_comp_form(model);
    if (f.trivially_infeasible) {
      Solution s;
      s.status = SolveStatus::Infeasible;
      s.message = f.infeasible_note;
      return s;
    }
    if (f.binary_cols.empty()) return solve_lp(model, opt);  // plain LP, with duals

    Simplex sx(f);

    struct Node {
      std::vector<double> xl, xu;
      Basis basis;
      double bound;
      int depth;
    };
    std::vector<Node> stack;
    std::multiset<double> open_bounds;

    double best_obj = kInf;
    std::vector<double> best_x;
    double pruned_lb = kInf;  // tightest bound discarded by the gap cut
    long total_iters = 0;
    int nodes = 0;
    const double tiny = 1e-11;
    const bool trace = std::getenv("GASLIGHT_BB_TRACE") != nullptr;

    auto frac_of = [&](const std::vector<double>& x, int j) {
      double v = x[j];
      return std::abs(v - std::round(v));
    };

    // Fix-and-propagate dive from an LP-feasible point: repeatedly pin the
    // most nearly integral fractional binary to its rounding (flipping once
    // when that kills the LP) until every binary is integral, then pin them
    // all and record the incumbent. Depth-first search alone can wander for
    // thousands of nodes before its first integral leaf when the binaries
    // gate big-M rows; one guided dive costs a few dozen warm-started
    // re-solves and arms the bound cut from the start.
    auto dive = [&](const LpResult& start, std::vector<double> xl, std::vector<double> xu,
                    Basis basis) {
      LpResult r = start;
      int budget = 4 * static_cast<int>(f.binary_cols.size()) + 16;
      while (budget > 0) {
        // Pin in column order: stage-coupled binaries come before the
        // per-scenario blocks, so a pin that conflicts with an earlier one is
        // discovered right next to its cause, where the single flip repairs it.
        int pick = -1;
        for (int j : f.binary_cols) {
          if (xl[j] == xu[j]) continue;
          if (frac_of(r.x, j) > tiny) {
            pick = j;
            break;
          }
        }
        if (pick < 0) {
          // All binaries integral: pin the lot so the incumbent is exact.
          std::vector<double> pl = xl, pu = xu;
          for (int j : f.binary_cols) pl[j] = pu[j] = std::round(r.x[j]);
          LpResult rp = sx.solve(pl, pu, opt, &basis);
          total_iters += rp.iters;
          if (rp.status == SolveStatus::Optimal && rp.obj < best_obj) {
            best_obj = rp.obj;
            best_x = rp.x;
            if (trace) std::fprintf(stderr, "[bb] dive incumbent %.6f at node %d\n", best_obj, nodes);
          } else if (trace) {
            std::fprintf(stderr, "[bb] dive leaf rejected (status=%d obj=%.6f best=%.6f)\n",
                         static_cast<int>(rp.status), rp.obj, best_obj);
          }
          return;
        }
        double v = std::round(r.x[pick]);
        xl[pick] = xu[pick] = v;
        LpResult rn = sx.solve(xl, xu, opt, &basis);
        total_iters += rn.iters;
        --budget;
        if (rn.status != SolveStatus::Optimal) {
          xl[pick] = xu[pick] = 1.0 - v;
          rn = sx.solve(xl, xu, opt, &basis);
          total_iters += rn.iters;
          --budget;
          if (rn.status != SolveStatus::Optimal) {
            if (trace) std::fprintf(stderr, "[bb] dive dead end (budget %d left)\n", budget);
            return;  // dead end; keep searching
          }
        }
        r = std::move(rn);
        if (r.obj >= best_obj) return;  // dominated by the current incumbent
      }
      if (trace) std::fprintf(stderr, "[bb] dive budget exhausted\n");
    };

    // Root node.
    stack.push_back(Node{f.xl, f.xu, Basis{}, -kInf, 0});
    open_bounds.insert(-kInf);

    std::string abort_msg;
    SolveStatus abort_status = SolveStatus::Optimal;

    while (!stack.empty()) {
      if (nodes >= opt.max_nodes) {
        abort_status = SolveStatus::GapLimit;
        abort_msg = "node limit reached";
        break;
      }
      Node node = std::move(stack.back());
      stack.pop_back();
      open_bounds.erase(open_bounds.find(node.bound));

      double cut = opt.mip_gap * std::max(1.0, std::abs(best_obj));
      if (best_obj < kInf && node.bound >= best_obj - cut) {
        pruned_lb = std::min(pruned_lb, node.bound);
        continue;
      }

      ++nodes;
      LpResult r = sx.solve(node.xl, node.xu, opt, &node.basis);
      total_iters += r.iters;
      if (trace && nodes % 2048 == 0)
        std::fprintf(stderr, "[bb] node %d depth %d open %zu best %.6f lowbound %.6f iters %ld\n",
                     nodes, node.depth, stack.size(), best_obj,
                     open_bounds.empty() ? node.bound : *open_bounds.begin(), total_iters);

      if (r.status == SolveStatus::Infeasible) continue;
      if (r.status == SolveStatus::Unbounded) {
        Solution s;
        s.status = SolveStatus::Unbounded;
        s.message = "relaxation unbounded";
        s.bb_nodes = nodes;
        s.simplex_iters = total_iters;
        return s;
      }
      if (r.status != SolveStatus::Optimal) {
        abort_status = r.status;
        abort_msg = r.message;
        break;
      }
      if (best_obj < kInf && r.obj >= best_obj - cut) {
        pruned_lb = std::min(pruned_lb, r.obj);
        continue;
      }

      // Dive at the root, and again from the current node now and then while
      // no incumbent exists (deep models can defeat the root dive alone).
      if (nodes == 1 || (best_x.empty() && nodes % 256 == 0))
        dive(r, node.xl, node.xu, node.basis);

      // First fractional binary in column order. Stochastic models lay out
      // the coupling stage before the per-scenario blocks, so lexicographic
      // branching settles the shared binaries first and keeps each conflict
      // inside the block that caused it; most-fractional branching interleaves
      // blocks and pushes infeasibility detection tens of levels past its
      // origin.
      int branch_col = -1;
      for (int j : f.binary_cols) {
        if (frac_of(r.x, j) > opt.int_tol) {
          branch_col = j;
          break;
        }
      }

      if (branch_col < 0) {
        // Integral candidate. If any binary is off-bound by more than noise,
        // re-solve with binaries pinned so the incumbent is exactly feasible.
        bool exact = true;
        for (int j : f.binary_cols)
          if (frac_of(r.x, j) > tiny) exact = false;
        if (!exact) {
          Node pinned = node;
          for (int j : f.binary_cols) {
            double v = std::round(r.x[j]);
            pinned.xl[j] = v;
            pinned.xu[j] = v;
          }
          LpResult rp = sx.solve(pinned.xl, pinned.xu, opt, &pinned.basis);
          total_iters += rp.iters;
          if (rp.status != SolveStatus::Optimal) continue;  // noise candidate; drop
          r = std::move(rp);
        }
        if (r.obj < best_obj) {
          best_obj = r.obj;
          best_x = r.x;
          if (trace) std::fprintf(stderr, "[bb] leaf incumbent %.6f at node %d\n", best_obj, nodes);
        }
        continue;
      }

      // Children: explore the nearer rounding first (LIFO: push it last).
      double v = r.x[branch_col];
      int child_depth = node.depth + 1;
      Node far = node;
      Node near = std::move(node);
      far.bound = near.bound = r.obj;
      far.depth = near.depth = child_depth;
      if (v >= 0.5) {
        far.xu[branch_col] = 0.0;
        far.xl[branch_col] = 0.0;
        near.xl[branch_col] = 1.0;
        near.xu[branch_col] = 1.0;
      } else {
        far.xl[branch_col] = 1.0;
        far.xu[branch_col] = 1.0;
        near.xu[branch_col] = 0.0;
        near.xl[branch_col] = 0.0;
      }
      open_bounds.insert(far.bound);
      open_bounds.insert(near.bound);
      stack.push_back(std::move(far));
      stack.push_back(std::move(near));
    }

    Solution s;
    s.bb_nodes = nodes;
    s.simplex_iters = total_iters;
    if (best_x.empty()) {
      if (!abort_msg.empty()) {
        s.status = abort_status == SolveStatus::GapLimit ? SolveStatus::IterLimit : abort_status;
        s.message = abort_msg.empty() ? "search aborted without incumbent" : abort_msg;
      } else {
        s.status = SolveStatus::Infeasible;
        s.message = "no feasible binary assignment";
      }
      return s;
    }

    double global_lb = std::min(best_obj, pruned_lb);
    for (double b : open_bounds) global_lb = std::min(global_lb, b);
    if (!stack.empty())
      for (const Node& nd : stack) global_lb = std::min(global_lb, nd.bound);
    if (!std::isfinite(global_lb)) global_lb = best_obj;  // -inf root bound, nothing open

    LpResult lr;
    lr.status = SolveStatus::Optimal;
    lr.obj = best_obj;
    lr.x = best_x;
    lr.iters = total_iters;
    Solution out = assemble_solution(model, f, lr);
    out.bb_nodes = nodes;
    out.best_bound = global_lb;
    out.gap = std::max(0.0, (best_obj - global_lb) / std::max(1.0, std::abs(best_obj)));
    if (!abort_msg.empty()) {
      out.status = SolveStatus::GapLimit;
      out.message = abort_msg;
    }
    return out;
  }
};

}  // namespace

std::unique_ptr<SolverBackend> make_simplex_backend() {
  return std::make_unique<SimplexBackend>();
}

}  // namespace gaslight::lp::detail
