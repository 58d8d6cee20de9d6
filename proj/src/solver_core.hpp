#pragma once
// Internal solver machinery shared by the simplex backend and branch-and-bound.
// Not installed; nothing outside src/ includes this.
//
// Computational form: min c'x + offset  s.t.  A x + s = b, with column bounds
// on x and sense-derived bounds on the logical s. Light presolve: columns with
// lb == ub are substituted out, exact-duplicate rows and empty rows dropped.

#include <cstdint>
#include <vector>

#include "gaslight/lp.hpp"

namespace gaslight::lp::detail {

struct CompForm {
  int m = 0;  // rows kept
  int n = 0;  // structural columns kept
  // Column-major sparse A over kept structural columns.
  std::vector<int> col_start;  // size n+1
  std::vector<int> row_ind;
  std::vector<double> a_val;
  std::vector<double> c;       // size n
  std::vector<double> xl, xu;  // size n (branch-and-bound mutates copies)
  std::vector<double> sl, su;  // size m, logical bounds from row sense
  std::vector<double> b;       // size m, rhs after substitution
  double obj_offset = 0.0;     // model offset + fixed-column contribution

  std::vector<int> orig_col;      // kept col -> model col
  std::vector<int> col_map;       // model col -> kept col or -1 (fixed)
  std::vector<double> fixed_val;  // model col -> value when fixed (else 0)
  std::vector<int> row_map;       // model row -> kept row or -1 (dropped)
  std::vector<int> orig_row;      // kept row -> model row (first occurrence)
  std::vector<int> binary_cols;   // kept cols that are binary in the model

  bool trivially_infeasible = false;
  std::string infeasible_note;
};

// relax_binaries: binary columns become continuous within their current bounds
// (always the case in computational form; integrality is enforced by search).
CompForm build_comp_form(const Model& m);

// Warm-start snapshot. vstat is indexed by variable (n structurals, then m
// logicals): 0 = nonbasic at lower, 1 = nonbasic at upper, 2 = basic,
// 3 = nonbasic free at zero.
struct Basis {
  std::vector<std::int8_t> vstat;
  std::vector<int> basic;  // row -> variable index
  bool valid() const { return !vstat.empty(); }
};

struct LpResult {
  SolveStatus status = SolveStatus::Error;
  double obj = 0.0;              // includes obj_offset
  std::vector<double> x;         // size n (kept structurals)
  std::vector<double> y;         // size m (kept row duals)
  long iters = 0;
  std::string message;
};

class Simplex {
 public:
  explicit Simplex(const CompForm& f);
  ~Simplex();

  // Solve with the given structural bounds (same length as f.xl). If basis is
  // valid it is used as a warm start and updated in place with the final basis.
  LpResult solve(const std::vector<double>& xl, const std::vector<double>& xu,
                 const SolveOptions& opt, Basis* basis);

 private:
  struct Impl;
  Impl* impl_;
};

// Map a computational-form LP result back onto the original model layout.
Solution assemble_solution(const Model& model, const CompForm& f, const LpResult& r);

}  // namespace gaslight::lp::detail
