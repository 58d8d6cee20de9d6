#pragma once
// Backend-agnostic linear / mixed-binary model container and solver boundary.
//
// A Model is a list of named, bounded columns (continuous or binary) and named
// linear rows with a sense and right-hand side, minimized. Solvers plug in
// behind SolverBackend; the active backend is chosen per call, by option, or
// via the GASLIGHT_SOLVER environment variable.

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace gaslight {

// Project-wide error with a coarse kind so the CLI can map to exit codes.
class Error : public std::runtime_error {
 public:
  enum class Kind { Validation, Parse, Io, Infeasible, GapLimit, Solver, Internal };
  Error(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
  Kind kind;
};

namespace lp {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ColKind { Continuous, Binary };
enum class Sense { LE, EQ, GE };

enum class SolveStatus { Optimal, Infeasible, Unbounded, GapLimit, IterLimit, Error };

const char* to_string(SolveStatus s);

struct Column {
  std::string id;
  double lb = 0.0;
  double ub = kInf;
  double obj = 0.0;
  ColKind kind = ColKind::Continuous;
};

struct Row {
  std::string id;
  Sense sense = Sense::EQ;
  double rhs = 0.0;
  std::vector<std::pair<int, double>> terms;  // (column index, coefficient)
};

class Model {
 public:
  int add_col(const std::string& id, double lb, double ub, double obj,
              ColKind kind = ColKind::Continuous);
  int add_row(const std::string& id, Sense sense, double rhs,
              std::vector<std::pair<int, double>> terms);

  int col(const std::string& id) const;           // throws if unknown
  int row(const std::string& id) const;           // throws if unknown
  int find_col(const std::string& id) const;      // -1 if unknown
  int find_row(const std::string& id) const;      // -1 if unknown

  int num_cols() const { return static_cast<int>(cols_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  const Column& column(int j) const { return cols_[j]; }
  const Row& row_at(int i) const { return rows_[i]; }
  Column& column_mut(int j) { return cols_[j]; }

  std::vector<int> binary_cols() const;
  bool has_binaries() const;

  double obj_offset = 0.0;  // constant added to every objective value

  // Structural sanity: unique non-empty ids, finite coefficients, lb <= ub,
  // binary bounds inside [0,1], term indices in range. Throws Error.
  void validate() const;

 private:
  std::vector<Column> cols_;
  std::vector<Row> rows_;
  std::unordered_map<std::string, int> col_index_;
  std::unordered_map<std::string, int> row_index_;
};

struct SolveOptions {
  double mip_gap = 1e-6;    // relative optimality gap target
  double feas_tol = 1e-7;   // primal feasibility tolerance
  double int_tol = 1e-6;    // integrality tolerance on binaries
  long max_iters = 50'000'000;
  int max_nodes = 1'000'000;
  std::string backend;      // "", "simplex", "dense"; "" -> env or default
};

struct Solution {
  SolveStatus status = SolveStatus::Error;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double best_bound = std::numeric_limits<double>::quiet_NaN();  // MILP lower bound
  double gap = 0.0;              // achieved relative gap (MILP solves)
  std::vector<double> col_value;
  std::vector<double> row_dual;  // one per row; filled by LP solves, empty for MILP
  long simplex_iters = 0;
  int bb_nodes = 0;
  std::string message;

  bool optimal() const { return status == SolveStatus::Optimal; }
  double value(const Model& m, const std::string& id) const;
  double dual(const Model& m, const std::string& id) const;
  // Row activity a_i = sum_j A_ij x_j recomputed from col_value.
  double activity(const Model& m, int row) const;
};

class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual std::string name() const = 0;
  // Solve the continuous relaxation-as-given (binary columns treated as
  // continuous within their bounds). Fills duals.
  virtual Solution solve_lp(const Model& m, const SolveOptions& opt) = 0;
  // Solve with binary columns integral.
  virtual Solution solve_milp(const Model& m, const SolveOptions& opt) = 0;
};

// Registry. name "" resolves GASLIGHT_SOLVER, then "simplex".
SolverBackend& backend(const std::string& name = "");
std::vector<std::string> backend_names();

// Convenience entry points (pick backend from opt/env).
Solution solve_milp(const Model& m, const SolveOptions& opt = {});
Solution solve_lp(const Model& m, const SolveOptions& opt = {});

// Fix every binary column to the given 0/1 value (column index -> value),
// relax to continuous and solve the LP; duals cover every row. Throws Error
// if a binary column is missing from the assignment.
Solution solve_lp_fixed(const Model& m, const std::unordered_map<int, int>& binary_assignment,
                        const SolveOptions& opt = {});
// Same, taking the rounded binary values from a prior MILP solution.
Solution solve_lp_fixed(const Model& m, const Solution& milp, const SolveOptions& opt = {});

// Industry text format (LP file) for external inspection / debugging.
std::string write_lp_format(const Model& m);

}  // namespace lp
}  // namespace gaslight
