#include "gaslight/lp.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <map>
#include <sstream>

#include "solver_core.hpp"

namespace gaslight::lp {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::GapLimit: return "gap-limit";
    case SolveStatus::IterLimit: return "iter-limit";
    case SolveStatus::Error: return "error";
  }
  return "unknown";
}

int Model::add_col(const std::string& id, double lb, double ub, double obj, ColKind kind) {
  if (id.empty()) throw Error(Error::Kind::Validation, "column with empty id");
  if (!col_index_.emplace(id, num_cols()).second)
    throw Error(Error::Kind::Validation, "duplicate column id: " + id);
  cols_.push_back(Column{id, lb, ub, obj, kind});
  return num_cols() - 1;
}

int Model::add_row(const std::string& id, Sense sense, double rhs,
                   std::vector<std::pair<int, double>> terms) {
  if (id.empty()) throw Error(Error::Kind::Validation, "row with empty id");
  if (!row_index_.emplace(id, num_rows()).second)
    throw Error(Error::Kind::Validation, "duplicate row id: " + id);
  rows_.push_back(Row{id, sense, rhs, std::move(terms)});
  return num_rows() - 1;
}

int Model::col(const std::string& id) const {
  int j = find_col(id);
  if (j < 0) throw Error(Error::Kind::Internal, "unknown column id: " + id);
  return j;
}

int Model::row(const std::string& id) const {
  int i = find_row(id);
  if (i < 0) throw Error(Error::Kind::Internal, "unknown row id: " + id);
  return i;
}

int Model::find_col(const std::string& id) const {
  auto it = col_index_.find(id);
  return it == col_index_.end() ? -1 : it->second;
}

int Model::find_row(const std::string& id) const {
  auto it = row_index_.find(id);
  return it == row_index_.end() ? -1 : it->second;
}

std::vector<int> Model::binary_cols() const {
  std::vector<int> out;
  for (int j = 0; j < num_cols(); ++j)
    if (cols_[j].kind == ColKind::Binary) out.push_back(j);
  return out;
}

bool Model::has_binaries() const {
  for (const auto& c : cols_)
    if (c.kind == ColKind::Binary) return true;
  return false;
}

void Model::validate() const {
  for (int j = 0; j < num_cols(); ++j) {
    const Column& c = cols_[j];
    if (std::isnan(c.lb) || std::isnan(c.ub) || !std::isfinite(c.obj))
      throw Error(Error::Kind::Validation, "non-finite data in column " + c.id);
    if (c.lb > c.ub)
      throw Error(Error::Kind::Validation, "empty bound interval on column " + c.id);
    if (c.kind == ColKind::Binary && (c.lb < 0.0 || c.ub > 1.0))
      throw Error(Error::Kind::Validation, "binary column " + c.id + " with bounds outside [0,1]");
  }
  for (int i = 0; i < num_rows(); ++i) {
    const Row& r = rows_[i];
    if (!std::isfinite(r.rhs))
      throw Error(Error::Kind::Validation, "non-finite rhs in row " + r.id);
    for (auto& [j, a] : r.terms) {
      if (j < 0 || j >= num_cols())
        throw Error(Error::Kind::Validation, "row " + r.id + " references unknown column index");
      if (!std::isfinite(a))
        throw Error(Error::Kind::Validation, "non-finite coefficient in row " + r.id);
    }
  }
}

double Solution::value(const Model& m, const std::string& id) const {
  int j = m.col(id);
  if (j >= static_cast<int>(col_value.size()))
    throw Error(Error::Kind::Internal, "solution has no value for column " + id);
  return col_value[j];
}

double Solution::dual(const Model& m, const std::string& id) const {
  int i = m.row(id);
  if (i >= static_cast<int>(row_dual.size()))
    throw Error(Error::Kind::Internal, "solution has no dual for row " + id);
  return row_dual[i];
}

double Solution::activity(const Model& m, int row) const {
  const Row& r = m.row_at(row);
  double a = 0.0;
  for (auto& [j, v] : r.terms) a += v * col_value[j];
  return a;
}

namespace detail {

namespace {
// Bit-exact hash key for duplicate-row detection.
struct RowKey {
  Sense sense;
  double rhs;
  std::vector<std::pair<int, double>> terms;  // canonical: sorted, combined, no zeros
  bool operator==(const RowKey& o) const {
    return sense == o.sense && rhs == o.rhs && terms == o.terms;
  }
};
struct RowKeyHash {
  static std::size_t mix(std::size_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
  static std::uint64_t dbits(double d) {
    std::uint64_t u;
    std::memcpy(&u, &d, sizeof(u));
    return u;
  }
  std::size_t operator()(const RowKey& k) const {
    std::size_t h = static_cast<std::size_t>(k.sense);
    h = mix(h, dbits(k.rhs));
    for (auto& [j, a] : k.terms) {
      h = mix(h, static_cast<std::uint64_t>(j));
      h = mix(h, dbits(a));
    }
    return h;
  }
};
}  // namespace

CompForm build_comp_form(const Model& model) {
  model.validate();
  CompForm f;
  const int nm = model.num_cols();
  const int mm = model.num_rows();
  f.col_map.assign(nm, -1);
  f.fixed_val.assign(nm, 0.0);
  f.row_map.assign(mm, -1);
  f.obj_offset = model.obj_offset;

  for (int j = 0; j < nm; ++j) {
    const Column& c = model.column(j);
    if (c.lb == c.ub) {
      f.fixed_val[j] = c.lb;
      f.obj_offset += c.obj * c.lb;
    } else {
      f.col_map[j] = f.n++;
      f.orig_col.push_back(j);
      f.c.push_back(c.obj);
      f.xl.push_back(c.lb);
      f.xu.push_back(c.ub);
      if (c.kind == ColKind::Binary) f.binary_cols.push_back(f.col_map[j]);
    }
  }

  // Rows: substitute fixed columns, canonicalize, drop duplicates/empties.
  std::unordered_map<RowKey, int, RowKeyHash> seen;
  std::vector<std::vector<std::pair<int, double>>> kept_terms;
  for (int i = 0; i < mm; ++i) {
    const Row& r = model.row_at(i);
    double rhs = r.rhs;
    std::map<int, double> acc;  // kept-col index -> coefficient (sorted)
    for (auto& [j, a] : r.terms) {
      if (a == 0.0) continue;
      if (f.col_map[j] < 0)
        rhs -= a * f.fixed_val[j];
      else
        acc[f.col_map[j]] += a;
    }
    RowKey key{r.sense, rhs, {}};
    key.terms.reserve(acc.size());
    for (auto& [j, a] : acc)
      if (a != 0.0) key.terms.emplace_back(j, a);

    if (key.terms.empty()) {
      // Constant row: check feasibility of 0 (sense) rhs.
      double tol = 1e-9 * (1.0 + std::abs(rhs));
      bool ok = (r.sense == Sense::LE && 0.0 <= rhs + tol) ||
                (r.sense == Sense::GE && 0.0 >= rhs - tol) ||
                (r.sense == Sense::EQ && std::abs(rhs) <= tol);
      if (!ok) {
        f.trivially_infeasible = true;
        f.infeasible_note = "row " + r.id + " is constant and violated";
      }
      continue;  // dropped either way; dual 0
    }
    auto it = seen.find(key);
    if (it != seen.end()) {
      f.row_map[i] = -1;  // duplicate: dropped, dual 0 (first occurrence keeps it)
      continue;
    }
    int k = f.m++;
    seen.emplace(std::move(key), k);
    f.orig_row.push_back(i);
    f.row_map[i] = k;
    // Recover terms from `acc` (key was moved; rebuild cheaply).
    std::vector<std::pair<int, double>> terms;
    terms.reserve(acc.size());
    for (auto& [j, a] : acc)
      if (a != 0.0) terms.emplace_back(j, a);
    kept_terms.push_back(std::move(terms));
    f.b.push_back(rhs);
    switch (r.sense) {
      case Sense::LE: f.sl.push_back(0.0); f.su.push_back(kInf); break;
      case Sense::GE: f.sl.push_back(-kInf); f.su.push_back(0.0); break;
      case Sense::EQ: f.sl.push_back(0.0); f.su.push_back(0.0); break;
    }
  }

  // Transpose kept rows into column-major storage.
  std::vector<int> count(f.n, 0);
  for (auto& terms : kept_terms)
    for (auto& [j, a] : terms) ++count[j];
  f.col_start.assign(f.n + 1, 0);
  for (int j = 0; j < f.n; ++j) f.col_start[j + 1] = f.col_start[j] + count[j];
  f.row_ind.assign(f.col_start[f.n], 0);
  f.a_val.assign(f.col_start[f.n], 0.0);
  std::vector<int> cursor(f.col_start.begin(), f.col_start.end() - 1);
  for (int i = 0; i < f.m; ++i)
    for (auto& [j, a] : kept_terms[i]) {
      f.row_ind[cursor[j]] = i;
      f.a_val[cursor[j]] = a;
      ++cursor[j];
    }
  return f;
}

Solution assemble_solution(const Model& model, const CompForm& f, const LpResult& r) {
  Solution s;
  s.status = r.status;
  s.simplex_iters = r.iters;
  s.message = r.message;
  if (r.status != SolveStatus::Optimal) return s;
  s.objective = r.obj;
  s.best_bound = r.obj;
  s.col_value.assign(model.num_cols(), 0.0);
  for (int j = 0; j < model.num_cols(); ++j)
    s.col_value[j] = f.col_map[j] < 0 ? f.fixed_val[j] : r.x[f.col_map[j]];
  if (!r.y.empty()) {
    s.row_dual.assign(model.num_rows(), 0.0);
    for (int i = 0; i < model.num_rows(); ++i)
      if (f.row_map[i] >= 0) s.row_dual[i] = r.y[f.row_map[i]];
  }
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Backend registry and convenience entry points.

namespace detail {
std::unique_ptr<SolverBackend> make_simplex_backend();  // branch_bound.cpp
std::unique_ptr<SolverBackend> make_dense_backend();    // dense_lp.cpp
}  // namespace detail

SolverBackend& backend(const std::string& name) {
  static std::unique_ptr<SolverBackend> simplex = detail::make_simplex_backend();
  static std::unique_ptr<SolverBackend> dense = detail::make_dense_backend();
  std::string pick = name;
  if (pick.empty()) {
    const char* env = std::getenv("GASLIGHT_SOLVER");
    pick = (env && *env) ? env : "simplex";
  }
  if (pick == "simplex") return *simplex;
  if (pick == "dense") return *dense;
  throw Error(Error::Kind::Solver,
              "unknown solver backend '" + pick + "' (available: simplex, dense)");
}

std::vector<std::string> backend_names() { return {"simplex", "dense"}; }

Solution solve_milp(const Model& m, const SolveOptions& opt) {
  return backend(opt.backend).solve_milp(m, opt);
}

Solution solve_lp(const Model& m, const SolveOptions& opt) {
  return backend(opt.backend).solve_lp(m, opt);
}

Solution solve_lp_fixed(const Model& m, const std::unordered_map<int, int>& assignment,
                        const SolveOptions& opt) {
  Model fixed = m;  // value copy; bounds mutated below
  for (int j = 0; j < fixed.num_cols(); ++j) {
    if (fixed.column(j).kind != ColKind::Binary) continue;
    auto it = assignment.find(j);
    if (it == assignment.end())
      throw Error(Error::Kind::Solver,
                  "binary column " + fixed.column(j).id + " missing from assignment");
    if (it->second != 0 && it->second != 1)
      throw Error(Error::Kind::Solver, "binary assignment must be 0 or 1");
    double v = static_cast<double>(it->second);
    fixed.column_mut(j).lb = v;
    fixed.column_mut(j).ub = v;
  }
  return backend(opt.backend).solve_lp(fixed, opt);
}

Solution solve_lp_fixed(const Model& m, const Solution& milp, const SolveOptions& opt) {
  std::unordered_map<int, int> assignment;
  for (int j : m.binary_cols()) {
    double v = milp.col_value.at(j);
    int r = v >= 0.5 ? 1 : 0;
    if (std::abs(v - r) > 1e-5)
      throw Error(Error::Kind::Solver,
                  "binary column " + m.column(j).id + " is fractional in the reference solution");
    assignment[j] = r;
  }
  return solve_lp_fixed(m, assignment, opt);
}

}  // namespace gaslight::lp
