// Export a Model in the widely used LP text format so solves can be inspected
// or replayed with external tooling while debugging.

#include <iomanip>
#include <sstream>

#include "gaslight/lp.hpp"

namespace gaslight::lp {

namespace {

void write_number(std::ostream& os, double v) {
  os << std::setprecision(17) << v;
}

void write_terms(std::ostream& os, const Model& m,
                 const std::vector<std::pair<int, double>>& terms) {
  bool first = true;
  for (auto& [j, a] : terms) {
    if (a == 0.0) continue;
    if (first) {
      if (a < 0.0) os << "- ";
      first = false;
    } else {
      os << (a < 0.0 ? " - " : " + ");
    }
    double mag = a < 0.0 ? -a : a;
    if (mag != 1.0) {
      write_number(os, mag);
      os << ' ';
    }
    os << m.column(j).id;
  }
  if (first) os << '0';
}

}  // namespace

std::string write_lp_format(const Model& m) {
  std::ostringstream os;
  os << "Minimize\n obj: ";
  std::vector<std::pair<int, double>> obj_terms;
  for (int j = 0; j < m.num_cols(); ++j)
    if (m.column(j).obj != 0.0) obj_terms.emplace_back(j, m.column(j).obj);
  write_terms(os, m, obj_terms);
  if (m.obj_offset != 0.0) {
    os << (m.obj_offset < 0.0 ? " - " : " + ");
    write_number(os, m.obj_offset < 0.0 ? -m.obj_offset : m.obj_offset);
  }
  os << "\nSubject To\n";
  for (int i = 0; i < m.num_rows(); ++i) {
    const Row& r = m.row_at(i);
    os << ' ' << r.id << ": ";
    write_terms(os, m, r.terms);
    switch (r.sense) {
      case Sense::LE: os << " <= "; break;
      case Sense::GE: os << " >= "; break;
      case Sense::EQ: os << " = "; break;
    }
    write_number(os, r.rhs);
    os << '\n';
  }
  os << "Bounds\n";
  for (int j = 0; j < m.num_cols(); ++j) {
    const Column& c = m.column(j);
    os << ' ';
    if (c.lb == -kInf && c.ub == kInf) {
      os << c.id << " free";
    } else {
      if (c.lb == -kInf)
        os << "-infinity";
      else
        write_number(os, c.lb);
      os << " <= " << c.id << " <= ";
      if (c.ub == kInf)
        os << "+infinity";
      else
        write_number(os, c.ub);
    }
    os << '\n';
  }
  bool any_bin = m.has_binaries();
  if (any_bin) {
    os << "Binaries\n";
    for (int j = 0; j < m.num_cols(); ++j)
      if (m.column(j).kind == ColKind::Binary) os << ' ' << m.column(j).id << '\n';
  }
  os << "End\n";
  return os.str();
}

}  // namespace gaslight::lp
