#include "gaslight/gas_network.hpp"

#include <cassert>
#include <cmath>

namespace gaslight {

namespace {
// Minimum pressure separation for a direction to count as usable and for the
// strict high > low gap of every linearization point.
constexpr double kPressureGap = 1e-6;
}  // namespace

double weymouth_flow(double flow_const, double pr_high, double pr_low) {
  return flow_const * std::sqrt(pr_high * pr_high - pr_low * pr_low);
}

std::vector<PressurePair> pressure_points(double send_min, double send_max, double recv_min,
                                          double recv_max, int count) {
  (void)recv_max;  // the receiving ceiling does not restrict where planes touch
  std::vector<PressurePair> pts;
  double lo = std::max(send_min, recv_min + kPressureGap);
  if (send_max <= lo) return pts;  // this direction can never flow
  pts.reserve(count);
  for (int k = 1; k <= count; ++k) {
    PressurePair pt;
    pt.high = lo + (send_max - lo) * k / count;
    pt.low = recv_min + (pt.high - recv_min) * (k - 1) / count;
    pts.push_back(pt);
  }
  return pts;
}

OaPlane oa_plane(double flow_const, const PressurePair& pt) {
  double root = std::sqrt(pt.high * pt.high - pt.low * pt.low);
  OaPlane p;
  p.ki = flow_const * pt.high / root;
  p.ko = flow_const * pt.low / root;
  return p;
}

PipeGeometry pipe_geometry(const Pipeline& pipe, const GasNode& from, const GasNode& to,
                           int oa_points) {
  PipeGeometry geo;
  auto fill = [&](DirectionGeometry& dir, const GasNode& send, const GasNode& recv) {
    dir.points = pressure_points(send.pr_min, send.pr_max, recv.pr_min, recv.pr_max, oa_points);
    dir.feasible = !dir.points.empty();
    for (const PressurePair& pt : dir.points) dir.planes.push_back(oa_plane(pipe.flow_const, pt));
    if (dir.feasible)
      geo.flow_cap =
          std::max(geo.flow_cap, weymouth_flow(pipe.flow_const, send.pr_max, recv.pr_min));
    for (const OaPlane& pl : dir.planes)
      geo.oa_cap = std::max(geo.oa_cap, pl.ki * send.pr_max + pl.ko * recv.pr_max);
  };
  fill(geo.fwd, from, to);
  fill(geo.rev, to, from);
  geo.linepack_const = pipe.linepack_const;
  geo.lp_min = pipe.linepack_const * (from.pr_min + to.pr_min) / 2.0;
  geo.lp_max = pipe.linepack_const * (from.pr_max + to.pr_max) / 2.0;
  return geo;
}

BigM compute_big_m(const GasGrid& gas, int oa_points) {
  BigM mm;
  for (const Pipeline& pipe : gas.pipelines) {
    const GasNode& a = gas.nodes[gas.node_index(pipe.from)];
    const GasNode& b = gas.nodes[gas.node_index(pipe.to)];
    PipeGeometry geo = pipe_geometry(pipe, a, b, oa_points);
    mm.flow = std::max(mm.flow, geo.flow_cap);
    mm.oa = std::max(mm.oa, geo.oa_cap);
  }
  assert(mm.oa >= mm.flow);
  return mm;
}

BigM effective_big_m(const GasGrid& gas, const RunConfig& cfg) {
  BigM mm = compute_big_m(gas, cfg.oa_points);
  if (cfg.big_m_flow > 0.0) mm.flow = cfg.big_m_flow;
  if (cfg.big_m_oa > 0.0) mm.oa = cfg.big_m_oa;
  return mm;
}

PipeVars add_pipe_block(lp::Model& m, const std::string& prefix, const PipeGeometry& geo,
                        const BigM& mm, int pr_from, int pr_to, std::optional<int> h_prev,
                        double h_init, bool steady_state) {
  using lp::ColKind;
  using lp::Sense;
  const double inf = lp::kInf;
  // Clamp the system constants to this pipe's own geometry: any constant at
  // least the pipe's physical maximum keeps every reachable state feasible,
  // and the smaller the constant the tighter the continuous relaxation.
  const double mflow = std::min(mm.flow, geo.flow_cap);
  const double moa = std::min(mm.oa, geo.oa_cap);
  PipeVars v;
  v.qsig_fwd = m.add_col(prefix + ".qsig_fwd", -inf, inf, 0.0);
  v.qsig_rev = m.add_col(prefix + ".qsig_rev", -inf, inf, 0.0);
  v.qplus = m.add_col(prefix + ".qplus", 0.0, mflow, 0.0);
  v.qminus = m.add_col(prefix + ".qminus", 0.0, mflow, 0.0);
  // One impossible direction pins the binary (both can never be impossible
  // since each node's band is nonempty).
  double ylb = 0.0, yub = 1.0;
  if (!geo.fwd.feasible) yub = 0.0;
  if (!geo.rev.feasible) ylb = 1.0;
  v.y = m.add_col(prefix + ".y", ylb, yub, 0.0, ColKind::Binary);
  v.qin_fwd = m.add_col(prefix + ".qin_fwd", 0.0, 2.0 * mflow, 0.0);
  v.qout_fwd = m.add_col(prefix + ".qout_fwd", 0.0, 2.0 * mflow, 0.0);
  v.qin_rev = m.add_col(prefix + ".qin_rev", 0.0, 2.0 * mflow, 0.0);
  v.qout_rev = m.add_col(prefix + ".qout_rev", 0.0, 2.0 * mflow, 0.0);
  v.h = m.add_col(prefix + ".h", geo.lp_min, geo.lp_max, 0.0);

  // Signed flows and direction switching.
  m.add_row(prefix + ".sigdef_fwd", Sense::EQ, 0.0, {{v.qsig_fwd, 1.0}, {v.qplus, -1.0}, {v.qminus, 1.0}});
  m.add_row(prefix + ".sigdef_rev", Sense::EQ, 0.0, {{v.qsig_rev, 1.0}, {v.qplus, 1.0}, {v.qminus, -1.0}});
  m.add_row(prefix + ".dircap_fwd", Sense::LE, 0.0, {{v.qplus, 1.0}, {v.y, -mflow}});
  m.add_row(prefix + ".dircap_rev", Sense::LE, mflow, {{v.qminus, 1.0}, {v.y, mflow}});

  // Tangent planes, each emitted twice (the mirror restates the same cut for
  // the opposite end's bookkeeping; duplicates are collapsed in presolve).
  // Each plane gets the smallest constant that keeps its row slack while the
  // direction is off: with the magnitude pinned to zero the row only needs to
  // absorb ko * pr_recv - ki * pr_send at the worst corner of the pressure
  // bands, which is far below the all-positive cap and leaves fractional
  // binaries much less room to dodge the envelope.
  const double pf_lb = m.column(pr_from).lb, pf_ub = m.column(pr_from).ub;
  const double pt_lb = m.column(pr_to).lb, pt_ub = m.column(pr_to).ub;
  for (std::size_t k = 0; k < geo.fwd.planes.size(); ++k) {
    const OaPlane& pl = geo.fwd.planes[k];
    const double mk = std::min(moa, pl.ko * pt_ub - pl.ki * pf_lb);
    std::vector<std::pair<int, double>> terms = {
        {v.qplus, 1.0}, {pr_from, -pl.ki}, {pr_to, pl.ko}, {v.y, mk}};
    std::string tag = std::to_string(k + 1);
    m.add_row(prefix + ".oa_fwd." + tag, Sense::LE, mk, terms);
    m.add_row(prefix + ".oa_fwd_mirror." + tag, Sense::LE, mk, terms);
  }
  for (std::size_t k = 0; k < geo.rev.planes.size(); ++k) {
    const OaPlane& pl = geo.rev.planes[k];
    const double mk = std::min(moa, pl.ko * pf_ub - pl.ki * pt_lb);
    std::vector<std::pair<int, double>> terms = {
        {v.qminus, 1.0}, {pr_to, -pl.ki}, {pr_from, pl.ko}, {v.y, -mk}};
    std::string tag = std::to_string(k + 1);
    m.add_row(prefix + ".oa_rev." + tag, Sense::LE, 0.0, terms);
    m.add_row(prefix + ".oa_rev_mirror." + tag, Sense::LE, 0.0, terms);
  }

  // End flows average to the directed magnitude.
  m.add_row(prefix + ".avg_fwd", Sense::EQ, 0.0,
            {{v.qplus, 2.0}, {v.qin_fwd, -1.0}, {v.qout_fwd, -1.0}});
  m.add_row(prefix + ".avg_rev", Sense::EQ, 0.0,
            {{v.qminus, 2.0}, {v.qin_rev, -1.0}, {v.qout_rev, -1.0}});
  if (steady_state) {
    m.add_row(prefix + ".ss_fwd", Sense::EQ, 0.0, {{v.qin_fwd, 1.0}, {v.qout_fwd, -1.0}});
    m.add_row(prefix + ".ss_rev", Sense::EQ, 0.0, {{v.qin_rev, 1.0}, {v.qout_rev, -1.0}});
  }

  // Linepack tracks average end pressure and accumulates net inflow.
  double half_kh = geo.linepack_const / 2.0;
  m.add_row(prefix + ".lpdef", Sense::EQ, 0.0,
            {{v.h, 1.0}, {pr_from, -half_kh}, {pr_to, -half_kh}});
  std::vector<std::pair<int, double>> bal = {{v.h, 1.0},      {v.qin_fwd, -1.0},
                                             {v.qin_rev, -1.0}, {v.qout_fwd, 1.0},
                                             {v.qout_rev, 1.0}};
  double rhs = h_init;
  if (h_prev) {
    bal.push_back({*h_prev, -1.0});
    rhs = 0.0;
  }
  m.add_row(prefix + ".lpbal", Sense::EQ, rhs, bal);
  return v;
}

int add_pressure_col(lp::Model& m, const std::string& prefix, const GasNode& node) {
  return m.add_col(prefix + ".pr", node.pr_min, node.pr_max, 0.0);
}

int add_compressor_row(lp::Model& m, const std::string& prefix, const Compressor& comp,
                       int pr_from, int pr_to) {
  return m.add_row(prefix + ".boost", lp::Sense::LE, 0.0,
                   {{pr_to, 1.0}, {pr_from, -comp.factor}});
}

}  // namespace gaslight
