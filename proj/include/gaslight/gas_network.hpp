#pragma once
// Gas-network building blocks: the steady-flow pressure/flow relation, its
// outer approximation by tangent planes, derivation of safe big-M constants,
// and the per-pipeline column/row block shared by every market model.
//
// Conventions for a pipeline declared from node `m` to node `u`:
//   * "forward" moves gas m -> u and requires pr_m > pr_u; "reverse" mirrors.
//   * The direction binary y is 1 when forward is active, 0 when reverse is.
//   * Directed magnitudes qplus (forward) and qminus (reverse) are split from
//     the signed flows; per-direction end flows (in at the sending end, out at
//     the receiving end) average to the directed magnitude and their
//     difference accumulates in the linepack column h.

#include <optional>
#include <string>
#include <vector>

#include "gaslight/lp.hpp"
#include "gaslight/system.hpp"

namespace gaslight {

// Steady flow through a pipe with the given flow constant when the sending
// end sits at pr_high and the receiving end at pr_low (pr_high >= pr_low).
double weymouth_flow(double flow_const, double pr_high, double pr_low);

// One linearization point: a sending-end / receiving-end pressure pair with
// pt.high strictly above pt.low.
struct PressurePair {
  double high = 0.0;
  double low = 0.0;
};

// Tangent plane at a pressure pair: flow <= ki * pr_send - ko * pr_recv.
// Touches the Weymouth surface exactly at the pair and over-estimates it
// everywhere else on the feasible (pr_send >= pr_recv) region.
struct OaPlane {
  double ki = 0.0;
  double ko = 0.0;
};

// Linearization points for one direction with the given sending / receiving
// pressure bands. Returns `count` pairs spreading the tangent slopes from the
// receiving floor up to the sending ceiling, every pair separated by a strict
// gap. Returns an empty vector when the direction cannot flow at all
// (send_max does not exceed recv_min).
std::vector<PressurePair> pressure_points(double send_min, double send_max, double recv_min,
                                          double recv_max, int count);

OaPlane oa_plane(double flow_const, const PressurePair& pt);

struct DirectionGeometry {
  bool feasible = false;
  std::vector<PressurePair> points;
  std::vector<OaPlane> planes;
};

struct PipeGeometry {
  DirectionGeometry fwd, rev;
  double linepack_const = 0.0;
  double lp_min = 0.0;    // linepack consistent with both ends at their floor
  double lp_max = 0.0;    // ... both ends at their ceiling
  double flow_cap = 0.0;  // largest physically possible directed flow
  double oa_cap = 0.0;    // keeps this pipe's disabled tangent rows slack
};

PipeGeometry pipe_geometry(const Pipeline& pipe, const GasNode& from, const GasNode& to,
                           int oa_points);

// System-wide big-M pair: `flow` caps every directed flow magnitude, `oa`
// deactivates the tangent rows of whichever direction is switched off.
// Both derived from the pressure bands; oa >= flow always holds. Within a
// pipe block each constant is clamped to the pipe's own geometry cap, which
// tightens the relaxation without excluding any physically possible state.
struct BigM {
  double flow = 0.0;
  double oa = 0.0;
};

BigM compute_big_m(const GasGrid& gas, int oa_points);

// compute_big_m with positive config overrides applied.
BigM effective_big_m(const GasGrid& gas, const RunConfig& cfg);

// Column handles created by add_pipe_block.
struct PipeVars {
  int qsig_fwd = -1;  // signed flow as seen from the declared direction (free)
  int qsig_rev = -1;  // its negation (free)
  int qplus = -1;     // forward magnitude in [0, M]
  int qminus = -1;    // reverse magnitude in [0, M]
  int y = -1;         // direction binary, fixed when one direction is impossible
  int qin_fwd = -1;   // gas entering at the sending end while forward
  int qout_fwd = -1;  // gas leaving at the receiving end while forward
  int qin_rev = -1;   // gas entering at the sending end while reverse
  int qout_rev = -1;  // gas leaving at the receiving end while reverse
  int h = -1;         // linepack
};

// Emits the full one-pipe / one-period block into `m`, with every column and
// row id prefixed by `prefix` (e.g. "da.P1.t3"). `pr_from` / `pr_to` are the
// pressure columns of the two ends for the same period. `h_prev` links the
// linepack balance to the previous period; when absent the balance starts
// from the constant `h_init`. With `steady_state` set, entering and leaving
// flows are pinned equal per direction.
//
// Row layout per block (d = points per feasible direction):
//   sigdef_fwd, sigdef_rev   : signed flows vs directed magnitudes
//   dircap_fwd, dircap_rev   : magnitudes switched by the direction binary
//   oa_fwd.k / oa_fwd_mirror.k, oa_rev.k / oa_rev_mirror.k : tangent planes
//   avg_fwd, avg_rev         : end flows average to the magnitude
//   ss_fwd, ss_rev           : steady-state pinning (only when requested)
//   lpdef                    : linepack vs average end pressure
//   lpbal                    : linepack continuity
PipeVars add_pipe_block(lp::Model& m, const std::string& prefix, const PipeGeometry& geo,
                        const BigM& mm, int pr_from, int pr_to, std::optional<int> h_prev,
                        double h_init, bool steady_state);

// Pressure column for one node / period: bounds are the node's band.
int add_pressure_col(lp::Model& m, const std::string& prefix, const GasNode& node);

// Pressure-ratio coupling of a compressor: discharge <= factor * suction.
int add_compressor_row(lp::Model& m, const std::string& prefix, const Compressor& comp,
                       int pr_from, int pr_to);

}  // namespace gaslight
