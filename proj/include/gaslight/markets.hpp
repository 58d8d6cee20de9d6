#pragma once
// Market-clearing designs for the coupled electricity / natural-gas system.
//
// Three designs are provided over the same physical model:
//   * SequentialDecoupled — electricity cleared first with gas-fired units
//     bidding derived fuel-indexed offers, then gas; balancing re-dispatches
//     each system separately per wind realization, with a curtailment loop
//     that caps gas-fired redispatch whenever it sheds residential gas load.
//   * SequentialCoupled — one day-ahead clearing of both carriers at forecast
//     wind, then one coupled re-dispatch per realization.
//   * StochasticCoupled — a two-stage program choosing the day-ahead position
//     that minimizes expected dispatch + re-dispatch cost over all scenarios.
//
// Every clearing is a mixed-binary model (binaries: pipeline flow direction).
// Prices are the duals of the nodal balance rows of the continuous model
// re-solved with the optimal directions fixed; the re-solve must reproduce
// the mixed-binary objective to 1e-6 relative or an error is raised.
//
// Column / row naming (t is 1-based; <u> unit, <j> farm, <n> bus, <l> line,
// <k> producer, <s> storage, <m> gas node, <z> pipeline, <c> compressor):
//   day-ahead columns  p.<u>.t, w.<j>.t, th.<n>.t, f.<l>.t, g.<k>.t,
//                      gin.<s>.t, gout.<s>.t, e.<s>.t, x.<n>.t (ideal shift),
//                      nd.<m>.t.pr, pl.<z>.t.* (pipe block)
//   day-ahead rows     elbal.<n>.t, fdef.<l>.t, gasbal.<m>.t, ebal.<s>.t,
//                      cmp.<c>.t.boost, lpterm, xnet.<n>
//   balancing columns  dp.<u>.t, pu.<u>.t, pd.<u>.t, wsp.<j>.t, she.<n>.t,
//                      thr.<n>.t, fr.<l>.t, gu.<k>.t, gd.<k>.t, rgin.<s>.t,
//                      rgout.<s>.t, re.<s>.t, shg.<m>.t, ndr.<m>.t.pr,
//                      plr.<z>.t.*
//   balancing rows     dpdef.<u>.t, hru/hrd.<u>.t (stochastic headroom),
//                      elbal_rt.<n>.t, fdef_rt.<l>.t, gasbal_rt.<m>.t,
//                      ebal_rt.<s>.t, phru/phrd.<k>.t, cmpr.<c>.t.boost,
//                      lpterm_rt
// In the stochastic program every balancing name is prefixed "s.<scenario>.".

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gaslight/lp.hpp"
#include "gaslight/system.hpp"

namespace gaslight {

enum class Design { SequentialDecoupled, SequentialCoupled, StochasticCoupled };
const char* to_string(Design d);

using Series = std::vector<double>;               // one value per period
using SeriesMap = std::map<std::string, Series>;  // element id -> series

// Energy and regulation offers of gas-fired units, $/MWh per unit per period.
// Derived from day-ahead gas prices (see derive_gfpp_offers) or hand-supplied.
struct GfppOffers {
  SeriesMap energy, up, down;
};

// Day-ahead clearing outcome: cleared quantities, network state and prices.
struct DaSchedule {
  SeriesMap unit_p;                 // MW per dispatchable unit
  SeriesMap wind_w;                 // MW per farm
  SeriesMap flow;                   // MW per line, from -> to sign
  SeriesMap angle;                  // rad per bus
  SeriesMap producer_g;             // kcf/h per producer
  SeriesMap storage_in, storage_out;  // kcf/h per storage
  SeriesMap storage_e;              // kcf per storage
  SeriesMap pressure;               // psig per gas node
  SeriesMap linepack;               // kcf per pipeline
  SeriesMap pipe_flow;              // kcf/h signed per pipeline (from -> to)
  SeriesMap pipe_in, pipe_out;      // kcf/h entering / leaving per pipeline
  SeriesMap pipe_import;            // kcf/h net pipe deliveries per gas node
  SeriesMap price_el;               // $/MWh per bus
  SeriesMap price_gas;              // $/kcf per gas node
};

// One scenario's balancing outcome (quantities, re-optimized state, prices).
struct BalancingOutcome {
  std::string scenario;
  SeriesMap delta_p;                  // MW net redispatch per unit
  SeriesMap reg_up, reg_down;         // MW split per unit
  SeriesMap spill;                    // MW per farm
  SeriesMap shed_el;                  // MW per bus
  SeriesMap producer_up, producer_down;  // kcf/h per producer
  SeriesMap storage_r_in, storage_r_out, storage_r_e;  // incremental storage
  SeriesMap shed_gas;                 // kcf/h per gas node
  SeriesMap flow, angle;              // re-dispatched electric state
  SeriesMap pressure, linepack, pipe_flow, pipe_in, pipe_out, pipe_import;
  SeriesMap price_el;                 // $/MWh per bus
  SeriesMap price_gas;                // $/kcf per gas node
  int curtail_iterations = 0;         // redispatch-cap loop passes
  SeriesMap gfpp_caps;                // final redispatch caps, MW per gas unit
};

// A full run of one design over a scenario set.
struct PolicyRun {
  Design design = Design::SequentialCoupled;
  bool steady_state = false;
  DaSchedule da;
  std::vector<BalancingOutcome> rt;  // aligned with ScenarioSet order
  GfppOffers offers;                 // offers used (SequentialDecoupled only)
  int curtail_iterations = 0;        // max over scenarios
  bool curtail_flagged = false;      // loop hit its iteration cap with shed left

  // Solver objectives, for cross-checking the uniform cost accounting.
  double da_objective = 0.0;          // sum of day-ahead stage optima (sequential)
  std::vector<double> rt_objectives;  // per-scenario balancing optima (sequential)
  std::optional<double> joint_objective;  // stochastic: the two-stage optimum
};

// A solved model: the mixed-binary optimum plus the direction-fixed LP
// re-solve carrying duals. Objectives agree to 1e-6 relative (asserted).
struct SolvedModel {
  lp::Solution milp;
  lp::Solution fixed;
};

// Solve `m`, then re-solve as an LP with the optimal binaries fixed.
// `label` names the stage in errors ("electric day-ahead", ...). Throws
// Error{Infeasible|GapLimit|Solver} on failure and Error{Solver} when the
// re-solve disagrees with the mixed-binary objective.
SolvedModel solve_with_prices(const lp::Model& m, const std::string& label,
                              const lp::SolveOptions& opt);

lp::SolveOptions solver_options(const RunConfig& cfg);

// ---------------------------------------------------------------------------
// Model builders (exposed for tests; runners below orchestrate them).

// Electricity-only day-ahead clearing. Thermal offers come from the unit
// records; gas-fired units bid `offers.energy`. Throws when an offer series
// is missing for a gas-fired unit.
lp::Model build_el_da(const EnergySystem& sys, const GfppOffers& offers);

// Fuel drawn per gas node by a gas-fired dispatch (kcf/h = rate * MW).
SeriesMap fuel_demand(const EnergySystem& sys, const SeriesMap& gfpp_p);

// Gas-only day-ahead clearing with the gas-fired fuel draw fixed per node.
lp::Model build_gas_da(const EnergySystem& sys, const SeriesMap& fuel);

// Electricity-only balancing against one wind realization (MW per farm per
// period, farm order matching sys.wind). Re-dispatch costs: thermal units
// from their records, gas-fired units from `offers`. `dp_caps`, when given,
// upper-bounds the net redispatch of named units per period (curtailment).
lp::Model build_el_rt(const EnergySystem& sys, const GfppOffers& offers,
                      const DaSchedule& da,
                      const std::vector<std::vector<double>>& realization,
                      const SeriesMap* dp_caps = nullptr);

// Fuel-draw deviation per gas node caused by gas-fired redispatch.
SeriesMap fuel_deviation(const EnergySystem& sys, const SeriesMap& gfpp_dp);

// Gas-only balancing: producers regulate around the day-ahead point, storage
// adds incremental flows, the full network state is re-optimized from the
// same initial conditions, and the gas-fired deviation enters per node.
lp::Model build_gas_rt(const EnergySystem& sys, const DaSchedule& da,
                       const SeriesMap& fuel_dev);

// Coupled day-ahead clearing: both carriers, gas-fired fuel draw as a model
// term. Objective carries no gas-fired energy cost (it is paid on the gas
// side). With cfg.ideal_storage an unbounded zero-cost intertemporal shift
// is added at every bus.
lp::Model build_coupled_da(const EnergySystem& sys);

// Coupled balancing for one realization around a coupled day-ahead schedule.
// Gas-fired redispatch carries no direct cost; its fuel deviation is a model
// term on the gas side.
lp::Model build_coupled_rt(const EnergySystem& sys, const DaSchedule& da,
                           const std::vector<std::vector<double>>& realization);

// Two-stage stochastic clearing: coupled day-ahead columns (wind bounded by
// installed capacity) plus one probability-weighted coupled balancing block
// per scenario sharing the day-ahead columns.
lp::Model build_stoch(const EnergySystem& sys, const ScenarioSet& scn);

// ---------------------------------------------------------------------------
// Extraction.

// Fill `da` from whichever day-ahead columns exist in `m` (electricity-only,
// gas-only and coupled models all use the same names). `duals`, when given,
// fills price_el / price_gas from elbal / gasbal rows.
void extract_da_into(DaSchedule& da, const EnergySystem& sys, const lp::Model& m,
                     const lp::Solution& primal, const lp::Solution* duals);

// Extract one scenario's balancing block. `prefix` is "" for stand-alone
// balancing models and "s.<scenario>." inside the stochastic program.
// Balancing-row duals are divided by `dual_scale` (the scenario probability
// in the stochastic program, 1 otherwise).
BalancingOutcome extract_rt(const EnergySystem& sys, const lp::Model& m,
                            const lp::Solution& primal, const lp::Solution* duals,
                            const std::string& prefix, const std::string& scenario_id,
                            double dual_scale);

// ---------------------------------------------------------------------------
// Offer derivation and runners.

// Fuel-indexed offers: energy = mis_factor * gas price at the unit's node *
// fuel rate; regulation offers scale by cfg.reg_up_factor / reg_down_factor.
// Throws when `gas_price` lacks a node with a gas-fired unit.
GfppOffers derive_gfpp_offers(const EnergySystem& sys, const SeriesMap& gas_price,
                              double mis_factor);

PolicyRun run_seq_dec(const EnergySystem& sys, const ScenarioSet& scn,
                      const GfppOffers& offers);
PolicyRun run_seq_coup(const EnergySystem& sys, const ScenarioSet& scn);
PolicyRun run_stoch_coup(const EnergySystem& sys, const ScenarioSet& scn);

// Top-level entry: SequentialDecoupled first clears a coupled day-ahead pass
// to obtain gas prices, derives offers with cfg.gfpp_price_factor, then runs
// the decoupled sequence. The other designs dispatch directly.
PolicyRun run_market(const EnergySystem& sys, const ScenarioSet& scn, Design design);

}  // namespace gaslight
