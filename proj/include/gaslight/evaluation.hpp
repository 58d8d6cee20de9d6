#pragma once
// Uniform cost accounting across the clearing designs, dispatch-share
// statistics, the experiment grid, and the linepack flexibility ratio.
//
// All costs are recomputed from primal quantities on one basis, regardless of
// which design produced them:
//   day-ahead  = thermal energy at unit offers + gas production at producer
//                offers + storage withdrawals at storage offers
//   balancing  = thermal regulation (up paid, down refunded) + producer and
//                storage regulation + shed penalties, per scenario
//   total      = day-ahead + probability-weighted balancing
// Gas-fired units never appear directly: their fuel is bought on the gas side
// (as the coupled clearings price it), so sequential-decoupled runs are
// evaluated on the same footing as the coupled ones even though they were
// *optimized* under derived offers.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gaslight/markets.hpp"

namespace gaslight {

struct CostReport {
  double total = 0.0;      // $ expected
  double day_ahead = 0.0;  // $
  double balancing = 0.0;  // $ expected, signed (negative is legal)
  std::vector<double> scenario_balancing;  // $ per scenario, scenario order
  std::optional<double> gfpp_share;  // % of day-ahead dispatchable energy
  std::optional<double> tpp_share;   // %
  double shed_el_mwh = 0.0;   // expected electric load shed
  double shed_gas_kcf = 0.0;  // expected gas load shed
  double spill_mwh = 0.0;     // expected wind spill
};

// Recompute the uniform cost accounting for one policy run. Throws
// Error{Validation} when the run lacks an outcome for some scenario.
CostReport expected_cost(const PolicyRun& run, const EnergySystem& sys,
                         const ScenarioSet& scn);

// Shares of day-ahead dispatchable energy produced by gas-fired vs thermal
// units, in percent (wind excluded). Empty when nothing was dispatched.
std::pair<std::optional<double>, std::optional<double>> production_shares(
    const DaSchedule& da, const EnergySystem& sys);

// Linepack flexibility ratio: how much of the gap between steady-state
// operation and an ideal storage is closed by modeling linepack.
struct RatioReport {
  double ec_ss = 0.0;     // steady-state expected cost
  double ec = 0.0;        // linepack expected cost
  double ec_ideal = 0.0;  // ideal-storage expected cost
  std::optional<double> percent;  // empty when ec_ss == ec_ideal (undefined)
  bool ordered = true;            // ec_ss >= ec >= ec_ideal held on input
};
RatioReport performance_ratio(double ec_ss, double ec, double ec_ideal);

// Expected cost of the stochastic design with a free, lossless, horizon-
// conserving intertemporal shift added at every bus (the ideal storage).
double ideal_storage_baseline(const EnergySystem& sys, const ScenarioSet& scn);

// One cell of the experiment grid. Failures are isolated per cell.
struct ExperimentCell {
  std::string policy;   // stoch-coup | seq-coup | seq-dec | seq-dec-up | seq-dec-down
  std::string variant;  // linepack | steady | linepack+5 | linepack-5
  bool ok = false;
  std::string error;  // failure description when !ok
  std::optional<PolicyRun> run;
  CostReport report;  // valid when ok
};

// Curated: the reported comparison layout — five policies under linepack and
// steady-state operation, plus the stochastic design at +/-5% initial
// linepack (12 cells). Full: every policy under every variant (20 cells).
// seq-dec-up / -down derive gas-fired offers from 10% over- / under-
// estimated gas prices.
enum class GridKind { Curated, Full };
std::vector<ExperimentCell> run_experiment_suite(const EnergySystem& sys,
                                                 const ScenarioSet& scn,
                                                 GridKind grid = GridKind::Curated);

}  // namespace gaslight
