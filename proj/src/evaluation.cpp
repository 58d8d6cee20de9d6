#include "gaslight/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace gaslight {
namespace {

double sum_series(const SeriesMap& m, const std::string& id) {
  auto it = m.find(id);
  if (it == m.end()) return 0.0;
  double s = 0.0;
  for (double v : it->second) s += v;
  return s;
}

double sum_all(const SeriesMap& m) {
  double s = 0.0;
  for (const auto& [id, series] : m)
    for (double v : series) s += v;
  return s;
}

double day_ahead_cost(const DaSchedule& da, const EnergySystem& sys) {
  double c = 0.0;
  for (const DispatchableUnit& u : sys.units)
    if (!u.gas_fired()) c += *u.offer * sum_series(da.unit_p, u.id);
  for (const GasProducer& k : sys.producers)
    c += k.offer * sum_series(da.producer_g, k.id);
  for (const GasStorage& s : sys.storages)
    c += s.offer * sum_series(da.storage_out, s.id);
  return c;
}

double balancing_cost(const BalancingOutcome& rt, const EnergySystem& sys) {
  double c = 0.0;
  for (const DispatchableUnit& u : sys.units) {
    if (u.gas_fired()) continue;  // fuel bought on the gas side at true cost
    c += *u.offer_up * sum_series(rt.reg_up, u.id);
    c -= *u.offer_down * sum_series(rt.reg_down, u.id);
  }
  for (const GasProducer& k : sys.producers) {
    c += k.offer_up * sum_series(rt.producer_up, k.id);
    c -= k.offer_down * sum_series(rt.producer_down, k.id);
  }
  for (const GasStorage& s : sys.storages) {
    c += s.offer_up * sum_series(rt.storage_r_out, s.id);
    c -= s.offer_down * sum_series(rt.storage_r_in, s.id);
  }
  c += sys.config.shed_penalty_el * sum_all(rt.shed_el);
  c += sys.config.shed_penalty_gas * sum_all(rt.shed_gas);
  return c;
}

ExperimentCell run_cell(const EnergySystem& base, const ScenarioSet& scn,
                        const std::string& policy, const std::string& variant) {
  ExperimentCell cell;
  cell.policy = policy;
  cell.variant = variant;
  EnergySystem sys = base;
  if (variant == "steady")
    sys.config.steady_state = true;
  else if (variant == "linepack+5")
    sys.config.linepack_scale *= 1.05;
  else if (variant == "linepack-5")
    sys.config.linepack_scale *= 0.95;
  Design d = Design::SequentialDecoupled;
  if (policy == "stoch-coup")
    d = Design::StochasticCoupled;
  else if (policy == "seq-coup")
    d = Design::SequentialCoupled;
  else if (policy == "seq-dec-up")
    sys.config.gfpp_price_factor *= 1.1;
  else if (policy == "seq-dec-down")
    sys.config.gfpp_price_factor *= 0.9;
  try {
    cell.run = run_market(sys, scn, d);
    cell.report = expected_cost(*cell.run, sys, scn);
    cell.ok = true;
  } catch (const std::exception& e) {
    cell.error = e.what();
  }
  return cell;
}

}  // namespace

CostReport expected_cost(const PolicyRun& run, const EnergySystem& sys,
                         const ScenarioSet& scn) {
  if (static_cast<int>(run.rt.size()) != scn.count())
    throw Error(Error::Kind::Validation,
                "policy run carries " + std::to_string(run.rt.size()) +
                    " balancing outcomes for " + std::to_string(scn.count()) +
                    " scenarios");
  CostReport r;
  r.day_ahead = day_ahead_cost(run.da, sys);
  r.scenario_balancing.reserve(run.rt.size());
  for (const BalancingOutcome& rt : run.rt)
    r.scenario_balancing.push_back(balancing_cost(rt, sys));
  for (int w = 0; w < scn.count(); ++w) {
    double pi = scn.probability[w];
    r.balancing += pi * r.scenario_balancing[w];
    r.shed_el_mwh += pi * sum_all(run.rt[w].shed_el);
    r.shed_gas_kcf += pi * sum_all(run.rt[w].shed_gas);
    r.spill_mwh += pi * sum_all(run.rt[w].spill);
  }
  r.total = r.day_ahead + r.balancing;
  std::tie(r.gfpp_share, r.tpp_share) = production_shares(run.da, sys);
  return r;
}

std::pair<std::optional<double>, std::optional<double>> production_shares(
    const DaSchedule& da, const EnergySystem& sys) {
  double gf = 0.0, th = 0.0;
  for (const DispatchableUnit& u : sys.units)
    (u.gas_fired() ? gf : th) += sum_series(da.unit_p, u.id);
  double tot = gf + th;
  if (tot <= 0.0) return {std::nullopt, std::nullopt};
  return {gf / tot * 100.0, th / tot * 100.0};
}

RatioReport performance_ratio(double ec_ss, double ec, double ec_ideal) {
  RatioReport r;
  r.ec_ss = ec_ss;
  r.ec = ec;
  r.ec_ideal = ec_ideal;
  double slack =
      1e-9 * std::max({1.0, std::abs(ec_ss), std::abs(ec), std::abs(ec_ideal)});
  r.ordered = ec_ss >= ec - slack && ec >= ec_ideal - slack;
  double span = ec_ss - ec_ideal;
  if (std::abs(span) > slack) r.percent = (ec_ss - ec) / span * 100.0;
  return r;
}

double ideal_storage_baseline(const EnergySystem& sys, const ScenarioSet& scn) {
  EnergySystem ideal = sys;
  ideal.config.ideal_storage = true;
  PolicyRun run = run_market(ideal, scn, Design::StochasticCoupled);
  return expected_cost(run, ideal, scn).total;
}

std::vector<ExperimentCell> run_experiment_suite(const EnergySystem& sys,
                                                 const ScenarioSet& scn, GridKind grid) {
  static const char* const kPolicies[] = {"stoch-coup", "seq-coup", "seq-dec",
                                          "seq-dec-up", "seq-dec-down"};
  std::vector<ExperimentCell> out;
  if (grid == GridKind::Full) {
    out.reserve(20);
    for (const char* p : kPolicies)
      for (const char* v : {"linepack", "steady", "linepack+5", "linepack-5"})
        out.push_back(run_cell(sys, scn, p, v));
    return out;
  }
  out.reserve(12);
  for (const char* p : kPolicies)
    for (const char* v : {"linepack", "steady"}) out.push_back(run_cell(sys, scn, p, v));
  out.push_back(run_cell(sys, scn, "stoch-coup", "linepack+5"));
  out.push_back(run_cell(sys, scn, "stoch-coup", "linepack-5"));
  return out;
}

}  // namespace gaslight
