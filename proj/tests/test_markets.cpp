#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "gaslight/lp.hpp"
#include "gaslight/markets.hpp"
#include "gaslight/system.hpp"

using namespace gaslight;

namespace {

const std::string kDataDir = GASLIGHT_DATA_DIR;

EnergySystem el_sys(int T, std::vector<double> load) {
  EnergySystem sys;
  sys.config.horizon = T;
  sys.config.shed_penalty_el = 500.0;
  sys.config.shed_penalty_gas = 60.0;
  sys.power.buses = {"b1"};
  sys.power.reference_bus = "b1";
  sys.power.load = {std::move(load)};
  return sys;
}

DispatchableUnit thermal(const std::string& id, const std::string& bus, double cap, double ru,
                         double rd, double c, double cu, double cd) {
  DispatchableUnit u;
  u.id = id;
  u.bus = bus;
  u.capacity = cap;
  u.res_up = ru;
  u.res_down = rd;
  u.offer = c;
  u.offer_up = cu;
  u.offer_down = cd;
  return u;
}

DispatchableUnit gas_unit(const std::string& id, const std::string& bus, double cap, double ru,
                          double rd, const std::string& node, double rate) {
  DispatchableUnit u;
  u.id = id;
  u.kind = UnitKind::GasFired;
  u.bus = bus;
  u.capacity = cap;
  u.res_up = ru;
  u.res_down = rd;
  u.gas_node = node;
  u.fuel_rate = rate;
  return u;
}

WindFarm farm(const std::string& id, const std::string& bus, double cap,
              std::vector<double> forecast) {
  WindFarm j;
  j.id = id;
  j.bus = bus;
  j.capacity = cap;
  j.forecast = std::move(forecast);
  return j;
}

GasProducer producer(const std::string& id, const std::string& node, double cap, double ru,
                     double rd, double c, double cu, double cd) {
  GasProducer k;
  k.id = id;
  k.node = node;
  k.capacity = cap;
  k.res_up = ru;
  k.res_down = rd;
  k.offer = c;
  k.offer_up = cu;
  k.offer_down = cd;
  return k;
}

// One producer at n1 feeding load at n2 through a single pipeline whose
// hourly production cap (150) is below the peak draw (200): serving the peak
// requires drawing the pipe down and refilling afterwards.
EnergySystem pipe_sys(double terminal) {
  EnergySystem sys;
  sys.config.horizon = 3;
  sys.config.shed_penalty_el = 500.0;
  sys.config.shed_penalty_gas = 60.0;
  sys.config.oa_points = 12;
  sys.power.buses = {"b1"};
  sys.power.reference_bus = "b1";
  sys.power.load = {{0.0, 0.0, 0.0}};
  sys.gas.nodes = {{"n1", 40.0, 70.0}, {"n2", 30.0, 65.0}};
  Pipeline p;
  p.id = "p1";
  p.from = "n1";
  p.to = "n2";
  p.flow_const = 30.0;
  p.linepack_const = 20.0;
  p.linepack0 = 1000.0;
  sys.gas.pipelines = {p};
  sys.gas.load = {{0.0, 0.0, 0.0}, {100.0, 200.0, 100.0}};
  sys.gas.terminal_linepack = terminal;
  sys.producers = {producer("k1", "n1", 150.0, 60.0, 60.0, 2.0, 2.2, 1.9)};
  return sys;
}

ScenarioSet singleton(const EnergySystem& sys) {
  ScenarioSet scn;
  scn.ids = {"mid"};
  scn.probability = {1.0};
  scn.value.push_back({});
  for (const WindFarm& j : sys.wind) scn.value[0].push_back(j.forecast);
  return scn;
}

double value_of(const lp::Model& m, const lp::Solution& s, const std::string& id) {
  return s.col_value[m.col(id)];
}

double total(const Series& s) {
  double x = 0.0;
  for (double v : s) x += v;
  return x;
}

double max_abs(const SeriesMap& map) {
  double x = 0.0;
  for (const auto& [_, s] : map)
    for (double v : s) x = std::max(x, std::abs(v));
  return x;
}

}  // namespace

// ---------------------------------------------------------------------------
// Electric day-ahead clearing.

TEST_CASE("single unit serves the load and sets the price") {
  EnergySystem sys = el_sys(1, {50.0});
  sys.units = {thermal("u1", "b1", 100, 0, 0, 10, 12, 9)};
  lp::Model m = build_el_da(sys, {});
  SolvedModel s = solve_with_prices(m, "day-ahead", solver_options(sys.config));
  CHECK(s.milp.objective == doctest::Approx(500.0).epsilon(1e-9));
  CHECK(value_of(m, s.fixed, "p.u1.t1") == doctest::Approx(50.0));
  DaSchedule da;
  extract_da_into(da, sys, m, s.fixed, &s.fixed);
  CHECK(da.unit_p["u1"][0] == doctest::Approx(50.0));
  CHECK(da.price_el["b1"][0] == doctest::Approx(10.0));
}

TEST_CASE("free wind displaces paid thermal energy") {
  EnergySystem sys = el_sys(1, {50.0});
  sys.units = {thermal("u1", "b1", 100, 0, 0, 10, 12, 9)};
  sys.wind = {farm("w1", "b1", 60, {50.0})};
  lp::Model m = build_el_da(sys, {});
  SolvedModel s = solve_with_prices(m, "day-ahead", solver_options(sys.config));
  CHECK(s.milp.objective == doctest::Approx(0.0));
  CHECK(value_of(m, s.fixed, "w.w1.t1") == doctest::Approx(50.0));
  CHECK(value_of(m, s.fixed, "p.u1.t1") == doctest::Approx(0.0));
}

TEST_CASE("a congested line separates nodal prices") {
  EnergySystem sys = el_sys(1, {0.0});
  sys.power.buses = {"b1", "b2"};
  sys.power.load = {{0.0}, {50.0}};
  Line l;
  l.id = "l1";
  l.from = "b1";
  l.to = "b2";
  l.susceptance = 1.0;
  l.capacity = 10.0;
  sys.power.lines = {l};
  sys.units = {thermal("u1", "b1", 100, 0, 0, 10, 12, 9),
               thermal("u2", "b2", 100, 0, 0, 30, 35, 27)};
  lp::Model m = build_el_da(sys, {});
  SolvedModel s = solve_with_prices(m, "day-ahead", solver_options(sys.config));
  CHECK(s.milp.objective == doctest::Approx(1300.0).epsilon(1e-9));
  CHECK(value_of(m, s.fixed, "p.u1.t1") == doctest::Approx(10.0));
  CHECK(value_of(m, s.fixed, "p.u2.t1") == doctest::Approx(40.0));
  CHECK(value_of(m, s.fixed, "f.l1.t1") == doctest::Approx(10.0));
  DaSchedule da;
  extract_da_into(da, sys, m, s.fixed, &s.fixed);
  CHECK(da.price_el["b1"][0] == doctest::Approx(10.0));
  CHECK(da.price_el["b2"][0] == doctest::Approx(30.0));
}

TEST_CASE("gas-fired units need an energy offer in the electric-only clearing") {
  EnergySystem sys = el_sys(1, {50.0});
  sys.gas.nodes = {{"n1", 30.0, 60.0}};
  sys.gas.load = {{0.0}};
  sys.units = {gas_unit("g1", "b1", 80, 80, 80, "n1", 8.0)};
  CHECK_THROWS_AS(build_el_da(sys, {}), Error);
}

// ---------------------------------------------------------------------------
// Fuel coupling arithmetic.

TEST_CASE("fuel demand is conversion rate times dispatch, summed per node") {
  EnergySystem sys = el_sys(1, {0.0});
  sys.gas.nodes = {{"n1", 30.0, 60.0}};
  sys.gas.load = {{0.0}};
  sys.units = {gas_unit("g1", "b1", 80, 0, 0, "n1", 8.0),
               gas_unit("g2", "b1", 80, 0, 0, "n1", 10.0),
               thermal("u1", "b1", 50, 0, 0, 10, 12, 9)};

  SeriesMap p{{"g1", {50.0}}, {"g2", {0.0}}, {"u1", {20.0}}};
  SeriesMap d = fuel_demand(sys, p);
  CHECK(d.at("n1")[0] == doctest::Approx(400.0));

  p["g1"] = {10.0};
  p["g2"] = {20.0};
  CHECK(fuel_demand(sys, p).at("n1")[0] == doctest::Approx(280.0));

  p["g1"] = {0.0};
  p["g2"] = {0.0};
  CHECK(fuel_demand(sys, p).at("n1")[0] == doctest::Approx(0.0));

  SeriesMap dp{{"g1", {-5.0}}, {"g2", {0.0}}, {"u1", {3.0}}};
  CHECK(fuel_deviation(sys, dp).at("n1")[0] == doctest::Approx(-40.0));
  dp["g1"] = {10.0};
  dp["g2"] = {-10.0};
  CHECK(fuel_deviation(sys, dp).at("n1")[0] == doctest::Approx(-20.0));
}

// ---------------------------------------------------------------------------
// Gas day-ahead clearing.

TEST_CASE("islanded gas node clears against its producer") {
  EnergySystem sys = el_sys(1, {0.0});
  sys.gas.nodes = {{"n1", 30.0, 60.0}};
  sys.gas.load = {{100.0}};
  sys.producers = {producer("k1", "n1", 200, 50, 50, 2.0, 2.4, 1.7)};
  lp::Model m = build_gas_da(sys, {});
  SolvedModel s = solve_with_prices(m, "gas day-ahead", solver_options(sys.config));
  CHECK(s.milp.objective == doctest::Approx(200.0).epsilon(1e-9));
  CHECK(value_of(m, s.fixed, "g.k1.t1") == doctest::Approx(100.0));
  DaSchedule da;
  extract_da_into(da, sys, m, s.fixed, &s.fixed);
  CHECK(da.price_gas["n1"][0] == doctest::Approx(2.0));
}

TEST_CASE("two producers clear in merit order and the expensive one is marginal") {
  EnergySystem sys = el_sys(1, {0.0});
  sys.gas.nodes = {{"n1", 30.0, 60.0}};
  sys.gas.load = {{100.0}};
  sys.producers = {producer("k1", "n1", 60, 20, 20, 2.0, 2.4, 1.7),
                   producer("k2", "n1", 100, 20, 20, 5.0, 5.6, 4.4)};
  lp::Model m = build_gas_da(sys, {});
  SolvedModel s = solve_with_prices(m, "gas day-ahead", solver_options(sys.config));
  CHECK(s.milp.objective == doctest::Approx(320.0).epsilon(1e-9));
  CHECK(value_of(m, s.fixed, "g.k1.t1") == doctest::Approx(60.0));
  CHECK(value_of(m, s.fixed, "g.k2.t1") == doctest::Approx(40.0));
  DaSchedule da;
  extract_da_into(da, sys, m, s.fixed, &s.fixed);
  CHECK(da.price_gas["n1"][0] == doctest::Approx(5.0));
}

TEST_CASE("linepack shifts cheap early production into the demand peak") {
  EnergySystem sys = pipe_sys(1000.0);
  lp::Model m = build_gas_da(sys, {});
  SolvedModel s = solve_with_prices(m, "gas day-ahead", solver_options(sys.config));
  // Peak draw is 200 against a 150 kcf/h production cap: exactly 400 kcf must
  // be produced over the horizon (the terminal floor equals the initial fill).
  CHECK(s.milp.objective == doctest::Approx(800.0).epsilon(1e-7));
  DaSchedule da;
  extract_da_into(da, sys, m, s.fixed, &s.fixed);
  const Series& h = da.linepack["p1"];
  REQUIRE(h.size() == 3);
  CHECK(h[1] <= h[0] - 50.0 + 1e-6);       // the peak hour draws the pipe down
  CHECK(h[2] >= 1000.0 - 1e-6);            // refilled to the terminal floor
  CHECK(da.producer_g["k1"][1] == doctest::Approx(150.0));  // cap binds at peak
}

TEST_CASE("steady-state operation cannot serve a peak above the production cap") {
  EnergySystem sys = pipe_sys(1000.0);
  sys.config.steady_state = true;
  lp::Model m = build_gas_da(sys, {});
  try {
    solve_with_prices(m, "gas day-ahead", solver_options(sys.config));
    FAIL("expected infeasibility");
  } catch (const Error& e) {
    CHECK(e.kind == Error::Kind::Infeasible);
  }
}

TEST_CASE("terminal linepack floor without pipelines is rejected") {
  EnergySystem sys = el_sys(1, {0.0});
  sys.gas.nodes = {{"n1", 30.0, 60.0}};
  sys.gas.load = {{10.0}};
  sys.gas.terminal_linepack = 5.0;
  sys.producers = {producer("k1", "n1", 50, 10, 10, 2.0, 2.4, 1.7)};
  CHECK_THROWS_AS(build_gas_da(sys, {}), Error);
}

TEST_CASE("fuel demand at an unknown node is rejected") {
  EnergySystem sys = el_sys(1, {0.0});
  sys.gas.nodes = {{"n1", 30.0, 60.0}};
  sys.gas.load = {{10.0}};
  sys.producers = {producer("k1", "n1", 50, 10, 10, 2.0, 2.4, 1.7)};
  SeriesMap fuel{{"nope", {1.0}}};
  CHECK_THROWS_AS(build_gas_da(sys, fuel), Error);
}

// ---------------------------------------------------------------------------
// Electric balancing.

TEST_CASE("a wind deficit is covered by the cheapest upward regulation") {
  EnergySystem sys = el_sys(1, {70.0});
  sys.units = {thermal("u1", "b1", 100, 30, 30, 20, 12, 9)};
  sys.wind = {farm("w1", "b1", 40, {20.0})};
  DaSchedule da;
  da.unit_p["u1"] = {50.0};
  da.wind_w["w1"] = {20.0};
  lp::Model m = build_el_rt(sys, {}, da, {{10.0}});
  SolvedModel s = solve_with_prices(m, "balancing", solver_options(sys.config));
  CHECK(s.milp.objective == doctest::Approx(120.0).epsilon(1e-9));
  BalancingOutcome rt = extract_rt(sys, m, s.fixed, &s.fixed, "", "lo", 1.0);
  CHECK(rt.reg_up["u1"][0] == doctest::Approx(10.0));
  CHECK(rt.shed_el["b1"][0] == doctest::Approx(0.0));
  CHECK(rt.price_el["b1"][0] == doctest::Approx(12.0));
}

TEST_CASE("shedding is the last resort and sets the balancing price") {
  EnergySystem sys = el_sys(1, {115.0});
  sys.units = {thermal("u1", "b1", 100, 5, 30, 20, 12, 9)};
  sys.wind = {farm("w1", "b1", 40, {20.0})};
  DaSchedule da;
  da.unit_p["u1"] = {95.0};
  da.wind_w["w1"] = {20.0};
  lp::Model m = build_el_rt(sys, {}, da, {{0.0}});
  SolvedModel s = solve_with_prices(m, "balancing", solver_options(sys.config));
  CHECK(s.milp.objective == doctest::Approx(5 * 12 + 15 * 500.0).epsilon(1e-9));
  BalancingOutcome rt = extract_rt(sys, m, s.fixed, &s.fixed, "", "lo", 1.0);
  CHECK(rt.reg_up["u1"][0] == doctest::Approx(5.0));
  CHECK(rt.shed_el["b1"][0] == doctest::Approx(15.0));
  CHECK(rt.price_el["b1"][0] == doctest::Approx(500.0));
}

TEST_CASE("matching realization leaves balancing idle at zero cost") {
  EnergySystem sys = el_sys(1, {70.0});
  sys.units = {thermal("u1", "b1", 100, 30, 30, 20, 12, 9)};
  sys.wind = {farm("w1", "b1", 40, {20.0})};
  DaSchedule da;
  da.unit_p["u1"] = {50.0};
  da.wind_w["w1"] = {20.0};
  lp::Model m = build_el_rt(sys, {}, da, {{20.0}});
  SolvedModel s = solve_with_prices(m, "balancing", solver_options(sys.config));
  CHECK(s.milp.objective == doctest::Approx(0.0));
}

// ---------------------------------------------------------------------------
// Gas balancing.

TEST_CASE("zero fuel deviation keeps gas balancing free") {
  EnergySystem sys = pipe_sys(900.0);
  lp::Model m = build_gas_da(sys, {});
  SolvedModel s = solve_with_prices(m, "gas day-ahead", solver_options(sys.config));
  DaSchedule da;
  extract_da_into(da, sys, m, s.fixed, &s.fixed);

  lp::Model mr = build_gas_rt(sys, da, {});
  SolvedModel sr = solve_with_prices(mr, "gas balancing", solver_options(sys.config));
  CHECK(sr.milp.objective == doctest::Approx(0.0));
}

TEST_CASE("a net-zero fuel swing is absorbed by linepack alone") {
  EnergySystem sys = pipe_sys(900.0);
  lp::Model m = build_gas_da(sys, {});
  SolvedModel s = solve_with_prices(m, "gas day-ahead", solver_options(sys.config));
  DaSchedule da;
  extract_da_into(da, sys, m, s.fixed, &s.fixed);

  SeriesMap dev{{"n2", {10.0, -10.0, 0.0}}};
  lp::Model mr = build_gas_rt(sys, da, dev);
  SolvedModel sr = solve_with_prices(mr, "gas balancing", solver_options(sys.config));
  CHECK(sr.milp.objective == doctest::Approx(0.0));
  BalancingOutcome rt = extract_rt(sys, mr, sr.fixed, &sr.fixed, "", "x", 1.0);
  CHECK(max_abs(rt.producer_up) <= 1e-7);
  CHECK(max_abs(rt.producer_down) <= 1e-7);
  CHECK(max_abs(rt.shed_gas) <= 1e-7);
}

// ---------------------------------------------------------------------------
// Offer derivation.

TEST_CASE("derived offers are gas price times conversion rate, scaled for regulation") {
  EnergySystem sys = el_sys(2, {0.0, 0.0});
  sys.gas.nodes = {{"n1", 30.0, 60.0}};
  sys.gas.load = {{0.0, 0.0}};
  sys.units = {gas_unit("g1", "b1", 80, 80, 80, "n1", 8.0)};
  SeriesMap price{{"n1", {3.0, 3.0}}};

  GfppOffers o = derive_gfpp_offers(sys, price, 1.0);
  CHECK(o.energy["g1"][0] == doctest::Approx(24.0));
  CHECK(o.up["g1"][0] == doctest::Approx(26.4));
  CHECK(o.down["g1"][1] == doctest::Approx(21.84));

  GfppOffers hi = derive_gfpp_offers(sys, price, 1.1);
  CHECK(hi.energy["g1"][0] == doctest::Approx(26.4));
  CHECK(hi.up["g1"][0] == doctest::Approx(29.04));
  CHECK(hi.down["g1"][0] == doctest::Approx(1.1 * 21.84));

  SeriesMap missing{{"other", {3.0, 3.0}}};
  CHECK_THROWS_AS(derive_gfpp_offers(sys, missing, 1.0), Error);
}

// ---------------------------------------------------------------------------
// Coupled clearings.

TEST_CASE("coupled clearing never charges gas-fired energy on the electric side") {
  EnergySystem sys = load_system(kDataDir + "/case3x3.sys");
  lp::Model m = build_coupled_da(sys);
  for (int t = 0; t < sys.config.horizon; ++t) {
    int j = m.col("p.gf1.t" + std::to_string(t + 1));
    CHECK(m.column(j).obj == doctest::Approx(0.0));
  }
}

TEST_CASE("without gas-fired units the coupled clearing separates exactly") {
  EnergySystem sys = el_sys(1, {50.0});
  sys.units = {thermal("u1", "b1", 100, 30, 30, 10, 12, 9)};
  sys.gas.nodes = {{"n1", 30.0, 60.0}};
  sys.gas.load = {{100.0}};
  sys.producers = {producer("k1", "n1", 200, 50, 50, 2.0, 2.4, 1.7)};

  lp::Model mc = build_coupled_da(sys);
  SolvedModel sc = solve_with_prices(mc, "coupled", solver_options(sys.config));
  lp::Model me = build_el_da(sys, {});
  SolvedModel se = solve_with_prices(me, "electric", solver_options(sys.config));
  lp::Model mg = build_gas_da(sys, {});
  SolvedModel sg = solve_with_prices(mg, "gas", solver_options(sys.config));
  CHECK(sc.milp.objective ==
        doctest::Approx(se.milp.objective + sg.milp.objective).epsilon(1e-9));
}

TEST_CASE("coupled clearing runs gas-fired capacity whenever implied fuel cost undercuts") {
  EnergySystem sys = load_system(kDataDir + "/case3x3.sys");
  lp::Model m = build_coupled_da(sys);
  SolvedModel s = solve_with_prices(m, "coupled", solver_options(sys.config));
  DaSchedule da;
  extract_da_into(da, sys, m, s.fixed, &s.fixed);
  const DispatchableUnit& gf = sys.units[sys.unit_index("gf1")];
  const DispatchableUnit& u1 = sys.units[sys.unit_index("u1")];
  for (int t = 0; t < sys.config.horizon; ++t) {
    double implied = da.price_gas["m2"][t] * gf.fuel_rate;
    if (implied < *u1.offer - 1e-6 && da.unit_p["u1"][t] > 1e-6)
      CHECK(da.unit_p["gf1"][t] == doctest::Approx(gf.capacity));
  }
}

// ---------------------------------------------------------------------------
// Sequential runs.

TEST_CASE("sequential coupled run with the forecast scenario has idle balancing") {
  EnergySystem sys = load_system(kDataDir + "/case3x3.sys");
  ScenarioSet scn = singleton(sys);
  PolicyRun run = run_seq_coup(sys, scn);
  REQUIRE(run.rt.size() == 1);
  const BalancingOutcome& rt = run.rt[0];
  CHECK(max_abs(rt.reg_up) <= 1e-6);
  CHECK(max_abs(rt.reg_down) <= 1e-6);
  CHECK(max_abs(rt.producer_up) <= 1e-6);
  CHECK(max_abs(rt.producer_down) <= 1e-6);
  CHECK(max_abs(rt.shed_el) <= 1e-6);
  CHECK(max_abs(rt.shed_gas) <= 1e-6);
  CHECK(max_abs(rt.spill) <= 1e-6);
  // Storage ends at least as full as it began, in both stages.
  CHECK(run.da.storage_e["s1"].back() >= 700.0 - 1e-6);
  CHECK(rt.storage_r_e.at("s1").back() >= 700.0 - 1e-6);
}

TEST_CASE("decoupled run derives offers and leaves the forecast scenario idle") {
  EnergySystem sys = load_system(kDataDir + "/case3x3.sys");
  ScenarioSet scn = load_scenarios(kDataDir + "/case3x3.scn", sys);
  PolicyRun run = run_market(sys, scn, Design::SequentialDecoupled);
  REQUIRE(run.rt.size() == 5);
  CHECK(run.design == Design::SequentialDecoupled);

  // Derived offers follow the regulation multipliers.
  const Series& en = run.offers.energy.at("gf1");
  const Series& up = run.offers.up.at("gf1");
  const Series& dn = run.offers.down.at("gf1");
  for (int t = 0; t < sys.config.horizon; ++t) {
    CHECK(up[t] == doctest::Approx(1.1 * en[t]));
    CHECK(dn[t] == doctest::Approx(0.91 * en[t]));
    CHECK(en[t] > 0.0);
  }

  // The middle scenario equals the forecast: balancing should do nothing.
  const BalancingOutcome& mid = run.rt[2];
  CHECK(mid.scenario == "w_mid");
  CHECK(max_abs(mid.reg_up) <= 1e-6);
  CHECK(max_abs(mid.reg_down) <= 1e-6);
  CHECK(max_abs(mid.producer_up) <= 1e-6);
  CHECK(max_abs(mid.producer_down) <= 1e-6);
  CHECK(max_abs(mid.shed_el) <= 1e-6);
  CHECK(max_abs(mid.shed_gas) <= 1e-6);

  // Day-ahead wind follows the forecast in the sequential designs.
  for (int t = 0; t < sys.config.horizon; ++t)
    CHECK(run.da.wind_w["w1"][t] == doctest::Approx(sys.wind[0].forecast[t]));
}

TEST_CASE("fully dispatched gas-fired unit has no upward redispatch headroom") {
  EnergySystem sys = load_system(kDataDir + "/case3x3.sys");
  lp::Model mda = build_coupled_da(sys);
  SolvedModel sda = solve_with_prices(mda, "coupled", solver_options(sys.config));
  DaSchedule da;
  extract_da_into(da, sys, mda, sda.fixed, &sda.fixed);
  GfppOffers offers = derive_gfpp_offers(sys, da.price_gas, 1.0);

  ScenarioSet scn = load_scenarios(kDataDir + "/case3x3.scn", sys);
  lp::Model mrt = build_el_rt(sys, offers, da, scn.value[0]);
  for (int t = 0; t < sys.config.horizon; ++t) {
    if (da.unit_p["gf1"][t] < sys.units[sys.unit_index("gf1")].capacity - 1e-6) continue;
    const lp::Column& c = mrt.column(mrt.col("dp.gf1.t" + std::to_string(t + 1)));
    CHECK(c.ub <= 1e-9);
  }
}

// ---------------------------------------------------------------------------
// Stochastic clearing.

TEST_CASE("stochastic day-ahead wind is bounded by installed capacity, not forecast") {
  EnergySystem sys = load_system(kDataDir + "/case3x3.sys");
  ScenarioSet scn = load_scenarios(kDataDir + "/case3x3.scn", sys);
  lp::Model m = build_stoch(sys, scn);
  const lp::Column& c = m.column(m.col("w.w1.t1"));
  CHECK(c.ub == doctest::Approx(120.0));  // installed, above the 70 forecast
}

TEST_CASE("stochastic clearing with one scenario collapses to the coupled sequence") {
  EnergySystem sys = load_system(kDataDir + "/case3x3.sys");
  ScenarioSet scn = singleton(sys);
  lp::Model ms = build_stoch(sys, scn);
  SolvedModel ss = solve_with_prices(ms, "stochastic", solver_options(sys.config));
  lp::Model md = build_coupled_da(sys);
  SolvedModel sd = solve_with_prices(md, "coupled", solver_options(sys.config));
  CHECK(ss.milp.objective ==
        doctest::Approx(sd.milp.objective).epsilon(1e-6));
}

TEST_CASE("stochastic clearing never costs more than the sequential coupled run") {
  EnergySystem sys = load_system(kDataDir + "/case3x3.sys");
  ScenarioSet scn = load_scenarios(kDataDir + "/case3x3.scn", sys);

  lp::Model md = build_coupled_da(sys);
  SolvedModel sd = solve_with_prices(md, "coupled day-ahead", solver_options(sys.config));
  DaSchedule da;
  extract_da_into(da, sys, md, sd.fixed, &sd.fixed);
  double seq_total = sd.milp.objective;
  for (int w = 0; w < scn.count(); ++w) {
    lp::Model mr = build_coupled_rt(sys, da, scn.value[w]);
    SolvedModel sr = solve_with_prices(mr, "coupled balancing", solver_options(sys.config));
    seq_total += scn.probability[w] * sr.milp.objective;
  }

  lp::Model ms = build_stoch(sys, scn);
  SolvedModel ss = solve_with_prices(ms, "stochastic", solver_options(sys.config));
  CHECK(ss.milp.objective <= seq_total + 1e-6 * std::abs(seq_total) + 1e-6);
}

TEST_CASE("scenario balancing prices are per-scenario, not probability-weighted") {
  EnergySystem sys = el_sys(1, {100.0});
  sys.units = {thermal("u1", "b1", 50, 0, 0, 10, 12, 9)};
  sys.wind = {farm("w1", "b1", 100, {60.0})};
  ScenarioSet scn;
  scn.ids = {"a", "b"};
  scn.probability = {0.5, 0.5};
  scn.value = {{{0.0}}, {{0.0}}};

  PolicyRun run = run_stoch_coup(sys, scn);
  REQUIRE(run.rt.size() == 2);
  // Both scenarios shed exactly 50 MW with no regulation available: the
  // balancing price is the shed penalty itself in each scenario.
  CHECK(run.rt[0].shed_el["b1"][0] == doctest::Approx(50.0));
  CHECK(run.rt[1].shed_el["b1"][0] == doctest::Approx(50.0));
  CHECK(run.rt[0].price_el["b1"][0] == doctest::Approx(500.0));
  CHECK(run.rt[1].price_el["b1"][0] == doctest::Approx(500.0));
  CHECK(run.da.price_el["b1"][0] == doctest::Approx(500.0));
}

TEST_CASE("oversized stochastic programs are refused up front") {
  EnergySystem sys = load_system(kDataDir + "/case3x3.sys");
  ScenarioSet scn;
  for (int i = 0; i < 5000; ++i) {
    scn.ids.push_back("s" + std::to_string(i));
    scn.probability.push_back(1.0 / 5000.0);
    scn.value.push_back({{70, 85, 60, 75}});
  }
  CHECK_THROWS_AS(build_stoch(sys, scn), Error);
}

// ---------------------------------------------------------------------------
// Curtailment loop.

TEST_CASE("gas-fired redispatch that sheds residential load gets capped") {
  EnergySystem sys = load_system(kDataDir + "/tight_gas.sys");
  ScenarioSet scn = load_scenarios(kDataDir + "/tight_gas.scn", sys);
  PolicyRun run = run_market(sys, scn, Design::SequentialDecoupled);
  CHECK(run.curtail_iterations >= 1);
  CHECK_FALSE(run.curtail_flagged);

  // After the loop no shed node may still have a positive gas-fired draw in
  // any period up to the shedding one.
  for (const BalancingOutcome& rt : run.rt) {
    for (const GasNode& node : sys.gas.nodes) {
      auto shed = rt.shed_gas.find(node.id);
      if (shed == rt.shed_gas.end()) continue;
      for (int t = 0; t < sys.config.horizon; ++t) {
        if (shed->second[t] <= 1e-6) continue;
        for (int tau = 0; tau <= t; ++tau) {
          double draw = 0.0;
          for (const DispatchableUnit& u : sys.units)
            if (u.gas_fired() && u.gas_node == node.id && rt.delta_p.count(u.id))
              draw += u.fuel_rate * std::max(0.0, rt.delta_p.at(u.id)[tau]);
          CHECK(draw <= 1e-6);
        }
      }
    }
  }

  // The scenario that needed the loop recorded finite caps on the culprit.
  bool any_cap = false;
  for (const BalancingOutcome& rt : run.rt)
    if (rt.curtail_iterations > 0) {
      REQUIRE(rt.gfpp_caps.count("G1") == 1);
      for (double cap : rt.gfpp_caps.at("G1"))
        if (cap < 1e30) {
          any_cap = true;
          CHECK(cap >= 0.0);
        }
    }
  CHECK(any_cap);
}

TEST_CASE("the coupled design avoids residential gas shedding on the same system") {
  EnergySystem sys = load_system(kDataDir + "/tight_gas.sys");
  ScenarioSet scn = load_scenarios(kDataDir + "/tight_gas.scn", sys);
  PolicyRun run = run_seq_coup(sys, scn);
  for (const BalancingOutcome& rt : run.rt) CHECK(max_abs(rt.shed_gas) <= 1e-6);
}

// ---------------------------------------------------------------------------
// Input checking on the runners.

TEST_CASE("mismatched scenario data is rejected") {
  EnergySystem sys = load_system(kDataDir + "/case3x3.sys");
  ScenarioSet scn;
  scn.ids = {"bad"};
  scn.probability = {1.0};
  scn.value = {{{70, 85, 60, 75, 95}}};  // one period short
  CHECK_THROWS_AS(run_seq_coup(sys, scn), Error);
  scn.value = {{}};  // missing the farm entirely
  CHECK_THROWS_AS(run_stoch_coup(sys, scn), Error);
}
