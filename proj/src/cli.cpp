#include "gaslight/cli.hpp"

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gaslight/csv.hpp"
#include "gaslight/evaluation.hpp"
#include "gaslight/markets.hpp"
#include "gaslight/system.hpp"

#ifndef GASLIGHT_VERSION
#define GASLIGHT_VERSION "0.0.0"
#endif

namespace gaslight {

namespace {

namespace fs = std::filesystem;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::string timestamp_utc() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string join_args(int argc, const char* const* argv) {
  std::string s;
  for (int i = 1; i < argc; ++i) {
    if (i > 1) s += ' ';
    std::string a = argv[i];
    if (a.find(' ') != std::string::npos) a = "'" + a + "'";
    s += a;
  }
  return s;
}

int exit_code_of(const Error& e) {
  switch (e.kind) {
    case Error::Kind::Infeasible: return 2;
    case Error::Kind::GapLimit: return 3;
    case Error::Kind::Validation:
    case Error::Kind::Parse:
    case Error::Kind::Io: return 66;
    default: return 1;
  }
}

Design design_of(const std::string& policy) {
  if (policy == "seq-dec") return Design::SequentialDecoupled;
  if (policy == "seq-coup") return Design::SequentialCoupled;
  return Design::StochasticCoupled;
}

// ---------------------------------------------------------------------------
// Report writers. Column orders are fixed (documented in docs/formats.md).

void series_rows(csv::Table& t, const std::string& stage, const std::string& kind,
                 const SeriesMap& map) {
  for (const auto& [id, series] : map)
    for (std::size_t i = 0; i < series.size(); ++i)
      t.rows.push_back({stage, kind, id, std::to_string(i + 1), num(series[i])});
}

void price_rows(csv::Table& t, const std::string& stage, const SeriesMap& map) {
  for (const auto& [id, series] : map)
    for (std::size_t i = 0; i < series.size(); ++i)
      t.rows.push_back({stage, id, std::to_string(i + 1), num(series[i])});
}

void write_costs(const std::string& path, const CostReport& r, const ScenarioSet& scn) {
  csv::Table t;
  t.header = {"quantity", "scenario", "value"};
  t.rows.push_back({"total", "", num(r.total)});
  t.rows.push_back({"day_ahead", "", num(r.day_ahead)});
  t.rows.push_back({"balancing", "", num(r.balancing)});
  for (std::size_t w = 0; w < r.scenario_balancing.size(); ++w)
    t.rows.push_back({"balancing_scenario", scn.ids[w], num(r.scenario_balancing[w])});
  if (r.gfpp_share) t.rows.push_back({"gfpp_share_pct", "", num(*r.gfpp_share)});
  if (r.tpp_share) t.rows.push_back({"tpp_share_pct", "", num(*r.tpp_share)});
  t.rows.push_back({"shed_el_mwh", "", num(r.shed_el_mwh)});
  t.rows.push_back({"shed_gas_kcf", "", num(r.shed_gas_kcf)});
  t.rows.push_back({"spill_mwh", "", num(r.spill_mwh)});
  csv::write(path, t);
}

void write_dispatch(const std::string& path, const PolicyRun& run) {
  csv::Table t;
  t.header = {"stage", "kind", "id", "period", "value"};
  series_rows(t, "da", "unit_p", run.da.unit_p);
  series_rows(t, "da", "wind_w", run.da.wind_w);
  series_rows(t, "da", "producer_g", run.da.producer_g);
  series_rows(t, "da", "storage_in", run.da.storage_in);
  series_rows(t, "da", "storage_out", run.da.storage_out);
  for (const BalancingOutcome& rt : run.rt) {
    series_rows(t, rt.scenario, "redispatch", rt.delta_p);
    series_rows(t, rt.scenario, "reg_up", rt.reg_up);
    series_rows(t, rt.scenario, "reg_down", rt.reg_down);
    series_rows(t, rt.scenario, "spill", rt.spill);
    series_rows(t, rt.scenario, "shed_el", rt.shed_el);
    series_rows(t, rt.scenario, "producer_up", rt.producer_up);
    series_rows(t, rt.scenario, "producer_down", rt.producer_down);
    series_rows(t, rt.scenario, "storage_in", rt.storage_r_in);
    series_rows(t, rt.scenario, "storage_out", rt.storage_r_out);
    series_rows(t, rt.scenario, "shed_gas", rt.shed_gas);
  }
  csv::write(path, t);
}

void write_prices(const std::string& path_el, const std::string& path_gas,
                  const PolicyRun& run) {
  csv::Table el, gas;
  el.header = {"stage", "bus", "period", "price"};
  gas.header = {"stage", "node", "period", "price"};
  price_rows(el, "da", run.da.price_el);
  price_rows(gas, "da", run.da.price_gas);
  for (const BalancingOutcome& rt : run.rt) {
    price_rows(el, rt.scenario, rt.price_el);
    price_rows(gas, rt.scenario, rt.price_gas);
  }
  csv::write(path_el, el);
  csv::write(path_gas, gas);
}

void write_gas_state(const std::string& path, const PolicyRun& run) {
  csv::Table t;
  t.header = {"stage", "kind", "id", "period", "value"};
  series_rows(t, "da", "pressure", run.da.pressure);
  series_rows(t, "da", "linepack", run.da.linepack);
  series_rows(t, "da", "pipe_flow", run.da.pipe_flow);
  series_rows(t, "da", "storage_e", run.da.storage_e);
  for (const BalancingOutcome& rt : run.rt) {
    series_rows(t, rt.scenario, "pressure", rt.pressure);
    series_rows(t, rt.scenario, "linepack", rt.linepack);
    series_rows(t, rt.scenario, "pipe_flow", rt.pipe_flow);
    series_rows(t, rt.scenario, "storage_e", rt.storage_r_e);
  }
  csv::write(path, t);
}

// ---------------------------------------------------------------------------
// Subcommand state and bodies.

struct RunArgs {
  std::string system, scenarios, policy;
  std::string out = ".";
  bool steady = false;
  std::optional<double> mis_factor, linepack_scale, gap;
};

struct CompareArgs {
  std::string system, scenarios;
  std::string grid = "curated";
  std::string out = ".";
};

void apply_overrides(RunConfig& cfg, const RunArgs& a) {
  if (a.steady) cfg.steady_state = true;
  if (a.mis_factor) cfg.gfpp_price_factor = *a.mis_factor;
  if (a.linepack_scale) cfg.linepack_scale = *a.linepack_scale;
  if (a.gap) cfg.mip_gap = *a.gap;
}

RunManifest base_manifest(const std::string& command, const std::string& system,
                          const std::string& scenarios, const std::string& out_dir) {
  RunManifest m;
  m.command = command;
  m.system = system;
  m.scenarios = scenarios;
  m.out_dir = out_dir;
  m.timestamp = timestamp_utc();
  m.engine = "gaslight " GASLIGHT_VERSION;
  m.overrides.push_back({"solver", lp::backend().name()});
  return m;
}

int cmd_run(const RunArgs& a, const std::string& command, std::ostream& out) {
  EnergySystem sys = load_system(a.system);
  ScenarioSet scn = load_scenarios(a.scenarios, sys);
  apply_overrides(sys.config, a);

  PolicyRun run = run_market(sys, scn, design_of(a.policy));
  CostReport report = expected_cost(run, sys, scn);

  fs::create_directories(a.out);
  auto at = [&](const char* name) { return (fs::path(a.out) / name).string(); };
  write_costs(at("costs.csv"), report, scn);
  write_dispatch(at("dispatch.csv"), run);
  write_prices(at("prices_el.csv"), at("prices_gas.csv"), run);
  write_gas_state(at("gas_state.csv"), run);

  RunManifest m = base_manifest(command, a.system, a.scenarios, a.out);
  m.policy = a.policy;
  m.overrides.push_back({"steady_state", sys.config.steady_state ? "true" : "false"});
  m.overrides.push_back({"mis_factor", num(sys.config.gfpp_price_factor)});
  m.overrides.push_back({"linepack_scale", num(sys.config.linepack_scale)});
  m.overrides.push_back({"gap", num(sys.config.mip_gap)});
  write_manifest(at("manifest"), m);

  out << "policy " << a.policy << ": total " << num(report.total) << " (day-ahead "
      << num(report.day_ahead) << ", balancing " << num(report.balancing) << ")\n"
      << "reports written to " << a.out << "\n";
  return 0;
}

const ExperimentCell* find_cell(const std::vector<ExperimentCell>& cells,
                                const std::string& policy, const std::string& variant) {
  for (const ExperimentCell& c : cells)
    if (c.policy == policy && c.variant == variant) return &c;
  return nullptr;
}

// One ordering line: "<name>: PASS|FAIL|SKIP". The comparison allows 1e-5
// relative slack, matching the solver gap the cells were cleared at.
std::string ordering_line(const std::vector<ExperimentCell>& cells, const std::string& name,
                          const std::string& lo_p, const std::string& lo_v,
                          const std::string& hi_p, const std::string& hi_v) {
  const ExperimentCell* lo = find_cell(cells, lo_p, lo_v);
  const ExperimentCell* hi = find_cell(cells, hi_p, hi_v);
  if (!lo || !hi || !lo->ok || !hi->ok) return name + ": SKIP";
  double a = lo->report.total, b = hi->report.total;
  double slack = 1e-5 * std::max({1.0, std::abs(a), std::abs(b)});
  return name + (a <= b + slack ? ": PASS" : ": FAIL");
}

int cmd_compare(const CompareArgs& a, const std::string& command, std::ostream& out) {
  EnergySystem sys = load_system(a.system);
  ScenarioSet scn = load_scenarios(a.scenarios, sys);
  GridKind kind = a.grid == "full" ? GridKind::Full : GridKind::Curated;
  std::vector<ExperimentCell> cells = run_experiment_suite(sys, scn, kind);

  fs::create_directories(a.out);
  auto at = [&](const char* name) { return (fs::path(a.out) / name).string(); };

  csv::Table t;
  t.header = {"policy",         "variant",       "total",  "day_ahead", "balancing",
              "gfpp_share_pct", "tpp_share_pct", "status", "error"};
  for (const ExperimentCell& c : cells) {
    if (c.ok)
      t.rows.push_back({c.policy, c.variant, num(c.report.total), num(c.report.day_ahead),
                        num(c.report.balancing), opt_num(c.report.gfpp_share),
                        opt_num(c.report.tpp_share), "ok", ""});
    else
      t.rows.push_back({c.policy, c.variant, "", "", "", "", "", "failed", c.error});
  }
  csv::write(at("matrix.csv"), t);

  std::vector<std::string> checks = {
      ordering_line(cells, "StochCoup<=SeqCoup", "stoch-coup", "linepack", "seq-coup",
                    "linepack"),
      ordering_line(cells, "StochCoup<=SeqDec", "stoch-coup", "linepack", "seq-dec",
                    "linepack"),
      ordering_line(cells, "StochCoup<=SeqDecUp", "stoch-coup", "linepack", "seq-dec-up",
                    "linepack"),
      ordering_line(cells, "StochCoup<=SeqDecDown", "stoch-coup", "linepack", "seq-dec-down",
                    "linepack"),
      ordering_line(cells, "StochCoupSteady<=SeqCoupSteady", "stoch-coup", "steady",
                    "seq-coup", "steady"),
      ordering_line(cells, "StochCoupSteady<=SeqDecSteady", "stoch-coup", "steady", "seq-dec",
                    "steady"),
      ordering_line(cells, "Linepack<=Steady[stoch-coup]", "stoch-coup", "linepack",
                    "stoch-coup", "steady"),
      ordering_line(cells, "LinepackPlus5<=Base[stoch-coup]", "stoch-coup", "linepack+5",
                    "stoch-coup", "linepack"),
      ordering_line(cells, "Base<=LinepackMinus5[stoch-coup]", "stoch-coup", "linepack",
                    "stoch-coup", "linepack-5"),
  };
  {
    std::ofstream cf(at("checks.txt"), std::ios::binary);
    if (!cf) throw Error(Error::Kind::Io, std::string("cannot create '") + at("checks.txt") + "'");
    for (const std::string& line : checks) cf << line << "\n";
  }

  RunManifest m = base_manifest(command, a.system, a.scenarios, a.out);
  m.policy = "grid:" + a.grid;
  write_manifest(at("manifest"), m);

  int ok_cells = 0;
  for (const ExperimentCell& c : cells) ok_cells += c.ok;
  out << "grid " << a.grid << ": " << ok_cells << "/" << cells.size() << " cells ok\n";
  for (const std::string& line : checks) out << line << "\n";
  out << "reports written to " << a.out << "\n";
  return ok_cells == 0 ? 2 : 0;
}

}  // namespace

void write_manifest(const std::string& path, const RunManifest& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Error::Kind::Io, "cannot create '" + path + "'");
  out << "command = " << m.command << "\n"
      << "system = " << m.system << "\n"
      << "scenarios = " << m.scenarios << "\n"
      << "policy = " << m.policy << "\n";
  for (const auto& [key, value] : m.overrides) out << key << " = " << value << "\n";
  out << "out = " << m.out_dir << "\n"
      << "timestamp = " << m.timestamp << "\n"
      << "engine = " << m.engine << "\n";
  if (!out) throw Error(Error::Kind::Io, "write to '" + path + "' failed");
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Market clearing for coupled electricity and natural-gas systems"};
  app.require_subcommand(1);

  RunArgs ra;
  CLI::App* run = app.add_subcommand("run", "Clear one policy and write its reports");
  run->add_option("--system", ra.system, "system fixture path")->required();
  run->add_option("--scenarios", ra.scenarios, "scenario fixture path")->required();
  run->add_option("--policy", ra.policy, "seq-dec | seq-coup | stoch-coup")
      ->required()
      ->check(CLI::IsMember({"seq-dec", "seq-coup", "stoch-coup"}));
  run->add_flag("--steady-state", ra.steady, "force pipeline inflow == outflow");
  run->add_option("--mis-factor", ra.mis_factor,
                  "multiplier on derived gas-fired offers (seq-dec)");
  run->add_option("--linepack-scale", ra.linepack_scale, "multiplier on initial linepack");
  run->add_option("--out", ra.out, "output directory (default: current)");
  run->add_option("--gap", ra.gap, "relative MIP gap");

  CompareArgs ca;
  CLI::App* cmp = app.add_subcommand("compare", "Run the experiment grid");
  cmp->add_option("--system", ca.system, "system fixture path")->required();
  cmp->add_option("--scenarios", ca.scenarios, "scenario fixture path")->required();
  cmp->add_option("--grid", ca.grid,
                  "curated (headline orderings, default) | full (every combination)")
      ->check(CLI::IsMember({"curated", "full"}));
  cmp->add_option("--out", ca.out, "output directory (default: current)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    for (const CLI::App* sc : app.get_subcommands()) out << "\n" << sc->help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    for (const CLI::App* sc : app.get_subcommands()) err << "\n" << sc->help();
    return 64;
  }

  const std::string command = join_args(argc, argv);
  try {
    if (run->parsed()) return cmd_run(ra, command, out);
    return cmd_compare(ca, command, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_of(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace gaslight
