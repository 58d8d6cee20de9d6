#include "gaslight/markets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "gaslight/gas_network.hpp"

namespace gaslight {

using lp::ColKind;
using lp::kInf;
using lp::Model;
using lp::Sense;

const char* to_string(Design d) {
  switch (d) {
    case Design::SequentialDecoupled: return "seq-dec";
    case Design::SequentialCoupled: return "seq-coup";
    case Design::StochasticCoupled: return "stoch-coup";
  }
  return "?";
}

namespace {

std::string tk(int t) { return ".t" + std::to_string(t + 1); }

double clampv(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

// A terminal floor above the sum of the linepack ceilings can never be met;
// fail at build time with the row named so the caller sees the exact cause
// instead of a bare infeasibility.
void check_terminal_floor(const Model& m, const std::string& row, double floor,
                          const std::vector<std::pair<int, double>>& terms) {
  double ceiling = 0.0;
  for (const auto& [col, coef] : terms) ceiling += coef * m.column(col).ub;
  if (floor <= ceiling + 1e-9) return;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "row '%s': terminal linepack floor %.6g kcf exceeds the attainable "
                "ceiling %.6g kcf",
                row.c_str(), floor, ceiling);
  throw Error(Error::Kind::Infeasible, buf);
}

const Series& series_at(const SeriesMap& map, const std::string& id, int periods,
                        const std::string& what) {
  auto it = map.find(id);
  if (it == map.end())
    throw Error(Error::Kind::Validation, what + " missing for '" + id + "'");
  if (static_cast<int>(it->second.size()) != periods)
    throw Error(Error::Kind::Validation,
                what + " for '" + id + "' has " + std::to_string(it->second.size()) +
                    " periods, expected " + std::to_string(periods));
  return it->second;
}

double map_value(const SeriesMap& map, const std::string& id, int t) {
  auto it = map.find(id);
  if (it == map.end() || t >= static_cast<int>(it->second.size())) return 0.0;
  return it->second[t];
}

void check_realization(const EnergySystem& sys,
                       const std::vector<std::vector<double>>& realization) {
  if (realization.size() != sys.wind.size())
    throw Error(Error::Kind::Validation, "realization covers " +
                                             std::to_string(realization.size()) +
                                             " farms, system has " +
                                             std::to_string(sys.wind.size()));
  for (std::size_t j = 0; j < realization.size(); ++j)
    if (static_cast<int>(realization[j].size()) != sys.config.horizon)
      throw Error(Error::Kind::Validation,
                  "realization for farm '" + sys.wind[j].id + "' has wrong length");
}

void check_scenarios(const EnergySystem& sys, const ScenarioSet& scn) {
  if (scn.count() == 0)
    throw Error(Error::Kind::Validation, "scenario set is empty");
  for (int w = 0; w < scn.count(); ++w) check_realization(sys, scn.value[w]);
}

// ---------------------------------------------------------------------------
// Day-ahead power block.

struct DaPowerOpts {
  const GfppOffers* offers = nullptr;  // null: gas-fired energy is paid gas-side
  bool wind_installed_cap = false;     // bound wind by capacity, not forecast
  bool ideal_shift = false;            // zero-cost intertemporal shift per bus
};

void add_da_power(Model& m, const EnergySystem& sys, const DaPowerOpts& o) {
  const int T = sys.config.horizon;
  const PowerGrid& pg = sys.power;

  for (const DispatchableUnit& u : sys.units) {
    const Series* en = nullptr;
    if (u.gas_fired() && o.offers)
      en = &series_at(o.offers->energy, u.id, T, "energy offer");
    for (int t = 0; t < T; ++t) {
      double cost = u.gas_fired() ? (en ? (*en)[t] : 0.0) : *u.offer;
      m.add_col("p." + u.id + tk(t), 0.0, u.capacity, cost);
    }
  }
  for (const WindFarm& j : sys.wind)
    for (int t = 0; t < T; ++t) {
      double cap = o.wind_installed_cap ? j.capacity : j.forecast[t];
      m.add_col("w." + j.id + tk(t), 0.0, cap, 0.0);
    }
  const int ref = pg.bus_index(pg.reference_bus);
  for (int n = 0; n < static_cast<int>(pg.buses.size()); ++n)
    for (int t = 0; t < T; ++t) {
      double b = (n == ref) ? 0.0 : kInf;
      m.add_col("th." + pg.buses[n] + tk(t), -b, b, 0.0);
    }
  for (const Line& l : pg.lines)
    for (int t = 0; t < T; ++t)
      m.add_col("f." + l.id + tk(t), -l.capacity, l.capacity, 0.0);
  if (o.ideal_shift)
    for (const std::string& n : pg.buses)
      for (int t = 0; t < T; ++t) m.add_col("x." + n + tk(t), -kInf, kInf, 0.0);

  for (const Line& l : pg.lines) {
    int from = pg.bus_index(l.from), to = pg.bus_index(l.to);
    for (int t = 0; t < T; ++t)
      m.add_row("fdef." + l.id + tk(t), Sense::EQ, 0.0,
                {{m.col("f." + l.id + tk(t)), 1.0},
                 {m.col("th." + pg.buses[from] + tk(t)), -l.susceptance},
                 {m.col("th." + pg.buses[to] + tk(t)), l.susceptance}});
  }
  for (int n = 0; n < static_cast<int>(pg.buses.size()); ++n) {
    const std::string& bus = pg.buses[n];
    for (int t = 0; t < T; ++t) {
      std::vector<std::pair<int, double>> terms;
      for (const DispatchableUnit& u : sys.units)
        if (u.bus == bus) terms.push_back({m.col("p." + u.id + tk(t)), 1.0});
      for (const WindFarm& j : sys.wind)
        if (j.bus == bus) terms.push_back({m.col("w." + j.id + tk(t)), 1.0});
      for (const Line& l : pg.lines) {
        if (l.to == bus) terms.push_back({m.col("f." + l.id + tk(t)), 1.0});
        if (l.from == bus) terms.push_back({m.col("f." + l.id + tk(t)), -1.0});
      }
      if (o.ideal_shift) terms.push_back({m.col("x." + bus + tk(t)), 1.0});
      m.add_row("elbal." + bus + tk(t), Sense::EQ, pg.load[n][t], std::move(terms));
    }
  }
  if (o.ideal_shift)
    for (const std::string& n : pg.buses) {
      std::vector<std::pair<int, double>> terms;
      for (int t = 0; t < T; ++t) terms.push_back({m.col("x." + n + tk(t)), 1.0});
      m.add_row("xnet." + n, Sense::EQ, 0.0, std::move(terms));
    }
}

// ---------------------------------------------------------------------------
// Day-ahead gas block.

void add_da_gas(Model& m, const EnergySystem& sys, const SeriesMap* fuel) {
  const int T = sys.config.horizon;
  const GasGrid& gg = sys.gas;
  if (fuel)
    for (const auto& [node, _] : *fuel)
      if (gg.find_node(node) < 0)
        throw Error(Error::Kind::Validation, "fuel demand names unknown gas node '" + node + "'");
  if (gg.pipelines.empty() && gg.terminal_linepack > 0.0)
    throw Error(Error::Kind::Validation, "terminal linepack requires pipelines");

  for (const GasProducer& k : sys.producers)
    for (int t = 0; t < T; ++t)
      m.add_col("g." + k.id + tk(t), 0.0, k.capacity, k.offer);
  for (const GasStorage& s : sys.storages) {
    for (int t = 0; t < T; ++t) {
      m.add_col("gin." + s.id + tk(t), 0.0, s.inj_rate, 0.0);
      m.add_col("gout." + s.id + tk(t), 0.0, s.wdr_rate, s.offer);
      double lb = (t == T - 1) ? s.e0 : s.e_min;  // end at least as full as it began
      m.add_col("e." + s.id + tk(t), lb, s.e_max, 0.0);
    }
    for (int t = 0; t < T; ++t) {
      std::vector<std::pair<int, double>> terms{{m.col("e." + s.id + tk(t)), 1.0},
                                                {m.col("gin." + s.id + tk(t)), -1.0},
                                                {m.col("gout." + s.id + tk(t)), 1.0}};
      double rhs = 0.0;
      if (t == 0)
        rhs = s.e0;
      else
        terms.push_back({m.col("e." + s.id + tk(t - 1)), -1.0});
      m.add_row("ebal." + s.id + tk(t), Sense::EQ, rhs, std::move(terms));
    }
  }

  std::vector<std::vector<int>> pr(gg.nodes.size(), std::vector<int>(T));
  for (std::size_t n = 0; n < gg.nodes.size(); ++n)
    for (int t = 0; t < T; ++t)
      pr[n][t] = add_pressure_col(m, "nd." + gg.nodes[n].id + tk(t), gg.nodes[n]);

  const BigM mm = effective_big_m(gg, sys.config);
  std::vector<std::vector<PipeVars>> pv(gg.pipelines.size(), std::vector<PipeVars>(T));
  for (std::size_t z = 0; z < gg.pipelines.size(); ++z) {
    const Pipeline& pipe = gg.pipelines[z];
    int from = gg.node_index(pipe.from), to = gg.node_index(pipe.to);
    PipeGeometry geo = pipe_geometry(pipe, gg.nodes[from], gg.nodes[to], sys.config.oa_points);
    double h0 = pipe.linepack0 * sys.config.linepack_scale;
    for (int t = 0; t < T; ++t) {
      std::optional<int> h_prev;
      if (t > 0) h_prev = pv[z][t - 1].h;
      pv[z][t] = add_pipe_block(m, "pl." + pipe.id + tk(t), geo, mm, pr[from][t], pr[to][t],
                                h_prev, h0, sys.config.steady_state);
    }
  }
  for (const Compressor& c : gg.compressors) {
    int from = gg.node_index(c.from), to = gg.node_index(c.to);
    for (int t = 0; t < T; ++t)
      add_compressor_row(m, "cmp." + c.id + tk(t), c, pr[from][t], pr[to][t]);
  }

  for (std::size_t n = 0; n < gg.nodes.size(); ++n) {
    const std::string& node = gg.nodes[n].id;
    for (int t = 0; t < T; ++t) {
      std::vector<std::pair<int, double>> terms;
      for (const GasProducer& k : sys.producers)
        if (k.node == node) terms.push_back({m.col("g." + k.id + tk(t)), 1.0});
      for (const GasStorage& s : sys.storages)
        if (s.node == node) {
          terms.push_back({m.col("gout." + s.id + tk(t)), 1.0});
          terms.push_back({m.col("gin." + s.id + tk(t)), -1.0});
        }
      for (std::size_t z = 0; z < gg.pipelines.size(); ++z) {
        const Pipeline& pipe = gg.pipelines[z];
        if (pipe.from == node) {
          terms.push_back({pv[z][t].qout_rev, 1.0});
          terms.push_back({pv[z][t].qin_fwd, -1.0});
        }
        if (pipe.to == node) {
          terms.push_back({pv[z][t].qout_fwd, 1.0});
          terms.push_back({pv[z][t].qin_rev, -1.0});
        }
      }
      double rhs = gg.load[n][t];
      if (fuel)
        rhs += map_value(*fuel, node, t);
      else
        for (const DispatchableUnit& u : sys.units)
          if (u.gas_fired() && u.gas_node == node)
            terms.push_back({m.col("p." + u.id + tk(t)), -u.fuel_rate});
      m.add_row("gasbal." + node + tk(t), Sense::EQ, rhs, std::move(terms));
    }
  }
  if (!gg.pipelines.empty()) {
    std::vector<std::pair<int, double>> terms;
    for (std::size_t z = 0; z < gg.pipelines.size(); ++z)
      terms.push_back({pv[z][T - 1].h, 1.0});
    check_terminal_floor(m, "lpterm", gg.terminal_linepack, terms);
    m.add_row("lpterm", Sense::GE, gg.terminal_linepack, std::move(terms));
  }
}

// ---------------------------------------------------------------------------
// Balancing power block.

struct RtPowerOpts {
  std::string pre;                      // "" or "s.<scenario>."
  const DaSchedule* da = nullptr;       // null: day-ahead columns live in the model
  const GfppOffers* offers = nullptr;   // gas-fired redispatch offers; null: free
  const std::vector<std::vector<double>>* realization = nullptr;
  const SeriesMap* dp_caps = nullptr;
  double scale = 1.0;                   // objective weight
};

void add_rt_power(Model& m, const EnergySystem& sys, const RtPowerOpts& o) {
  const int T = sys.config.horizon;
  const PowerGrid& pg = sys.power;
  const std::string& P = o.pre;
  const bool fixed_da = o.da != nullptr;
  const auto& wreal = *o.realization;

  for (const DispatchableUnit& u : sys.units) {
    const Series *up = nullptr, *down = nullptr;
    if (u.gas_fired() && o.offers) {
      up = &series_at(o.offers->up, u.id, T, "upward regulation offer");
      down = &series_at(o.offers->down, u.id, T, "downward regulation offer");
    }
    for (int t = 0; t < T; ++t) {
      double lb = -u.res_down, ub = u.res_up;
      if (fixed_da) {
        double pstar = clampv(map_value(o.da->unit_p, u.id, t), 0.0, u.capacity);
        lb = std::max(lb, -pstar);
        ub = std::min(ub, u.capacity - pstar);
      }
      if (o.dp_caps) {
        auto it = o.dp_caps->find(u.id);
        if (it != o.dp_caps->end() && t < static_cast<int>(it->second.size()))
          ub = std::min(ub, it->second[t]);
      }
      ub = std::max(lb, ub);
      double cu = u.gas_fired() ? (up ? (*up)[t] : 0.0) : *u.offer_up;
      double cd = u.gas_fired() ? (down ? (*down)[t] : 0.0) : *u.offer_down;
      m.add_col(P + "dp." + u.id + tk(t), lb, ub, 0.0);
      m.add_col(P + "pu." + u.id + tk(t), 0.0, u.res_up, o.scale * cu);
      m.add_col(P + "pd." + u.id + tk(t), 0.0, u.res_down, -o.scale * cd);
      m.add_row(P + "dpdef." + u.id + tk(t), Sense::EQ, 0.0,
                {{m.col(P + "dp." + u.id + tk(t)), 1.0},
                 {m.col(P + "pu." + u.id + tk(t)), -1.0},
                 {m.col(P + "pd." + u.id + tk(t)), 1.0}});
      if (!fixed_da) {
        int pcol = m.col("p." + u.id + tk(t));
        int dcol = m.col(P + "dp." + u.id + tk(t));
        m.add_row(P + "hru." + u.id + tk(t), Sense::LE, u.capacity,
                  {{pcol, 1.0}, {dcol, 1.0}});
        m.add_row(P + "hrd." + u.id + tk(t), Sense::LE, 0.0,
                  {{pcol, -1.0}, {dcol, -1.0}});
      }
    }
  }
  for (std::size_t j = 0; j < sys.wind.size(); ++j)
    for (int t = 0; t < T; ++t)
      m.add_col(P + "wsp." + sys.wind[j].id + tk(t), 0.0, wreal[j][t], 0.0);
  const int ref = pg.bus_index(pg.reference_bus);
  for (int n = 0; n < static_cast<int>(pg.buses.size()); ++n)
    for (int t = 0; t < T; ++t) {
      m.add_col(P + "she." + pg.buses[n] + tk(t), 0.0, pg.load[n][t],
                o.scale * sys.config.shed_penalty_el);
      double b = (n == ref) ? 0.0 : kInf;
      m.add_col(P + "thr." + pg.buses[n] + tk(t), -b, b, 0.0);
    }
  for (const Line& l : pg.lines)
    for (int t = 0; t < T; ++t)
      m.add_col(P + "fr." + l.id + tk(t), -l.capacity, l.capacity, 0.0);

  for (const Line& l : pg.lines) {
    int from = pg.bus_index(l.from), to = pg.bus_index(l.to);
    for (int t = 0; t < T; ++t)
      m.add_row(P + "fdef_rt." + l.id + tk(t), Sense::EQ, 0.0,
                {{m.col(P + "fr." + l.id + tk(t)), 1.0},
                 {m.col(P + "thr." + pg.buses[from] + tk(t)), -l.susceptance},
                 {m.col(P + "thr." + pg.buses[to] + tk(t)), l.susceptance}});
  }

  for (int n = 0; n < static_cast<int>(pg.buses.size()); ++n) {
    const std::string& bus = pg.buses[n];
    for (int t = 0; t < T; ++t) {
      std::vector<std::pair<int, double>> terms;
      double rhs = 0.0;
      for (const DispatchableUnit& u : sys.units)
        if (u.bus == bus) terms.push_back({m.col(P + "dp." + u.id + tk(t)), 1.0});
      terms.push_back({m.col(P + "she." + bus + tk(t)), 1.0});
      for (std::size_t j = 0; j < sys.wind.size(); ++j) {
        if (sys.wind[j].bus != bus) continue;
        terms.push_back({m.col(P + "wsp." + sys.wind[j].id + tk(t)), -1.0});
        if (fixed_da)
          rhs += map_value(o.da->wind_w, sys.wind[j].id, t) - wreal[j][t];
        else {
          terms.push_back({m.col("w." + sys.wind[j].id + tk(t)), -1.0});
          rhs -= wreal[j][t];
        }
      }
      for (const Line& l : pg.lines) {
        double sign = 0.0;
        if (l.to == bus) sign = 1.0;
        if (l.from == bus) sign = -1.0;
        if (sign == 0.0) continue;
        terms.push_back({m.col(P + "fr." + l.id + tk(t)), sign});
        if (fixed_da)
          rhs += sign * map_value(o.da->flow, l.id, t);
        else
          terms.push_back({m.col("f." + l.id + tk(t)), -sign});
      }
      m.add_row(P + "elbal_rt." + bus + tk(t), Sense::EQ, rhs, std::move(terms));
    }
  }
}

// ---------------------------------------------------------------------------
// Balancing gas block.

struct RtGasOpts {
  std::string pre;
  const DaSchedule* da = nullptr;      // null: day-ahead columns live in the model
  const SeriesMap* fuel_dev = nullptr;  // null: couple the dp columns instead
  double scale = 1.0;
};

void add_rt_gas(Model& m, const EnergySystem& sys, const RtGasOpts& o) {
  const int T = sys.config.horizon;
  const GasGrid& gg = sys.gas;
  const std::string& P = o.pre;
  const bool fixed_da = o.da != nullptr;
  if (o.fuel_dev)
    for (const auto& [node, _] : *o.fuel_dev)
      if (gg.find_node(node) < 0)
        throw Error(Error::Kind::Validation,
                    "fuel deviation names unknown gas node '" + node + "'");

  for (const GasProducer& k : sys.producers)
    for (int t = 0; t < T; ++t) {
      double uu = k.res_up, ud = k.res_down;
      if (fixed_da) {
        double gstar = clampv(map_value(o.da->producer_g, k.id, t), 0.0, k.capacity);
        uu = std::min(uu, k.capacity - gstar);
        ud = std::min(ud, gstar);
      }
      m.add_col(P + "gu." + k.id + tk(t), 0.0, uu, o.scale * k.offer_up);
      m.add_col(P + "gd." + k.id + tk(t), 0.0, ud, -o.scale * k.offer_down);
      if (!fixed_da) {
        int gcol = m.col("g." + k.id + tk(t));
        m.add_row(P + "phru." + k.id + tk(t), Sense::LE, k.capacity,
                  {{gcol, 1.0}, {m.col(P + "gu." + k.id + tk(t)), 1.0}});
        m.add_row(P + "phrd." + k.id + tk(t), Sense::LE, 0.0,
                  {{m.col(P + "gd." + k.id + tk(t)), 1.0}, {gcol, -1.0}});
      }
    }
  for (const GasStorage& s : sys.storages) {
    for (int t = 0; t < T; ++t) {
      m.add_col(P + "rgin." + s.id + tk(t), 0.0, s.inj_rate, -o.scale * s.offer_down);
      m.add_col(P + "rgout." + s.id + tk(t), 0.0, s.wdr_rate, o.scale * s.offer_up);
      double lb = (t == T - 1) ? s.e0 : s.e_min;
      m.add_col(P + "re." + s.id + tk(t), lb, s.e_max, 0.0);
    }
    for (int t = 0; t < T; ++t) {
      std::vector<std::pair<int, double>> terms{{m.col(P + "re." + s.id + tk(t)), 1.0},
                                                {m.col(P + "rgin." + s.id + tk(t)), -1.0},
                                                {m.col(P + "rgout." + s.id + tk(t)), 1.0}};
      double rhs = 0.0;
      if (t == 0)
        rhs = s.e0;
      else
        terms.push_back({m.col(P + "re." + s.id + tk(t - 1)), -1.0});
      m.add_row(P + "ebal_rt." + s.id + tk(t), Sense::EQ, rhs, std::move(terms));
    }
  }

  std::vector<std::vector<int>> pr(gg.nodes.size(), std::vector<int>(T));
  for (std::size_t n = 0; n < gg.nodes.size(); ++n)
    for (int t = 0; t < T; ++t) {
      pr[n][t] = add_pressure_col(m, P + "ndr." + gg.nodes[n].id + tk(t), gg.nodes[n]);
      m.add_col(P + "shg." + gg.nodes[n].id + tk(t), 0.0, gg.load[n][t],
                o.scale * sys.config.shed_penalty_gas);
    }

  const BigM mm = effective_big_m(gg, sys.config);
  std::vector<std::vector<PipeVars>> pv(gg.pipelines.size(), std::vector<PipeVars>(T));
  for (std::size_t z = 0; z < gg.pipelines.size(); ++z) {
    const Pipeline& pipe = gg.pipelines[z];
    int from = gg.node_index(pipe.from), to = gg.node_index(pipe.to);
    PipeGeometry geo = pipe_geometry(pipe, gg.nodes[from], gg.nodes[to], sys.config.oa_points);
    double h0 = pipe.linepack0 * sys.config.linepack_scale;
    for (int t = 0; t < T; ++t) {
      std::optional<int> h_prev;
      if (t > 0) h_prev = pv[z][t - 1].h;
      pv[z][t] = add_pipe_block(m, P + "plr." + pipe.id + tk(t), geo, mm, pr[from][t],
                                pr[to][t], h_prev, h0, sys.config.steady_state);
    }
  }
  for (const Compressor& c : gg.compressors) {
    int from = gg.node_index(c.from), to = gg.node_index(c.to);
    for (int t = 0; t < T; ++t)
      add_compressor_row(m, P + "cmpr." + c.id + tk(t), c, pr[from][t], pr[to][t]);
  }

  for (std::size_t n = 0; n < gg.nodes.size(); ++n) {
    const std::string& node = gg.nodes[n].id;
    for (int t = 0; t < T; ++t) {
      std::vector<std::pair<int, double>> terms;
      double rhs = 0.0;
      for (const GasProducer& k : sys.producers)
        if (k.node == node) {
          terms.push_back({m.col(P + "gu." + k.id + tk(t)), 1.0});
          terms.push_back({m.col(P + "gd." + k.id + tk(t)), -1.0});
        }
      for (const GasStorage& s : sys.storages)
        if (s.node == node) {
          terms.push_back({m.col(P + "rgout." + s.id + tk(t)), 1.0});
          terms.push_back({m.col(P + "rgin." + s.id + tk(t)), -1.0});
          // The re-optimized storage dispatch replaces the scheduled one, so
          // the scheduled net withdrawal moves to the other side of the row.
          if (fixed_da) {
            rhs += map_value(o.da->storage_out, s.id, t) - map_value(o.da->storage_in, s.id, t);
          } else {
            terms.push_back({m.col("gout." + s.id + tk(t)), -1.0});
            terms.push_back({m.col("gin." + s.id + tk(t)), 1.0});
          }
        }
      terms.push_back({m.col(P + "shg." + node + tk(t)), 1.0});
      for (std::size_t z = 0; z < gg.pipelines.size(); ++z) {
        const Pipeline& pipe = gg.pipelines[z];
        int out_col = -1, in_col = -1, da_out = -1, da_in = -1;
        if (pipe.from == node) {
          out_col = pv[z][t].qout_rev;
          in_col = pv[z][t].qin_fwd;
          if (!fixed_da) {
            da_out = m.col("pl." + pipe.id + tk(t) + ".qout_rev");
            da_in = m.col("pl." + pipe.id + tk(t) + ".qin_fwd");
          }
        } else if (pipe.to == node) {
          out_col = pv[z][t].qout_fwd;
          in_col = pv[z][t].qin_rev;
          if (!fixed_da) {
            da_out = m.col("pl." + pipe.id + tk(t) + ".qout_fwd");
            da_in = m.col("pl." + pipe.id + tk(t) + ".qin_rev");
          }
        } else {
          continue;
        }
        terms.push_back({out_col, 1.0});
        terms.push_back({in_col, -1.0});
        if (!fixed_da) {
          terms.push_back({da_out, -1.0});
          terms.push_back({da_in, 1.0});
        }
      }
      if (fixed_da) rhs += map_value(o.da->pipe_import, node, t);
      if (o.fuel_dev)
        rhs += map_value(*o.fuel_dev, node, t);
      else
        for (const DispatchableUnit& u : sys.units)
          if (u.gas_fired() && u.gas_node == node)
            terms.push_back({m.col(P + "dp." + u.id + tk(t)), -u.fuel_rate});
      m.add_row(P + "gasbal_rt." + node + tk(t), Sense::EQ, rhs, std::move(terms));
    }
  }
  if (!gg.pipelines.empty()) {
    std::vector<std::pair<int, double>> terms;
    for (std::size_t z = 0; z < gg.pipelines.size(); ++z)
      terms.push_back({pv[z][T - 1].h, 1.0});
    check_terminal_floor(m, P + "lpterm_rt", gg.terminal_linepack, terms);
    m.add_row(P + "lpterm_rt", Sense::GE, gg.terminal_linepack, std::move(terms));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Public builders.

lp::Model build_el_da(const EnergySystem& sys, const GfppOffers& offers) {
  Model m;
  DaPowerOpts o;
  o.offers = &offers;
  o.ideal_shift = sys.config.ideal_storage;
  add_da_power(m, sys, o);
  return m;
}

SeriesMap fuel_demand(const EnergySystem& sys, const SeriesMap& gfpp_p) {
  const int T = sys.config.horizon;
  SeriesMap out;
  for (const DispatchableUnit& u : sys.units) {
    if (!u.gas_fired()) continue;
    const Series& p = series_at(gfpp_p, u.id, T, "gas-fired dispatch");
    Series& d = out.try_emplace(u.gas_node, Series(T, 0.0)).first->second;
    for (int t = 0; t < T; ++t) d[t] += u.fuel_rate * p[t];
  }
  return out;
}

lp::Model build_gas_da(const EnergySystem& sys, const SeriesMap& fuel) {
  Model m;
  add_da_gas(m, sys, &fuel);
  return m;
}

lp::Model build_el_rt(const EnergySystem& sys, const GfppOffers& offers, const DaSchedule& da,
                      const std::vector<std::vector<double>>& realization,
                      const SeriesMap* dp_caps) {
  check_realization(sys, realization);
  Model m;
  RtPowerOpts o;
  o.da = &da;
  o.offers = &offers;
  o.realization = &realization;
  o.dp_caps = dp_caps;
  add_rt_power(m, sys, o);
  return m;
}

SeriesMap fuel_deviation(const EnergySystem& sys, const SeriesMap& gfpp_dp) {
  return fuel_demand(sys, gfpp_dp);
}

lp::Model build_gas_rt(const EnergySystem& sys, const DaSchedule& da, const SeriesMap& fuel_dev) {
  Model m;
  RtGasOpts o;
  o.da = &da;
  o.fuel_dev = &fuel_dev;
  add_rt_gas(m, sys, o);
  return m;
}

lp::Model build_coupled_da(const EnergySystem& sys) {
  Model m;
  DaPowerOpts o;
  o.ideal_shift = sys.config.ideal_storage;
  add_da_power(m, sys, o);
  add_da_gas(m, sys, nullptr);
  return m;
}

lp::Model build_coupled_rt(const EnergySystem& sys, const DaSchedule& da,
                           const std::vector<std::vector<double>>& realization) {
  check_realization(sys, realization);
  Model m;
  RtPowerOpts o;
  o.da = &da;
  o.realization = &realization;
  add_rt_power(m, sys, o);
  RtGasOpts og;
  og.da = &da;
  add_rt_gas(m, sys, og);
  return m;
}

namespace {

// Hard cap on stochastic-program columns; beyond it the dense solver would
// thrash, so refuse with a clear error instead of building the model.
constexpr long kStochColumnLimit = 200000;

long stoch_column_estimate(const EnergySystem& sys, int scenarios) {
  const long T = sys.config.horizon;
  const long da = T * (static_cast<long>(sys.units.size()) + sys.wind.size() +
                       2 * sys.power.buses.size() + sys.power.lines.size() +
                       sys.producers.size() + 3 * sys.storages.size() +
                       sys.gas.nodes.size() + 10 * sys.gas.pipelines.size());
  const long rt = T * (3 * static_cast<long>(sys.units.size()) + sys.wind.size() +
                       2 * sys.power.buses.size() + sys.power.lines.size() +
                       2 * sys.producers.size() + 3 * sys.storages.size() +
                       2 * sys.gas.nodes.size() + 10 * sys.gas.pipelines.size());
  return da + rt * scenarios;
}

}  // namespace

lp::Model build_stoch(const EnergySystem& sys, const ScenarioSet& scn) {
  check_scenarios(sys, scn);
  const long est = stoch_column_estimate(sys, scn.count());
  if (est > kStochColumnLimit)
    throw Error(Error::Kind::Validation,
                "stochastic program would need about " + std::to_string(est) +
                    " columns over " + std::to_string(scn.count()) +
                    " scenarios; the limit is " + std::to_string(kStochColumnLimit));
  Model m;
  DaPowerOpts o;
  o.wind_installed_cap = true;
  o.ideal_shift = sys.config.ideal_storage;
  add_da_power(m, sys, o);
  add_da_gas(m, sys, nullptr);
  for (int w = 0; w < scn.count(); ++w) {
    RtPowerOpts op;
    op.pre = "s." + scn.ids[w] + ".";
    op.realization = &scn.value[w];
    op.scale = scn.probability[w];
    add_rt_power(m, sys, op);
    RtGasOpts og;
    og.pre = op.pre;
    og.scale = scn.probability[w];
    add_rt_gas(m, sys, og);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Solving and extraction.

lp::SolveOptions solver_options(const RunConfig& cfg) {
  lp::SolveOptions opt;
  opt.mip_gap = cfg.mip_gap;
  opt.feas_tol = cfg.feas_tol;
  return opt;
}

SolvedModel solve_with_prices(const lp::Model& m, const std::string& label,
                              const lp::SolveOptions& opt) {
  SolvedModel out;
  out.milp = lp::solve_milp(m, opt);
  if (!out.milp.optimal()) {
    Error::Kind kind = Error::Kind::Solver;
    if (out.milp.status == lp::SolveStatus::Infeasible) kind = Error::Kind::Infeasible;
    if (out.milp.status == lp::SolveStatus::GapLimit) kind = Error::Kind::GapLimit;
    std::string msg = label + ": " + lp::to_string(out.milp.status);
    if (!out.milp.message.empty()) msg += " (" + out.milp.message + ")";
    throw Error(kind, msg);
  }
  out.fixed = lp::solve_lp_fixed(m, out.milp, opt);
  if (!out.fixed.optimal())
    throw Error(Error::Kind::Solver, label + ": direction-fixed re-solve " +
                                         lp::to_string(out.fixed.status));
  double a = out.milp.objective, b = out.fixed.objective;
  if (std::abs(a - b) > 1e-6 * std::max(1.0, std::abs(a)))
    throw Error(Error::Kind::Solver,
                label + ": direction-fixed objective drifts from the mixed-binary optimum");
  return out;
}

namespace {

// Pull "<head>.<id>.t<k>[.tail]" column values for every listed id; clamp to
// the given physical range. Returns false when the family is absent.
template <typename Ids, typename GetId>
bool grab_family(SeriesMap& dst, const lp::Model& m, const lp::Solution& sol, int T,
                 const std::string& head, const Ids& ids, GetId get_id,
                 const std::string& tail = "", double lo = -kInf, double hi = kInf) {
  bool any = false;
  for (const auto& e : ids) {
    const std::string id = get_id(e);
    Series s(T, 0.0);
    bool present = true;
    for (int t = 0; t < T; ++t) {
      int j = m.find_col(head + "." + id + tk(t) + tail);
      if (j < 0) {
        present = false;
        break;
      }
      s[t] = clampv(sol.col_value[j], lo, hi);
    }
    if (present) {
      dst[id] = std::move(s);
      any = true;
    }
  }
  return any;
}

Series dual_series(const lp::Model& m, const lp::Solution& duals, int T,
                   const std::string& head, const std::string& id, double scale) {
  Series s(T, 0.0);
  for (int t = 0; t < T; ++t) {
    int r = m.find_row(head + "." + id + tk(t));
    if (r >= 0 && r < static_cast<int>(duals.row_dual.size()))
      s[t] = duals.row_dual[r] / scale;
  }
  return s;
}

// Net pipe deliveries per gas node from one pipe-block family.
void pipe_import_series(SeriesMap& dst, const EnergySystem& sys, const lp::Model& m,
                        const lp::Solution& sol, int T, const std::string& head) {
  const GasGrid& gg = sys.gas;
  if (gg.nodes.empty()) return;
  if (!gg.pipelines.empty() &&
      m.find_col(head + "." + gg.pipelines.front().id + ".t1.qin_fwd") < 0)
    return;  // this model carries no such pipe family
  for (const GasNode& node : gg.nodes) dst[node.id] = Series(T, 0.0);
  for (const Pipeline& pipe : gg.pipelines)
    for (int t = 0; t < T; ++t) {
      const std::string base = head + "." + pipe.id + tk(t);
      double in_fwd = sol.col_value[m.col(base + ".qin_fwd")];
      double out_fwd = sol.col_value[m.col(base + ".qout_fwd")];
      double in_rev = sol.col_value[m.col(base + ".qin_rev")];
      double out_rev = sol.col_value[m.col(base + ".qout_rev")];
      dst[pipe.from][t] += out_rev - in_fwd;
      dst[pipe.to][t] += out_fwd - in_rev;
    }
}

void pipe_end_flows(SeriesMap& in_dst, SeriesMap& out_dst, const EnergySystem& sys,
                    const lp::Model& m, const lp::Solution& sol, int T,
                    const std::string& head) {
  for (const Pipeline& pipe : sys.gas.pipelines) {
    Series in(T, 0.0), out(T, 0.0);
    bool present = true;
    for (int t = 0; t < T; ++t) {
      const std::string base = head + "." + pipe.id + tk(t);
      int j = m.find_col(base + ".qin_fwd");
      if (j < 0) {
        present = false;
        break;
      }
      in[t] = sol.col_value[j] + sol.col_value[m.col(base + ".qin_rev")];
      out[t] = sol.col_value[m.col(base + ".qout_fwd")] +
               sol.col_value[m.col(base + ".qout_rev")];
    }
    if (present) {
      in_dst[pipe.id] = std::move(in);
      out_dst[pipe.id] = std::move(out);
    }
  }
}

const auto id_of = [](const auto& e) { return e.id; };
const auto self_of = [](const std::string& s) { return s; };

}  // namespace

void extract_da_into(DaSchedule& da, const EnergySystem& sys, const lp::Model& m,
                     const lp::Solution& primal, const lp::Solution* duals) {
  const int T = sys.config.horizon;
  bool has_el = false, has_gas = false;
  for (const DispatchableUnit& u : sys.units)
    has_el |= grab_family(da.unit_p, m, primal, T, "p", std::vector<DispatchableUnit>{u},
                          id_of, "", 0.0, u.capacity);
  for (const WindFarm& j : sys.wind)
    has_el |= grab_family(da.wind_w, m, primal, T, "w", std::vector<WindFarm>{j}, id_of, "",
                          0.0, j.capacity);
  for (const Line& l : sys.power.lines)
    has_el |= grab_family(da.flow, m, primal, T, "f", std::vector<Line>{l}, id_of, "",
                          -l.capacity, l.capacity);
  has_el |= grab_family(da.angle, m, primal, T, "th", sys.power.buses, self_of);

  for (const GasProducer& k : sys.producers)
    has_gas |= grab_family(da.producer_g, m, primal, T, "g", std::vector<GasProducer>{k},
                           id_of, "", 0.0, k.capacity);
  for (const GasStorage& s : sys.storages) {
    grab_family(da.storage_in, m, primal, T, "gin", std::vector<GasStorage>{s}, id_of, "",
                0.0, s.inj_rate);
    grab_family(da.storage_out, m, primal, T, "gout", std::vector<GasStorage>{s}, id_of, "",
                0.0, s.wdr_rate);
    grab_family(da.storage_e, m, primal, T, "e", std::vector<GasStorage>{s}, id_of, "",
                s.e_min, s.e_max);
  }
  for (const GasNode& node : sys.gas.nodes)
    has_gas |= grab_family(da.pressure, m, primal, T, "nd", std::vector<GasNode>{node}, id_of,
                           ".pr", node.pr_min, node.pr_max);
  grab_family(da.linepack, m, primal, T, "pl", sys.gas.pipelines, id_of, ".h");
  grab_family(da.pipe_flow, m, primal, T, "pl", sys.gas.pipelines, id_of, ".qsig_fwd");
  pipe_end_flows(da.pipe_in, da.pipe_out, sys, m, primal, T, "pl");
  if (has_gas) pipe_import_series(da.pipe_import, sys, m, primal, T, "pl");

  if (duals) {
    if (has_el)
      for (const std::string& bus : sys.power.buses)
        da.price_el[bus] = dual_series(m, *duals, T, "elbal", bus, 1.0);
    if (has_gas)
      for (const GasNode& node : sys.gas.nodes)
        da.price_gas[node.id] = dual_series(m, *duals, T, "gasbal", node.id, 1.0);
  }
}

BalancingOutcome extract_rt(const EnergySystem& sys, const lp::Model& m,
                            const lp::Solution& primal, const lp::Solution* duals,
                            const std::string& prefix, const std::string& scenario_id,
                            double dual_scale) {
  const int T = sys.config.horizon;
  BalancingOutcome out;
  out.scenario = scenario_id;
  bool has_el = false, has_gas = false;
  for (const DispatchableUnit& u : sys.units) {
    has_el |= grab_family(out.delta_p, m, primal, T, prefix + "dp",
                          std::vector<DispatchableUnit>{u}, id_of, "", -u.res_down, u.res_up);
    grab_family(out.reg_up, m, primal, T, prefix + "pu", std::vector<DispatchableUnit>{u},
                id_of, "", 0.0, u.res_up);
    grab_family(out.reg_down, m, primal, T, prefix + "pd", std::vector<DispatchableUnit>{u},
                id_of, "", 0.0, u.res_down);
  }
  grab_family(out.spill, m, primal, T, prefix + "wsp", sys.wind, id_of, "", 0.0, kInf);
  grab_family(out.shed_el, m, primal, T, prefix + "she", sys.power.buses, self_of, "", 0.0,
              kInf);
  for (const Line& l : sys.power.lines)
    grab_family(out.flow, m, primal, T, prefix + "fr", std::vector<Line>{l}, id_of, "",
                -l.capacity, l.capacity);
  grab_family(out.angle, m, primal, T, prefix + "thr", sys.power.buses, self_of);

  for (const GasProducer& k : sys.producers) {
    has_gas |= grab_family(out.producer_up, m, primal, T, prefix + "gu",
                           std::vector<GasProducer>{k}, id_of, "", 0.0, k.res_up);
    grab_family(out.producer_down, m, primal, T, prefix + "gd", std::vector<GasProducer>{k},
                id_of, "", 0.0, k.res_down);
  }
  for (const GasStorage& s : sys.storages) {
    grab_family(out.storage_r_in, m, primal, T, prefix + "rgin", std::vector<GasStorage>{s},
                id_of, "", 0.0, s.inj_rate);
    grab_family(out.storage_r_out, m, primal, T, prefix + "rgout", std::vector<GasStorage>{s},
                id_of, "", 0.0, s.wdr_rate);
    grab_family(out.storage_r_e, m, primal, T, prefix + "re", std::vector<GasStorage>{s},
                id_of, "", s.e_min, s.e_max);
  }
  for (const GasNode& node : sys.gas.nodes) {
    has_gas |= grab_family(out.pressure, m, primal, T, prefix + "ndr",
                           std::vector<GasNode>{node}, id_of, ".pr", node.pr_min, node.pr_max);
    grab_family(out.shed_gas, m, primal, T, prefix + "shg", std::vector<GasNode>{node}, id_of,
                "", 0.0, kInf);
  }
  grab_family(out.linepack, m, primal, T, prefix + "plr", sys.gas.pipelines, id_of, ".h");
  grab_family(out.pipe_flow, m, primal, T, prefix + "plr", sys.gas.pipelines, id_of,
              ".qsig_fwd");
  pipe_end_flows(out.pipe_in, out.pipe_out, sys, m, primal, T, prefix + "plr");
  if (has_gas) pipe_import_series(out.pipe_import, sys, m, primal, T, prefix + "plr");

  if (duals) {
    if (has_el)
      for (const std::string& bus : sys.power.buses)
        out.price_el[bus] = dual_series(m, *duals, T, prefix + "elbal_rt", bus, dual_scale);
    if (has_gas)
      for (const GasNode& node : sys.gas.nodes)
        out.price_gas[node.id] =
            dual_series(m, *duals, T, prefix + "gasbal_rt", node.id, dual_scale);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Offer derivation and runners.

GfppOffers derive_gfpp_offers(const EnergySystem& sys, const SeriesMap& gas_price,
                              double mis_factor) {
  const int T = sys.config.horizon;
  GfppOffers offers;
  for (const DispatchableUnit& u : sys.units) {
    if (!u.gas_fired()) continue;
    const Series& lam = series_at(gas_price, u.gas_node, T, "day-ahead gas price");
    Series en(T), up(T), down(T);
    for (int t = 0; t < T; ++t) {
      en[t] = mis_factor * lam[t] * u.fuel_rate;
      up[t] = sys.config.reg_up_factor * en[t];
      down[t] = sys.config.reg_down_factor * en[t];
    }
    offers.energy[u.id] = std::move(en);
    offers.up[u.id] = std::move(up);
    offers.down[u.id] = std::move(down);
  }
  return offers;
}

namespace {

// Merge the gas-side fields of `gas` into `el` (separate balancing solves of
// the decoupled design).
void merge_gas_outcome(BalancingOutcome& el, BalancingOutcome&& gas) {
  el.producer_up = std::move(gas.producer_up);
  el.producer_down = std::move(gas.producer_down);
  el.storage_r_in = std::move(gas.storage_r_in);
  el.storage_r_out = std::move(gas.storage_r_out);
  el.storage_r_e = std::move(gas.storage_r_e);
  el.shed_gas = std::move(gas.shed_gas);
  el.pressure = std::move(gas.pressure);
  el.linepack = std::move(gas.linepack);
  el.pipe_flow = std::move(gas.pipe_flow);
  el.pipe_in = std::move(gas.pipe_in);
  el.pipe_out = std::move(gas.pipe_out);
  el.pipe_import = std::move(gas.pipe_import);
  el.price_gas = std::move(gas.price_gas);
}

constexpr double kShedTol = 1e-6;

// Tighten redispatch caps for gas-fired units whose fuel draw sheds
// residential load at their node: at each shedding node/period, walk back to
// the latest period with a positive draw (linepack couples periods) and scale
// every positive redispatch there down proportionally. Returns true when any
// cap tightened.
bool tighten_gfpp_caps(const EnergySystem& sys, const BalancingOutcome& el,
                       const BalancingOutcome& gas, SeriesMap& caps) {
  const int T = sys.config.horizon;
  bool tightened = false;
  for (const GasNode& node : sys.gas.nodes) {
    auto shed_it = gas.shed_gas.find(node.id);
    if (shed_it == gas.shed_gas.end()) continue;
    for (int t = 0; t < T; ++t) {
      if (shed_it->second[t] <= kShedTol) continue;
      for (int tau = t; tau >= 0; --tau) {
        double draw = 0.0;
        for (const DispatchableUnit& u : sys.units)
          if (u.gas_fired() && u.gas_node == node.id)
            draw += u.fuel_rate * std::max(0.0, map_value(el.delta_p, u.id, tau));
        if (draw <= kShedTol) continue;
        double excess = std::min(shed_it->second[t], draw);
        double keep = 1.0 - excess / draw;
        for (const DispatchableUnit& u : sys.units) {
          if (!u.gas_fired() || u.gas_node != node.id) continue;
          double dp = map_value(el.delta_p, u.id, tau);
          if (dp <= kShedTol) continue;
          Series& cap = caps.try_emplace(u.id, Series(T, kInf)).first->second;
          double next = dp * keep;
          if (next < cap[tau] - kShedTol) {
            cap[tau] = next;
            tightened = true;
          }
        }
        break;  // cap the latest drawing period first, then re-solve
      }
    }
  }
  return tightened;
}

}  // namespace

PolicyRun run_seq_dec(const EnergySystem& sys, const ScenarioSet& scn,
                      const GfppOffers& offers) {
  check_scenarios(sys, scn);
  const lp::SolveOptions opt = solver_options(sys.config);
  PolicyRun run;
  run.design = Design::SequentialDecoupled;
  run.steady_state = sys.config.steady_state;
  run.offers = offers;

  Model mel = build_el_da(sys, offers);
  SolvedModel sel = solve_with_prices(mel, "electric day-ahead clearing", opt);
  extract_da_into(run.da, sys, mel, sel.fixed, &sel.fixed);

  SeriesMap fuel = fuel_demand(sys, run.da.unit_p);
  Model mgas = build_gas_da(sys, fuel);
  SolvedModel sgas = solve_with_prices(mgas, "gas day-ahead clearing", opt);
  extract_da_into(run.da, sys, mgas, sgas.fixed, &sgas.fixed);
  run.da_objective = sel.milp.objective + sgas.milp.objective;

  for (int w = 0; w < scn.count(); ++w) {
    const std::string& id = scn.ids[w];
    SeriesMap caps;
    BalancingOutcome el, gas;
    int iters = 0;
    double rt_obj = 0.0;
    for (;;) {
      Model mrt = build_el_rt(sys, offers, run.da, scn.value[w], caps.empty() ? nullptr : &caps);
      SolvedModel s1 = solve_with_prices(mrt, "electric balancing for scenario " + id, opt);
      el = extract_rt(sys, mrt, s1.fixed, &s1.fixed, "", id, 1.0);

      SeriesMap dev = fuel_deviation(sys, el.delta_p);
      Model mgrt = build_gas_rt(sys, run.da, dev);
      SolvedModel s2 = solve_with_prices(mgrt, "gas balancing for scenario " + id, opt);
      gas = extract_rt(sys, mgrt, s2.fixed, &s2.fixed, "", id, 1.0);
      rt_obj = s1.milp.objective + s2.milp.objective;

      if (!tighten_gfpp_caps(sys, el, gas, caps)) break;
      if (++iters >= sys.config.curtail_iters_max) {
        run.curtail_flagged = true;
        break;
      }
    }
    run.rt_objectives.push_back(rt_obj);
    merge_gas_outcome(el, std::move(gas));
    el.curtail_iterations = iters;
    for (const auto& [uid, cap] : caps) el.gfpp_caps[uid] = cap;
    run.curtail_iterations = std::max(run.curtail_iterations, iters);
    run.rt.push_back(std::move(el));
  }
  return run;
}

PolicyRun run_seq_coup(const EnergySystem& sys, const ScenarioSet& scn) {
  check_scenarios(sys, scn);
  const lp::SolveOptions opt = solver_options(sys.config);
  PolicyRun run;
  run.design = Design::SequentialCoupled;
  run.steady_state = sys.config.steady_state;

  Model mda = build_coupled_da(sys);
  SolvedModel sda = solve_with_prices(mda, "coupled day-ahead clearing", opt);
  extract_da_into(run.da, sys, mda, sda.fixed, &sda.fixed);
  run.da_objective = sda.milp.objective;

  for (int w = 0; w < scn.count(); ++w) {
    const std::string& id = scn.ids[w];
    Model mrt = build_coupled_rt(sys, run.da, scn.value[w]);
    SolvedModel s = solve_with_prices(mrt, "coupled balancing for scenario " + id, opt);
    run.rt.push_back(extract_rt(sys, mrt, s.fixed, &s.fixed, "", id, 1.0));
    run.rt_objectives.push_back(s.milp.objective);
  }
  return run;
}

PolicyRun run_stoch_coup(const EnergySystem& sys, const ScenarioSet& scn) {
  check_scenarios(sys, scn);
  const lp::SolveOptions opt = solver_options(sys.config);
  PolicyRun run;
  run.design = Design::StochasticCoupled;
  run.steady_state = sys.config.steady_state;

  Model ms = build_stoch(sys, scn);
  SolvedModel s = solve_with_prices(ms, "stochastic clearing", opt);
  extract_da_into(run.da, sys, ms, s.fixed, &s.fixed);
  run.joint_objective = s.milp.objective;
  for (int w = 0; w < scn.count(); ++w)
    run.rt.push_back(extract_rt(sys, ms, s.fixed, &s.fixed, "s." + scn.ids[w] + ".",
                                scn.ids[w], scn.probability[w]));
  return run;
}

PolicyRun run_market(const EnergySystem& sys, const ScenarioSet& scn, Design design) {
  switch (design) {
    case Design::SequentialCoupled:
      return run_seq_coup(sys, scn);
    case Design::StochasticCoupled:
      return run_stoch_coup(sys, scn);
    case Design::SequentialDecoupled:
      break;
  }
  const lp::SolveOptions opt = solver_options(sys.config);
  Model mda = build_coupled_da(sys);
  SolvedModel sda = solve_with_prices(mda, "offer-derivation day-ahead pass", opt);
  DaSchedule ref;
  extract_da_into(ref, sys, mda, sda.fixed, &sda.fixed);
  GfppOffers offers = derive_gfpp_offers(sys, ref.price_gas, sys.config.gfpp_price_factor);
  return run_seq_dec(sys, scn, offers);
}

}  // namespace gaslight
