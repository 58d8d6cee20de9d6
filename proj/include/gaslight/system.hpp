#pragma once
// Domain model for a coupled electricity / natural-gas system: network data,
// market participants, scenario data and run configuration, plus text-format
// ingestion, validation and serialization. Instances are immutable after load
// and safe to share read-only across concurrent solves.

#include <optional>
#include <string>
#include <vector>

#include "gaslight/lp.hpp"  // Error

namespace gaslight {

// ---------------------------------------------------------------------------
// Electric side

struct Line {
  std::string id;
  std::string from, to;  // bus ids, flow measured from -> to
  double susceptance = 0.0;  // per unit
  double capacity = 0.0;     // MW, symmetric bound on |flow|
  bool operator==(const Line&) const = default;
};

struct PowerGrid {
  std::vector<std::string> buses;
  std::vector<Line> lines;
  std::string reference_bus;
  std::vector<std::vector<double>> load;  // [bus][period] MW, zero when absent
  bool operator==(const PowerGrid&) const = default;

  int bus_index(const std::string& id) const;  // throws on unknown id
  int find_bus(const std::string& id) const;   // -1 on unknown id
};

enum class UnitKind { Thermal, GasFired };

struct DispatchableUnit {
  std::string id;
  UnitKind kind = UnitKind::Thermal;
  std::string bus;
  double capacity = 0.0;  // MW
  double res_up = 0.0;    // MW offered upward regulation capability
  double res_down = 0.0;  // MW offered downward regulation capability
  std::optional<double> offer;        // $/MWh day-ahead energy
  std::optional<double> offer_up;     // $/MWh upward regulation
  std::optional<double> offer_down;   // $/MWh downward regulation
  std::string gas_node;    // gas-fired only
  double fuel_rate = 0.0;  // kcf per MWh, gas-fired only
  bool gas_fired() const { return kind == UnitKind::GasFired; }
  bool operator==(const DispatchableUnit&) const = default;
};

struct WindFarm {
  std::string id;
  std::string bus;
  double capacity = 0.0;          // MW installed
  std::vector<double> forecast;   // MW expected per period
  bool operator==(const WindFarm&) const = default;
};

// ---------------------------------------------------------------------------
// Gas side

struct GasNode {
  std::string id;
  double pr_min = 0.0;  // psig
  double pr_max = 0.0;  // psig
  bool operator==(const GasNode&) const = default;
};

struct Pipeline {
  std::string id;
  std::string from, to;       // gas node ids; "from" is the nominal upstream end
  double flow_const = 0.0;    // kcf/(psig h)
  double linepack_const = 0.0;  // kcf/psig
  double linepack0 = 0.0;     // kcf stored at the start of the horizon
  bool operator==(const Pipeline&) const = default;
};

struct Compressor {
  std::string id;
  std::string from, to;  // suction node, discharge node
  double factor = 1.0;   // discharge pressure <= factor * suction pressure
  bool operator==(const Compressor&) const = default;
};

struct GasGrid {
  std::vector<GasNode> nodes;
  std::vector<Pipeline> pipelines;
  std::vector<Compressor> compressors;
  std::vector<std::vector<double>> load;  // [node][period] kcf/h, zero when absent
  double terminal_linepack = 0.0;         // kcf, system-wide end-of-horizon floor
  bool operator==(const GasGrid&) const = default;

  int node_index(const std::string& id) const;  // throws on unknown id
  int find_node(const std::string& id) const;   // -1 on unknown id
};

struct GasProducer {
  std::string id;
  std::string node;
  double capacity = 0.0;  // kcf/h
  double res_up = 0.0;    // kcf/h upward regulation capability
  double res_down = 0.0;  // kcf/h downward regulation capability
  double offer = 0.0;       // $/kcf day-ahead
  double offer_up = 0.0;    // $/kcf upward regulation
  double offer_down = 0.0;  // $/kcf downward regulation
  bool operator==(const GasProducer&) const = default;
};

struct GasStorage {
  std::string id;
  std::string node;
  double e_min = 0.0, e_max = 0.0;  // kcf volume bounds
  double e0 = 0.0;                  // kcf initial volume
  double inj_rate = 0.0;            // kcf/h max injection
  double wdr_rate = 0.0;            // kcf/h max withdrawal
  double offer = 0.0;       // $/kcf day-ahead withdrawal
  double offer_up = 0.0;    // $/kcf upward regulation
  double offer_down = 0.0;  // $/kcf downward regulation
  bool operator==(const GasStorage&) const = default;
};

// ---------------------------------------------------------------------------
// Run configuration

struct RunConfig {
  int horizon = 24;               // 1-hour periods; MW == MWh and kcf/h == kcf per period
  double shed_penalty_el = 0.0;   // $/MWh involuntary electric load shedding
  double shed_penalty_gas = 0.0;  // $/kcf involuntary gas load shedding
  int oa_points = 20;             // pressure points per flow direction
  bool steady_state = false;      // force pipeline inflow == outflow
  bool ideal_storage = false;     // add the idealized per-bus electric storage
  double gfpp_price_factor = 1.0;  // mis-estimation multiplier on derived offers
  double reg_up_factor = 1.1;      // derived upward-regulation offer multiplier
  double reg_down_factor = 0.91;   // derived downward-regulation offer multiplier
  double linepack_scale = 1.0;     // multiplier on every initial linepack
  double big_m_flow = 0.0;         // kcf/h cap on directed flow; 0 = derive
  double big_m_oa = 0.0;           // row constant for direction switching; 0 = derive
  double mip_gap = 1e-6;
  double feas_tol = 1e-7;
  int curtail_iters_max = 20;
  bool operator==(const RunConfig&) const = default;
};

// ---------------------------------------------------------------------------
// Whole system + scenarios

struct EnergySystem {
  PowerGrid power;
  GasGrid gas;
  std::vector<DispatchableUnit> units;
  std::vector<WindFarm> wind;
  std::vector<GasProducer> producers;
  std::vector<GasStorage> storages;
  RunConfig config;
  bool operator==(const EnergySystem&) const = default;

  // Enforces every structural invariant; throws Error{Validation} naming the
  // offending element and rule.
  void validate() const;

  int unit_index(const std::string& id) const;
  int wind_index(const std::string& id) const;
};

struct ScenarioSet {
  std::vector<std::string> ids;
  std::vector<double> probability;
  // value[scenario][farm][period] MW, farm order matching EnergySystem::wind.
  std::vector<std::vector<std::vector<double>>> value;
  bool operator==(const ScenarioSet&) const = default;

  int count() const { return static_cast<int>(ids.size()); }
};

// ---------------------------------------------------------------------------
// Ingestion / serialization. Formats are documented in docs/formats.md.

EnergySystem parse_system(const std::string& text, const std::string& origin = "<string>");
EnergySystem load_system(const std::string& path);
std::string serialize_system(const EnergySystem& sys);

ScenarioSet parse_scenarios(const std::string& text, const EnergySystem& sys,
                            const std::string& origin = "<string>");
ScenarioSet load_scenarios(const std::string& path, const EnergySystem& sys);
std::string serialize_scenarios(const ScenarioSet& set, const EnergySystem& sys);

}  // namespace gaslight
