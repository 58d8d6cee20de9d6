// Structured-text ingestion, validation and serialization for EnergySystem
// and ScenarioSet. The format is a line-oriented document of [section] blocks
// holding either whitespace-separated tables with a header row or key = value
// pairs; see docs/formats.md.

#include "gaslight/system.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace gaslight {

namespace {

[[noreturn]] void fail_at(const std::string& origin, int line, const std::string& msg) {
  throw Error(Error::Kind::Parse, origin + ":" + std::to_string(line) + ": " + msg);
}

[[noreturn]] void invalid(const std::string& msg) {
  throw Error(Error::Kind::Validation, msg);
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct KvEntry {
  int line;
  std::string value;
};

struct Section {
  int line = 0;
  std::vector<std::string> header;
  std::vector<std::pair<int, std::vector<std::string>>> rows;  // line, tokens
  std::map<std::string, KvEntry> kv;
  std::vector<std::string> kv_order;
};

struct Doc {
  std::string origin;
  std::map<std::string, Section> sections;

  const Section* find(const std::string& name) const {
    auto it = sections.find(name);
    return it == sections.end() ? nullptr : &it->second;
  }
  const Section& need(const std::string& name) const {
    const Section* s = find(name);
    if (!s) throw Error(Error::Kind::Parse, origin + ": missing required section [" + name + "]");
    return *s;
  }
};

Doc lex(const std::string& text, const std::string& origin,
        const std::set<std::string>& allowed) {
  Doc doc;
  doc.origin = origin;
  std::istringstream in(text);
  std::string raw;
  int ln = 0;
  Section* cur = nullptr;
  while (std::getline(in, raw)) {
    ++ln;
    std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail_at(origin, ln, "unterminated section header");
      std::string name = trim(line.substr(1, line.size() - 2));
      if (!allowed.count(name)) fail_at(origin, ln, "unknown section [" + name + "]");
      if (doc.sections.count(name)) fail_at(origin, ln, "duplicate section [" + name + "]");
      cur = &doc.sections[name];
      cur->line = ln;
      continue;
    }
    if (!cur) fail_at(origin, ln, "content before the first [section] header");
    std::size_t eq = line.find('=');
    if (eq != std::string::npos) {
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (key.empty() || value.empty()) fail_at(origin, ln, "malformed key = value line");
      if (cur->kv.count(key)) fail_at(origin, ln, "duplicate key '" + key + "'");
      cur->kv[key] = {ln, value};
      cur->kv_order.push_back(key);
      continue;
    }
    std::vector<std::string> tokens;
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
    if (cur->header.empty())
      cur->header = std::move(tokens);
    else
      cur->rows.emplace_back(ln, std::move(tokens));
  }
  return doc;
}

double parse_num(const Doc& doc, int line, const std::string& tok, const std::string& field) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    fail_at(doc.origin, line, "field '" + field + "': expected a number, got '" + tok + "'");
  return v;
}

int parse_int(const Doc& doc, int line, const std::string& tok, const std::string& field) {
  int v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    fail_at(doc.origin, line, "field '" + field + "': expected an integer, got '" + tok + "'");
  return v;
}

bool parse_bool(const Doc& doc, int line, const std::string& tok, const std::string& field) {
  if (tok == "true") return true;
  if (tok == "false") return false;
  fail_at(doc.origin, line, "field '" + field + "': expected true/false, got '" + tok + "'");
}

std::optional<double> parse_opt(const Doc& doc, int line, const std::string& tok,
                                const std::string& field) {
  if (tok == "-") return std::nullopt;
  return parse_num(doc, line, tok, field);
}

// Table sections must carry exactly the expected header (plus, for series
// sections, one t<k> column per period).
void expect_header(const Doc& doc, const Section& sec, const std::string& name,
                   const std::vector<std::string>& expected, int series_periods = 0) {
  if (!sec.kv.empty())
    fail_at(doc.origin, sec.kv.begin()->second.line,
            "unexpected key = value line in table section [" + name + "]");
  std::vector<std::string> want = expected;
  for (int t = 1; t <= series_periods; ++t) want.push_back("t" + std::to_string(t));
  if (sec.header != want) {
    std::string w;
    for (auto& c : want) w += (w.empty() ? "" : " ") + c;
    fail_at(doc.origin, sec.line, "section [" + name + "] needs header: " + w);
  }
  for (auto& [ln, tokens] : sec.rows)
    if (tokens.size() != want.size())
      fail_at(doc.origin, ln,
              "expected " + std::to_string(want.size()) + " fields, got " +
                  std::to_string(tokens.size()));
}

std::string num(double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : "-"; }

const std::set<std::string> kSystemSections = {
    "buses",     "lines",     "units",   "wind",      "gas_nodes", "pipelines",
    "compressors", "producers", "storages", "loads_e", "loads_g",  "config"};

const std::set<std::string> kScenarioSections = {"realizations", "weights"};

}  // namespace

// ---------------------------------------------------------------------------
// Index helpers

int PowerGrid::find_bus(const std::string& id) const {
  for (std::size_t i = 0; i < buses.size(); ++i)
    if (buses[i] == id) return static_cast<int>(i);
  return -1;
}

int PowerGrid::bus_index(const std::string& id) const {
  int i = find_bus(id);
  if (i < 0) throw Error(Error::Kind::Internal, "unknown bus id: " + id);
  return i;
}

int GasGrid::find_node(const std::string& id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return static_cast<int>(i);
  return -1;
}

int GasGrid::node_index(const std::string& id) const {
  int i = find_node(id);
  if (i < 0) throw Error(Error::Kind::Internal, "unknown gas node id: " + id);
  return i;
}

int EnergySystem::unit_index(const std::string& id) const {
  for (std::size_t i = 0; i < units.size(); ++i)
    if (units[i].id == id) return static_cast<int>(i);
  throw Error(Error::Kind::Internal, "unknown unit id: " + id);
}

int EnergySystem::wind_index(const std::string& id) const {
  for (std::size_t i = 0; i < wind.size(); ++i)
    if (wind[i].id == id) return static_cast<int>(i);
  throw Error(Error::Kind::Internal, "unknown wind farm id: " + id);
}

// ---------------------------------------------------------------------------
// System parsing

namespace {

RunConfig parse_config(const Doc& doc, const Section& sec, std::string& reference_bus,
                       double& terminal_linepack) {
  if (!sec.header.empty() || !sec.rows.empty())
    fail_at(doc.origin, sec.line, "[config] holds key = value lines only");
  RunConfig cfg;
  std::set<std::string> required = {"horizon", "reference_bus", "shed_penalty_el",
                                    "shed_penalty_gas", "terminal_linepack"};
  for (auto& key : sec.kv_order) {
    const KvEntry& e = sec.kv.at(key);
    const std::string& v = e.value;
    int ln = e.line;
    if (key == "horizon")
      cfg.horizon = parse_int(doc, ln, v, key);
    else if (key == "reference_bus")
      reference_bus = v;
    else if (key == "shed_penalty_el")
      cfg.shed_penalty_el = parse_num(doc, ln, v, key);
    else if (key == "shed_penalty_gas")
      cfg.shed_penalty_gas = parse_num(doc, ln, v, key);
    else if (key == "terminal_linepack")
      terminal_linepack = parse_num(doc, ln, v, key);
    else if (key == "oa_points")
      cfg.oa_points = parse_int(doc, ln, v, key);
    else if (key == "steady_state")
      cfg.steady_state = parse_bool(doc, ln, v, key);
    else if (key == "ideal_storage")
      cfg.ideal_storage = parse_bool(doc, ln, v, key);
    else if (key == "gfpp_price_factor")
      cfg.gfpp_price_factor = parse_num(doc, ln, v, key);
    else if (key == "reg_up_factor")
      cfg.reg_up_factor = parse_num(doc, ln, v, key);
    else if (key == "reg_down_factor")
      cfg.reg_down_factor = parse_num(doc, ln, v, key);
    else if (key == "linepack_scale")
      cfg.linepack_scale = parse_num(doc, ln, v, key);
    else if (key == "big_m_flow")
      cfg.big_m_flow = parse_num(doc, ln, v, key);
    else if (key == "big_m_oa")
      cfg.big_m_oa = parse_num(doc, ln, v, key);
    else if (key == "mip_gap")
      cfg.mip_gap = parse_num(doc, ln, v, key);
    else if (key == "feas_tol")
      cfg.feas_tol = parse_num(doc, ln, v, key);
    else if (key == "curtail_iters_max")
      cfg.curtail_iters_max = parse_int(doc, ln, v, key);
    else
      fail_at(doc.origin, ln, "unknown [config] key '" + key + "'");
    required.erase(key);
  }
  if (!required.empty())
    fail_at(doc.origin, sec.line, "[config] is missing key '" + *required.begin() + "'");
  return cfg;
}

// Series sections ([loads_e], [loads_g]) index values by an id column.
std::vector<std::vector<double>> parse_load_table(const Doc& doc, const Section* sec,
                                                  const std::string& name,
                                                  const std::string& id_col, int T,
                                                  const std::vector<std::string>& ids,
                                                  int (*finder)(const void*, const std::string&),
                                                  const void* ctx) {
  std::vector<std::vector<double>> out(ids.size(), std::vector<double>(T, 0.0));
  if (!sec) return out;
  expect_header(doc, *sec, name, {id_col}, T);
  std::set<std::string> seen;
  for (auto& [ln, tok] : sec->rows) {
    int idx = finder(ctx, tok[0]);
    if (idx < 0)
      fail_at(doc.origin, ln, "[" + name + "] references unknown " + id_col + " '" + tok[0] + "'");
    if (!seen.insert(tok[0]).second)
      fail_at(doc.origin, ln, "[" + name + "] repeats " + id_col + " '" + tok[0] + "'");
    for (int t = 0; t < T; ++t)
      out[idx][t] = parse_num(doc, ln, tok[1 + t], "t" + std::to_string(t + 1));
  }
  return out;
}

}  // namespace

EnergySystem parse_system(const std::string& text, const std::string& origin) {
  Doc doc = lex(text, origin, kSystemSections);
  EnergySystem sys;

  std::string reference_bus;
  double terminal_linepack = 0.0;
  sys.config = parse_config(doc, doc.need("config"), reference_bus, terminal_linepack);
  const int T = sys.config.horizon;
  if (T < 1) fail_at(origin, doc.need("config").line, "horizon must be at least 1");
  sys.power.reference_bus = reference_bus;
  sys.gas.terminal_linepack = terminal_linepack;

  {
    const Section& sec = doc.need("buses");
    expect_header(doc, sec, "buses", {"id"});
    for (auto& [ln, tok] : sec.rows) {
      if (sys.power.find_bus(tok[0]) >= 0) fail_at(origin, ln, "duplicate bus id '" + tok[0] + "'");
      sys.power.buses.push_back(tok[0]);
    }
    if (sys.power.buses.empty()) fail_at(origin, sec.line, "[buses] lists no buses");
  }

  if (const Section* sec = doc.find("lines")) {
    expect_header(doc, *sec, "lines", {"id", "from", "to", "susceptance", "capacity"});
    std::set<std::string> seen;
    for (auto& [ln, tok] : sec->rows) {
      if (!seen.insert(tok[0]).second) fail_at(origin, ln, "duplicate line id '" + tok[0] + "'");
      Line l;
      l.id = tok[0];
      l.from = tok[1];
      l.to = tok[2];
      l.susceptance = parse_num(doc, ln, tok[3], "susceptance");
      l.capacity = parse_num(doc, ln, tok[4], "capacity");
      sys.power.lines.push_back(std::move(l));
    }
  }

  if (const Section* sec = doc.find("units")) {
    expect_header(doc, *sec, "units",
                  {"id", "kind", "bus", "capacity", "res_up", "res_down", "offer", "offer_up",
                   "offer_down", "gas_node", "fuel_rate"});
    std::set<std::string> seen;
    for (auto& [ln, tok] : sec->rows) {
      if (!seen.insert(tok[0]).second) fail_at(origin, ln, "duplicate unit id '" + tok[0] + "'");
      DispatchableUnit u;
      u.id = tok[0];
      if (tok[1] == "thermal")
        u.kind = UnitKind::Thermal;
      else if (tok[1] == "gas-fired")
        u.kind = UnitKind::GasFired;
      else
        fail_at(origin, ln, "unit kind must be 'thermal' or 'gas-fired', got '" + tok[1] + "'");
      u.bus = tok[2];
      u.capacity = parse_num(doc, ln, tok[3], "capacity");
      u.res_up = parse_num(doc, ln, tok[4], "res_up");
      u.res_down = parse_num(doc, ln, tok[5], "res_down");
      u.offer = parse_opt(doc, ln, tok[6], "offer");
      u.offer_up = parse_opt(doc, ln, tok[7], "offer_up");
      u.offer_down = parse_opt(doc, ln, tok[8], "offer_down");
      u.gas_node = tok[9] == "-" ? "" : tok[9];
      if (tok[10] != "-") u.fuel_rate = parse_num(doc, ln, tok[10], "fuel_rate");
      sys.units.push_back(std::move(u));
    }
  }

  if (const Section* sec = doc.find("wind")) {
    expect_header(doc, *sec, "wind", {"id", "bus", "capacity"}, T);
    std::set<std::string> seen;
    for (auto& [ln, tok] : sec->rows) {
      if (!seen.insert(tok[0]).second) fail_at(origin, ln, "duplicate wind farm id '" + tok[0] + "'");
      WindFarm w;
      w.id = tok[0];
      w.bus = tok[1];
      w.capacity = parse_num(doc, ln, tok[2], "capacity");
      for (int t = 0; t < T; ++t)
        w.forecast.push_back(parse_num(doc, ln, tok[3 + t], "t" + std::to_string(t + 1)));
      sys.wind.push_back(std::move(w));
    }
  }

  {
    const Section& sec = doc.need("gas_nodes");
    expect_header(doc, sec, "gas_nodes", {"id", "pr_min", "pr_max"});
    for (auto& [ln, tok] : sec.rows) {
      if (sys.gas.find_node(tok[0]) >= 0)
        fail_at(origin, ln, "duplicate gas node id '" + tok[0] + "'");
      GasNode n;
      n.id = tok[0];
      n.pr_min = parse_num(doc, ln, tok[1], "pr_min");
      n.pr_max = parse_num(doc, ln, tok[2], "pr_max");
      sys.gas.nodes.push_back(std::move(n));
    }
    if (sys.gas.nodes.empty()) fail_at(origin, sec.line, "[gas_nodes] lists no nodes");
  }

  if (const Section* sec = doc.find("pipelines")) {
    expect_header(doc, *sec, "pipelines",
                  {"id", "from", "to", "flow_const", "linepack_const", "linepack0"});
    std::set<std::string> seen;
    for (auto& [ln, tok] : sec->rows) {
      if (!seen.insert(tok[0]).second) fail_at(origin, ln, "duplicate pipeline id '" + tok[0] + "'");
      Pipeline p;
      p.id = tok[0];
      p.from = tok[1];
      p.to = tok[2];
      p.flow_const = parse_num(doc, ln, tok[3], "flow_const");
      p.linepack_const = parse_num(doc, ln, tok[4], "linepack_const");
      std::optional<double> h0 = parse_opt(doc, ln, tok[5], "linepack0");
      if (h0) {
        p.linepack0 = *h0;
      } else {
        // Default: midpoint of the pressure-consistent linepack range.
        int a = sys.gas.find_node(p.from), b = sys.gas.find_node(p.to);
        if (a < 0 || b < 0)
          fail_at(origin, ln, "pipeline endpoints must be declared before defaulting linepack0");
        const GasNode& na = sys.gas.nodes[a];
        const GasNode& nb = sys.gas.nodes[b];
        double lo = p.linepack_const * (na.pr_min + nb.pr_min) / 2.0;
        double hi = p.linepack_const * (na.pr_max + nb.pr_max) / 2.0;
        p.linepack0 = (lo + hi) / 2.0;
      }
      sys.gas.pipelines.push_back(std::move(p));
    }
  }

  if (const Section* sec = doc.find("compressors")) {
    expect_header(doc, *sec, "compressors", {"id", "from", "to", "factor"});
    std::set<std::string> seen;
    for (auto& [ln, tok] : sec->rows) {
      if (!seen.insert(tok[0]).second)
        fail_at(origin, ln, "duplicate compressor id '" + tok[0] + "'");
      Compressor c;
      c.id = tok[0];
      c.from = tok[1];
      c.to = tok[2];
      c.factor = parse_num(doc, ln, tok[3], "factor");
      sys.gas.compressors.push_back(std::move(c));
    }
  }

  if (const Section* sec = doc.find("producers")) {
    expect_header(doc, *sec, "producers",
                  {"id", "node", "capacity", "res_up", "res_down", "offer", "offer_up",
                   "offer_down"});
    std::set<std::string> seen;
    for (auto& [ln, tok] : sec->rows) {
      if (!seen.insert(tok[0]).second) fail_at(origin, ln, "duplicate producer id '" + tok[0] + "'");
      GasProducer p;
      p.id = tok[0];
      p.node = tok[1];
      p.capacity = parse_num(doc, ln, tok[2], "capacity");
      p.res_up = parse_num(doc, ln, tok[3], "res_up");
      p.res_down = parse_num(doc, ln, tok[4], "res_down");
      p.offer = parse_num(doc, ln, tok[5], "offer");
      p.offer_up = parse_num(doc, ln, tok[6], "offer_up");
      p.offer_down = parse_num(doc, ln, tok[7], "offer_down");
      sys.producers.push_back(std::move(p));
    }
  }

  if (const Section* sec = doc.find("storages")) {
    expect_header(doc, *sec, "storages",
                  {"id", "node", "e_min", "e_max", "e0", "inj_rate", "wdr_rate", "offer",
                   "offer_up", "offer_down"});
    std::set<std::string> seen;
    for (auto& [ln, tok] : sec->rows) {
      if (!seen.insert(tok[0]).second) fail_at(origin, ln, "duplicate storage id '" + tok[0] + "'");
      GasStorage s;
      s.id = tok[0];
      s.node = tok[1];
      s.e_min = parse_num(doc, ln, tok[2], "e_min");
      s.e_max = parse_num(doc, ln, tok[3], "e_max");
      std::optional<double> e0 = parse_opt(doc, ln, tok[4], "e0");
      s.e0 = e0 ? *e0 : (s.e_min + s.e_max) / 2.0;
      s.inj_rate = parse_num(doc, ln, tok[5], "inj_rate");
      s.wdr_rate = parse_num(doc, ln, tok[6], "wdr_rate");
      s.offer = parse_num(doc, ln, tok[7], "offer");
      s.offer_up = parse_num(doc, ln, tok[8], "offer_up");
      s.offer_down = parse_num(doc, ln, tok[9], "offer_down");
      sys.storages.push_back(std::move(s));
    }
  }

  struct Finders {
    static int bus(const void* ctx, const std::string& id) {
      return static_cast<const PowerGrid*>(ctx)->find_bus(id);
    }
    static int node(const void* ctx, const std::string& id) {
      return static_cast<const GasGrid*>(ctx)->find_node(id);
    }
  };
  sys.power.load = parse_load_table(doc, doc.find("loads_e"), "loads_e", "bus", T,
                                    sys.power.buses, &Finders::bus, &sys.power);
  std::vector<std::string> node_ids;
  for (auto& n : sys.gas.nodes) node_ids.push_back(n.id);
  sys.gas.load = parse_load_table(doc, doc.find("loads_g"), "loads_g", "node", T, node_ids,
                                  &Finders::node, &sys.gas);

  sys.validate();
  return sys;
}

EnergySystem load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Error::Kind::Io, "cannot open system file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_system(buf.str(), path);
}

// ---------------------------------------------------------------------------
// Validation

void EnergySystem::validate() const {
  const int T = config.horizon;
  if (T < 1) invalid("horizon must be at least 1");
  if (config.oa_points < 1) invalid("oa_points must be at least 1");
  if (config.gfpp_price_factor <= 0.0 || config.reg_up_factor <= 0.0 ||
      config.reg_down_factor <= 0.0 || config.linepack_scale <= 0.0)
    invalid("config multipliers must be positive");
  if (config.mip_gap < 0.0 || config.feas_tol <= 0.0) invalid("solver tolerances out of range");
  if (config.curtail_iters_max < 1) invalid("curtail_iters_max must be at least 1");

  // Power grid.
  if (power.find_bus(power.reference_bus) < 0)
    invalid("reference bus '" + power.reference_bus + "' is not a declared bus");
  for (const Line& l : power.lines) {
    if (power.find_bus(l.from) < 0)
      invalid("line " + l.id + " endpoint '" + l.from + "' is not a declared bus");
    if (power.find_bus(l.to) < 0)
      invalid("line " + l.id + " endpoint '" + l.to + "' is not a declared bus");
    if (l.from == l.to) invalid("line " + l.id + " connects a bus to itself");
    if (!(l.susceptance > 0.0)) invalid("line " + l.id + " needs susceptance > 0");
    if (!(l.capacity > 0.0)) invalid("line " + l.id + " needs capacity > 0");
  }
  if (power.load.size() != power.buses.size()) invalid("electric load table shape mismatch");
  for (std::size_t n = 0; n < power.load.size(); ++n) {
    if (power.load[n].size() != static_cast<std::size_t>(T))
      invalid("electric load for bus " + power.buses[n] + " must cover every period");
    for (double v : power.load[n])
      if (v < 0.0) invalid("electric load at bus " + power.buses[n] + " is negative");
  }

  // Units.
  for (const DispatchableUnit& u : units) {
    if (power.find_bus(u.bus) < 0)
      invalid("unit " + u.id + " references unknown bus '" + u.bus + "'");
    if (u.res_up < 0.0 || u.res_up > u.capacity)
      invalid("unit " + u.id + " needs 0 <= res_up <= capacity");
    if (u.res_down < 0.0 || u.res_down > u.capacity)
      invalid("unit " + u.id + " needs 0 <= res_down <= capacity");
    if (u.gas_fired()) {
      if (gas.find_node(u.gas_node) < 0)
        invalid("gas-fired unit " + u.id + " references unknown gas node '" + u.gas_node + "'");
      if (!(u.fuel_rate > 0.0)) invalid("gas-fired unit " + u.id + " needs fuel_rate > 0");
      if (u.offer || u.offer_up || u.offer_down)
        invalid("gas-fired unit " + u.id + " must not carry offers; they are derived");
    } else {
      if (!u.gas_node.empty())
        invalid("thermal unit " + u.id + " must not reference a gas node");
      if (!u.offer || !u.offer_up || !u.offer_down)
        invalid("thermal unit " + u.id + " needs offer, offer_up and offer_down");
    }
    if (u.offer && u.offer_up && u.offer_down &&
        !(*u.offer_down <= *u.offer && *u.offer <= *u.offer_up))
      invalid("unit " + u.id + " needs offer_down <= offer <= offer_up");
  }

  // Wind.
  for (const WindFarm& w : wind) {
    if (power.find_bus(w.bus) < 0)
      invalid("wind farm " + w.id + " references unknown bus '" + w.bus + "'");
    if (w.forecast.size() != static_cast<std::size_t>(T))
      invalid("wind farm " + w.id + " forecast must cover every period");
    for (double v : w.forecast)
      if (v < 0.0 || v > w.capacity)
        invalid("wind farm " + w.id + " forecast outside [0, capacity]");
  }

  // Gas grid.
  for (const GasNode& n : gas.nodes)
    if (!(0.0 < n.pr_min && n.pr_min < n.pr_max))
      invalid("gas node " + n.id + " needs 0 < pr_min < pr_max");
  for (const Pipeline& p : gas.pipelines) {
    int a = gas.find_node(p.from), b = gas.find_node(p.to);
    if (a < 0) invalid("pipeline " + p.id + " endpoint '" + p.from + "' is not a declared node");
    if (b < 0) invalid("pipeline " + p.id + " endpoint '" + p.to + "' is not a declared node");
    if (p.from == p.to) invalid("pipeline " + p.id + " connects a node to itself");
    if (!(p.flow_const > 0.0)) invalid("pipeline " + p.id + " needs flow_const > 0");
    if (!(p.linepack_const > 0.0)) invalid("pipeline " + p.id + " needs linepack_const > 0");
    double lo = p.linepack_const * (gas.nodes[a].pr_min + gas.nodes[b].pr_min) / 2.0;
    double hi = p.linepack_const * (gas.nodes[a].pr_max + gas.nodes[b].pr_max) / 2.0;
    if (p.linepack0 < lo - 1e-9 * (1.0 + lo) || p.linepack0 > hi + 1e-9 * (1.0 + hi))
      invalid("pipeline " + p.id + " initial linepack outside the pressure-consistent range");
  }
  for (const Compressor& c : gas.compressors) {
    if (gas.find_node(c.from) < 0)
      invalid("compressor " + c.id + " endpoint '" + c.from + "' is not a declared node");
    if (gas.find_node(c.to) < 0)
      invalid("compressor " + c.id + " endpoint '" + c.to + "' is not a declared node");
    if (c.from == c.to) invalid("compressor " + c.id + " connects a node to itself");
    if (c.factor < 1.0) invalid("compressor " + c.id + " needs factor >= 1");
  }
  if (gas.load.size() != gas.nodes.size()) invalid("gas load table shape mismatch");
  for (std::size_t m = 0; m < gas.load.size(); ++m) {
    if (gas.load[m].size() != static_cast<std::size_t>(T))
      invalid("gas load for node " + gas.nodes[m].id + " must cover every period");
    for (double v : gas.load[m])
      if (v < 0.0) invalid("gas load at node " + gas.nodes[m].id + " is negative");
  }
  if (gas.terminal_linepack < 0.0) invalid("terminal_linepack must be nonnegative");

  // Producers and storages.
  for (const GasProducer& p : producers) {
    if (gas.find_node(p.node) < 0)
      invalid("producer " + p.id + " references unknown gas node '" + p.node + "'");
    if (p.res_up < 0.0 || p.res_up > p.capacity)
      invalid("producer " + p.id + " needs 0 <= res_up <= capacity");
    if (p.res_down < 0.0 || p.res_down > p.capacity)
      invalid("producer " + p.id + " needs 0 <= res_down <= capacity");
    if (!(p.offer_down <= p.offer && p.offer <= p.offer_up))
      invalid("producer " + p.id + " needs offer_down <= offer <= offer_up");
  }
  for (const GasStorage& s : storages) {
    if (gas.find_node(s.node) < 0)
      invalid("storage " + s.id + " references unknown gas node '" + s.node + "'");
    if (!(s.e_min <= s.e0 && s.e0 <= s.e_max))
      invalid("storage " + s.id + " needs e_min <= e0 <= e_max");
    if (!(s.inj_rate > 0.0) || !(s.wdr_rate > 0.0))
      invalid("storage " + s.id + " needs positive injection and withdrawal rates");
  }

  // Shed penalties must strictly dominate every offered price on their side.
  auto check_penalty = [](double penalty, double offer, const std::string& what) {
    if (!(penalty > offer))
      invalid("shed penalty must strictly exceed " + what + " (" + num(offer) + ")");
  };
  for (const DispatchableUnit& u : units) {
    if (u.offer) check_penalty(config.shed_penalty_el, *u.offer, "offer of unit " + u.id);
    if (u.offer_up) check_penalty(config.shed_penalty_el, *u.offer_up, "offer_up of unit " + u.id);
    if (u.offer_down)
      check_penalty(config.shed_penalty_el, *u.offer_down, "offer_down of unit " + u.id);
  }
  for (const GasProducer& p : producers) {
    check_penalty(config.shed_penalty_gas, p.offer, "offer of producer " + p.id);
    check_penalty(config.shed_penalty_gas, p.offer_up, "offer_up of producer " + p.id);
    check_penalty(config.shed_penalty_gas, p.offer_down, "offer_down of producer " + p.id);
  }
  for (const GasStorage& s : storages) {
    check_penalty(config.shed_penalty_gas, s.offer, "offer of storage " + s.id);
    check_penalty(config.shed_penalty_gas, s.offer_up, "offer_up of storage " + s.id);
    check_penalty(config.shed_penalty_gas, s.offer_down, "offer_down of storage " + s.id);
  }
}

// ---------------------------------------------------------------------------
// System serialization

std::string serialize_system(const EnergySystem& sys) {
  std::ostringstream os;
  const int T = sys.config.horizon;
  auto series_header = [T](std::ostringstream& o) {
    for (int t = 1; t <= T; ++t) o << " t" << t;
    o << '\n';
  };

  os << "[config]\n";
  os << "horizon = " << sys.config.horizon << '\n';
  os << "reference_bus = " << sys.power.reference_bus << '\n';
  os << "shed_penalty_el = " << num(sys.config.shed_penalty_el) << '\n';
  os << "shed_penalty_gas = " << num(sys.config.shed_penalty_gas) << '\n';
  os << "terminal_linepack = " << num(sys.gas.terminal_linepack) << '\n';
  os << "oa_points = " << sys.config.oa_points << '\n';
  os << "steady_state = " << (sys.config.steady_state ? "true" : "false") << '\n';
  os << "ideal_storage = " << (sys.config.ideal_storage ? "true" : "false") << '\n';
  os << "gfpp_price_factor = " << num(sys.config.gfpp_price_factor) << '\n';
  os << "reg_up_factor = " << num(sys.config.reg_up_factor) << '\n';
  os << "reg_down_factor = " << num(sys.config.reg_down_factor) << '\n';
  os << "linepack_scale = " << num(sys.config.linepack_scale) << '\n';
  os << "big_m_flow = " << num(sys.config.big_m_flow) << '\n';
  os << "big_m_oa = " << num(sys.config.big_m_oa) << '\n';
  os << "mip_gap = " << num(sys.config.mip_gap) << '\n';
  os << "feas_tol = " << num(sys.config.feas_tol) << '\n';
  os << "curtail_iters_max = " << sys.config.curtail_iters_max << '\n';

  os << "\n[buses]\nid\n";
  for (auto& b : sys.power.buses) os << b << '\n';

  os << "\n[lines]\nid from to susceptance capacity\n";
  for (auto& l : sys.power.lines)
    os << l.id << ' ' << l.from << ' ' << l.to << ' ' << num(l.susceptance) << ' '
       << num(l.capacity) << '\n';

  os << "\n[units]\nid kind bus capacity res_up res_down offer offer_up offer_down gas_node "
        "fuel_rate\n";
  for (auto& u : sys.units) {
    os << u.id << ' ' << (u.gas_fired() ? "gas-fired" : "thermal") << ' ' << u.bus << ' '
       << num(u.capacity) << ' ' << num(u.res_up) << ' ' << num(u.res_down) << ' '
       << opt_num(u.offer) << ' ' << opt_num(u.offer_up) << ' ' << opt_num(u.offer_down) << ' '
       << (u.gas_node.empty() ? "-" : u.gas_node) << ' '
       << (u.gas_fired() ? num(u.fuel_rate) : "-") << '\n';
  }

  os << "\n[wind]\nid bus capacity";
  series_header(os);
  for (auto& w : sys.wind) {
    os << w.id << ' ' << w.bus << ' ' << num(w.capacity);
    for (double v : w.forecast) os << ' ' << num(v);
    os << '\n';
  }

  os << "\n[gas_nodes]\nid pr_min pr_max\n";
  for (auto& n : sys.gas.nodes)
    os << n.id << ' ' << num(n.pr_min) << ' ' << num(n.pr_max) << '\n';

  os << "\n[pipelines]\nid from to flow_const linepack_const linepack0\n";
  for (auto& p : sys.gas.pipelines)
    os << p.id << ' ' << p.from << ' ' << p.to << ' ' << num(p.flow_const) << ' '
       << num(p.linepack_const) << ' ' << num(p.linepack0) << '\n';

  os << "\n[compressors]\nid from to factor\n";
  for (auto& c : sys.gas.compressors)
    os << c.id << ' ' << c.from << ' ' << c.to << ' ' << num(c.factor) << '\n';

  os << "\n[producers]\nid node capacity res_up res_down offer offer_up offer_down\n";
  for (auto& p : sys.producers)
    os << p.id << ' ' << p.node << ' ' << num(p.capacity) << ' ' << num(p.res_up) << ' '
       << num(p.res_down) << ' ' << num(p.offer) << ' ' << num(p.offer_up) << ' '
       << num(p.offer_down) << '\n';

  os << "\n[storages]\nid node e_min e_max e0 inj_rate wdr_rate offer offer_up offer_down\n";
  for (auto& s : sys.storages)
    os << s.id << ' ' << s.node << ' ' << num(s.e_min) << ' ' << num(s.e_max) << ' ' << num(s.e0)
       << ' ' << num(s.inj_rate) << ' ' << num(s.wdr_rate) << ' ' << num(s.offer) << ' '
       << num(s.offer_up) << ' ' << num(s.offer_down) << '\n';

  os << "\n[loads_e]\nbus";
  series_header(os);
  for (std::size_t n = 0; n < sys.power.buses.size(); ++n) {
    os << sys.power.buses[n];
    for (double v : sys.power.load[n]) os << ' ' << num(v);
    os << '\n';
  }

  os << "\n[loads_g]\nnode";
  series_header(os);
  for (std::size_t m = 0; m < sys.gas.nodes.size(); ++m) {
    os << sys.gas.nodes[m].id;
    for (double v : sys.gas.load[m]) os << ' ' << num(v);
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Scenario parsing / serialization

ScenarioSet parse_scenarios(const std::string& text, const EnergySystem& sys,
                            const std::string& origin) {
  Doc doc = lex(text, origin, kScenarioSections);
  const int T = sys.config.horizon;
  const int F = static_cast<int>(sys.wind.size());

  const Section& real = doc.need("realizations");
  bool normalized = false;
  {
    std::vector<std::string> h = real.header;
    if (h == std::vector<std::string>{"scenario", "farm", "period", "value_mw"})
      normalized = false;
    else if (h == std::vector<std::string>{"scenario", "farm", "period", "value_norm"})
      normalized = true;
    else
      fail_at(origin, real.line,
              "[realizations] needs header: scenario farm period value_mw|value_norm");
    if (!real.kv.empty())
      fail_at(origin, real.kv.begin()->second.line, "unexpected key = value in [realizations]");
  }

  ScenarioSet set;
  std::vector<std::vector<std::vector<char>>> seen;  // [scenario][farm][period]
  auto scenario_index = [&](const std::string& id) {
    for (std::size_t i = 0; i < set.ids.size(); ++i)
      if (set.ids[i] == id) return static_cast<int>(i);
    set.ids.push_back(id);
    set.value.emplace_back(F, std::vector<double>(T, 0.0));
    seen.emplace_back(F, std::vector<char>(T, 0));
    return static_cast<int>(set.ids.size()) - 1;
  };

  for (auto& [ln, tok] : real.rows) {
    if (tok.size() != 4) fail_at(origin, ln, "expected 4 fields");
    int w = scenario_index(tok[0]);
    int farm = -1;
    for (int f = 0; f < F; ++f)
      if (sys.wind[f].id == tok[1]) farm = f;
    if (farm < 0) fail_at(origin, ln, "unknown wind farm '" + tok[1] + "'");
    int period = parse_int(doc, ln, tok[2], "period");
    if (period < 1 || period > T)
      fail_at(origin, ln, "period " + tok[2] + " outside 1.." + std::to_string(T));
    double v = parse_num(doc, ln, tok[3], real.header[3]);
    if (normalized) v *= sys.wind[farm].capacity;
    double cap = sys.wind[farm].capacity;
    if (v < 0.0 || v > cap + 1e-9 * (1.0 + cap))
      fail_at(origin, ln,
              "realization " + num(v) + " outside [0, " + num(cap) + "] for farm " + tok[1]);
    if (seen[w][farm][period - 1])
      fail_at(origin, ln, "duplicate realization for (" + tok[0] + ", " + tok[1] + ", " + tok[2] + ")");
    seen[w][farm][period - 1] = 1;
    set.value[w][farm][period - 1] = v;
  }

  if (set.ids.empty()) fail_at(origin, real.line, "[realizations] lists no data");
  for (std::size_t w = 0; w < set.ids.size(); ++w)
    for (int f = 0; f < F; ++f)
      for (int t = 0; t < T; ++t)
        if (!seen[w][f][t])
          fail_at(origin, real.line,
                  "scenario " + set.ids[w] + " is missing farm " + sys.wind[f].id + " period " +
                      std::to_string(t + 1));

  const int W = set.count();
  if (const Section* ws = doc.find("weights")) {
    expect_header(doc, *ws, "weights", {"scenario", "weight"});
    set.probability.assign(W, -1.0);
    for (auto& [ln, tok] : ws->rows) {
      int w = -1;
      for (int i = 0; i < W; ++i)
        if (set.ids[i] == tok[0]) w = i;
      if (w < 0) fail_at(origin, ln, "weight for unknown scenario '" + tok[0] + "'");
      if (set.probability[w] >= 0.0) fail_at(origin, ln, "duplicate weight for '" + tok[0] + "'");
      set.probability[w] = parse_num(doc, ln, tok[1], "weight");
      if (!(set.probability[w] > 0.0)) fail_at(origin, ln, "weights must be positive");
    }
    double total = 0.0;
    for (int i = 0; i < W; ++i) {
      if (set.probability[i] < 0.0)
        fail_at(origin, ws->line, "scenario " + set.ids[i] + " is missing a weight");
      total += set.probability[i];
    }
    if (std::abs(total - 1.0) > 1e-9)
      fail_at(origin, ws->line, "weights sum to " + num(total) + ", expected 1");
  } else {
    set.probability.assign(W, 1.0 / W);
  }
  return set;
}

ScenarioSet load_scenarios(const std::string& path, const EnergySystem& sys) {
  std::ifstream in(path);
  if (!in) throw Error(Error::Kind::Io, "cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenarios(buf.str(), sys, path);
}

std::string serialize_scenarios(const ScenarioSet& set, const EnergySystem& sys) {
  std::ostringstream os;
  os << "[weights]\nscenario weight\n";
  for (int w = 0; w < set.count(); ++w)
    os << set.ids[w] << ' ' << num(set.probability[w]) << '\n';
  os << "\n[realizations]\nscenario farm period value_mw\n";
  for (int w = 0; w < set.count(); ++w)
    for (std::size_t f = 0; f < sys.wind.size(); ++f)
      for (int t = 0; t < sys.config.horizon; ++t)
        os << set.ids[w] << ' ' << sys.wind[f].id << ' ' << (t + 1) << ' '
           << num(set.value[w][f][t]) << '\n';
  return os.str();
}

}  // namespace gaslight
