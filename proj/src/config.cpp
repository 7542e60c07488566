#include "wavelqr/config.hpp"

#include <fstream>
#include <set>

namespace wavelqr {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

const json& require(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  return j.at(key);
}

double number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ConfigError(what + ": expected a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& what) {
  if (!v.is_number_integer()) throw ConfigError(what + ": expected an integer");
  return v.get<int>();
}

WeightFamily parse_weights(const json& w, int N) {
  if (!w.is_object() || !w.contains("type") || !w.at("type").is_string())
    throw ConfigError("weights: expected an object with a string 'type'");
  const std::string type = w.at("type").get<std::string>();
  if (type == "power") {
    reject_unknown(w, {"type", "q", "r"}, "weights");
    return WeightFamily::power_law(number(require(w, "q", "weights"), "weights.q"),
                                   number(require(w, "r", "weights"), "weights.r"), N);
  }
  if (type == "list") {
    reject_unknown(w, {"type", "entries"}, "weights");
    const json& entries = require(w, "entries", "weights");
    if (!entries.is_array()) throw ConfigError("weights.entries: expected an array");
    std::map<int, ModalWeight> m;
    for (const auto& e : entries) {
      reject_unknown(e, {"n", "Q11", "Q12", "Q22"}, "weights.entries[]");
      ModalWeight mw;
      mw.n = integer(require(e, "n", "weights.entries[]"), "weights.entries[].n");
      mw.Q11 = e.contains("Q11") ? number(e.at("Q11"), "Q11") : 0.0;
      mw.Q12 = e.contains("Q12") ? number(e.at("Q12"), "Q12") : 0.0;
      mw.Q22 = e.contains("Q22") ? number(e.at("Q22"), "Q22") : 0.0;
      if (!m.emplace(mw.n, mw).second) throw ConfigError("weights.entries: duplicate mode " + std::to_string(mw.n));
    }
    return WeightFamily::explicit_list(std::move(m), N);
  }
  throw ConfigError("weights: unknown type '" + type + "'");
}

SimConfig parse_sim(const json& s) {
  reject_unknown(s, {"T", "dt", "M", "cfl", "initial"}, "sim");
  SimConfig c;
  if (s.contains("T")) c.T = number(s.at("T"), "sim.T");
  if (s.contains("dt")) c.dt = number(s.at("dt"), "sim.dt");
  if (s.contains("M")) c.M = integer(s.at("M"), "sim.M");
  if (s.contains("cfl")) c.cfl = number(s.at("cfl"), "sim.cfl");
  if (!(c.T > 0.0)) throw ConfigError("sim.T must be positive");
  if (!(c.dt > 0.0)) throw ConfigError("sim.dt must be positive");
  if (c.M < 32) throw ConfigError("sim.M must be at least 32");
  if (!(c.cfl > 0.0 && c.cfl <= 1.0)) throw ConfigError("sim.cfl must lie in (0, 1]");
  if (s.contains("initial")) {
    const json& init = s.at("initial");
    if (!init.is_array()) throw ConfigError("sim.initial: expected an array");
    c.initial.clear();
    for (const auto& e : init) {
      reject_unknown(e, {"n", "z1", "z2"}, "sim.initial[]");
      InitialMode m;
      m.n = integer(require(e, "n", "sim.initial[]"), "sim.initial[].n");
      m.z1 = e.contains("z1") ? number(e.at("z1"), "sim.initial[].z1") : 0.0;
      m.z2 = e.contains("z2") ? number(e.at("z2"), "sim.initial[].z2") : 0.0;
      c.initial.push_back(m);
    }
  }
  return c;
}

}  // namespace

RunConfig parse_config(const json& j) {
  reject_unknown(j, {"boundary", "alpha", "beta", "R", "weights", "N", "grid", "coupled_N", "N_list", "fit_window",
                     "seed", "sim"},
                 "config");
  const json& b = require(j, "boundary", "config");
  if (!b.is_string()) throw ConfigError("config.boundary: expected a string");
  const Boundary boundary = boundary_from_string(b.get<std::string>());
  const int N = integer(require(j, "N", "config"), "config.N");
  if (N < 0) throw ConfigError("config.N must be nonnegative");

  RunConfig rc;
  rc.wave = WaveConfig(boundary, number(require(j, "alpha", "config"), "config.alpha"),
                       number(require(j, "beta", "config"), "config.beta"), number(require(j, "R", "config"), "config.R"));
  rc.family = parse_weights(require(j, "weights", "config"), N);
  rc.N = N;
  if (j.contains("grid")) rc.grid = integer(j.at("grid"), "config.grid");
  if (rc.grid < 3 || rc.grid % 2 == 0) throw ConfigError("config.grid must be an odd integer >= 3");
  if (j.contains("coupled_N")) rc.coupled_N = integer(j.at("coupled_N"), "config.coupled_N");
  if (rc.coupled_N < 0) throw ConfigError("config.coupled_N must be nonnegative");
  if (j.contains("N_list")) {
    const json& l = j.at("N_list");
    if (!l.is_array() || l.size() < 2) throw ConfigError("config.N_list: expected an array of at least two integers");
    rc.N_list.clear();
    for (const auto& v : l) rc.N_list.push_back(integer(v, "config.N_list[]"));
    for (int v : rc.N_list)
      if (v < 1) throw ConfigError("config.N_list entries must be positive");
  }
  if (j.contains("fit_window")) {
    const json& w = j.at("fit_window");
    if (!w.is_array() || w.size() != 2) throw ConfigError("config.fit_window: expected [lo, hi]");
    rc.fit_lo = integer(w[0], "config.fit_window[0]");
    rc.fit_hi = integer(w[1], "config.fit_window[1]");
    if (rc.fit_lo < 1 || rc.fit_hi <= rc.fit_lo) throw ConfigError("config.fit_window: need 1 <= lo < hi");
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("config.seed: expected a nonnegative integer");
    rc.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("sim")) rc.sim = parse_sim(j.at("sim"));
  for (const auto& m : rc.sim.initial)
    if (m.n < first_mode(boundary)) throw ConfigError("sim.initial: mode " + std::to_string(m.n) + " invalid for boundary");
  return rc;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace wavelqr
