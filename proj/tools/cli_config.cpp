#include "cli_config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace tpcli {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double unit_factor(const std::map<std::string, double>& table, const std::string& unit,
                   const std::string& key) {
  auto it = table.find(unit);
  if (it == table.end()) {
    std::string known;
    for (const auto& kv : table) known += (known.empty() ? "" : ", ") + kv.first;
    throw ConfigError(key, "unknown unit '" + unit + "' (expected one of " + known + ")");
  }
  return it->second;
}

double quantity(const json& q, const std::string& key, const std::map<std::string, double>& units) {
  if (q.is_number()) throw ConfigError(key, "missing unit; write {\"value\": ..., \"unit\": ...}");
  if (!q.is_object()) throw ConfigError(key, "expected an object with value and unit");
  if (!q.contains("unit")) throw ConfigError(key, "missing unit");
  if (!q.contains("value") || !q["value"].is_number()) throw ConfigError(key, "missing numeric value");
  if (!q["unit"].is_string()) throw ConfigError(key, "unit must be a string");
  const double v = q["value"].get<double>();
  if (!std::isfinite(v)) throw ConfigError(key, "value is not finite");
  return v * unit_factor(units, q["unit"].get<std::string>(), key);
}

const std::map<std::string, double>& frequency_units() {
  static const std::map<std::string, double> t = {
      {"rad/s", 1.0},           {"1/s", 1.0},          {"s^-1", 1.0},
      {"krad/s", 1e3},          {"Mrad/s", 1e6},       {"Hz", kTwoPi},
      {"kHz", 1e3 * kTwoPi},    {"MHz", 1e6 * kTwoPi}, {"(2pi)Hz", kTwoPi},
      {"(2pi)kHz", 1e3 * kTwoPi}, {"(2pi)MHz", 1e6 * kTwoPi}};
  return t;
}

const std::map<std::string, double>& time_units() {
  static const std::map<std::string, double> t = {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}};
  return t;
}

const std::map<std::string, double>& field_units() {
  static const std::map<std::string, double> t = {{"G", 1.0}, {"mG", 1e-3}, {"uG", 1e-6}, {"T", 1e4}};
  return t;
}

const json& need(const json& obj, const std::string& name, const std::string& key) {
  if (!obj.contains(name)) throw ConfigError(key, "missing required key");
  return obj[name];
}

std::string string_of(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(key, "expected a string");
  return v.get<std::string>();
}

template <class T>
T choice(const json& v, const std::string& key, const std::map<std::string, T>& options) {
  const std::string s = string_of(v, key);
  auto it = options.find(s);
  if (it == options.end()) {
    std::string known;
    for (const auto& kv : options) known += (known.empty() ? "" : ", ") + kv.first;
    throw ConfigError(key, "unknown value '" + s + "' (expected one of " + known + ")");
  }
  return it->second;
}

bool bool_of(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError(key, "expected true or false");
  return v.get<bool>();
}

double number_of(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  return v.get<double>();
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw ConfigError(where.empty() ? it.key() : where + "." + it.key(), "unknown key");
  }
}

void parse_params(const json& j, ScenarioConfig& c) {
  if (!j.is_object()) throw ConfigError("params", "expected an object");
  check_keys(j, "params", {"omega_B", "B", "Omega", "gamma_e", "gamma"});
  if (j.contains("omega_B") && j.contains("B"))
    throw ConfigError("params.B", "give either omega_B or B, not both");
  if (j.contains("omega_B")) {
    c.params.omega_B = frequency_value(j["omega_B"], "params.omega_B");
  } else if (j.contains("B")) {
    const double B = field_value(j["B"], "params.B");
    if (tp_gb_to_larmor(B, &c.params.omega_B) != TP_OK) throw ConfigError("params.B", tp_last_error());
  } else {
    throw ConfigError("params.omega_B", "missing required key");
  }
  c.params.Omega = frequency_value(need(j, "Omega", "params.Omega"), "params.Omega");
  c.params.gamma_e = frequency_value(need(j, "gamma_e", "params.gamma_e"), "params.gamma_e");
  c.params.gamma = frequency_value(need(j, "gamma", "params.gamma"), "params.gamma");
  double G = 0.0;
  if (tp_params_gamma(&c.params, &G) != TP_OK) throw ConfigError("params", tp_last_error());
}

void parse_schedule(const json& j, ScenarioConfig& c) {
  if (!j.is_object()) throw ConfigError("schedule", "expected an object");
  check_keys(j, "schedule", {"omega", "profile", "theta", "T", "knots", "time_unit"});
  ScheduleSpec& s = c.schedule;
  s.omega = frequency_value(need(j, "omega", "schedule.omega"), "schedule.omega");
  s.profile = choice<int>(need(j, "profile", "schedule.profile"), "schedule.profile",
                          {{"constant", TP_PROFILE_CONSTANT},
                           {"ramp", TP_PROFILE_RAMP},
                           {"piecewise", TP_PROFILE_PIECEWISE}});
  if (s.profile == TP_PROFILE_CONSTANT) {
    s.theta = angle_value(need(j, "theta", "schedule.theta"), "schedule.theta");
  } else if (s.profile == TP_PROFILE_RAMP) {
    s.ramp_duration = time_value(need(j, "T", "schedule.T"), "schedule.T");
  } else {
    const std::string tu = string_of(need(j, "time_unit", "schedule.time_unit"), "schedule.time_unit");
    const double f = unit_factor(time_units(), tu, "schedule.time_unit");
    const json& k = need(j, "knots", "schedule.knots");
    if (!k.is_array() || k.empty()) throw ConfigError("schedule.knots", "expected a nonempty array");
    for (std::size_t i = 0; i < k.size(); ++i) {
      const std::string key = "schedule.knots[" + std::to_string(i) + "]";
      if (!k[i].is_array() || k[i].size() != 2) throw ConfigError(key, "expected [t, theta]");
      s.knot_t.push_back(number_of(k[i][0], key) * f);
      s.knot_theta.push_back(number_of(k[i][1], key));
    }
  }
  c.has_schedule = true;
  make_schedule(s);  // validate now so the error names the schedule
}

void parse_integrator(const json& j, ScenarioConfig& c) {
  if (!j.is_object()) throw ConfigError("integrator", "expected an object");
  check_keys(j, "integrator", {"method", "rtol", "atol", "max_step", "fixed_step"});
  if (j.contains("method"))
    c.integrator.method = choice<int>(j["method"], "integrator.method",
                                      {{"adaptive", TP_METHOD_ADAPTIVE}, {"rk4", TP_METHOD_RK4}});
  if (j.contains("rtol")) c.integrator.rtol = number_of(j["rtol"], "integrator.rtol");
  if (j.contains("atol")) c.integrator.atol = number_of(j["atol"], "integrator.atol");
  if (!(c.integrator.rtol > 0.0)) throw ConfigError("integrator.rtol", "must be > 0");
  if (!(c.integrator.atol > 0.0)) throw ConfigError("integrator.atol", "must be > 0");
  if (j.contains("max_step")) {
    c.integrator.max_step = time_value(j["max_step"], "integrator.max_step");
    if (!(c.integrator.max_step > 0.0)) throw ConfigError("integrator.max_step", "must be > 0");
  }
  if (j.contains("fixed_step")) {
    c.integrator.fixed_step = time_value(j["fixed_step"], "integrator.fixed_step");
    if (!(c.integrator.fixed_step > 0.0)) throw ConfigError("integrator.fixed_step", "must be > 0");
  }
}

void parse_variant(const json& j, ScenarioConfig& c) {
  if (!j.is_object()) throw ConfigError("variant", "expected an object");
  check_keys(j, "variant", {"flavor", "fz_sign", "include_fminus_term", "include_alignment_drive"});
  if (j.contains("flavor"))
    c.variant.flavor = choice<int>(j["flavor"], "variant.flavor",
                                   {{"full", TP_FLAVOR_FULL}, {"simplified", TP_FLAVOR_SIMPLIFIED}});
  if (j.contains("fz_sign"))
    c.variant.fz_sign = choice<int>(j["fz_sign"], "variant.fz_sign",
                                    {{"same", TP_FZ_SAME}, {"opposite", TP_FZ_OPPOSITE}});
  if (j.contains("include_fminus_term"))
    c.variant.include_fminus_term = bool_of(j["include_fminus_term"], "variant.include_fminus_term");
  if (j.contains("include_alignment_drive"))
    c.variant.include_alignment_drive =
        bool_of(j["include_alignment_drive"], "variant.include_alignment_drive");
}

void parse_scan(const json& j, ScenarioConfig& c) {
  if (!j.is_object()) throw ConfigError("scan", "expected an object");
  check_keys(j, "scan", {"parameter", "grid", "readout", "steady_epsilon"});
  ScanConfig& s = c.scan;
  s.present = true;
  s.parameter = choice<int>(need(j, "parameter", "scan.parameter"), "scan.parameter",
                            {{"omega", TP_SCAN_OMEGA}, {"theta", TP_SCAN_THETA}});
  const json& g = need(j, "grid", "scan.grid");
  if (!g.is_object()) throw ConfigError("scan.grid", "expected an object");
  check_keys(g, "scan.grid", {"values", "min", "max", "count", "unit"});
  // omega grids need a frequency unit; theta grids default to radians
  auto convert = [&](double v, const std::string& key) {
    json q = {{"value", v}};
    if (g.contains("unit")) q["unit"] = g["unit"];
    if (s.parameter == TP_SCAN_OMEGA) {
      if (!g.contains("unit")) throw ConfigError("scan.grid.unit", "missing unit");
      return frequency_value(q, key);
    }
    return g.contains("unit") ? angle_value(q, key) : v;
  };
  if (g.contains("values")) {
    if (!g["values"].is_array() || g["values"].empty())
      throw ConfigError("scan.grid.values", "expected a nonempty array");
    for (std::size_t i = 0; i < g["values"].size(); ++i) {
      const std::string key = "scan.grid.values[" + std::to_string(i) + "]";
      s.grid.push_back(convert(number_of(g["values"][i], key), key));
    }
  } else {
    const double lo = convert(number_of(need(g, "min", "scan.grid.min"), "scan.grid.min"), "scan.grid.min");
    const double hi = convert(number_of(need(g, "max", "scan.grid.max"), "scan.grid.max"), "scan.grid.max");
    const json& cnt = need(g, "count", "scan.grid.count");
    if (!cnt.is_number_integer() || cnt.get<long long>() < 1)
      throw ConfigError("scan.grid.count", "expected a positive integer");
    const auto n = static_cast<std::size_t>(cnt.get<long long>());
    if (n == 1) {
      s.grid.push_back(lo);
    } else {
      if (!(hi > lo)) throw ConfigError("scan.grid.max", "must exceed min");
      for (std::size_t i = 0; i < n; ++i)
        s.grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
      s.grid.back() = hi;
    }
  }
  if (j.contains("readout"))
    s.readout = choice<int>(j["readout"], "scan.readout",
                            {{"fixed", TP_READOUT_FIXED}, {"steady", TP_READOUT_STEADY}});
  if (j.contains("steady_epsilon")) s.steady_epsilon = number_of(j["steady_epsilon"], "scan.steady_epsilon");
}

void parse_passage(const json& j, ScenarioConfig& c) {
  if (!j.is_object()) throw ConfigError("passage", "expected an object");
  check_keys(j, "passage", {"T", "init", "prepump_duration"});
  PassageConfig& p = c.passage;
  p.present = true;
  if (j.contains("T")) p.T = time_value(j["T"], "passage.T");
  if (j.contains("init"))
    p.init = choice<int>(j["init"], "passage.init",
                         {{"zero", TP_PASSAGE_EXACT_ZERO}, {"prepump", TP_PASSAGE_PREPUMP}});
  if (j.contains("prepump_duration")) p.prepump = time_value(j["prepump_duration"], "passage.prepump_duration");
}

}  // namespace

double frequency_value(const json& q, const std::string& key) { return quantity(q, key, frequency_units()); }
double time_value(const json& q, const std::string& key) { return quantity(q, key, time_units()); }
double field_value(const json& q, const std::string& key) { return quantity(q, key, field_units()); }

double angle_value(const json& q, const std::string& key) {
  if (q.is_number()) return q.get<double>();
  static const std::map<std::string, double> units = {{"rad", 1.0}, {"deg", kTwoPi / 360.0}};
  return quantity(q, key, units);
}

ScenarioConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config", "top level must be a JSON object");
  check_keys(doc, "", {"engine", "params", "schedule", "integrator", "variant", "initial_state",
                       "t_final", "samples", "scan", "passage", "command", "notes"});
  ScenarioConfig c;
  c.source = doc;
  if (doc.contains("engine"))
    c.engine = choice<int>(doc["engine"], "engine", {{"master", TP_ENGINE_MASTER}, {"bloch", TP_ENGINE_BLOCH}});
  parse_params(need(doc, "params", "params"), c);
  if (doc.contains("schedule")) parse_schedule(doc["schedule"], c);
  if (doc.contains("integrator")) parse_integrator(doc["integrator"], c);
  if (doc.contains("variant")) parse_variant(doc["variant"], c);
  if (doc.contains("initial_state"))
    c.initial_state = choice<int>(doc["initial_state"], "initial_state",
                                  {{"mixed", TP_INIT_MIXED},
                                   {"zero", TP_INIT_ZERO},
                                   {"up", TP_INIT_UP},
                                   {"down", TP_INIT_DOWN},
                                   {"dark_plus", TP_INIT_DARK_PLUS},
                                   {"dark_minus", TP_INIT_DARK_MINUS},
                                   {"plus_x", TP_INIT_PLUS_X}});
  if (doc.contains("t_final")) {
    c.t_final = time_value(doc["t_final"], "t_final");
    if (!(c.t_final > 0.0)) throw ConfigError("t_final", "must be > 0");
  }
  if (doc.contains("samples")) {
    const json& s = doc["samples"];
    if (!s.is_number_integer() || s.get<long long>() < 2)
      throw ConfigError("samples", "expected an integer >= 2");
    c.samples = static_cast<std::size_t>(s.get<long long>());
  }
  if (doc.contains("scan")) parse_scan(doc["scan"], c);
  if (doc.contains("passage")) parse_passage(doc["passage"], c);
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("config") && doc.contains("results")) return parse_config(doc["config"]);
  return parse_config(doc);
}

ScheduleHandle make_schedule(const ScheduleSpec& s) {
  tp_schedule* out = nullptr;
  tp_status st = TP_OK;
  switch (s.profile) {
    case TP_PROFILE_CONSTANT: st = tp_schedule_constant(s.omega, s.theta, &out); break;
    case TP_PROFILE_RAMP: st = tp_schedule_ramp(s.omega, s.ramp_duration, &out); break;
    default:
      st = tp_schedule_piecewise(s.omega, s.knot_t.data(), s.knot_theta.data(), s.knot_t.size(), &out);
  }
  if (st != TP_OK) throw ConfigError("schedule", tp_last_error());
  return ScheduleHandle(out);
}

std::vector<double> sample_times(double t_final, std::size_t samples) {
  std::vector<double> t(samples);
  for (std::size_t i = 0; i < samples; ++i)
    t[i] = t_final * static_cast<double>(i) / static_cast<double>(samples - 1);
  t.back() = t_final;
  return t;
}

json preset_config(const std::string& name) {
  tp_preset p;
  if (tp_preset_get(name.c_str(), &p) != TP_OK) throw ConfigError("preset", tp_last_error());
  const double khz = 1e3 * kTwoPi;
  auto freq = [](double v, const char* unit) { return json{{"value", v}, {"unit", unit}}; };
  auto ms = [](double seconds) { return json{{"value", seconds * 1e3}, {"unit", "ms"}}; };
  json doc;
  doc["command"] = p.kind;
  doc["engine"] = "master";
  doc["params"] = {{"omega_B", freq(p.params.omega_B / khz, "(2pi)kHz")},
                   {"Omega", freq(p.params.Omega, "rad/s")},
                   {"gamma_e", freq(p.params.gamma_e, "rad/s")},
                   {"gamma", freq(p.params.gamma, "1/s")}};
  json sched = {{"omega", freq(p.omega / khz, "(2pi)kHz")}};
  if (p.profile == TP_PROFILE_RAMP) {
    sched["profile"] = "ramp";
    sched["T"] = ms(p.ramp_duration);
  } else {
    sched["profile"] = "constant";
    sched["theta"] = p.theta;
  }
  doc["schedule"] = sched;
  doc["t_final"] = ms(p.t_final);
  doc["initial_state"] = p.initial_state == TP_INIT_ZERO ? "zero" : "mixed";
  doc["samples"] = 1001;
  const std::string kind = p.kind;
  if (kind == "scan-omega") {
    doc["scan"] = {{"parameter", "omega"},
                   {"grid", {{"min", p.scan_min / khz}, {"max", p.scan_max / khz}, {"count", p.scan_count}, {"unit", "(2pi)kHz"}}},
                   {"readout", "fixed"}};
    doc["samples"] = 11;
  } else if (kind == "scan-theta") {
    doc["scan"] = {{"parameter", "theta"},
                   {"grid", {{"min", p.scan_min}, {"max", p.scan_max}, {"count", p.scan_count}, {"unit", "rad"}}},
                   {"readout", "fixed"}};
    doc["samples"] = 11;
  } else if (kind == "passage") {
    doc["passage"] = {{"T", ms(p.ramp_duration)}, {"init", "zero"}};
  }
  return doc;
}

}  // namespace tpcli
