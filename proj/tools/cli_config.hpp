#pragma once

// Scenario configuration for the tpump command line: a single JSON object
// with explicit units on every frequency, rate and time.

#include "tpump/tpump.h"

#include <json.hpp>

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace tpcli {

using json = nlohmann::json;

// Bad or missing config entry; key() names it.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& msg)
      : std::runtime_error(key + ": " + msg), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Angular frequency in rad/s from {"value": v, "unit": u}. Cycle units (Hz,
/// kHz, MHz and their "(2pi)" spellings) are multiplied by 2 pi.
double frequency_value(const json& q, const std::string& key);
/// Time in seconds; units s, ms, us, ns.
double time_value(const json& q, const std::string& key);
/// Magnetic field in gauss; units G, mG, uG, T.
double field_value(const json& q, const std::string& key);
/// Angle in radians; a bare number is taken as radians, otherwise rad or deg.
double angle_value(const json& q, const std::string& key);

struct ScheduleSpec {
  int profile = TP_PROFILE_CONSTANT;
  double omega = 0.0;
  double theta = 0.0;
  double ramp_duration = 0.0;
  std::vector<double> knot_t;
  std::vector<double> knot_theta;
};

struct ScanConfig {
  bool present = false;
  int parameter = TP_SCAN_OMEGA;
  std::vector<double> grid;
  int readout = TP_READOUT_FIXED;
  double steady_epsilon = 1e-3;
};

struct PassageConfig {
  bool present = false;
  double T = 0.0;
  int init = TP_PASSAGE_EXACT_ZERO;
  double prepump = 0.0;
};

struct ScenarioConfig {
  json source;
  int engine = TP_ENGINE_MASTER;
  tp_params params{0.0, 0.0, 1.0, 0.0};
  bool has_schedule = false;
  ScheduleSpec schedule;
  tp_integrator integrator = tp_integrator_default();
  tp_variant variant = tp_variant_default();
  int initial_state = TP_INIT_MIXED;
  double t_final = 0.0;  ///< 0 when absent
  std::size_t samples = 501;
  ScanConfig scan;
  PassageConfig passage;
};

ScenarioConfig parse_config(const json& doc);
/// Reads a config file. A previous JSON output (with "config" and "results")
/// is accepted and its embedded config is used.
ScenarioConfig load_config(const std::string& path);

struct ScheduleDeleter {
  void operator()(tp_schedule* s) const { tp_schedule_free(s); }
};
using ScheduleHandle = std::unique_ptr<tp_schedule, ScheduleDeleter>;

/// Throws ConfigError naming "schedule" when the library rejects it.
ScheduleHandle make_schedule(const ScheduleSpec& s);

/// Config document reproducing a figure preset, with units spelled out.
json preset_config(const std::string& name);

std::vector<double> sample_times(double t_final, std::size_t samples);

}  // namespace tpcli
