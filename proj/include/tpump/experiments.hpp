#pragma once

// Protocol drivers: frequency and depth scans, adiabatic passage, engine
// comparison, and the figure presets.

#include "tpump/bloch.hpp"
#include "tpump/master.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tpump {

/// PlusX is the Fx = 1 coherent state (|1> + sqrt(2)|0> + |-1>) / 2.
enum class InitialState { GroundMixed, Zero, Up, Down, DarkPlus, DarkMinus, PlusX };

/// Dark states are evaluated at t = 0 with the schedule's theta(0) and omega.
DensityMatrix initial_density(InitialState s, const ModulationSchedule& sched);
BlochMoments initial_moments(InitialState s, const ModulationSchedule& sched);

struct EngineSpec {
  Engine engine = Engine::Master;
  ReducedVariant variant;
};

/// Runs either engine from the given initial state on cfg.sample_grid.
Trajectory run_engine(const EngineSpec& e, InitialState init, const PhysicalParams& p,
                      const ModulationSchedule& sched, const IntegratorConfig& cfg);

enum class ScanParameter { Omega, Theta };
enum class Readout { FixedTime, SteadyState };

struct ScanSpec {
  ScanParameter parameter = ScanParameter::Omega;
  std::vector<double> grid;
  double t_final = 0.0;
  PhysicalParams params;
  ModulationSchedule schedule = ModulationSchedule::constant(0.0, 0.0);
  EngineSpec engine;
  IntegratorConfig integrator;  ///< sample_grid is replaced per point
  InitialState initial = InitialState::GroundMixed;
  Readout readout = Readout::FixedTime;
  double steady_epsilon = 1e-3;  ///< steady when |dFz/dt| <= eps * gamma
  std::size_t samples = 201;     ///< samples per point on [0, t_final]
  bool keep_trajectories = false;
  unsigned threads = 0;  ///< 0 = hardware concurrency

  void validate() const;
};

struct Extremum {
  std::size_t index = 0;
  double value = 0.0;
  double fz = 0.0;
  double refined_value = 0.0;
  double refined_fz = 0.0;
  bool is_maximum = true;
};

struct ScanResult {
  ScanParameter parameter = ScanParameter::Omega;
  std::vector<double> grid;
  std::vector<double> fz;       ///< NaN at failed points
  std::vector<double> t_read;   ///< time the value was read
  std::vector<bool> ok;
  std::vector<std::string> errors;
  std::vector<Extremum> extrema;  ///< dominant extrema, ordered by grid index
  std::optional<Extremum> peak;   ///< largest Fz, refined
  std::vector<Trajectory> trajectories;

  std::size_t failures() const;
};

ScanResult scan_omega(const ScanSpec& spec);
ScanResult scan_theta(const ScanSpec& spec);
ScanResult run_scan(const ScanSpec& spec);

/// Local maxima with Fz > 0 and local minima with Fz < 0 whose magnitude is at
/// least dominance * max|Fz|. Failed (NaN) points are skipped.
std::vector<Extremum> find_extrema(const std::vector<double>& grid, const std::vector<double>& fz,
                                   double dominance = 0.5);

/// Vertex of the parabola through the three points around index i,
/// clamped to the neighbouring grid cells. Endpoints are returned unrefined.
Extremum refine_extremum(const std::vector<double>& grid, const std::vector<double>& fz,
                         std::size_t i);

enum class PassageInit { ExactZero, PrePump };

struct PassageSpec {
  double T = 0.0;
  PhysicalParams params;
  double omega = 0.0;
  EngineSpec engine;
  IntegratorConfig integrator;  ///< default grid: 401 samples on [0, T]
  PassageInit init = PassageInit::ExactZero;
  double prepump_duration = 0.0;  ///< 0 means 5 / Gamma
};

struct PassageResult {
  Trajectory trajectory;
  bool off_resonance = false;  ///< omega differs from omega_B
  double prepump_duration = 0.0;
  std::vector<double> fid_dplus;  ///< fidelity with |d+(theta(t), t)>, master only
};

PassageResult adiabatic_passage(const PassageSpec& spec);

struct Scenario {
  PhysicalParams params;
  ModulationSchedule schedule = ModulationSchedule::constant(0.0, 0.0);
  InitialState initial = InitialState::GroundMixed;
  double t_end = 0.0;
  std::size_t samples = 501;
};

struct ComponentDeviation {
  double max_abs = 0.0;
  double rms = 0.0;
};

struct CompareReport {
  ComponentDeviation Fx, Fy, Fz, Fzz, Azx, Azy;
  bool in_regime = false;  ///< theta <= 0.15 and Omega <= 0.1 gamma_e
  Trajectory master;
  Trajectory bloch;
};

CompareReport compare_engines(const Scenario& sc, const IntegratorConfig& cfg,
                              const ReducedVariant& v = {});

struct FigurePreset {
  std::string name;
  std::string kind;  ///< "trajectory", "passage", "scan-omega" or "scan-theta"
  PhysicalParams params;
  ModulationSchedule schedule = ModulationSchedule::constant(0.0, 0.0);
  double t_final = 0.0;
  InitialState initial = InitialState::GroundMixed;
  std::vector<double> scan_grid;
  std::string notes;
};

/// fig2a, fig2c, fig3a, fig3b. Throws InvalidArgument for other names.
FigurePreset figure_preset(const std::string& name);
std::vector<std::string> figure_preset_names();

/// 0.35 (2pi) MHz per gauss.
inline constexpr double kGyromagneticRatio = 0.35e6 * kTwoPi;
double gb_to_larmor(double B_gauss);

std::string to_string(InitialState s);
std::string to_string(Engine e);
std::string to_string(ScanParameter s);

}  // namespace tpump
