#pragma once

// Full Liouville-equation integration in the rotating frame.

#include "tpump/trajectory.hpp"

#include <functional>

namespace tpump {

/// -i[H_rot(t), rho] + spontaneous emission + spin destruction.
/// Throws InvalidArgument on non-finite entries.
Matrix4c liouville_rhs(double t, const Matrix4c& rho, const PhysicalParams& p,
                       const ModulationSchedule& sched);

/// min(0.05 * 2pi / max(|omega|, |omega_B|, 1), 0.1 / gamma_e)
double default_max_step_master(const PhysicalParams& p, const ModulationSchedule& sched);

struct MasterOptions {
  bool keep_states = true;
  /// Trace drift tolerance multiplier; the run aborts when
  /// |Tr rho - 1| > drift_factor * ((gamma/2) int rho_ee dt + 1e-6).
  double drift_factor = 10.0;
  /// Optional early stop, evaluated at each sample after it is recorded.
  std::function<bool(double t, const BlochMoments& m)> stop_when;
};

Trajectory integrate_master(const DensityMatrix& rho0, const PhysicalParams& p,
                            const ModulationSchedule& sched, const IntegratorConfig& cfg,
                            const MasterOptions& opts = {});

/// Adiabatic-elimination prediction of the excited row (rho_e1, rho_e0, rho_e-1)
/// and rho_ee from the ground block of rho.
struct ExcitedPrediction {
  cplx rho_e[3];
  double rho_ee = 0.0;
};
ExcitedPrediction adiabatic_excited_state(double t, const Matrix4c& rho, const PhysicalParams& p,
                                          const ModulationSchedule& sched);

struct ExcitedStateReport {
  std::size_t samples_checked = 0;
  double max_coherence_deviation = 0.0;
  double max_population_deviation = 0.0;
  double max_coherence = 0.0;   ///< largest predicted |rho_ek|
  double max_population = 0.0;  ///< largest predicted rho_ee
  double relative_coherence_deviation = 0.0;
  double relative_population_deviation = 0.0;
};

/// Compares stored states against the predictions for samples with t >= t_settle.
/// Requires a master trajectory with states kept.
ExcitedStateReport excited_state_check(const Trajectory& traj, const PhysicalParams& p,
                                       const ModulationSchedule& sched, double t_settle);

}  // namespace tpump
