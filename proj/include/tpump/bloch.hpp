#pragma once

// Reduced moment equations for (Fx, Fy, Fz, Fzz, Azx, Azy) obtained by
// adiabatic elimination of the excited level.

#include "tpump/trajectory.hpp"

#include <cstdint>
#include <string>

namespace tpump {

enum class ReducedFlavor {
  Full,        ///< six coupled moments with the alignment equation
  Simplified,  ///< Fzz held at 1, gamma_perp = gamma + 2 Gamma cos^2(theta)
};

/// Relative sign of the sin(omega t) Fy term against the cos(omega t) Azx term
/// in the Fz equation.
enum class FzCouplingSign { Same, Opposite };

struct ReducedVariant {
  ReducedFlavor flavor = ReducedFlavor::Full;
  FzCouplingSign fz_sign = FzCouplingSign::Same;
  bool include_fminus_term = false;
  bool include_alignment_drive = false;
};

struct DerivedRates {
  double gamma_perp = 0.0;  ///< gamma + 2 Gamma cos^2
  double gamma_par = 0.0;   ///< gamma + 2 Gamma sin^2
  double R_a = 0.0;         ///< (8/3) Gamma cos^2 + (3/2) gamma
};

DerivedRates derived_rates(double theta, const PhysicalParams& p);

BlochMoments bloch_rhs(double t, const BlochMoments& m, const PhysicalParams& p,
                       const ModulationSchedule& sched, const ReducedVariant& v);

/// min(0.05 * 2pi / max(|omega|, |omega_B|, 1), 0.1 / max(Gamma, gamma))
double default_max_step_bloch(const PhysicalParams& p, const ModulationSchedule& sched);

Trajectory integrate_bloch(const BlochMoments& m0, const PhysicalParams& p,
                           const ModulationSchedule& sched, const IntegratorConfig& cfg,
                           const ReducedVariant& v = {});

struct SignResolution {
  FzCouplingSign winner = FzCouplingSign::Same;
  bool ambiguous = false;
  double rms_same = 0.0;
  double rms_opposite = 0.0;
  std::uint64_t scenario_hash = 0;
  PhysicalParams params;
  double theta = 0.0;
  double omega = 0.0;
  double t_end = 0.0;
};

/// Scenario used when none is supplied: theta=0.15, omega=omega_B,
/// Omega=0.1 gamma_e, gamma=1e-4 gamma_e, omega_B = 8 Gamma, window 50/Gamma.
struct SignScenario {
  PhysicalParams params;
  double theta = 0.0;
  double omega = 0.0;
  double t_end = 0.0;
};
SignScenario standard_sign_scenario(double gamma_e = 1.0);

/// Integrates both Fz sign variants and the master oracle from the
/// ground-mixed state and picks the one with smaller RMS Fz deviation. Within a
/// factor of 2 the result is flagged ambiguous and Same is kept.
/// Throws InvalidArgument outside theta <= 0.15, Omega <= 0.1 gamma_e.
SignResolution resolve_fz_sign(const PhysicalParams& p, const ModulationSchedule& sched,
                               const IntegratorConfig& cfg);
SignResolution resolve_fz_sign(const IntegratorConfig& cfg = {});

std::string to_string(FzCouplingSign s);
std::string to_string(ReducedFlavor f);

}  // namespace tpump
