#pragma once

// Coherent-population-trapping dark states of the two Lambda systems
// {|1>, |e>, |0>} and {|-1>, |e>, |0>}.

#include "tpump/types.hpp"

namespace tpump {

enum class DarkBranch { Plus, Minus };

/// [cos(theta)|+-1> - e^{i omega t} sin(theta)|0> / sqrt(2)] / sqrt(cos^2 + sin^2 / 2).
/// The |+-1> amplitude is real and non-negative.
KetState dark_state(double theta, double t, double omega, DarkBranch branch);

/// <e|H_rot(t)|ket>.
cplx pump_coupling(const KetState& ket, double t, const PhysicalParams& p,
                   const ModulationSchedule& sched);

/// <ket|rho|ket>, clamped to [0, 1].
double fidelity(const Matrix4c& rho, const KetState& ket);
inline double fidelity(const DensityMatrix& rho, const KetState& ket) {
  return fidelity(rho.matrix(), ket);
}

/// Gamma sin^2(theta): the scale at which the non-resonant Lambda system is
/// emptied. A scale, not an exact exponential rate.
double depopulation_rate(double theta, const PhysicalParams& p);

}  // namespace tpump
