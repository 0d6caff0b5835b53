#include "tpump/darkstate.hpp"

#include "tpump/errors.hpp"
#include "tpump/model.hpp"

#include <algorithm>
#include <cmath>

namespace tpump {

KetState dark_state(double theta, double t, double omega, DarkBranch branch) {
  if (!(theta >= 0.0 && theta <= kPi / 2 + 1e-12))
    throw InvalidArgument("dark_state: theta must lie in [0, pi/2]");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Vector4c v = Vector4c::Zero();
  v[branch == DarkBranch::Plus ? kUp : kDown] = c;
  v[kMid] = -std::polar(1.0, omega * t) * s / std::sqrt(2.0);
  return KetState::normalized(v);
}

cplx pump_coupling(const KetState& ket, double t, const PhysicalParams& p,
                   const ModulationSchedule& sched) {
  const Matrix4c h = hamiltonian_rotating(t, p, sched);
  return (h.row(kExcited) * ket.amplitudes())(0, 0);
}

double fidelity(const Matrix4c& rho, const KetState& ket) {
  const Vector4c& a = ket.amplitudes();
  const double f = (a.adjoint() * rho * a)(0, 0).real();
  return std::clamp(f, 0.0, 1.0);
}

double depopulation_rate(double theta, const PhysicalParams& p) {
  const double s = std::sin(theta);
  return p.Gamma() * s * s;
}

}  // namespace tpump
