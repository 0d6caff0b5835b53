#pragma once

// Hamiltonians, dissipators and observables of the four-level model.
//
// Phase convention: the modulated y-component of the light drives
// <e|H|+-1> = Omega sin(theta) e^{i omega t} / sqrt(2), so that
// |d+> = cos(theta)|1> - e^{i omega t} sin(theta)|0> / sqrt(2) is exactly dark
// and the |d+> resonance sits at omega = +omega_B.

#include "tpump/types.hpp"

namespace tpump {

struct PolarizationVector {
  cplx e_y;
  cplx e_z;
};

/// e(t) = cos(theta) z + i e^{i omega t} sin(theta) y.
PolarizationVector polarization_vector(double t, const ModulationSchedule& sched);

/// s1 = |e_z|^2 - |e_y|^2, s2 = sin(2 theta) sin(omega t), s3 = sin(2 theta) cos(omega t).
StokesComponents stokes(double t, const ModulationSchedule& sched);

/// Rotating-frame Hamiltonian (resonant laser).
Matrix4c hamiltonian_rotating(double t, const PhysicalParams& p, const ModulationSchedule& sched);

/// Lab-frame Hamiltonian with optical transition omega_0 and laser frequency omega_L.
/// For omega_L == omega_0 it maps onto hamiltonian_rotating under
/// rho -> U rho U^dagger, U = exp(i omega_L t |e><e|).
Matrix4c hamiltonian_lab(double t, const PhysicalParams& p, const ModulationSchedule& sched,
                         double omega_L, double omega_0);

/// Spontaneous-emission contribution to d rho / dt: |e> decays at gamma_e and
/// repopulates each ground level with a third of the decay.
Matrix4c spontaneous_emission(const Matrix4c& rho, double gamma_e);

/// Spin-destruction contribution to d rho / dt in the ground manifold. The
/// constant feed terms (1/8, 1/4, 1/8) make this affine; the ground trace of
/// the result is (gamma/2) (1 - Tr_ground rho).
Matrix4c spin_destruction(const Matrix4c& rho, double gamma);

/// Spin-1 operators on the ground manifold, zero on |e>.
struct SpinOperators {
  Matrix4c Fx;
  Matrix4c Fy;
  Matrix4c Fz;
};
const SpinOperators& spin_operators();

/// Tr(rho O) for Fx, Fy, Fz, Fz^2, {Fz,Fx}, {Fz,Fy}.
BlochMoments moments_from_rho(const Matrix4c& rho);
inline BlochMoments moments_from_rho(const DensityMatrix& rho) {
  return moments_from_rho(rho.matrix());
}

}  // namespace tpump
