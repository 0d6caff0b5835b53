#include "tpump/model.hpp"

#include <cmath>

namespace tpump {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// Off-diagonal optical couplings shared by both frames; `phase_mid` and
// `phase_side` multiply the |0><e| and |+-1><e| elements respectively.
void add_optical_coupling(Matrix4c& h, double Omega, double theta, cplx phase_mid,
                          cplx phase_side) {
  const cplx mid = Omega * std::cos(theta) * phase_mid;
  const cplx side = Omega * std::sin(theta) * kInvSqrt2 * phase_side;
  h(kMid, kExcited) = mid;
  h(kUp, kExcited) = side;
  h(kDown, kExcited) = side;
  h(kExcited, kMid) = std::conj(mid);
  h(kExcited, kUp) = std::conj(side);
  h(kExcited, kDown) = std::conj(side);
}

SpinOperators build_spin_operators() {
  SpinOperators ops{Matrix4c::Zero(), Matrix4c::Zero(), Matrix4c::Zero()};
  const cplx i(0.0, 1.0);
  ops.Fx(kUp, kMid) = ops.Fx(kMid, kUp) = kInvSqrt2;
  ops.Fx(kMid, kDown) = ops.Fx(kDown, kMid) = kInvSqrt2;
  ops.Fy(kUp, kMid) = -i * kInvSqrt2;
  ops.Fy(kMid, kUp) = i * kInvSqrt2;
  ops.Fy(kMid, kDown) = -i * kInvSqrt2;
  ops.Fy(kDown, kMid) = i * kInvSqrt2;
  ops.Fz(kUp, kUp) = 1.0;
  ops.Fz(kDown, kDown) = -1.0;
  return ops;
}

struct MomentOperators {
  Matrix4c Fzz, Azx, Azy;
};

MomentOperators build_moment_operators() {
  const auto& s = spin_operators();
  return {s.Fz * s.Fz, s.Fz * s.Fx + s.Fx * s.Fz, s.Fz * s.Fy + s.Fy * s.Fz};
}

// Tr(rho O) = sum_ij rho_ij O_ji
double expectation(const Matrix4c& rho, const Matrix4c& op) {
  return (rho.cwiseProduct(op.transpose())).sum().real();
}

}  // namespace

PolarizationVector polarization_vector(double t, const ModulationSchedule& sched) {
  const double th = sched.theta(t);
  const cplx phase = std::polar(1.0, sched.omega() * t);
  return {cplx(0.0, 1.0) * phase * std::sin(th), cplx(std::cos(th), 0.0)};
}

StokesComponents stokes(double t, const ModulationSchedule& sched) {
  const auto [ey, ez] = polarization_vector(t, sched);
  const cplx cross = std::conj(ez) * ey;
  return {std::norm(ez) - std::norm(ey), -2.0 * cross.real(), 2.0 * cross.imag()};
}

Matrix4c hamiltonian_rotating(double t, const PhysicalParams& p, const ModulationSchedule& sched) {
  Matrix4c h = Matrix4c::Zero();
  h(kUp, kUp) = p.omega_B;
  h(kDown, kDown) = -p.omega_B;
  add_optical_coupling(h, p.Omega, sched.theta(t), 1.0, std::polar(1.0, -sched.omega() * t));
  return h;
}

Matrix4c hamiltonian_lab(double t, const PhysicalParams& p, const ModulationSchedule& sched,
                         double omega_L, double omega_0) {
  Matrix4c h = Matrix4c::Zero();
  h(kUp, kUp) = p.omega_B;
  h(kDown, kDown) = -p.omega_B;
  h(kExcited, kExcited) = omega_0;
  add_optical_coupling(h, p.Omega, sched.theta(t), std::polar(1.0, omega_L * t),
                       std::polar(1.0, (omega_L - sched.omega()) * t));
  return h;
}

Matrix4c spontaneous_emission(const Matrix4c& rho, double gamma_e) {
  Matrix4c d = Matrix4c::Zero();
  const cplx ree = rho(kExcited, kExcited);
  for (int g = kUp; g <= kDown; ++g) {
    d(g, g) = ree / 3.0;
    d(g, kExcited) = -0.5 * rho(g, kExcited);
    d(kExcited, g) = -0.5 * rho(kExcited, g);
  }
  d(kExcited, kExcited) = -ree;
  return gamma_e * d;
}

Matrix4c spin_destruction(const Matrix4c& rho, double gamma) {
  Matrix4c d = Matrix4c::Zero();
  const auto r = [&rho](int i, int j) { return rho(i, j); };
  d(kUp, kUp) = -r(kUp, kUp) + 0.5 * r(kMid, kMid) + 0.125;
  d(kUp, kMid) = -1.5 * r(kUp, kMid) + 0.5 * r(kMid, kDown);
  d(kUp, kDown) = -2.0 * r(kUp, kDown);
  d(kMid, kUp) = -1.5 * r(kMid, kUp) + 0.5 * r(kDown, kMid);
  d(kMid, kMid) = -1.5 * r(kMid, kMid) + 0.5 * (r(kUp, kUp) + r(kDown, kDown)) + 0.25;
  d(kMid, kDown) = -1.5 * r(kMid, kDown) + 0.5 * r(kUp, kMid);
  d(kDown, kUp) = -2.0 * r(kDown, kUp);
  d(kDown, kMid) = -1.5 * r(kDown, kMid) + 0.5 * r(kMid, kUp);
  d(kDown, kDown) = -r(kDown, kDown) + 0.5 * r(kMid, kMid) + 0.125;
  return gamma * d;
}

const SpinOperators& spin_operators() {
  static const SpinOperators ops = build_spin_operators();
  return ops;
}

BlochMoments moments_from_rho(const Matrix4c& rho) {
  static const MomentOperators mo = build_moment_operators();
  const auto& s = spin_operators();
  return {expectation(rho, s.Fx),  expectation(rho, s.Fy),  expectation(rho, s.Fz),
          expectation(rho, mo.Fzz), expectation(rho, mo.Azx), expectation(rho, mo.Azy)};
}

}  // namespace tpump
