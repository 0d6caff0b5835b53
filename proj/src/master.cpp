#include "tpump/master.hpp"

#include "tpump/darkstate.hpp"
#include "tpump/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tpump {

namespace {

Matrix4c rhs_unchecked(double t, const Matrix4c& rho, const PhysicalParams& p,
                       const ModulationSchedule& sched) {
  const Matrix4c h = hamiltonian_rotating(t, p, sched);
  const cplx mi(0.0, -1.0);
  return mi * (h * rho - rho * h) + spontaneous_emission(rho, p.gamma_e) +
         spin_destruction(rho, p.gamma);
}

double ground_trace(const Matrix4c& rho) {
  return (rho(kUp, kUp) + rho(kMid, kMid) + rho(kDown, kDown)).real();
}

}  // namespace

Matrix4c liouville_rhs(double t, const Matrix4c& rho, const PhysicalParams& p,
                       const ModulationSchedule& sched) {
  if (!rho.allFinite()) throw InvalidArgument("liouville_rhs: density matrix is not finite");
  return rhs_unchecked(t, rho, p, sched);
}

double default_max_step_master(const PhysicalParams& p, const ModulationSchedule& sched) {
  const double w = std::max({std::abs(sched.omega()), std::abs(p.omega_B), 1.0});
  return std::min(0.05 * kTwoPi / w, 0.1 / p.gamma_e);
}

Trajectory integrate_master(const DensityMatrix& rho0, const PhysicalParams& p,
                            const ModulationSchedule& sched, const IntegratorConfig& cfg,
                            const MasterOptions& opts) {
  p.validate();
  cfg.validate();
  const double h_max = cfg.max_step.value_or(default_max_step_master(p, sched));

  Trajectory tr;
  tr.engine = Engine::Master;
  const std::size_t n = cfg.sample_grid.size();
  tr.times.reserve(n);
  tr.moments.reserve(n);
  tr.diagnostics.reserve(n);
  if (opts.keep_states) tr.states.reserve(n);

  double first_order = 0.0;
  double exact = 0.0;
  const double trace0 = rho0.matrix().trace().real();
  const double half_gamma = 0.5 * p.gamma;

  auto on_step = [&](double t0, const Matrix4c& y0, double t1, const Matrix4c& y1) {
    const double dt = t1 - t0;
    const double ee0 = y0(kExcited, kExcited).real();
    const double ee1 = y1(kExcited, kExcited).real();
    first_order += half_gamma * 0.5 * dt * (ee0 + ee1);
    exact += half_gamma * 0.5 * dt * ((1.0 - ground_trace(y0)) + (1.0 - ground_trace(y1)));
    const double drift = std::abs(y1.trace().real() - trace0);
    if (drift > opts.drift_factor * (first_order + 1e-6))
      throw NumericalFailure("trace drift " + std::to_string(drift) + " at t=" + std::to_string(t1) +
                             " exceeds bound from (gamma/2) int rho_ee = " +
                             std::to_string(first_order));
  };

  auto on_sample = [&](std::size_t, double t, Matrix4c& rho) {
    MasterDiagnostics d;
    d.hermiticity_residual = hermiticity_residual(rho);
    rho = 0.5 * (rho + rho.adjoint());
    d.trace = rho.trace().real();
    d.rho_ee = rho(kExcited, kExcited).real();
    d.min_eigenvalue = min_eigenvalue(rho);
    const double th = sched.theta(t);
    d.fid_dplus = fidelity(rho, dark_state(th, t, sched.omega(), DarkBranch::Plus));
    d.fid_dminus = fidelity(rho, dark_state(th, t, sched.omega(), DarkBranch::Minus));
    d.predicted_drift = exact;
    d.first_order_drift = first_order;
    const BlochMoments m = moments_from_rho(rho);
    if (!m.within_bounds()) tr.moment_bounds_ok = false;
    tr.times.push_back(t);
    tr.moments.push_back(m);
    tr.diagnostics.push_back(d);
    if (opts.keep_states) tr.states.push_back(rho);
    if (opts.stop_when && opts.stop_when(t, m)) {
      tr.stopped_early = true;
      return false;
    }
    return true;
  };

  auto rhs = [&](double t, const Matrix4c& rho) { return rhs_unchecked(t, rho, p, sched); };
  tr.stats = integrate<Matrix4c>(rhs, rho0.matrix(), cfg, h_max, on_sample, on_step);
  return tr;
}

ExcitedPrediction adiabatic_excited_state(double t, const Matrix4c& rho, const PhysicalParams& p,
                                          const ModulationSchedule& sched) {
  const Matrix4c h = hamiltonian_rotating(t, p, sched);
  const cplx two_i_over(0.0, 2.0 / p.gamma_e);
  // prediction of the excited row for a trial rho_ee
  auto coherences = [&](double ree, cplx out[3]) {
    for (int k = kUp; k <= kDown; ++k) {
      cplx s = 0.0;
      for (int j = kUp; j <= kDown; ++j) s += h(kExcited, j) * rho(j, k);
      out[k] = -two_i_over * (s - ree * h(kExcited, k));
    }
  };
  auto population = [&](double ree) {
    cplx c[3];
    coherences(ree, c);
    cplx s = 0.0;
    for (int j = kUp; j <= kDown; ++j) s += c[j] * h(j, kExcited);
    return -(2.0 / p.gamma_e) * s.imag();
  };
  // population() is affine in its argument, so the fixed point is exact
  const double a = population(0.0);
  const double b = population(1.0) - a;
  ExcitedPrediction out;
  out.rho_ee = a / (1.0 - b);
  coherences(out.rho_ee, out.rho_e);
  return out;
}

ExcitedStateReport excited_state_check(const Trajectory& traj, const PhysicalParams& p,
                                       const ModulationSchedule& sched, double t_settle) {
  if (traj.engine != Engine::Master || traj.states.size() != traj.times.size())
    throw InvalidArgument("excited_state_check needs a master trajectory with stored states");
  ExcitedStateReport r;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    if (t < t_settle) continue;
    const Matrix4c& rho = traj.states[i];
    const ExcitedPrediction pr = adiabatic_excited_state(t, rho, p, sched);
    for (int k = kUp; k <= kDown; ++k) {
      r.max_coherence = std::max(r.max_coherence, std::abs(pr.rho_e[k]));
      r.max_coherence_deviation =
          std::max(r.max_coherence_deviation, std::abs(pr.rho_e[k] - rho(kExcited, k)));
    }
    r.max_population = std::max(r.max_population, std::abs(pr.rho_ee));
    r.max_population_deviation = std::max(r.max_population_deviation,
                                          std::abs(pr.rho_ee - rho(kExcited, kExcited).real()));
    ++r.samples_checked;
  }
  if (r.max_coherence > 0.0) r.relative_coherence_deviation = r.max_coherence_deviation / r.max_coherence;
  if (r.max_population > 0.0)
    r.relative_population_deviation = r.max_population_deviation / r.max_population;
  return r;
}

}  // namespace tpump
