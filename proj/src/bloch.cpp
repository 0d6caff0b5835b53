#include "tpump/bloch.hpp"

#include "tpump/master.hpp"
#include "tpump/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace tpump {

namespace {

std::uint64_t fnv1a(std::uint64_t h, double v) {
  unsigned char bytes[sizeof(double)];
  std::memcpy(bytes, &v, sizeof(double));
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

double rms_fz_deviation(const Trajectory& a, const Trajectory& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.moments[i].Fz - b.moments[i].Fz;
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(a.size()));
}

}  // namespace

DerivedRates derived_rates(double theta, const PhysicalParams& p) {
  const double c2 = std::cos(theta) * std::cos(theta);
  const double s2 = std::sin(theta) * std::sin(theta);
  const double G = p.Gamma();
  return {p.gamma + 2.0 * G * c2, p.gamma + 2.0 * G * s2, (8.0 / 3.0) * G * c2 + 1.5 * p.gamma};
}

BlochMoments bloch_rhs(double t, const BlochMoments& m, const PhysicalParams& p,
                       const ModulationSchedule& sched, const ReducedVariant& v) {
  const double th = sched.theta(t);
  const double c = std::cos(th), s = std::sin(th);
  const double c2 = c * c, s2 = s * s;
  const double S = std::sin(2.0 * th);
  const double ct = std::cos(sched.omega() * t), st = std::sin(sched.omega() * t);
  const double G = p.Gamma();
  const double g = p.gamma;
  const double wB = p.omega_B;
  const double sigma = v.fz_sign == FzCouplingSign::Same ? 1.0 : -1.0;
  const DerivedRates r = derived_rates(th, p);

  BlochMoments d;
  if (v.flavor == ReducedFlavor::Simplified) {
    d.Fx = -r.gamma_perp * m.Fx - wB * m.Fy - G * S * ct;
    d.Fy = -r.gamma_perp * m.Fy + wB * m.Fx - G * S * st * m.Fz;
    d.Fz = -r.gamma_par * m.Fz - G * S * (ct * m.Azx + sigma * st * m.Fy);
    d.Fzz = 0.0;
    d.Azx = -2.0 * (g + G) * m.Azx - wB * m.Azy - G * S * ct * m.Fz;
    d.Azy = -2.0 * (g + G) * m.Azy + wB * m.Azx - G * S * st;
    return d;
  }

  const double g_t = g + G * (2.0 * c2 + s2);
  const double lack = 2.0 - m.Fzz;
  d.Fx = -g_t * m.Fx - wB * m.Fy - G * S * ct * lack;
  d.Fy = -g_t * m.Fy + wB * m.Fx - G * S * st * m.Fz;
  if (v.include_fminus_term) {
    d.Fx -= G * s2 * m.Fx;
    d.Fy += G * s2 * m.Fy;
  }
  d.Fz = -r.gamma_par * m.Fz - G * S * (ct * m.Azx + sigma * st * m.Fy);
  d.Azx = -2.0 * (g + G) * m.Azx - wB * m.Azy - G * S * ct * m.Fz;
  d.Azy = -2.0 * (g + G) * m.Azy + wB * m.Azx - G * S * st * lack;
  d.Fzz = r.R_a - (2.0 * g + (2.0 / 3.0) * G * (4.0 * c2 + s2)) * m.Fzz;
  if (v.include_alignment_drive) d.Fzz += (G / 3.0) * S * (ct * m.Fx + st * m.Azy);
  return d;
}

double default_max_step_bloch(const PhysicalParams& p, const ModulationSchedule& sched) {
  const double w = std::max({std::abs(sched.omega()), std::abs(p.omega_B), 1.0});
  double h = 0.05 * kTwoPi / w;
  const double rate = std::max(p.Gamma(), p.gamma);
  if (rate > 0.0) h = std::min(h, 0.1 / rate);
  return h;
}

Trajectory integrate_bloch(const BlochMoments& m0, const PhysicalParams& p,
                           const ModulationSchedule& sched, const IntegratorConfig& cfg,
                           const ReducedVariant& v) {
  p.validate();
  cfg.validate();
  if (!m0.within_bounds()) throw InvalidArgument("initial moments violate the spin-1 bounds");
  const double h_max = cfg.max_step.value_or(default_max_step_bloch(p, sched));

  Trajectory tr;
  tr.engine = Engine::Bloch;
  tr.times.reserve(cfg.sample_grid.size());
  tr.moments.reserve(cfg.sample_grid.size());
  const double G = p.Gamma();

  auto on_sample = [&](std::size_t, double t, Vector6& y) {
    const BlochMoments m = BlochMoments::from_vector(y);
    if (!m.within_bounds()) tr.moment_bounds_ok = false;
    const double rate = std::abs(sched.theta_rate(t));
    if (std::isfinite(rate) && rate > 0.0) {
      const double ratio = G > 0.0 ? rate / (0.1 * G) : std::numeric_limits<double>::infinity();
      tr.max_adiabaticity_ratio = std::max(tr.max_adiabaticity_ratio, ratio);
    }
    tr.times.push_back(t);
    tr.moments.push_back(m);
    return true;
  };
  auto rhs = [&](double t, const Vector6& y) {
    return bloch_rhs(t, BlochMoments::from_vector(y), p, sched, v).to_vector();
  };
  Vector6 y0 = m0.to_vector();
  if (v.flavor == ReducedFlavor::Simplified) y0[3] = 1.0;
  tr.stats = integrate<Vector6>(rhs, y0, cfg, h_max, on_sample);
  return tr;
}

SignScenario standard_sign_scenario(double gamma_e) {
  SignScenario s;
  s.params.gamma_e = gamma_e;
  s.params.Omega = 0.1 * gamma_e;
  s.params.gamma = 1e-4 * gamma_e;
  s.params.omega_B = 8.0 * s.params.Gamma();
  s.theta = 0.15;
  s.omega = s.params.omega_B;
  s.t_end = 50.0 / s.params.Gamma();
  return s;
}

SignResolution resolve_fz_sign(const PhysicalParams& p, const ModulationSchedule& sched,
                               const IntegratorConfig& cfg) {
  p.validate();
  if (sched.max_theta() > 0.15 + 1e-12 || !p.below_saturation())
    throw InvalidArgument("resolve_fz_sign: scenario outside theta <= 0.15, Omega <= 0.1 gamma_e");
  if (!(p.Gamma() > 0.0)) throw InvalidArgument("resolve_fz_sign: Gamma must be > 0");

  IntegratorConfig c = cfg;
  if (c.sample_grid.empty()) c.sample_grid = uniform_grid(50.0 / p.Gamma(), 501);

  const DensityMatrix rho0 = DensityMatrix::ground_mixed();
  MasterOptions mo;
  mo.keep_states = false;
  const Trajectory master = integrate_master(rho0, p, sched, c, mo);
  const BlochMoments m0 = moments_from_rho(rho0.matrix());

  ReducedVariant same;
  ReducedVariant opposite;
  opposite.fz_sign = FzCouplingSign::Opposite;
  const Trajectory a = integrate_bloch(m0, p, sched, c, same);
  const Trajectory b = integrate_bloch(m0, p, sched, c, opposite);

  SignResolution r;
  r.rms_same = rms_fz_deviation(a, master);
  r.rms_opposite = rms_fz_deviation(b, master);
  const double lo = std::min(r.rms_same, r.rms_opposite);
  const double hi = std::max(r.rms_same, r.rms_opposite);
  r.ambiguous = !(hi > 2.0 * lo);
  r.winner = (r.ambiguous || r.rms_same <= r.rms_opposite) ? FzCouplingSign::Same
                                                           : FzCouplingSign::Opposite;
  r.params = p;
  r.theta = sched.max_theta();
  r.omega = sched.omega();
  r.t_end = c.sample_grid.back();

  std::uint64_t h = 14695981039346656037ull;
  for (double x : {p.omega_B, p.Omega, p.gamma_e, p.gamma, sched.omega(), r.theta, r.t_end,
                   static_cast<double>(c.sample_grid.size()), c.rtol, c.atol})
    h = fnv1a(h, x);
  r.scenario_hash = h;
  return r;
}

SignResolution resolve_fz_sign(const IntegratorConfig& cfg) {
  const SignScenario s = standard_sign_scenario();
  return resolve_fz_sign(s.params, ModulationSchedule::constant(s.omega, s.theta), cfg);
}

std::string to_string(FzCouplingSign s) { return s == FzCouplingSign::Same ? "same" : "opposite"; }
std::string to_string(ReducedFlavor f) { return f == ReducedFlavor::Full ? "full" : "simplified"; }

}  // namespace tpump
