#include "tpump/experiments.hpp"

#include "tpump/darkstate.hpp"
#include "tpump/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace tpump {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested == 0 ? std::thread::hardware_concurrency() : requested;
  if (n == 0) n = 1;
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

// Runs job(i) for i in [0, n) on a small pool; each index is written by one worker.
template <class Job>
void parallel_for(std::size_t n, unsigned threads, Job&& job) {
  const unsigned w = worker_count(threads, n);
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (unsigned k = 0; k < w; ++k)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) job(i);
    });
  for (auto& t : pool) t.join();
}

ComponentDeviation deviation(const Trajectory& a, const Trajectory& b, double BlochMoments::*f) {
  ComponentDeviation d;
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = std::abs(a.moments[i].*f - b.moments[i].*f);
    d.max_abs = std::max(d.max_abs, x);
    s += x * x;
  }
  d.rms = a.size() ? std::sqrt(s / static_cast<double>(a.size())) : 0.0;
  return d;
}

// index of the first sample after which Fz has settled, else the last one
std::size_t steady_index(const Trajectory& tr, double eps, const PhysicalParams& p) {
  const double thr = eps * p.gamma;
  const double rate = std::max(p.Gamma(), p.gamma);
  const double t_min = rate > 0.0 ? 5.0 / rate : 0.0;
  for (std::size_t i = 2; i < tr.size(); ++i) {
    if (tr.times[i] < t_min) continue;
    const double d1 = (tr.moments[i].Fz - tr.moments[i - 1].Fz) / (tr.times[i] - tr.times[i - 1]);
    const double d0 =
        (tr.moments[i - 1].Fz - tr.moments[i - 2].Fz) / (tr.times[i - 1] - tr.times[i - 2]);
    if (std::abs(d1) <= thr && std::abs(d0) <= thr) return i;
  }
  return tr.size() - 1;
}

}  // namespace

DensityMatrix initial_density(InitialState s, const ModulationSchedule& sched) {
  switch (s) {
    case InitialState::GroundMixed: return DensityMatrix::ground_mixed();
    case InitialState::Zero: return DensityMatrix::pure(KetState::basis(kMid));
    case InitialState::Up: return DensityMatrix::pure(KetState::basis(kUp));
    case InitialState::Down: return DensityMatrix::pure(KetState::basis(kDown));
    case InitialState::DarkPlus:
      return DensityMatrix::pure(dark_state(sched.theta(0.0), 0.0, sched.omega(), DarkBranch::Plus));
    case InitialState::DarkMinus:
      return DensityMatrix::pure(dark_state(sched.theta(0.0), 0.0, sched.omega(), DarkBranch::Minus));
    case InitialState::PlusX: {
      Vector4c v(0.5, 1.0 / std::sqrt(2.0), 0.5, 0.0);
      return DensityMatrix::pure(KetState::normalized(v));
    }
  }
  throw InvalidArgument("unknown initial state");
}

BlochMoments initial_moments(InitialState s, const ModulationSchedule& sched) {
  return moments_from_rho(initial_density(s, sched));
}

Trajectory run_engine(const EngineSpec& e, InitialState init, const PhysicalParams& p,
                      const ModulationSchedule& sched, const IntegratorConfig& cfg) {
  if (e.engine == Engine::Master) return integrate_master(initial_density(init, sched), p, sched, cfg);
  return integrate_bloch(initial_moments(init, sched), p, sched, cfg, e.variant);
}

void ScanSpec::validate() const {
  if (grid.empty()) throw InvalidArgument("scan grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw InvalidArgument("scan grid has a non-finite value");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw InvalidArgument("scan grid must be strictly increasing");
  }
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw InvalidArgument("scan t_final must be > 0");
  if (samples < 2) throw InvalidArgument("scan needs at least two samples per point");
  if (!(steady_epsilon > 0.0)) throw InvalidArgument("steady_epsilon must be > 0");
  params.validate();
}

std::size_t ScanResult::failures() const {
  return static_cast<std::size_t>(std::count(ok.begin(), ok.end(), false));
}

ScanResult run_scan(const ScanSpec& spec) {
  spec.validate();
  const std::size_t n = spec.grid.size();
  ScanResult r;
  r.parameter = spec.parameter;
  r.grid = spec.grid;
  r.fz.assign(n, kNaN);
  r.t_read.assign(n, kNaN);
  r.errors.assign(n, "");
  std::vector<char> ok(n, 0);
  std::vector<Trajectory> trs(spec.keep_trajectories ? n : 0);

  IntegratorConfig cfg = spec.integrator;
  cfg.sample_grid = uniform_grid(spec.t_final, spec.samples);

  parallel_for(n, spec.threads, [&](std::size_t i) {
    try {
      const double v = spec.grid[i];
      const ModulationSchedule sched = spec.parameter == ScanParameter::Omega
                                           ? spec.schedule.with_omega(v)
                                           : ModulationSchedule::constant(spec.schedule.omega(), v);
      Trajectory tr = run_engine(spec.engine, spec.initial, spec.params, sched, cfg);
      const std::size_t k = spec.readout == Readout::FixedTime
                                ? tr.size() - 1
                                : steady_index(tr, spec.steady_epsilon, spec.params);
      r.fz[i] = tr.moments[k].Fz;
      r.t_read[i] = tr.times[k];
      ok[i] = 1;
      if (spec.keep_trajectories) trs[i] = std::move(tr);
    } catch (const Error& e) {
      r.errors[i] = e.what();
    }
  });

  r.ok.assign(ok.begin(), ok.end());
  r.trajectories = std::move(trs);
  r.extrema = find_extrema(r.grid, r.fz);
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isnan(r.fz[i]) && (!best || r.fz[i] > r.fz[*best])) best = i;
  if (best) r.peak = refine_extremum(r.grid, r.fz, *best);
  return r;
}

ScanResult scan_omega(const ScanSpec& spec) {
  if (spec.parameter != ScanParameter::Omega) throw InvalidArgument("scan_omega needs an omega scan");
  return run_scan(spec);
}

ScanResult scan_theta(const ScanSpec& spec) {
  if (spec.parameter != ScanParameter::Theta) throw InvalidArgument("scan_theta needs a theta scan");
  for (double th : spec.grid)
    if (th < 0.0 || th > kPi / 2 + 1e-12) throw InvalidArgument("theta grid must lie in [0, pi/2]");
  return run_scan(spec);
}

Extremum refine_extremum(const std::vector<double>& grid, const std::vector<double>& fz,
                         std::size_t i) {
  Extremum e;
  e.index = i;
  e.value = e.refined_value = grid[i];
  e.fz = e.refined_fz = fz[i];
  const bool interior = i > 0 && i + 1 < grid.size();
  if (!interior || std::isnan(fz[i - 1]) || std::isnan(fz[i + 1])) return e;
  const double x0 = grid[i - 1], x1 = grid[i], x2 = grid[i + 1];
  const double y0 = fz[i - 1], y1 = fz[i], y2 = fz[i + 1];
  // divided differences
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double a = (d12 - d01) / (x2 - x0);
  if (a == 0.0) return e;
  const double b = d01 - a * (x0 + x1);
  const double xv = std::clamp(-b / (2.0 * a), x0, x2);
  e.refined_value = xv;
  e.refined_fz = y0 + d01 * (xv - x0) + a * (xv - x0) * (xv - x1);
  return e;
}

std::vector<Extremum> find_extrema(const std::vector<double>& grid, const std::vector<double>& fz,
                                   double dominance) {
  if (grid.size() != fz.size()) throw InvalidArgument("find_extrema: size mismatch");
  double peak = 0.0;
  for (double v : fz)
    if (!std::isnan(v)) peak = std::max(peak, std::abs(v));
  std::vector<Extremum> out;
  if (peak == 0.0) return out;
  const std::size_t n = fz.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double v = fz[i];
    if (std::isnan(v) || std::abs(v) < dominance * peak) continue;
    const double lo = i > 0 && !std::isnan(fz[i - 1]) ? fz[i - 1] : kNaN;
    const double hi = i + 1 < n && !std::isnan(fz[i + 1]) ? fz[i + 1] : kNaN;
    const auto above = [&](double w) { return std::isnan(w) || v > w; };
    const auto below = [&](double w) { return std::isnan(w) || v < w; };
    // plateaus count once: strict on the right, non-strict on the left
    const bool is_max = v > 0.0 && (std::isnan(lo) || v >= lo) && above(hi);
    const bool is_min = v < 0.0 && (std::isnan(lo) || v <= lo) && below(hi);
    if (!is_max && !is_min) continue;
    Extremum e = refine_extremum(grid, fz, i);
    e.is_maximum = is_max;
    out.push_back(e);
  }
  return out;
}

PassageResult adiabatic_passage(const PassageSpec& spec) {
  spec.params.validate();
  if (!(spec.T > 0.0) || !std::isfinite(spec.T)) throw InvalidArgument("passage duration T must be > 0");
  PassageResult out;
  out.off_resonance = std::abs(spec.omega - spec.params.omega_B) >
                      1e-9 * std::max(1.0, std::abs(spec.params.omega_B));
  const ModulationSchedule ramp = ModulationSchedule::ramp(spec.omega, spec.T);
  IntegratorConfig cfg = spec.integrator;
  if (cfg.sample_grid.empty()) cfg.sample_grid = uniform_grid(spec.T, 401);

  const bool master = spec.engine.engine == Engine::Master;
  DensityMatrix rho0 = initial_density(InitialState::Zero, ramp);
  BlochMoments m0 = initial_moments(InitialState::Zero, ramp);

  if (spec.init == PassageInit::PrePump) {
    const double G = spec.params.Gamma();
    double dur = spec.prepump_duration;
    if (dur == 0.0) {
      if (!(G > 0.0)) throw InvalidArgument("pre-pump needs Gamma > 0");
      dur = 5.0 / G;
    }
    if (!(dur > 0.0)) throw InvalidArgument("pre-pump duration must be > 0");
    out.prepump_duration = dur;
    const ModulationSchedule pump = ModulationSchedule::constant(spec.omega, kPi / 2);
    IntegratorConfig pc = spec.integrator;
    pc.sample_grid = {0.0, dur};
    if (master) {
      MasterOptions mo;
      const Trajectory pre = integrate_master(DensityMatrix::ground_mixed(), spec.params, pump, pc, mo);
      Matrix4c m = pre.states.back();
      m /= m.trace();
      rho0 = DensityMatrix(m);
    } else {
      const BlochMoments g = initial_moments(InitialState::GroundMixed, pump);
      m0 = integrate_bloch(g, spec.params, pump, pc, spec.engine.variant).final_moments();
    }
  }

  if (master) {
    out.trajectory = integrate_master(rho0, spec.params, ramp, cfg);
    out.fid_dplus.reserve(out.trajectory.size());
    for (const auto& d : out.trajectory.diagnostics) out.fid_dplus.push_back(d.fid_dplus);
  } else {
    out.trajectory = integrate_bloch(m0, spec.params, ramp, cfg, spec.engine.variant);
  }
  return out;
}

CompareReport compare_engines(const Scenario& sc, const IntegratorConfig& cfg,
                              const ReducedVariant& v) {
  if (!(sc.t_end > 0.0)) throw InvalidArgument("compare: t_end must be > 0");
  IntegratorConfig c = cfg;
  c.sample_grid = uniform_grid(sc.t_end, sc.samples);
  CompareReport r;
  r.in_regime = sc.schedule.max_theta() <= 0.15 + 1e-12 && sc.params.below_saturation();
  EngineSpec m{Engine::Master, v};
  EngineSpec b{Engine::Bloch, v};
  r.master = run_engine(m, sc.initial, sc.params, sc.schedule, c);
  r.bloch = run_engine(b, sc.initial, sc.params, sc.schedule, c);
  r.Fx = deviation(r.master, r.bloch, &BlochMoments::Fx);
  r.Fy = deviation(r.master, r.bloch, &BlochMoments::Fy);
  r.Fz = deviation(r.master, r.bloch, &BlochMoments::Fz);
  r.Fzz = deviation(r.master, r.bloch, &BlochMoments::Fzz);
  r.Azx = deviation(r.master, r.bloch, &BlochMoments::Azx);
  r.Azy = deviation(r.master, r.bloch, &BlochMoments::Azy);
  return r;
}

double gb_to_larmor(double B_gauss) {
  if (!std::isfinite(B_gauss)) throw InvalidArgument("field must be finite");
  return kGyromagneticRatio * B_gauss;
}

std::string to_string(InitialState s) {
  switch (s) {
    case InitialState::GroundMixed: return "mixed";
    case InitialState::Zero: return "zero";
    case InitialState::Up: return "up";
    case InitialState::Down: return "down";
    case InitialState::DarkPlus: return "dark_plus";
    case InitialState::DarkMinus: return "dark_minus";
    case InitialState::PlusX: return "plus_x";
  }
  return "?";
}

std::string to_string(Engine e) { return e == Engine::Master ? "master" : "bloch"; }
std::string to_string(ScanParameter s) { return s == ScanParameter::Omega ? "omega" : "theta"; }

}  // namespace tpump
