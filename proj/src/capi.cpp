#include "tpump/tpump.h"

#include "tpump/darkstate.hpp"
#include "tpump/experiments.hpp"
#include "tpump/model.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <new>
#include <string>

struct tp_schedule {
  tpump::ModulationSchedule s;
};

struct tp_trajectory {
  tpump::Trajectory t;
};

struct tp_scan_result {
  tpump::ScanResult r;
};

namespace {

thread_local std::string g_last_error;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

tp_status fail(tp_status s, const char* msg) {
  g_last_error = msg;
  return s;
}

template <class F>
tp_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return TP_OK;
  } catch (const tpump::NumericalFailure& e) {
    return fail(TP_ERR_NUMERICAL, e.what());
  } catch (const tpump::InvalidArgument& e) {
    return fail(TP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(TP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(TP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(TP_ERR_INTERNAL, "unknown error");
  }
}

#define TP_REQUIRE(ptr)                                                   \
  do {                                                                    \
    if (!(ptr)) return fail(TP_ERR_NULL_POINTER, #ptr " must not be NULL"); \
  } while (0)

tpump::PhysicalParams to_params(const tp_params& p) {
  tpump::PhysicalParams q;
  q.omega_B = p.omega_B;
  q.Omega = p.Omega;
  q.gamma_e = p.gamma_e;
  q.gamma = p.gamma;
  return q;
}

tp_params from_params(const tpump::PhysicalParams& p) {
  return {p.omega_B, p.Omega, p.gamma_e, p.gamma};
}

tpump::IntegratorConfig to_config(const tp_integrator* c, const double* times, size_t n) {
  tpump::IntegratorConfig cfg;
  if (c) {
    if (c->method != TP_METHOD_ADAPTIVE && c->method != TP_METHOD_RK4)
      throw tpump::InvalidArgument("unknown integrator method");
    cfg.method = c->method == TP_METHOD_RK4 ? tpump::Method::RK4 : tpump::Method::Adaptive;
    cfg.rtol = c->rtol;
    cfg.atol = c->atol;
    if (c->max_step > 0.0) cfg.max_step = c->max_step;
    if (c->fixed_step > 0.0) cfg.fixed_step = c->fixed_step;
  }
  if (times) cfg.sample_grid.assign(times, times + n);
  return cfg;
}

tpump::ReducedVariant to_variant(const tp_variant* v) {
  tpump::ReducedVariant r;
  if (!v) return r;
  if (v->flavor != TP_FLAVOR_FULL && v->flavor != TP_FLAVOR_SIMPLIFIED)
    throw tpump::InvalidArgument("unknown reduced flavor");
  if (v->fz_sign != TP_FZ_SAME && v->fz_sign != TP_FZ_OPPOSITE)
    throw tpump::InvalidArgument("unknown Fz sign variant");
  r.flavor = v->flavor == TP_FLAVOR_FULL ? tpump::ReducedFlavor::Full : tpump::ReducedFlavor::Simplified;
  r.fz_sign = v->fz_sign == TP_FZ_SAME ? tpump::FzCouplingSign::Same : tpump::FzCouplingSign::Opposite;
  r.include_fminus_term = v->include_fminus_term != 0;
  r.include_alignment_drive = v->include_alignment_drive != 0;
  return r;
}

tpump::InitialState to_initial(int s) {
  switch (s) {
    case TP_INIT_MIXED: return tpump::InitialState::GroundMixed;
    case TP_INIT_ZERO: return tpump::InitialState::Zero;
    case TP_INIT_UP: return tpump::InitialState::Up;
    case TP_INIT_DOWN: return tpump::InitialState::Down;
    case TP_INIT_DARK_PLUS: return tpump::InitialState::DarkPlus;
    case TP_INIT_DARK_MINUS: return tpump::InitialState::DarkMinus;
    case TP_INIT_PLUS_X: return tpump::InitialState::PlusX;
    default: throw tpump::InvalidArgument("unknown initial state");
  }
}

tpump::Engine to_engine(int e) {
  if (e == TP_ENGINE_MASTER) return tpump::Engine::Master;
  if (e == TP_ENGINE_BLOCH) return tpump::Engine::Bloch;
  throw tpump::InvalidArgument("unknown engine");
}

tp_extremum from_extremum(const tpump::Extremum& e) {
  return {e.index, e.value, e.fz, e.refined_value, e.refined_fz, e.is_maximum ? 1 : 0};
}

void copy_name(char* dst, std::size_t cap, const std::string& s) {
  std::strncpy(dst, s.c_str(), cap - 1);
  dst[cap - 1] = '\0';
}

}  // namespace

extern "C" {

const char* tp_version(void) { return TPUMP_VERSION_STRING; }

const char* tp_last_error(void) { return g_last_error.c_str(); }

const char* tp_status_string(tp_status s) {
  switch (s) {
    case TP_OK: return "ok";
    case TP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case TP_ERR_NUMERICAL: return "numerical failure";
    case TP_ERR_OUT_OF_RANGE: return "out of range";
    case TP_ERR_NULL_POINTER: return "null pointer";
    case TP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

tp_integrator tp_integrator_default(void) {
  const tpump::IntegratorConfig c;
  return {TP_METHOD_ADAPTIVE, c.rtol, c.atol, 0.0, 0.0};
}

tp_variant tp_variant_default(void) { return {TP_FLAVOR_FULL, TP_FZ_SAME, 0, 0}; }

tp_scan_options tp_scan_options_default(void) {
  const tpump::ScanSpec s;
  tp_scan_options o;
  o.parameter = TP_SCAN_OMEGA;
  o.engine = TP_ENGINE_MASTER;
  o.variant = tp_variant_default();
  o.t_final = 0.0;
  o.initial_state = TP_INIT_MIXED;
  o.readout = TP_READOUT_FIXED;
  o.steady_epsilon = s.steady_epsilon;
  o.samples = s.samples;
  o.threads = 0;
  return o;
}

tp_status tp_params_gamma(const tp_params* p, double* Gamma) {
  TP_REQUIRE(p);
  TP_REQUIRE(Gamma);
  return guarded([&] {
    const auto q = to_params(*p);
    q.validate();
    *Gamma = q.Gamma();
  });
}

tp_status tp_schedule_constant(double omega, double theta, tp_schedule** out) {
  TP_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new tp_schedule{tpump::ModulationSchedule::constant(omega, theta)}; });
}

tp_status tp_schedule_ramp(double omega, double duration, tp_schedule** out) {
  TP_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new tp_schedule{tpump::ModulationSchedule::ramp(omega, duration)}; });
}

tp_status tp_schedule_piecewise(double omega, const double* t, const double* theta, size_t n,
                                tp_schedule** out) {
  TP_REQUIRE(out);
  *out = nullptr;
  TP_REQUIRE(t);
  TP_REQUIRE(theta);
  return guarded([&] {
    std::vector<std::pair<double, double>> k(n);
    for (size_t i = 0; i < n; ++i) k[i] = {t[i], theta[i]};
    *out = new tp_schedule{tpump::ModulationSchedule::piecewise(omega, std::move(k))};
  });
}

tp_status tp_schedule_theta(const tp_schedule* s, double t, double* theta) {
  TP_REQUIRE(s);
  TP_REQUIRE(theta);
  return guarded([&] { *theta = s->s.theta(t); });
}

tp_status tp_schedule_omega(const tp_schedule* s, double* omega) {
  TP_REQUIRE(s);
  TP_REQUIRE(omega);
  *omega = s->s.omega();
  return TP_OK;
}

void tp_schedule_free(tp_schedule* s) { delete s; }

tp_status tp_dark_state(double theta, double t, double omega, int branch, double re[4],
                        double im[4]) {
  TP_REQUIRE(re);
  TP_REQUIRE(im);
  return guarded([&] {
    if (branch != TP_BRANCH_PLUS && branch != TP_BRANCH_MINUS)
      throw tpump::InvalidArgument("unknown dark-state branch");
    const auto k = tpump::dark_state(theta, t, omega,
                                     branch == TP_BRANCH_PLUS ? tpump::DarkBranch::Plus
                                                              : tpump::DarkBranch::Minus);
    for (int i = 0; i < 4; ++i) {
      re[i] = k[i].real();
      im[i] = k[i].imag();
    }
  });
}

tp_status tp_stokes(const tp_schedule* s, double t, double out[3]) {
  TP_REQUIRE(s);
  TP_REQUIRE(out);
  return guarded([&] {
    const auto st = tpump::stokes(t, s->s);
    out[0] = st.s1;
    out[1] = st.s2;
    out[2] = st.s3;
  });
}

tp_status tp_gb_to_larmor(double B_gauss, double* omega_B) {
  TP_REQUIRE(omega_B);
  return guarded([&] { *omega_B = tpump::gb_to_larmor(B_gauss); });
}

tp_status tp_run_master(const tp_params* p, const tp_schedule* s, const tp_integrator* cfg,
                        int initial_state, const double* times, size_t n, tp_trajectory** out) {
  TP_REQUIRE(out);
  *out = nullptr;
  TP_REQUIRE(p);
  TP_REQUIRE(s);
  TP_REQUIRE(times);
  return guarded([&] {
    tpump::EngineSpec e{tpump::Engine::Master, {}};
    auto tr = tpump::run_engine(e, to_initial(initial_state), to_params(*p), s->s,
                                to_config(cfg, times, n));
    *out = new tp_trajectory{std::move(tr)};
  });
}

tp_status tp_run_bloch(const tp_params* p, const tp_schedule* s, const tp_integrator* cfg,
                       const tp_variant* v, int initial_state, const double* times, size_t n,
                       tp_trajectory** out) {
  TP_REQUIRE(out);
  *out = nullptr;
  TP_REQUIRE(p);
  TP_REQUIRE(s);
  TP_REQUIRE(times);
  return guarded([&] {
    tpump::EngineSpec e{tpump::Engine::Bloch, to_variant(v)};
    auto tr = tpump::run_engine(e, to_initial(initial_state), to_params(*p), s->s,
                                to_config(cfg, times, n));
    *out = new tp_trajectory{std::move(tr)};
  });
}

tp_status tp_run_passage(double T, const tp_params* p, double omega, int engine,
                         const tp_variant* v, const tp_integrator* cfg, int init, double prepump,
                         const double* times, size_t n, tp_trajectory** out) {
  TP_REQUIRE(out);
  *out = nullptr;
  TP_REQUIRE(p);
  return guarded([&] {
    tpump::PassageSpec spec;
    spec.T = T;
    spec.params = to_params(*p);
    spec.omega = omega;
    spec.engine = {to_engine(engine), to_variant(v)};
    spec.integrator = to_config(cfg, times, n);
    if (init != TP_PASSAGE_EXACT_ZERO && init != TP_PASSAGE_PREPUMP)
      throw tpump::InvalidArgument("unknown passage initialization");
    spec.init = init == TP_PASSAGE_PREPUMP ? tpump::PassageInit::PrePump : tpump::PassageInit::ExactZero;
    spec.prepump_duration = prepump > 0.0 ? prepump : 0.0;
    auto r = tpump::adiabatic_passage(spec);
    *out = new tp_trajectory{std::move(r.trajectory)};
  });
}

size_t tp_trajectory_size(const tp_trajectory* tr) { return tr ? tr->t.size() : 0; }

int tp_trajectory_engine(const tp_trajectory* tr) {
  if (!tr) return -1;
  return tr->t.engine == tpump::Engine::Master ? TP_ENGINE_MASTER : TP_ENGINE_BLOCH;
}

tp_status tp_trajectory_sample(const tp_trajectory* tr, size_t i, tp_sample* out) {
  TP_REQUIRE(tr);
  TP_REQUIRE(out);
  if (i >= tr->t.size()) return fail(TP_ERR_OUT_OF_RANGE, "sample index out of range");
  const auto& m = tr->t.moments[i];
  tp_sample s;
  s.t = tr->t.times[i];
  s.Fx = m.Fx;
  s.Fy = m.Fy;
  s.Fz = m.Fz;
  s.Fzz = m.Fzz;
  s.Azx = m.Azx;
  s.Azy = m.Azy;
  s.rho_ee = s.trace = s.fid_dplus = s.fid_dminus = kNaN;
  s.hermiticity_residual = s.min_eigenvalue = s.predicted_drift = s.first_order_drift = kNaN;
  if (i < tr->t.diagnostics.size()) {
    const auto& d = tr->t.diagnostics[i];
    s.rho_ee = d.rho_ee;
    s.trace = d.trace;
    s.fid_dplus = d.fid_dplus;
    s.fid_dminus = d.fid_dminus;
    s.hermiticity_residual = d.hermiticity_residual;
    s.min_eigenvalue = d.min_eigenvalue;
    s.predicted_drift = d.predicted_drift;
    s.first_order_drift = d.first_order_drift;
  }
  *out = s;
  return TP_OK;
}

tp_status tp_trajectory_stats(const tp_trajectory* tr, tp_run_stats* out) {
  TP_REQUIRE(tr);
  TP_REQUIRE(out);
  out->accepted = tr->t.stats.accepted;
  out->rejected = tr->t.stats.rejected;
  out->rhs_evals = tr->t.stats.rhs_evals;
  out->moment_bounds_ok = tr->t.moment_bounds_ok ? 1 : 0;
  out->stopped_early = tr->t.stopped_early ? 1 : 0;
  out->max_adiabaticity_ratio = tr->t.max_adiabaticity_ratio;
  return TP_OK;
}

tp_status tp_trajectory_state(const tp_trajectory* tr, size_t i, double re[16], double im[16]) {
  TP_REQUIRE(tr);
  TP_REQUIRE(re);
  TP_REQUIRE(im);
  if (i >= tr->t.states.size()) return fail(TP_ERR_OUT_OF_RANGE, "no stored state at this index");
  const auto& m = tr->t.states[i];
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      re[4 * r + c] = m(r, c).real();
      im[4 * r + c] = m(r, c).imag();
    }
  return TP_OK;
}

void tp_trajectory_free(tp_trajectory* tr) { delete tr; }

tp_status tp_excited_state_check(const tp_trajectory* tr, const tp_params* p, const tp_schedule* s,
                                 double t_settle, tp_excited_report* out) {
  TP_REQUIRE(tr);
  TP_REQUIRE(p);
  TP_REQUIRE(s);
  TP_REQUIRE(out);
  return guarded([&] {
    const auto r = tpump::excited_state_check(tr->t, to_params(*p), s->s, t_settle);
    out->samples_checked = r.samples_checked;
    out->max_coherence_deviation = r.max_coherence_deviation;
    out->max_population_deviation = r.max_population_deviation;
    out->relative_coherence_deviation = r.relative_coherence_deviation;
    out->relative_population_deviation = r.relative_population_deviation;
  });
}

tp_status tp_scan(const tp_params* p, const tp_schedule* s, const tp_integrator* cfg,
                  const tp_scan_options* opts, const double* grid, size_t n, tp_scan_result** out) {
  TP_REQUIRE(out);
  *out = nullptr;
  TP_REQUIRE(p);
  TP_REQUIRE(s);
  TP_REQUIRE(opts);
  TP_REQUIRE(grid);
  return guarded([&] {
    tpump::ScanSpec spec;
    if (opts->parameter != TP_SCAN_OMEGA && opts->parameter != TP_SCAN_THETA)
      throw tpump::InvalidArgument("unknown scan parameter");
    if (opts->readout != TP_READOUT_FIXED && opts->readout != TP_READOUT_STEADY)
      throw tpump::InvalidArgument("unknown readout mode");
    spec.parameter = opts->parameter == TP_SCAN_OMEGA ? tpump::ScanParameter::Omega
                                                      : tpump::ScanParameter::Theta;
    spec.grid.assign(grid, grid + n);
    spec.t_final = opts->t_final;
    spec.params = to_params(*p);
    spec.schedule = s->s;
    spec.engine = {to_engine(opts->engine), to_variant(&opts->variant)};
    spec.integrator = to_config(cfg, nullptr, 0);
    spec.initial = to_initial(opts->initial_state);
    spec.readout = opts->readout == TP_READOUT_FIXED ? tpump::Readout::FixedTime
                                                     : tpump::Readout::SteadyState;
    spec.steady_epsilon = opts->steady_epsilon;
    spec.samples = opts->samples;
    spec.threads = opts->threads;
    auto r = spec.parameter == tpump::ScanParameter::Omega ? tpump::scan_omega(spec)
                                                           : tpump::scan_theta(spec);
    *out = new tp_scan_result{std::move(r)};
  });
}

size_t tp_scan_size(const tp_scan_result* r) { return r ? r->r.grid.size() : 0; }

tp_status tp_scan_point(const tp_scan_result* r, size_t i, double* value, double* fz,
                        double* t_read, int* ok) {
  TP_REQUIRE(r);
  if (i >= r->r.grid.size()) return fail(TP_ERR_OUT_OF_RANGE, "scan index out of range");
  if (value) *value = r->r.grid[i];
  if (fz) *fz = r->r.fz[i];
  if (t_read) *t_read = r->r.t_read[i];
  if (ok) *ok = r->r.ok[i] ? 1 : 0;
  return TP_OK;
}

const char* tp_scan_point_error(const tp_scan_result* r, size_t i) {
  if (!r || i >= r->r.errors.size()) return "";
  return r->r.errors[i].c_str();
}

size_t tp_scan_extrema_count(const tp_scan_result* r) { return r ? r->r.extrema.size() : 0; }

tp_status tp_scan_extremum(const tp_scan_result* r, size_t i, tp_extremum* out) {
  TP_REQUIRE(r);
  TP_REQUIRE(out);
  if (i >= r->r.extrema.size()) return fail(TP_ERR_OUT_OF_RANGE, "extremum index out of range");
  *out = from_extremum(r->r.extrema[i]);
  return TP_OK;
}

tp_status tp_scan_peak(const tp_scan_result* r, tp_extremum* out) {
  TP_REQUIRE(r);
  TP_REQUIRE(out);
  if (!r->r.peak) return fail(TP_ERR_OUT_OF_RANGE, "scan has no successful point");
  *out = from_extremum(*r->r.peak);
  return TP_OK;
}

void tp_scan_free(tp_scan_result* r) { delete r; }

tp_status tp_compare(const tp_params* p, const tp_schedule* s, const tp_integrator* cfg,
                     const tp_variant* v, int initial_state, double t_end, size_t samples,
                     tp_compare_report* out, tp_trajectory** master_out, tp_trajectory** bloch_out) {
  TP_REQUIRE(p);
  TP_REQUIRE(s);
  TP_REQUIRE(out);
  if (master_out) *master_out = nullptr;
  if (bloch_out) *bloch_out = nullptr;
  return guarded([&] {
    tpump::Scenario sc;
    sc.params = to_params(*p);
    sc.schedule = s->s;
    sc.initial = to_initial(initial_state);
    sc.t_end = t_end;
    sc.samples = samples;
    auto r = tpump::compare_engines(sc, to_config(cfg, nullptr, 0), to_variant(v));
    const tpump::ComponentDeviation* d[6] = {&r.Fx, &r.Fy, &r.Fz, &r.Fzz, &r.Azx, &r.Azy};
    for (int k = 0; k < 6; ++k) {
      out->max_abs[k] = d[k]->max_abs;
      out->rms[k] = d[k]->rms;
    }
    out->in_regime = r.in_regime ? 1 : 0;
    if (master_out) *master_out = new tp_trajectory{std::move(r.master)};
    if (bloch_out) *bloch_out = new tp_trajectory{std::move(r.bloch)};
  });
}

static void fill_sign(const tpump::SignResolution& r, tp_sign_report* out) {
  out->winner = r.winner == tpump::FzCouplingSign::Same ? TP_FZ_SAME : TP_FZ_OPPOSITE;
  out->ambiguous = r.ambiguous ? 1 : 0;
  out->rms_same = r.rms_same;
  out->rms_opposite = r.rms_opposite;
  out->scenario_hash = r.scenario_hash;
  out->params = from_params(r.params);
  out->theta = r.theta;
  out->omega = r.omega;
  out->t_end = r.t_end;
}

tp_status tp_resolve_sign_standard(const tp_integrator* cfg, tp_sign_report* out) {
  TP_REQUIRE(out);
  return guarded([&] { fill_sign(tpump::resolve_fz_sign(to_config(cfg, nullptr, 0)), out); });
}

tp_status tp_resolve_sign(const tp_params* p, const tp_schedule* s, const tp_integrator* cfg,
                          const double* times, size_t n, tp_sign_report* out) {
  TP_REQUIRE(p);
  TP_REQUIRE(s);
  TP_REQUIRE(out);
  return guarded([&] {
    fill_sign(tpump::resolve_fz_sign(to_params(*p), s->s, to_config(cfg, times, n)), out);
  });
}

size_t tp_preset_count(void) { return tpump::figure_preset_names().size(); }

const char* tp_preset_name(size_t index) {
  static const std::vector<std::string> names = tpump::figure_preset_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

tp_status tp_preset_get(const char* name, tp_preset* out) {
  TP_REQUIRE(name);
  TP_REQUIRE(out);
  return guarded([&] {
    const auto f = tpump::figure_preset(name);
    tp_preset r{};
    copy_name(r.name, sizeof r.name, f.name);
    copy_name(r.kind, sizeof r.kind, f.kind);
    r.params = from_params(f.params);
    r.omega = f.schedule.omega();
    if (const auto* ramp = std::get_if<tpump::ArccosSqrtRamp>(&f.schedule.profile())) {
      r.profile = TP_PROFILE_RAMP;
      r.ramp_duration = ramp->duration;
      r.theta = tpump::kPi / 2;
    } else {
      r.profile = TP_PROFILE_CONSTANT;
      r.theta = f.schedule.theta(0.0);
    }
    r.t_final = f.t_final;
    switch (f.initial) {
      case tpump::InitialState::Zero: r.initial_state = TP_INIT_ZERO; break;
      default: r.initial_state = TP_INIT_MIXED; break;
    }
    r.scan_count = f.scan_grid.size();
    if (!f.scan_grid.empty()) {
      r.scan_min = f.scan_grid.front();
      r.scan_max = f.scan_grid.back();
    }
    *out = r;
  });
}

tp_status tp_preset_scan_grid(const char* name, double* grid, size_t capacity) {
  TP_REQUIRE(name);
  return guarded([&] {
    const auto f = tpump::figure_preset(name);
    if (capacity < f.scan_grid.size()) throw tpump::InvalidArgument("scan grid buffer too small");
    if (!f.scan_grid.empty() && !grid) throw tpump::InvalidArgument("grid must not be NULL");
    std::copy(f.scan_grid.begin(), f.scan_grid.end(), grid);
  });
}

}  // extern "C"
