#include "cli_config.hpp"
#include "cli_output.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>

namespace {

using namespace tpcli;
namespace fs = std::filesystem;

enum ExitCode { kOk = 0, kInternal = 1, kConfig = 2, kNumerical = 3, kIo = 4 };

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::string out = ".";
  std::vector<std::string> formats;
  unsigned threads = 0;
  std::uint64_t seed = 0;
  std::string preset;
};

// C API failure: argument errors are config errors, the rest numerical or internal.
void check(tp_status s, const std::string& what) {
  if (s == TP_OK) return;
  const std::string msg = what + ": " + tp_last_error();
  if (s == TP_ERR_NUMERICAL) throw NumericalError(msg);
  if (s == TP_ERR_INVALID_ARGUMENT || s == TP_ERR_OUT_OF_RANGE) throw ConfigError(what, tp_last_error());
  throw std::runtime_error(msg);
}

struct TrajDeleter {
  void operator()(tp_trajectory* t) const { tp_trajectory_free(t); }
};
using TrajHandle = std::unique_ptr<tp_trajectory, TrajDeleter>;

struct ScanDeleter {
  void operator()(tp_scan_result* r) const { tp_scan_free(r); }
};

class Runner {
 public:
  explicit Runner(Options o) : opt_(std::move(o)) {
    for (const auto& f : opt_.formats) formats_.insert(f);
    if (formats_.empty()) formats_.insert("csv");
  }

  int master() { return trajectory(TP_ENGINE_MASTER, "master"); }
  int bloch() { return trajectory(TP_ENGINE_BLOCH, "bloch"); }

  int trajectory(int engine, const std::string& name) {
    const ScenarioConfig c = load();
    require_schedule(c);
    const double tf = require_t_final(c);
    auto sched = make_schedule(c.schedule);
    const auto times = sample_times(tf, c.samples);
    tp_trajectory* raw = nullptr;
    if (engine == TP_ENGINE_MASTER)
      check(tp_run_master(&c.params, sched.get(), &c.integrator, c.initial_state, times.data(),
                          times.size(), &raw),
            name);
    else
      check(tp_run_bloch(&c.params, sched.get(), &c.integrator, &c.variant, c.initial_state,
                         times.data(), times.size(), &raw),
            name);
    TrajHandle tr(raw);
    emit_trajectory(c, tr.get(), name);
    return kOk;
  }

  int scan(int parameter) {
    const ScenarioConfig c = load();
    require_schedule(c);
    const double tf = require_t_final(c);
    if (!c.scan.present) throw ConfigError("scan", "missing required key");
    if (c.scan.parameter != parameter)
      throw ConfigError("scan.parameter", "does not match the subcommand");
    auto sched = make_schedule(c.schedule);
    tp_scan_options o = tp_scan_options_default();
    o.parameter = parameter;
    o.engine = c.engine;
    o.variant = c.variant;
    o.t_final = tf;
    o.initial_state = c.initial_state;
    o.readout = c.scan.readout;
    o.steady_epsilon = c.scan.steady_epsilon;
    o.samples = c.samples;
    o.threads = opt_.threads;
    tp_scan_result* raw = nullptr;
    check(tp_scan(&c.params, sched.get(), &c.integrator, &o, c.scan.grid.data(), c.scan.grid.size(), &raw),
          "scan");
    std::unique_ptr<tp_scan_result, ScanDeleter> r(raw);

    std::vector<ScanPoint> pts;
    json failures = json::array();
    for (std::size_t i = 0; i < tp_scan_size(r.get()); ++i) {
      ScanPoint p{};
      int ok = 0;
      tp_scan_point(r.get(), i, &p.value, &p.fz, &p.t_read, &ok);
      p.ok = ok != 0;
      p.error = tp_scan_point_error(r.get(), i);
      if (!p.ok) {
        failures.push_back({{"index", i}, {"error", p.error}});
        std::cerr << "scan point " << i << " failed: " << p.error << "\n";
      }
      pts.push_back(p);
    }
    json extrema = json::array();
    for (std::size_t i = 0; i < tp_scan_extrema_count(r.get()); ++i) {
      tp_extremum e;
      tp_scan_extremum(r.get(), i, &e);
      extrema.push_back(extremum_json(e));
    }
    json peak = nullptr;
    tp_extremum pk;
    if (tp_scan_peak(r.get(), &pk) == TP_OK) peak = extremum_json(pk);

    const std::string name = parameter == TP_SCAN_OMEGA ? "scan-omega" : "scan-theta";
    if (want("csv")) write(name + ".csv", scan_csv(pts));
    if (want("svg")) write(name + ".svg", scan_svg(pts, parameter == TP_SCAN_OMEGA ? "omega [rad/s]" : "theta [rad]"));
    if (want("json")) {
      std::vector<double> v, fz, tr;
      std::vector<int> ok;
      for (const auto& p : pts) {
        v.push_back(p.value);
        fz.push_back(p.fz);
        tr.push_back(p.t_read);
        ok.push_back(p.ok ? 1 : 0);
      }
      json results = {{"parameter", parameter == TP_SCAN_OMEGA ? "omega" : "theta"},
                      {"grid", v}, {"Fz", fz}, {"t_read", tr}, {"ok", ok},
                      {"extrema", extrema}, {"peak", peak}};
      write(name + ".json", document(c, results, {{"failures", failures}}).dump(2) + "\n");
    }
    std::printf("%zu points, %zu dominant extrema", pts.size(), extrema.size());
    if (!peak.is_null()) std::printf(", peak Fz %.6g at %.6g", pk.refined_fz, pk.refined_value);
    std::printf("\n");
    return failures.empty() ? kOk : kNumerical;
  }

  int passage() {
    const ScenarioConfig c = load();
    double T = c.passage.T;
    if (T == 0.0 && c.has_schedule && c.schedule.profile == TP_PROFILE_RAMP) T = c.schedule.ramp_duration;
    if (!(T > 0.0)) throw ConfigError("passage.T", "missing required key");
    const double omega = c.has_schedule ? c.schedule.omega : c.params.omega_B;
    if (std::abs(omega - c.params.omega_B) > 1e-9 * std::max(1.0, std::abs(c.params.omega_B)))
      std::cerr << "warning: passage with omega != omega_B\n";
    const auto times = sample_times(T, c.samples);
    tp_trajectory* raw = nullptr;
    check(tp_run_passage(T, &c.params, omega, c.engine, &c.variant, &c.integrator, c.passage.init,
                         c.passage.prepump, times.data(), times.size(), &raw),
          "passage");
    TrajHandle tr(raw);
    emit_trajectory(c, tr.get(), "passage");
    return kOk;
  }

  int compare() {
    const ScenarioConfig c = load();
    require_schedule(c);
    const double tf = require_t_final(c);
    auto sched = make_schedule(c.schedule);
    tp_compare_report rep;
    tp_trajectory *m = nullptr, *b = nullptr;
    check(tp_compare(&c.params, sched.get(), &c.integrator, &c.variant, c.initial_state, tf, c.samples,
                     &rep, &m, &b),
          "compare");
    TrajHandle mh(m), bh(b);
    static const char* names[6] = {"Fx", "Fy", "Fz", "Fzz", "Azx", "Azy"};
    json dev;
    for (int k = 0; k < 6; ++k) {
      dev[names[k]] = {{"max_abs", rep.max_abs[k]}, {"rms", rep.rms[k]}};
      std::printf("%-4s max|d| %.6g  rms %.6g\n", names[k], rep.max_abs[k], rep.rms[k]);
    }
    std::printf("in regime: %s\n", rep.in_regime ? "yes" : "no");
    if (!rep.in_regime) std::cerr << "warning: scenario is outside theta <= 0.15, Omega <= 0.1 gamma_e\n";
    const auto ms = samples_of(mh.get());
    const auto bs = samples_of(bh.get());
    if (want("csv")) {
      write("compare_master.csv", trajectory_csv(ms, true));
      write("compare_bloch.csv", trajectory_csv(bs, false));
    }
    if (want("svg")) {
      write("compare_master.svg", trajectory_svg(ms, "master"));
      write("compare_bloch.svg", trajectory_svg(bs, "bloch"));
    }
    if (want("json")) {
      json results = {{"deviations", dev}, {"in_regime", rep.in_regime != 0},
                      {"master", trajectory_json(ms, true)}, {"bloch", trajectory_json(bs, false)}};
      write("compare.json", document(c, results, stats_json(mh.get())).dump(2) + "\n");
    }
    return kOk;
  }

  int preset() {
    const json doc = preset_config(opt_.preset);
    const std::string text = doc.dump(2) + "\n";
    std::cout << text;
    if (opt_.out != ".") write(opt_.preset + ".json", text);
    return kOk;
  }

  int resolve_sign() {
    tp_sign_report r;
    json cfg = nullptr;
    if (!opt_.config.empty()) {
      const ScenarioConfig c = load();
      require_schedule(c);
      auto sched = make_schedule(c.schedule);
      std::vector<double> times;
      if (c.t_final > 0.0) times = sample_times(c.t_final, c.samples);
      check(tp_resolve_sign(&c.params, sched.get(), &c.integrator, times.empty() ? nullptr : times.data(),
                            times.size(), &r),
            "resolve-sign");
      cfg = c.source;
    } else {
      tp_integrator ic = tp_integrator_default();
      check(tp_resolve_sign_standard(&ic, &r), "resolve-sign");
    }
    const char* win = r.winner == TP_FZ_SAME ? "same" : "opposite";
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(r.scenario_hash));
    std::printf("winner: %s%s\nrms_same: %.6g\nrms_opposite: %.6g\nscenario: %s\n", win,
                r.ambiguous ? " (ambiguous, default kept)" : "", r.rms_same, r.rms_opposite, hash);
    json results = {{"winner", win},
                    {"ambiguous", r.ambiguous != 0},
                    {"rms_same", r.rms_same},
                    {"rms_opposite", r.rms_opposite},
                    {"scenario_hash", hash},
                    {"scenario",
                     {{"omega_B", r.params.omega_B}, {"Omega", r.params.Omega}, {"gamma_e", r.params.gamma_e},
                      {"gamma", r.params.gamma}, {"theta", r.theta}, {"omega", r.omega}, {"t_end", r.t_end}}}};
    if (want("json")) {
      json doc = {{"config", cfg}, {"results", results}, {"diagnostics", json::object()}, {"version", tp_version()}};
      write("resolve-sign.json", doc.dump(2) + "\n");
    }
    return kOk;
  }

 private:
  ScenarioConfig load() const {
    if (opt_.config.empty()) throw ConfigError("--config", "a config file is required");
    return load_config(opt_.config);
  }

  static void require_schedule(const ScenarioConfig& c) {
    if (!c.has_schedule) throw ConfigError("schedule", "missing required key");
  }

  static double require_t_final(const ScenarioConfig& c) {
    if (!(c.t_final > 0.0)) throw ConfigError("t_final", "missing required key");
    return c.t_final;
  }

  bool want(const std::string& f) const { return formats_.count(f) > 0; }

  void write(const std::string& file, const std::string& content) const {
    std::error_code ec;
    fs::create_directories(opt_.out, ec);
    if (ec) throw IoError("cannot create output directory " + opt_.out);
    write_atomic((fs::path(opt_.out) / file).string(), content);
  }

  json document(const ScenarioConfig& c, const json& results, const json& diagnostics) const {
    return {{"config", c.source}, {"results", results}, {"diagnostics", diagnostics},
            {"version", tp_version()}, {"seed", opt_.seed}};
  }

  static json extremum_json(const tp_extremum& e) {
    return {{"index", e.index}, {"value", e.value}, {"Fz", e.fz}, {"refined_value", e.refined_value},
            {"refined_Fz", e.refined_fz}, {"kind", e.is_maximum ? "max" : "min"}};
  }

  static json stats_json(const tp_trajectory* tr) {
    tp_run_stats st;
    tp_trajectory_stats(tr, &st);
    json d = {{"accepted_steps", st.accepted}, {"rejected_steps", st.rejected}, {"rhs_evals", st.rhs_evals},
              {"moment_bounds_ok", st.moment_bounds_ok != 0}};
    if (tp_trajectory_engine(tr) == TP_ENGINE_BLOCH) {
      d["max_adiabaticity_ratio"] = st.max_adiabaticity_ratio;
      return d;
    }
    double herm = 0.0, min_eig = 1.0;
    const auto s = samples_of(tr);
    for (const auto& x : s) {
      herm = std::max(herm, x.hermiticity_residual);
      min_eig = std::min(min_eig, x.min_eigenvalue);
    }
    if (!s.empty()) {
      d["final_trace"] = s.back().trace;
      d["predicted_drift"] = s.back().predicted_drift;
      d["first_order_drift"] = s.back().first_order_drift;
    }
    d["max_hermiticity_residual"] = herm;
    d["min_eigenvalue"] = min_eig;
    return d;
  }

  void emit_trajectory(const ScenarioConfig& c, const tp_trajectory* tr, const std::string& name) {
    const bool master = tp_trajectory_engine(tr) == TP_ENGINE_MASTER;
    const auto s = samples_of(tr);
    if (want("csv")) write(name + ".csv", trajectory_csv(s, master));
    if (want("svg")) write(name + ".svg", trajectory_svg(s, name));
    if (want("json"))
      write(name + ".json", document(c, trajectory_json(s, master), stats_json(tr)).dump(2) + "\n");
    const auto& f = s.back();
    std::printf("t=%.6g Fx=%.6g Fy=%.6g Fz=%.6g\n", f.t, f.Fx, f.Fy, f.Fz);
  }

  Options opt_;
  std::set<std::string> formats_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transverse optical pumping simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(tp_version()));
  Options o;
  app.add_option("--config", o.config, "Scenario config (JSON)");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--format", o.formats, "Output format, repeatable")
      ->check(CLI::IsMember({"csv", "json", "svg"}))
      ->take_all()
      ->expected(1);
  app.add_option("--threads", o.threads, "Worker threads for scans (0 = auto)");
  app.add_option("--seed", o.seed, "Reserved; no stochastic components");

  auto* master = app.add_subcommand("master", "Integrate the full master equation");
  auto* bloch = app.add_subcommand("bloch", "Integrate the reduced moment equations");
  auto* scan_omega = app.add_subcommand("scan-omega", "Scan the modulation frequency");
  auto* scan_theta = app.add_subcommand("scan-theta", "Scan the modulation depth");
  auto* passage = app.add_subcommand("passage", "Adiabatic passage with the arccos-sqrt ramp");
  auto* compare = app.add_subcommand("compare", "Compare master and reduced engines");
  auto* preset = app.add_subcommand("preset", "Emit a figure preset config");
  preset->add_option("name", o.preset, "fig2a, fig2c, fig3a or fig3b")->required();
  auto* resolve = app.add_subcommand("resolve-sign", "Pick the Fz coupling sign against the master oracle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    Runner r(o);
    if (master->parsed()) return r.master();
    if (bloch->parsed()) return r.bloch();
    if (scan_omega->parsed()) return r.scan(TP_SCAN_OMEGA);
    if (scan_theta->parsed()) return r.scan(TP_SCAN_THETA);
    if (passage->parsed()) return r.passage();
    if (compare->parsed()) return r.compare();
    if (preset->parsed()) return r.preset();
    if (resolve->parsed()) return r.resolve_sign();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
