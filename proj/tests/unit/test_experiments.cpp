#include "tpump/darkstate.hpp"
#include "tpump/experiments.hpp"

#include <doctest.h>

#include <cmath>

using namespace tpump;

namespace {

PhysicalParams toy(double omega_B, double Gamma, double gamma_ratio) {
  PhysicalParams p;
  p.gamma_e = 1.0;
  p.omega_B = omega_B;
  p.Omega = std::sqrt(Gamma);
  p.gamma = Gamma / gamma_ratio;
  return p;
}

std::vector<double> around(double center, double step, int half) {
  std::vector<double> g;
  for (int i = -half; i <= half; ++i) g.push_back(center + i * step);
  return g;
}

ScanSpec omega_scan(const PhysicalParams& p, double theta, std::vector<double> grid, Engine e) {
  ScanSpec s;
  s.parameter = ScanParameter::Omega;
  s.params = p;
  s.schedule = ModulationSchedule::constant(p.omega_B, theta);
  s.grid = std::move(grid);
  s.engine.engine = e;
  s.t_final = 50.0 / p.Gamma();
  s.samples = 11;
  return s;
}

}  // namespace

TEST_CASE("find_extrema on synthetic curves") {
  std::vector<double> g, f;
  for (int i = 0; i <= 40; ++i) {
    const double x = -2.0 + 0.1 * i;
    g.push_back(x);
    f.push_back(std::exp(-std::pow((x - 1.03) / 0.2, 2)) - std::exp(-std::pow((x + 0.98) / 0.2, 2)) +
                0.1 * std::exp(-std::pow(x / 0.1, 2)));
  }
  const auto ex = find_extrema(g, f);
  REQUIRE(ex.size() == 2);
  CHECK_FALSE(ex[0].is_maximum);
  CHECK(ex[0].value == doctest::Approx(-1.0));
  CHECK(ex[1].is_maximum);
  CHECK(ex[1].value == doctest::Approx(1.0));
  CHECK(std::abs(ex[1].refined_value - 1.03) < 0.03);
  CHECK(std::abs(ex[1].refined_value - ex[1].value) <= 0.1);

  f[30] = std::nan("");
  CHECK_NOTHROW(find_extrema(g, f));
  CHECK_THROWS_AS(find_extrema(g, std::vector<double>(3, 0.0)), InvalidArgument);
}

TEST_CASE("parabola refinement is exact on a parabola") {
  std::vector<double> g{0.0, 0.5, 1.0, 1.5, 2.0}, f;
  for (double x : g) f.push_back(1.0 - (x - 1.2) * (x - 1.2));
  const auto e = refine_extremum(g, f, 2);
  CHECK(e.refined_value == doctest::Approx(1.2));
  CHECK(e.refined_fz == doctest::Approx(1.0));
  const auto end = refine_extremum(g, f, 0);
  CHECK(end.refined_value == 0.0);
}

TEST_CASE("scan spec validation") {
  auto s = omega_scan(toy(0.05, 0.0025, 100), 0.2, {0.1, 0.0}, Engine::Bloch);
  CHECK_THROWS_AS(run_scan(s), InvalidArgument);
  s.grid = {};
  CHECK_THROWS_AS(run_scan(s), InvalidArgument);
  s.grid = {0.05};
  s.t_final = 0.0;
  CHECK_THROWS_AS(run_scan(s), InvalidArgument);
  s.t_final = 1.0;
  CHECK_THROWS_AS(scan_theta(s), InvalidArgument);
  s.parameter = ScanParameter::Theta;
  s.grid = {0.1, 2.0};
  CHECK_THROWS_AS(scan_theta(s), InvalidArgument);
}

TEST_CASE("scans are deterministic and independent of the thread count") {
  auto s = omega_scan(toy(0.05, 0.0025, 100), 0.24, around(0.05, 0.01, 3), Engine::Master);
  s.t_final = 4000.0;
  s.integrator.method = Method::RK4;
  s.threads = 1;
  const auto a = run_scan(s);
  s.threads = 4;
  const auto b = run_scan(s);
  REQUIRE(a.fz.size() == s.grid.size());
  for (std::size_t i = 0; i < a.fz.size(); ++i) {
    CHECK(a.ok[i]);
    CHECK(a.fz[i] == b.fz[i]);
    CHECK(a.t_read[i] == s.t_final);
  }
}

TEST_CASE("failed points are marked and the scan continues") {
  auto s = omega_scan(toy(0.05, 0.0025, 100), 0.24, around(0.05, 0.01, 1), Engine::Bloch);
  s.t_final = 2000.0;
  s.integrator.method = Method::RK4;
  s.integrator.fixed_step = 1e-300;
  const auto r = run_scan(s);
  CHECK(r.failures() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK_FALSE(r.ok[i]);
    CHECK(std::isnan(r.fz[i]));
    CHECK_FALSE(r.errors[i].empty());
  }
}

TEST_CASE("relabeling the Zeeman sublevels flips Fz") {
  const PhysicalParams p = toy(0.05, 0.0025, 1000);
  auto s = omega_scan(p, 0.24, {-0.06, -0.05, 0.01, 0.05}, Engine::Master);
  s.t_final = 4000.0;
  const auto a = run_scan(s);
  PhysicalParams q = p;
  q.omega_B = -p.omega_B;
  s.params = q;
  const auto b = run_scan(s);
  for (std::size_t i = 0; i < a.fz.size(); ++i) CHECK(std::abs(a.fz[i] + b.fz[i]) < 1e-6);
}

TEST_CASE("far detuning gives little orientation") {
  const PhysicalParams p = toy(0.05, 0.0025, 1000);
  const auto r = run_scan(omega_scan(p, 0.24, {0.0, 0.05, 0.1}, Engine::Bloch));
  const double peak = r.fz[1];
  CHECK(peak > 0.5);
  CHECK(std::abs(r.fz[0]) < 0.1 * peak);
  CHECK(std::abs(r.fz[2]) < 0.1 * peak);
}

TEST_CASE("depth scan: zero at the ends, optimum moves down with Gamma/gamma") {
  double prev = 10.0;
  for (double ratio : {1e2, 1e4}) {
    const PhysicalParams p = toy(0.05, 0.0025, ratio);
    ScanSpec s;
    s.parameter = ScanParameter::Theta;
    s.params = p;
    s.schedule = ModulationSchedule::constant(p.omega_B, 0.0);
    s.engine.engine = Engine::Bloch;
    for (int i = 0; i <= 40; ++i) s.grid.push_back(i * kPi / 80);
    s.t_final = 50.0 / p.Gamma();
    s.samples = 11;
    const auto r = scan_theta(s);
    REQUIRE(r.peak);
    CHECK(r.fz.front() == 0.0);
    CHECK(std::abs(r.fz.back()) < 1e-12);
    CHECK(r.peak->index > 0);
    CHECK(r.peak->index < s.grid.size() - 1);
    CHECK(depopulation_rate(r.peak->refined_value, p) >= p.gamma);
    MESSAGE("Gamma/gamma " << ratio << " optimum " << r.peak->refined_value);
    CHECK(r.peak->refined_value < prev);
    prev = r.peak->refined_value;
  }
}

TEST_CASE("resonance shift grows with pumping rate") {
  const double wB = 0.1;
  double prev = 0.0;
  for (double ratio : {0.025, 0.05, 0.1}) {
    const double G = ratio * wB;
    const auto r = run_scan(omega_scan(toy(wB, G, 1000), 0.24, around(wB, 0.25 * G, 4), Engine::Master));
    REQUIRE(r.peak);
    const double shift = std::abs(r.peak->refined_value - wB);
    MESSAGE("Gamma " << G << " shift " << shift);
    CHECK(shift <= 5 * G);
    CHECK(shift > prev);
    prev = shift;
  }
}

TEST_CASE("steady-state readout stops before t_final") {
  auto s = omega_scan(toy(0.05, 0.0025, 100), 0.24, {0.05}, Engine::Bloch);
  s.t_final = 400.0 / 0.0025;
  s.samples = 401;
  s.readout = Readout::SteadyState;
  s.steady_epsilon = 1e-2;
  const auto r = run_scan(s);
  REQUIRE(r.ok[0]);
  CHECK(r.t_read[0] < s.t_final);
  s.readout = Readout::FixedTime;
  CHECK(std::abs(run_scan(s).fz[0] - r.fz[0]) < 0.05);
}

TEST_CASE("adiabatic passage") {
  PassageSpec ps;
  ps.params = toy(0.05, 0.0025, 1.0);
  ps.params.gamma = 0.0;
  ps.omega = ps.params.omega_B;
  ps.T = 100.0 / ps.params.Gamma();
  const auto slow = adiabatic_passage(ps);
  const auto& tr = slow.trajectory;
  CHECK(std::abs(tr.moments.front().Fz) < 1e-12);
  CHECK(tr.final_moments().Fz >= 0.95);
  CHECK(std::hypot(tr.final_moments().Fx, tr.final_moments().Fy) <= 0.1);
  CHECK_FALSE(slow.off_resonance);
  CHECK(slow.fid_dplus.size() == tr.size());
  CHECK(slow.fid_dplus.back() > 0.95);

  ps.T /= 100.0;
  const auto fast = adiabatic_passage(ps);
  CHECK(fast.trajectory.final_moments().Fz <= 0.5 * tr.final_moments().Fz);

  ps.T *= 100.0;
  ps.init = PassageInit::PrePump;
  const auto pre = adiabatic_passage(ps);
  CHECK(pre.prepump_duration == doctest::Approx(5.0 / ps.params.Gamma()));
  CHECK(std::abs(pre.trajectory.final_moments().Fz - tr.final_moments().Fz) < 0.02);

  ps.omega = 0.9 * ps.params.omega_B;
  ps.init = PassageInit::ExactZero;
  ps.T = 10.0 / ps.params.Gamma();
  CHECK(adiabatic_passage(ps).off_resonance);
  ps.T = 0.0;
  CHECK_THROWS_AS(adiabatic_passage(ps), InvalidArgument);
}

TEST_CASE("engine comparison") {
  Scenario sc;
  sc.params = toy(0.3, 0.0, 1.0);
  sc.params.Omega = 0.0;
  sc.params.gamma = 0.01;
  sc.schedule = ModulationSchedule::constant(0.3, 0.3);
  sc.initial = InitialState::PlusX;
  sc.t_end = 100.0;
  sc.samples = 201;
  const auto quiet = compare_engines(sc, {});
  CHECK(quiet.Fx.max_abs < 1e-7);
  CHECK(quiet.Fz.max_abs < 1e-7);
  CHECK(quiet.Azy.max_abs < 1e-7);

  sc.params = toy(0.025, 0.0025, 25.0);
  sc.params.Omega = 0.05;
  sc.params.gamma = 1e-4;
  sc.schedule = ModulationSchedule::constant(0.025, 0.1);
  sc.initial = InitialState::GroundMixed;
  sc.t_end = 50.0 / sc.params.Gamma();
  const auto good = compare_engines(sc, {});
  CHECK(good.in_regime);
  CHECK(good.Fz.max_abs <= 0.05);
  CHECK(good.Fz.rms <= good.Fz.max_abs);
  CHECK(good.master.size() == good.bloch.size());

  sc.params.Omega = 0.3;
  sc.params.omega_B = 0.5;
  sc.schedule = ModulationSchedule::constant(0.5, 0.5);
  sc.t_end = 50.0 / sc.params.Gamma();
  const auto bad = compare_engines(sc, {});
  CHECK_FALSE(bad.in_regime);
  MESSAGE("out of regime max |dFz| " << bad.Fz.max_abs);
  CHECK(bad.Fz.max_abs > good.Fz.max_abs);
}

TEST_CASE("figure presets") {
  const auto a = figure_preset("fig3a");
  CHECK(a.params.omega_B == doctest::Approx(10.2e3 * kTwoPi));
  CHECK(a.schedule.theta(0.0) == doctest::Approx(0.24));
  CHECK(a.t_final == doctest::Approx(0.2));
  CHECK(a.scan_grid.size() == 41);
  CHECK(a.scan_grid.front() == doctest::Approx(-2 * a.params.omega_B));
  const auto c = figure_preset("fig2c");
  REQUIRE(std::holds_alternative<ArccosSqrtRamp>(c.schedule.profile()));
  CHECK(std::get<ArccosSqrtRamp>(c.schedule.profile()).duration == doctest::Approx(0.1));
  CHECK(figure_preset("fig2a").schedule.theta(0.0) == doctest::Approx(0.2));
  CHECK(figure_preset("fig3b").schedule.omega() == doctest::Approx(10.3e3 * kTwoPi));
  for (const auto& n : figure_preset_names()) {
    const auto f = figure_preset(n);
    CHECK(f.params.Gamma() == doctest::Approx(20 * f.params.gamma));
    CHECK(f.params.below_saturation());
  }
  CHECK_THROWS_AS(figure_preset("fig9"), InvalidArgument);
}

TEST_CASE("field to Larmor frequency") {
  CHECK(gb_to_larmor(1.0) == doctest::Approx(0.35e6 * kTwoPi));
  CHECK(gb_to_larmor(0.0) == 0.0);
  const double B = 10.2e3 * kTwoPi / kGyromagneticRatio;
  CHECK(B == doctest::Approx(0.02914).epsilon(1e-3));
  CHECK(gb_to_larmor(B) == doctest::Approx(10.2e3 * kTwoPi));
  CHECK_THROWS_AS(gb_to_larmor(std::nan("")), InvalidArgument);
}
