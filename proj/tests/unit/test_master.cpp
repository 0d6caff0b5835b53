#include "helpers.hpp"

#include "tpump/master.hpp"
#include "tpump/model.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace tpump;
using testutil::max_abs;

namespace {

DensityMatrix superposition_10() {
  Vector4c a(1.0, 1.0, 0.0, 0.0);
  return DensityMatrix::pure(KetState::normalized(a));
}

IntegratorConfig grid(double t_end, std::size_t n) {
  IntegratorConfig c;
  c.sample_grid = uniform_grid(t_end, n);
  return c;
}

}  // namespace

TEST_CASE("Liouvillian structure") {
  PhysicalParams p{0.7, 0.0, 1.0, 0.0};
  const auto s = ModulationSchedule::constant(0.7, 0.2);
  const Matrix4c rho = superposition_10().matrix();
  const BlochMoments m = moments_from_rho(rho);
  const BlochMoments d = moments_from_rho(liouville_rhs(0.0, rho, p, s));
  CHECK(d.Fx == doctest::Approx(-p.omega_B * m.Fy));
  CHECK(d.Fy == doctest::Approx(p.omega_B * m.Fx));
  CHECK(std::abs(d.Fz) < 1e-15);

  std::mt19937_64 rng(21);
  PhysicalParams q{0.0, 0.0, 2.3, 0.4};
  for (int k = 0; k < 20; ++k) {
    const Matrix4c g = testutil::random_density(rng, true);
    CHECK(max_abs(liouville_rhs(1.0, g, q, s) - spin_destruction(g, q.gamma)) < 1e-15);
  }
  PhysicalParams r{0.3, 0.2, 1.0, 0.01};
  for (int k = 0; k < 50; ++k) {
    const Matrix4c x = testutil::random_density(rng);
    const Matrix4c l = liouville_rhs(3.0 * k, x, r, s);
    CHECK(max_abs(l - l.adjoint()) < 1e-15);
  }
  Matrix4c bad = Matrix4c::Zero();
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(liouville_rhs(0.0, bad, r, s), InvalidArgument);
}

TEST_CASE("free Larmor precession") {
  PhysicalParams p{2.0, 0.0, 1.0, 0.0};
  const auto s = ModulationSchedule::constant(2.0, 0.0);
  const auto tr = integrate_master(superposition_10(), p, s, grid(kTwoPi / p.omega_B, 101));
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double t = tr.times[i];
    CHECK(std::abs(tr.moments[i].Fx - std::cos(p.omega_B * t) / std::sqrt(2.0)) < 1e-6);
    CHECK(std::abs(tr.moments[i].Fy - std::sin(p.omega_B * t) / std::sqrt(2.0)) < 1e-6);
  }
}

TEST_CASE("longitudinal decay from spin destruction") {
  PhysicalParams p{1.0, 0.0, 1.0, 0.3};
  const auto s = ModulationSchedule::constant(1.0, 0.0);
  const auto tr = integrate_master(DensityMatrix::pure(KetState::basis(kUp)), p, s, grid(10.0, 51));
  for (std::size_t i = 0; i < tr.size(); ++i)
    CHECK(std::abs(tr.moments[i].Fz - std::exp(-p.gamma * tr.times[i])) < 1e-6);
}

TEST_CASE("resonant modulation builds positive Fz") {
  PhysicalParams p;
  p.gamma_e = 1.0;
  p.Omega = 0.05;
  p.omega_B = 0.05;
  p.gamma = p.Gamma() / 1000;
  const auto s = ModulationSchedule::constant(p.omega_B, 0.24);
  MasterOptions mo;
  mo.keep_states = false;
  const auto tr = integrate_master(DensityMatrix::ground_mixed(), p, s, grid(30 / p.Gamma(), 31), mo);
  CHECK(tr.final_moments().Fz > 0.3);
  CHECK(tr.moment_bounds_ok);
}

TEST_CASE("lab frame agrees with the rotating frame") {
  PhysicalParams p{0.5, 0.05, 1.0, 0.01};
  const auto s = ModulationSchedule::constant(0.5, 0.3);
  const double wl = 6.0;
  const double t_end = 10 * kTwoPi / p.omega_B;
  IntegratorConfig c = grid(t_end, 41);
  c.rtol = 1e-10;
  c.atol = 1e-12;
  const Matrix4c rho0 = DensityMatrix::ground_mixed().matrix();

  std::vector<Matrix4c> lab;
  auto rhs = [&](double t, const Matrix4c& r) {
    const Matrix4c h = hamiltonian_lab(t, p, s, wl, wl);
    return Matrix4c(cplx(0, -1) * (h * r - r * h) + spontaneous_emission(r, p.gamma_e) +
                    spin_destruction(r, p.gamma));
  };
  integrate<Matrix4c>(rhs, rho0, c, 0.01, [&](std::size_t, double, Matrix4c& r) {
    lab.push_back(r);
    return true;
  });
  const auto rot = integrate_master(DensityMatrix(rho0), p, s, c);
  REQUIRE(lab.size() == rot.size());
  for (std::size_t i = 0; i < lab.size(); ++i)
    for (int g = kUp; g <= kExcited; ++g)
      CHECK(std::abs(lab[i](g, g).real() - rot.states[i](g, g).real()) < 1e-6);
}

TEST_CASE("trace follows the spin-destruction drift law") {
  PhysicalParams p{0.025, 0.05, 1.0, 1e-3};
  const auto s = ModulationSchedule::constant(p.omega_B, 0.1);
  const auto tr = integrate_master(DensityMatrix::ground_mixed(), p, s, grid(20000.0, 201));
  for (const auto& d : tr.diagnostics) {
    CHECK(std::abs((d.trace - 1.0) - d.predicted_drift) < 1e-8);
    CHECK(d.min_eigenvalue >= -1e-8);
    CHECK(d.hermiticity_residual <= 1e-10);
  }
  // short window: first-order form is accurate too
  const auto sh = integrate_master(DensityMatrix::ground_mixed(), p, s, grid(50.0, 51));
  const auto& e = sh.diagnostics.back();
  CHECK(std::abs(e.trace - 1.0) == doctest::Approx(e.first_order_drift).epsilon(0.1));
}

TEST_CASE("excessive trace drift aborts the run") {
  PhysicalParams p{0.025, 0.05, 1.0, 1e-3};
  const auto s = ModulationSchedule::constant(p.omega_B, 0.1);
  MasterOptions mo;
  mo.drift_factor = 0.01;
  CHECK_THROWS_AS(integrate_master(DensityMatrix::ground_mixed(), p, s, grid(20000.0, 11), mo),
                  NumericalFailure);
}

TEST_CASE("adiabatic elimination predictions") {
  PhysicalParams p{0.0, 0.0, 1.0, 0.0};
  const auto s0 = ModulationSchedule::constant(0.0, 0.1);
  const Matrix4c mixed = DensityMatrix::ground_mixed().matrix();
  auto pr = adiabatic_excited_state(0.0, mixed, p, s0);
  CHECK(pr.rho_ee == 0.0);
  for (auto c : pr.rho_e) CHECK(std::abs(c) == 0.0);

  // only |0> populated, theta = 0
  p.Omega = 0.01;
  const Matrix4c zero = DensityMatrix::pure(KetState::basis(kMid)).matrix();
  pr = adiabatic_excited_state(0.0, zero, p, ModulationSchedule::constant(0.0, 0.0));
  const cplx expect(0.0, -2.0 * p.Omega / p.gamma_e);
  const double x = p.Omega / p.gamma_e;
  CHECK(std::abs(pr.rho_e[kMid] - expect) <= 4 * x * x * std::abs(expect));
  CHECK(std::abs(pr.rho_e[kUp]) == 0.0);
  CHECK(pr.rho_ee == doctest::Approx(4 * x * x).epsilon(8 * x * x));

  // an actual run below saturation
  PhysicalParams q{0.025, 0.05, 1.0, 1e-4};
  const auto s = ModulationSchedule::constant(q.omega_B, 0.1);
  const auto tr = integrate_master(DensityMatrix::ground_mixed(), q, s, grid(2000.0, 201));
  const auto rep = excited_state_check(tr, q, s, 50.0);
  CHECK(rep.samples_checked > 150);
  CHECK(rep.relative_coherence_deviation <= 0.1);
  CHECK(rep.relative_population_deviation <= 0.1);

  const auto zero_run = integrate_master(DensityMatrix::ground_mixed(), PhysicalParams{0.1, 0.0, 1.0, 0.0}, s,
                                         grid(10.0, 11));
  const auto z = excited_state_check(zero_run, PhysicalParams{0.1, 0.0, 1.0, 0.0}, s, 0.0);
  CHECK(z.max_coherence_deviation == 0.0);
  CHECK(z.max_population_deviation == 0.0);
}

TEST_CASE("tightening tolerances converges") {
  PhysicalParams p{0.025, 0.05, 1.0, 1e-4};
  const auto s = ModulationSchedule::constant(p.omega_B, 0.1);
  auto run = [&](double rtol, double atol) {
    IntegratorConfig c = grid(400.0, 5);
    c.rtol = rtol;
    c.atol = atol;
    return integrate_master(DensityMatrix::ground_mixed(), p, s, c).final_moments();
  };
  const auto a = run(1e-6, 1e-8), b = run(1e-8, 1e-10), r = run(1e-11, 1e-13);
  CHECK(std::abs(b.Fz - r.Fz) < std::abs(a.Fz - r.Fz) + 1e-12);
  CHECK(std::abs(b.Fz - r.Fz) < 1e-7);
}

TEST_CASE("fixed-step RK4 order on Larmor precession") {
  PhysicalParams p{1.0, 0.0, 1.0, 0.0};
  const auto s = ModulationSchedule::constant(1.0, 0.0);
  auto err = [&](double h) {
    IntegratorConfig c = grid(kTwoPi, 2);
    c.method = Method::RK4;
    c.fixed_step = h;
    c.max_step = h;
    const auto tr = integrate_master(superposition_10(), p, s, c);
    return std::abs(tr.final_moments().Fx - 1.0 / std::sqrt(2.0)) +
           std::abs(tr.final_moments().Fy);
  };
  const double order = std::log2(err(0.2) / err(0.1));
  CHECK(order >= 3.9);
}

TEST_CASE("early stop predicate") {
  PhysicalParams p{1.0, 0.0, 1.0, 0.5};
  MasterOptions mo;
  mo.stop_when = [](double, const BlochMoments& m) { return m.Fz < 0.5; };
  const auto tr = integrate_master(DensityMatrix::pure(KetState::basis(kUp)), p,
                                   ModulationSchedule::constant(1.0, 0.0), grid(10.0, 101), mo);
  CHECK(tr.stopped_early);
  CHECK(tr.final_moments().Fz < 0.5);
  CHECK(tr.size() < 101);
}
