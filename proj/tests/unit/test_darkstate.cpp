#include "helpers.hpp"

#include "tpump/darkstate.hpp"
#include "tpump/master.hpp"
#include "tpump/model.hpp"

#include <doctest.h>

#include <cmath>

using namespace tpump;

TEST_CASE("dark state limits") {
  for (auto b : {DarkBranch::Plus, DarkBranch::Minus}) {
    const auto d = dark_state(0.0, 1.3, 2.0, b);
    const int pol = b == DarkBranch::Plus ? kUp : kDown;
    CHECK(std::abs(d[pol] - 1.0) < 1e-15);
    CHECK(std::abs(d[kMid]) < 1e-15);
  }
  const double w = 2.0, t = 0.7;
  const auto d = dark_state(kPi / 2, t, w, DarkBranch::Plus);
  CHECK(std::abs(d[kMid] + std::polar(1.0, w * t)) < 1e-15);
  CHECK(std::abs(d[kUp]) < 1e-15);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const auto q = dark_state(u(rng) * kPi / 2, 10 * u(rng), 3 * u(rng), DarkBranch::Minus);
    CHECK(std::abs(q.amplitudes().norm() - 1.0) < 1e-14);
    CHECK(q[kDown].imag() == 0.0);
    CHECK(q[kDown].real() >= 0.0);
  }
  CHECK_THROWS_AS(dark_state(-0.1, 0.0, 1.0, DarkBranch::Plus), InvalidArgument);
}

TEST_CASE("pump coupling") {
  PhysicalParams p{0.4, 0.05, 1.0, 0.0};
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const double th = u(rng) * kPi / 2, t = 50 * u(rng), w = 2 * u(rng) - 1;
    const auto s = ModulationSchedule::constant(w, th);
    CHECK(std::abs(pump_coupling(dark_state(th, t, w, DarkBranch::Plus), t, p, s)) < 1e-15);
    CHECK(std::abs(pump_coupling(dark_state(th, t, w, DarkBranch::Minus), t, p, s)) < 1e-15);
  }
  const auto s0 = ModulationSchedule::constant(1.0, 0.0);
  CHECK(std::abs(pump_coupling(KetState::basis(kMid), 0.3, p, s0) - 0.05) < 1e-16);
}

TEST_CASE("dark minus is bright under evolution at omega = +omega_B") {
  PhysicalParams p{0.02, 0.05, 1.0, 0.0};
  const double th = 0.3;
  const auto s = ModulationSchedule::constant(p.omega_B, th);
  IntegratorConfig c;
  c.sample_grid = uniform_grid(2 * kTwoPi / p.omega_B, 201);
  const auto tr =
      integrate_master(DensityMatrix::pure(dark_state(th, 0.0, p.omega_B, DarkBranch::Minus)), p, s, c);
  double peak = 0.0;
  for (const auto& d : tr.diagnostics) peak = std::max(peak, d.rho_ee);
  CHECK(peak > 1e-5);
}

TEST_CASE("fidelity") {
  const auto d = dark_state(0.3, 0.2, 1.0, DarkBranch::Plus);
  CHECK(fidelity(DensityMatrix::pure(d), d) == doctest::Approx(1.0));
  CHECK(fidelity(DensityMatrix::ground_mixed(), dark_state(0.0, 0.0, 1.0, DarkBranch::Plus)) ==
        doctest::Approx(1.0 / 3.0));
  CHECK(fidelity(DensityMatrix::pure(KetState::basis(kExcited)), d) == 0.0);
}

TEST_CASE("depopulation rate") {
  PhysicalParams p{0.0, 1.0, 1.0, 0.0};
  CHECK(depopulation_rate(0.0, p) == 0.0);
  p.Omega = std::sqrt(1000.0);
  CHECK(depopulation_rate(kPi / 4, p) == doctest::Approx(500.0));
}

TEST_CASE("resonant dark state stays dark without spin destruction") {
  PhysicalParams p{0.02, 0.05, 1.0, 0.0};
  const double th = 0.4;
  const auto s = ModulationSchedule::constant(p.omega_B, th);
  IntegratorConfig c;
  c.sample_grid = uniform_grid(20 * kTwoPi / p.omega_B, 401);
  const auto tr =
      integrate_master(DensityMatrix::pure(dark_state(th, 0.0, p.omega_B, DarkBranch::Plus)), p, s, c);
  double peak = 0.0;
  for (const auto& d : tr.diagnostics) peak = std::max(peak, d.rho_ee);
  CHECK(peak <= 1e-10);
  CHECK(tr.diagnostics.back().fid_dplus > 1.0 - 1e-8);
}

TEST_CASE("detuning makes the dark state leak monotonically") {
  PhysicalParams p{0.02, 0.05, 1.0, 0.0};
  const double th = 0.4;
  const double G = p.Gamma();
  double prev = -1.0;
  for (int k = 0; k < 5; ++k) {
    const double det = G * k / 4.0;
    const auto s = ModulationSchedule::constant(p.omega_B + det, th);
    IntegratorConfig c;
    c.sample_grid = uniform_grid(20 * kTwoPi / p.omega_B, 401);
    const auto tr = integrate_master(
        DensityMatrix::pure(dark_state(th, 0.0, s.omega(), DarkBranch::Plus)), p, s, c);
    double peak = 0.0;
    for (const auto& d : tr.diagnostics) peak = std::max(peak, d.rho_ee);
    CHECK(peak > prev);
    prev = peak;
  }
}

TEST_CASE("resonant pumping ends in the plus dark state on the depopulation time scale") {
  PhysicalParams p;
  p.gamma_e = 1.0;
  p.Omega = 0.1;
  p.gamma = 1e-5;
  p.omega_B = 0.08;
  const double th = 0.1;
  const auto s = ModulationSchedule::constant(p.omega_B, th);
  const double tau = 1.0 / depopulation_rate(th, p);
  IntegratorConfig c;
  c.sample_grid = uniform_grid(5 * tau, 501);
  MasterOptions mo;
  mo.keep_states = false;
  const auto tr = integrate_master(DensityMatrix::ground_mixed(), p, s, c, mo);
  CHECK(tr.diagnostics.back().fid_dplus > 0.9);

  // 1 - 1/e rise time of Fz
  const double fz_end = tr.final_moments().Fz;
  double t_rise = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i)
    if (tr.moments[i].Fz >= (1.0 - std::exp(-1.0)) * fz_end) {
      t_rise = tr.times[i];
      break;
    }
  MESSAGE("rise time " << t_rise << " vs 1/(Gamma sin^2) " << tau);
  CHECK(t_rise > tau / 3);
  CHECK(t_rise < 3 * tau);
}
