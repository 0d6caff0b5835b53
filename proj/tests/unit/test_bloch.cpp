#include "tpump/bloch.hpp"
#include "tpump/experiments.hpp"
#include "tpump/model.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace tpump;

namespace {

IntegratorConfig grid(double t_end, std::size_t n) {
  IntegratorConfig c;
  c.sample_grid = uniform_grid(t_end, n);
  return c;
}

BlochMoments random_moments(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  return {u(rng), u(rng), u(rng), 0.5 + u(rng), u(rng), u(rng)};
}

}  // namespace

TEST_CASE("derived rates") {
  PhysicalParams p{0.0, 0.2, 1.0, 0.01};
  const double G = p.Gamma();
  const auto r = derived_rates(0.3, p);
  CHECK(r.gamma_perp == doctest::Approx(0.01 + 2 * G * std::cos(0.3) * std::cos(0.3)));
  CHECK(r.gamma_par == doctest::Approx(0.01 + 2 * G * std::sin(0.3) * std::sin(0.3)));
  CHECK(r.R_a == doctest::Approx(8.0 / 3.0 * G * std::cos(0.3) * std::cos(0.3) + 0.015));
  CHECK(r.gamma_perp >= p.gamma);
  CHECK(r.gamma_par >= p.gamma);
}

TEST_CASE("no pumping leaves precession and decay") {
  PhysicalParams p{0.7, 0.0, 1.0, 0.05};
  const auto s = ModulationSchedule::constant(0.7, 0.3);
  std::mt19937_64 rng(4);
  for (int k = 0; k < 20; ++k) {
    const BlochMoments m = random_moments(rng);
    const BlochMoments d = bloch_rhs(1.0 * k, m, p, s, {});
    CHECK(d.Fx == doctest::Approx(-p.gamma * m.Fx - p.omega_B * m.Fy));
    CHECK(d.Fy == doctest::Approx(-p.gamma * m.Fy + p.omega_B * m.Fx));
    CHECK(d.Fz == doctest::Approx(-p.gamma * m.Fz));
    CHECK(d.Azx == doctest::Approx(-2 * p.gamma * m.Azx - p.omega_B * m.Azy));
  }
}

TEST_CASE("theta = 0 decouples Fz and pumps alignment") {
  PhysicalParams p{0.3, 0.1, 1.0, 1e-5};
  const auto s = ModulationSchedule::constant(0.3, 0.0);
  std::mt19937_64 rng(6);
  const BlochMoments m = random_moments(rng);
  CHECK(bloch_rhs(0.4, m, p, s, {}).Fz == doctest::Approx(-p.gamma * m.Fz));
  const auto tr = integrate_bloch(BlochMoments{}, p, s, grid(50 / p.Gamma(), 11));
  const auto r = derived_rates(0.0, p);
  const double fzz_ss = r.R_a / (2 * p.gamma + 8.0 / 3.0 * p.Gamma());
  CHECK(tr.final_moments().Fzz == doctest::Approx(fzz_ss).epsilon(1e-6));
  CHECK(tr.final_moments().Fzz > 0.99);
}

TEST_CASE("resonant pumping from zero moments") {
  PhysicalParams p{0.05, 0.05, 1.0, 0.0};
  p.gamma = p.Gamma() / 1000;
  const auto s = ModulationSchedule::constant(p.omega_B, 0.1);
  const auto tr = integrate_bloch(BlochMoments{}, p, s, grid(400 / p.Gamma(), 11));
  CHECK(tr.final_moments().Fz > 0.5);
  CHECK(tr.moment_bounds_ok);
}

TEST_CASE("free precession closed form") {
  PhysicalParams p{1.3, 0.0, 1.0, 0.0};
  const auto s = ModulationSchedule::constant(1.3, 0.2);
  const auto tr = integrate_bloch(BlochMoments{1, 0, 0, 1, 0, 0}, p, s, grid(10 * kTwoPi / 1.3, 201));
  for (std::size_t i = 0; i < tr.size(); ++i)
    CHECK(std::abs(tr.moments[i].Fx - std::cos(1.3 * tr.times[i])) < 1e-6);
}

TEST_CASE("orientation never grows without drive") {
  PhysicalParams p{0.9, 0.0, 1.0, 0.2};
  const auto tr = integrate_bloch(BlochMoments{0.6, 0.2, 0.5, 0.7, 0.1, -0.1}, p,
                                  ModulationSchedule::constant(0.9, 0.4), grid(20.0, 401));
  for (std::size_t i = 1; i < tr.size(); ++i)
    CHECK(tr.moments[i].orientation_norm() <= tr.moments[i - 1].orientation_norm() + 1e-12);
}

TEST_CASE("alignment pair mirrors the orientation pair a quarter period later") {
  // (Azx, Azy) at t evolve like (-Fy, Fx) at t - pi/(2 omega) once the decay
  // rates are swapped: 2(gamma + Gamma) against the transverse rate.
  PhysicalParams p{0.4, 0.1, 1.0, 0.003};
  ReducedVariant v;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const double th = 0.5 * u(rng), w = 0.2 + u(rng), t = 30 * u(rng);
    const auto s = ModulationSchedule::constant(w, th);
    const BlochMoments m = random_moments(rng);
    const BlochMoments a = bloch_rhs(t, m, p, s, v);

    BlochMoments f = m;
    f.Fx = m.Azy;
    f.Fy = -m.Azx;
    const BlochMoments b = bloch_rhs(t - kPi / (2 * w), f, p, s, v);
    const double c2 = std::cos(th) * std::cos(th), s2 = std::sin(th) * std::sin(th);
    const double g_t = p.gamma + p.Gamma() * (2 * c2 + s2);
    const double g_a = 2 * (p.gamma + p.Gamma());
    CHECK(a.Azy == doctest::Approx(b.Fx + (g_t - g_a) * f.Fx).epsilon(1e-12));
    CHECK(a.Azx == doctest::Approx(-(b.Fy + (g_t - g_a) * f.Fy)).epsilon(1e-12));
  }
}

TEST_CASE("simplified flavor stays close at small depth") {
  PhysicalParams p{0.025, 0.05, 1.0, 1e-4};
  const double th = 0.1;
  const auto s = ModulationSchedule::constant(p.omega_B, th);
  const auto c = grid(50 / p.Gamma(), 11);
  const BlochMoments m0 = initial_moments(InitialState::GroundMixed, s);
  ReducedVariant simp;
  simp.flavor = ReducedFlavor::Simplified;
  const double full = integrate_bloch(m0, p, s, c).final_moments().Fz;
  const auto st = integrate_bloch(m0, p, s, c, simp);
  const double diff = std::abs(full - st.final_moments().Fz);
  MESSAGE("full " << full << " simplified " << st.final_moments().Fz);
  CHECK(st.final_moments().Fzz == 1.0);
  CHECK(diff > 0.0);
  CHECK(diff < 10 * std::sin(th) * std::sin(th));
}

TEST_CASE("optional terms are switchable") {
  PhysicalParams p{0.4, 0.1, 1.0, 0.003};
  const auto s = ModulationSchedule::constant(0.4, 0.3);
  const BlochMoments m{0.2, 0.1, 0.3, 0.8, 0.05, -0.02};
  ReducedVariant v;
  const auto base = bloch_rhs(0.7, m, p, s, v);
  v.include_fminus_term = true;
  const auto fm = bloch_rhs(0.7, m, p, s, v);
  const double s2 = std::sin(0.3) * std::sin(0.3);
  CHECK(fm.Fx - base.Fx == doctest::Approx(-p.Gamma() * s2 * m.Fx));
  CHECK(fm.Fy - base.Fy == doctest::Approx(p.Gamma() * s2 * m.Fy));
  v.include_fminus_term = false;
  v.include_alignment_drive = true;
  const auto ad = bloch_rhs(0.7, m, p, s, v);
  CHECK(ad.Fzz - base.Fzz ==
        doctest::Approx(p.Gamma() / 3 * std::sin(0.6) * (std::cos(0.28) * m.Fx + std::sin(0.28) * m.Azy)));
  v.include_alignment_drive = false;
  v.fz_sign = FzCouplingSign::Opposite;
  const auto op = bloch_rhs(0.7, m, p, s, v);
  CHECK(op.Fz - base.Fz == doctest::Approx(2 * p.Gamma() * std::sin(0.6) * std::sin(0.28) * m.Fy));
}

TEST_CASE("ramp follows the dark state to the pole") {
  PhysicalParams p{0.05, 0.05, 1.0, 0.0};
  const double T = 200 / p.Gamma();
  const auto s = ModulationSchedule::ramp(p.omega_B, T);
  const auto tr = integrate_bloch(initial_moments(InitialState::Zero, s), p, s, grid(T, 201));
  const auto& m = tr.final_moments();
  CHECK(m.Fz > 0.9);
  CHECK(std::hypot(m.Fx, m.Fy) < 0.15);
  CHECK(tr.max_adiabaticity_ratio > 0.0);
}

TEST_CASE("sign resolution") {
  IntegratorConfig c;
  const auto r = resolve_fz_sign(c);
  MESSAGE("same " << r.rms_same << " opposite " << r.rms_opposite);
  CHECK(r.rms_same > 0.0);
  CHECK(r.rms_opposite > 0.0);
  CHECK(r.scenario_hash != 0);
  CHECK_FALSE(r.ambiguous);
  const double win = r.winner == FzCouplingSign::Same ? r.rms_same : r.rms_opposite;
  const double lose = r.winner == FzCouplingSign::Same ? r.rms_opposite : r.rms_same;
  CHECK(win < lose);
  CHECK(resolve_fz_sign(c).scenario_hash == r.scenario_hash);

  // theta -> 0: the two variants coincide and the default is kept
  const auto sc = standard_sign_scenario();
  const auto deg = resolve_fz_sign(sc.params, ModulationSchedule::constant(sc.omega, 0.0), c);
  CHECK(deg.rms_same == doctest::Approx(deg.rms_opposite));
  CHECK(deg.ambiguous);
  CHECK(deg.winner == FzCouplingSign::Same);

  CHECK_THROWS_AS(resolve_fz_sign(sc.params, ModulationSchedule::constant(sc.omega, 0.3), c), InvalidArgument);
  PhysicalParams hot = sc.params;
  hot.Omega = 0.5;
  CHECK_THROWS_AS(resolve_fz_sign(hot, ModulationSchedule::constant(sc.omega, 0.1), c), InvalidArgument);
}
