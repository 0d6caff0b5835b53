#pragma once

// Explicit Runge-Kutta integrators over fixed-size Eigen states: adaptive
// Dormand-Prince 5(4) and classical fixed-step RK4. Output is produced only at
// the requested sample times; steps are shortened to land on them exactly.

#include "tpump/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace tpump {

enum class Method { Adaptive, RK4 };

struct IntegratorConfig {
  Method method = Method::Adaptive;
  double rtol = 1e-8;
  double atol = 1e-10;
  std::optional<double> max_step;    ///< engine-specific default when unset
  std::optional<double> fixed_step;  ///< RK4 step; falls back to the max step
  std::vector<double> sample_grid;   ///< integration starts at the first entry

  void validate() const {
    if (!(rtol > 0.0) || !(atol > 0.0) || !std::isfinite(rtol) || !std::isfinite(atol))
      throw InvalidArgument("integrator tolerances must be > 0");
    if (max_step && !(*max_step > 0.0)) throw InvalidArgument("max_step must be > 0");
    if (fixed_step && !(*fixed_step > 0.0)) throw InvalidArgument("fixed_step must be > 0");
    if (sample_grid.size() < 2) throw InvalidArgument("sample_grid needs at least two times");
    for (std::size_t i = 0; i < sample_grid.size(); ++i) {
      if (!std::isfinite(sample_grid[i])) throw InvalidArgument("sample_grid has a non-finite time");
      if (i > 0 && !(sample_grid[i] > sample_grid[i - 1]))
        throw InvalidArgument("sample_grid must be strictly increasing");
    }
  }
};

struct IntegrationStats {
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;
  std::uint64_t rhs_evals = 0;
};

/// count equally spaced samples on [0, t_end], both ends included.
inline std::vector<double> uniform_grid(double t_end, std::size_t count) {
  if (count < 2 || !(t_end > 0.0)) throw InvalidArgument("uniform_grid needs t_end > 0 and count >= 2");
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i)
    g[i] = t_end * static_cast<double>(i) / static_cast<double>(count - 1);
  g.back() = t_end;
  return g;
}

namespace ode_detail {

template <class State>
double error_norm(const State& err, const State& y0, const State& y1, double atol, double rtol) {
  const auto scale = (atol + rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array());
  const double n = std::sqrt((err.cwiseAbs().array() / scale).square().mean());
  return std::isfinite(n) ? n : std::numeric_limits<double>::infinity();
}

}  // namespace ode_detail

struct NoStepHook {
  template <class State>
  void operator()(double, const State&, double, const State&) const {}
};

/// Integrates y' = rhs(t, y) from cfg.sample_grid.front().
///
/// on_sample(i, t, y) is invoked at every sample (including the first); it may
/// modify y in place and returns false to stop early. on_step(t0, y0, t1, y1) is
/// called after every accepted step and may throw to abort.
template <class State, class Rhs, class OnSample, class OnStep = NoStepHook>
IntegrationStats integrate(Rhs&& rhs, State y, const IntegratorConfig& cfg, double h_max,
                           OnSample&& on_sample, OnStep&& on_step = OnStep{}) {
  cfg.validate();
  if (!(h_max > 0.0)) throw InvalidArgument("max step must be > 0");
  const auto& grid = cfg.sample_grid;
  IntegrationStats st;
  auto f = [&](double t, const State& x) {
    ++st.rhs_evals;
    return State(rhs(t, x));
  };

  double t = grid.front();
  if (!on_sample(std::size_t{0}, t, y)) return st;

  if (cfg.method == Method::RK4) {
    const double h_nom = std::min(cfg.fixed_step.value_or(h_max), h_max);
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double span = grid[i] - grid[i - 1];
      const double steps = std::ceil(span / h_nom - 1e-9);
      if (!(steps <= 1e10))
        throw NumericalFailure("RK4 step " + std::to_string(h_nom) + " gives too many steps");
      const auto n = static_cast<std::size_t>(steps);
      const double h = span / static_cast<double>(std::max<std::size_t>(n, 1));
      for (std::size_t k = 0; k < std::max<std::size_t>(n, 1); ++k) {
        const double t0 = grid[i - 1] + static_cast<double>(k) * h;
        const State k1 = f(t0, y);
        const State k2 = f(t0 + 0.5 * h, State(y + 0.5 * h * k1));
        const State k3 = f(t0 + 0.5 * h, State(y + 0.5 * h * k2));
        const State k4 = f(t0 + h, State(y + h * k3));
        State y1 = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!y1.allFinite()) throw NumericalFailure("RK4 produced a non-finite state at t=" + std::to_string(t0 + h));
        on_step(t0, y, t0 + h, y1);
        y = y1;
        ++st.accepted;
      }
      t = grid[i];
      if (!on_sample(i, t, y)) break;
    }
    return st;
  }

  // Dormand-Prince 5(4) tableau
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  double h = std::min(h_max, 0.1 * (grid[1] - grid[0]));
  State k1 = f(t, y);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double target = grid[i];
    while (t < target) {
      const double remaining = target - t;
      bool lands = false;
      double hs = std::min(h, h_max);
      if (hs >= remaining || remaining - hs < 1e-3 * hs) {
        hs = remaining;
        lands = true;
      }
      if (!lands && hs <= 1e-14 * std::max(1.0, std::abs(t)))
        throw NumericalFailure("step size underflow at t=" + std::to_string(t));

      const State k2 = f(t + c2 * hs, State(y + hs * (a21 * k1)));
      const State k3 = f(t + c3 * hs, State(y + hs * (a31 * k1 + a32 * k2)));
      const State k4 = f(t + c4 * hs, State(y + hs * (a41 * k1 + a42 * k2 + a43 * k3)));
      const State k5 = f(t + c5 * hs, State(y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
      const State k6 =
          f(t + hs, State(y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
      const State y1 = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const State k7 = f(t + hs, y1);
      const State err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double en = ode_detail::error_norm(err, y, y1, cfg.atol, cfg.rtol);

      if (en <= 1.0 && y1.allFinite()) {
        const double t1 = lands ? target : t + hs;
        on_step(t, y, t1, y1);
        t = t1;
        y = y1;
        k1 = k7;
        ++st.accepted;
        const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
        // a landing step was artificially short; don't let it shrink h
        h = lands ? std::max(h, hs * fac) : hs * fac;
      } else {
        ++st.rejected;
        const double fac = std::isfinite(en) ? std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9) : 0.1;
        h = hs * fac;
      }
    }
    if (!on_sample(i, t, y)) break;
    k1 = f(t, y);
  }
  return st;
}

}  // namespace tpump
