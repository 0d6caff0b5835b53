#include "tpump/experiments.hpp"

#include <cmath>

namespace tpump {

namespace {

constexpr double kKHz2pi = 1e3 * kTwoPi;
constexpr double kCoherenceTime = 0.150;  // s

// gamma from the coherence time, Gamma = 20 gamma, gamma_e well above the
// Larmor frequency so the optical transition stays unsaturated.
PhysicalParams toy_rates(double omega_B) {
  PhysicalParams p;
  p.omega_B = omega_B;
  p.gamma = 1.0 / kCoherenceTime;
  p.gamma_e = 50.0 * std::abs(omega_B);
  p.Omega = std::sqrt(20.0 * p.gamma * p.gamma_e);
  return p;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  g.back() = b;
  return g;
}

}  // namespace

std::vector<std::string> figure_preset_names() { return {"fig2a", "fig2c", "fig3a", "fig3b"}; }

FigurePreset figure_preset(const std::string& name) {
  FigurePreset f;
  f.name = name;
  if (name == "fig2a") {
    const double w = 1.5 * kKHz2pi;
    f.kind = "trajectory";
    f.params = toy_rates(w);
    f.schedule = ModulationSchedule::constant(w, 0.2);
    f.t_final = 0.100;
    f.notes = "constant depth, omega = omega_B, unpolarized start";
  } else if (name == "fig2c") {
    const double w = 1.5 * kKHz2pi;
    f.kind = "passage";
    f.params = toy_rates(w);
    f.schedule = ModulationSchedule::ramp(w, 0.100);
    f.t_final = 0.100;
    f.initial = InitialState::Zero;
    f.notes = "theta(t) = arccos(sqrt(t/T)) ramp starting from |0>";
  } else if (name == "fig3a") {
    const double wB = 10.2 * kKHz2pi;
    f.kind = "scan-omega";
    f.params = toy_rates(wB);
    f.schedule = ModulationSchedule::constant(wB, 0.24);
    f.t_final = 0.200;
    f.scan_grid = linspace(-2.0 * wB, 2.0 * wB, 41);
    f.notes = "Fz read at t_final for each modulation frequency";
  } else if (name == "fig3b") {
    const double w = 10.3 * kKHz2pi;
    f.kind = "scan-theta";
    f.params = toy_rates(w);
    f.schedule = ModulationSchedule::constant(w, 0.0);
    f.t_final = 0.200;
    f.scan_grid = linspace(0.0, kPi / 2, 31);
    f.notes = "Fz read at t_final for each modulation depth; omega_B set equal to omega";
  } else {
    throw InvalidArgument("unknown preset '" + name + "' (expected fig2a, fig2c, fig3a or fig3b)");
  }
  return f;
}

}  // namespace tpump
