#pragma once

#include "tpump/ode.hpp"
#include "tpump/types.hpp"

#include <vector>

namespace tpump {

enum class Engine { Master, Bloch };

/// Per-sample diagnostics of a master-equation run.
struct MasterDiagnostics {
  double trace = 1.0;
  double rho_ee = 0.0;
  double hermiticity_residual = 0.0;  ///< before re-symmetrization
  double min_eigenvalue = 0.0;
  double fid_dplus = 0.0;
  double fid_dminus = 0.0;
  double predicted_drift = 0.0;    ///< (gamma/2) int (1 - Tr_ground) dt
  double first_order_drift = 0.0;  ///< (gamma/2) int rho_ee dt
};

struct Trajectory {
  Engine engine = Engine::Master;
  std::vector<double> times;
  std::vector<BlochMoments> moments;
  std::vector<MasterDiagnostics> diagnostics;  ///< master only
  std::vector<Matrix4c> states;                ///< master only, when requested
  IntegrationStats stats;
  bool moment_bounds_ok = true;
  double max_adiabaticity_ratio = 0.0;  ///< bloch only: max |theta'| / (0.1 Gamma)
  bool stopped_early = false;

  std::size_t size() const { return times.size(); }
  const BlochMoments& final_moments() const { return moments.back(); }
};

}  // namespace tpump
