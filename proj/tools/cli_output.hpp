#pragma once

#include "cli_config.hpp"

#include <string>
#include <vector>

namespace tpcli {

/// Writes via a temporary file in the same directory, then renames. Throws IoError.
void write_atomic(const std::string& path, const std::string& content);

std::vector<tp_sample> samples_of(const tp_trajectory* tr);

inline const char* kTrajectoryHeader = "t,Fx,Fy,Fz,Fzz,Azx,Azy,rho_ee,trace,fid_dplus,fid_dminus";

/// %.17g; master-only columns are left empty for bloch trajectories.
std::string trajectory_csv(const std::vector<tp_sample>& s, bool master);
json trajectory_json(const std::vector<tp_sample>& s, bool master);

/// Three projections (xy, xz, yz) of (Fx, Fy, Fz) with red start and green end markers.
std::string trajectory_svg(const std::vector<tp_sample>& s, const std::string& title);

struct ScanPoint {
  double value;
  double fz;
  double t_read;
  bool ok;
  std::string error;
};

std::string scan_csv(const std::vector<ScanPoint>& pts);
/// Fz against the swept value.
std::string scan_svg(const std::vector<ScanPoint>& pts, const std::string& xlabel);

std::string fmt17(double v);

}  // namespace tpcli
