#pragma once

// Domain types of the four-level toy model: a spin-1 ground manifold
// {|1>, |0>, |-1>} coupled to a single excited level |e> by
// polarization-modulated light.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace tpump {

using cplx = std::complex<double>;
using Matrix4c = Eigen::Matrix4cd;
using Vector4c = Eigen::Vector4cd;
using Vector6 = Eigen::Matrix<double, 6, 1>;

// Basis ordering used by every matrix in the library.
enum Level : int { kUp = 0, kMid = 1, kDown = 2, kExcited = 3 };

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Rates and fields of the toy model, all in angular-frequency units (rad/s).
struct PhysicalParams {
  double omega_B = 0.0;  ///< Larmor angular frequency.
  double Omega = 0.0;    ///< Pump Rabi frequency.
  double gamma_e = 1.0;  ///< Spontaneous emission rate of |e>.
  double gamma = 0.0;    ///< Ground-state spin destruction rate.

  /// Optical pumping rate Omega^2 / gamma_e.
  double Gamma() const { return Omega * Omega / gamma_e; }

  /// Reduced-model comparisons are only meaningful below saturation.
  bool below_saturation() const { return Omega <= 0.1 * gamma_e; }

  /// Throws InvalidArgument on negative rates, gamma_e <= 0 or non-finite values.
  void validate() const;
};

struct ConstantDepth {
  double theta = 0.0;
};

/// theta(t) = arccos(sqrt(t/T)): pi/2 at t = 0 down to 0 at t = T, held at 0 afterwards.
struct ArccosSqrtRamp {
  double duration = 0.0;
};

/// Linear interpolation through (t, theta) knots, clamped outside the table.
struct PiecewiseLinearDepth {
  std::vector<std::pair<double, double>> knots;
};

/// Polarization modulation: angular frequency omega and depth profile theta(t).
class ModulationSchedule {
 public:
  using Profile = std::variant<ConstantDepth, ArccosSqrtRamp, PiecewiseLinearDepth>;

  ModulationSchedule(double omega, Profile profile);

  static ModulationSchedule constant(double omega, double theta);
  static ModulationSchedule ramp(double omega, double duration);
  static ModulationSchedule piecewise(double omega, std::vector<std::pair<double, double>> knots);

  double omega() const { return omega_; }
  const Profile& profile() const { return profile_; }

  double theta(double t) const;
  /// d theta / dt; infinite at the endpoints of an arccos-sqrt ramp.
  double theta_rate(double t) const;
  /// Largest depth reached by the profile.
  double max_theta() const;

  ModulationSchedule with_omega(double omega) const;

 private:
  double omega_;
  Profile profile_;
};

class KetState {
 public:
  /// Requires unit norm within 1e-12.
  explicit KetState(const Vector4c& amplitudes);
  /// Normalizes; throws on a zero vector.
  static KetState normalized(const Vector4c& amplitudes);
  static KetState basis(Level level);

  const Vector4c& amplitudes() const { return amp_; }
  cplx operator[](int i) const { return amp_[i]; }

 private:
  Vector4c amp_;
};

class DensityMatrix {
 public:
  static constexpr double kHermiticityTolerance = 1e-12;
  static constexpr double kTraceTolerance = 1e-9;
  static constexpr double kPositivityTolerance = -1e-8;

  /// Validates hermiticity, unit trace and positivity.
  explicit DensityMatrix(const Matrix4c& m);

  /// Ground manifold maximally mixed: rho_11 = rho_00 = rho_-1-1 = 1/3.
  static DensityMatrix ground_mixed();
  static DensityMatrix pure(const KetState& ket);

  const Matrix4c& matrix() const { return m_; }
  cplx operator()(int i, int j) const { return m_(i, j); }

 private:
  Matrix4c m_;
};

/// Orientation and alignment moments of the ground manifold.
struct BlochMoments {
  double Fx = 0.0;
  double Fy = 0.0;
  double Fz = 0.0;
  double Fzz = 0.0;  ///< <Fz^2>
  double Azx = 0.0;  ///< <{Fz, Fx}>
  double Azy = 0.0;  ///< <{Fz, Fy}>

  Vector6 to_vector() const;
  static BlochMoments from_vector(const Vector6& v);

  /// F+ = (Fx + i Fy) / sqrt(2).
  cplx F_plus() const { return cplx(Fx, Fy) / std::sqrt(2.0); }
  double orientation_norm() const { return std::sqrt(Fx * Fx + Fy * Fy + Fz * Fz); }
  bool within_bounds(double tol = 1e-6) const;
};

struct StokesComponents {
  double s1 = 1.0;
  double s2 = 0.0;
  double s3 = 0.0;
};

double hermiticity_residual(const Matrix4c& m);
double min_eigenvalue(const Matrix4c& m);
bool is_finite(const Matrix4c& m);

}  // namespace tpump
