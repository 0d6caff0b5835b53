#include "tpump/types.hpp"

#include "tpump/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tpump {

namespace {

void require_finite_nonnegative(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0)
    throw InvalidArgument(std::string(name) + " must be finite and >= 0");
}

struct ThetaAt {
  double t;
  double operator()(const ConstantDepth& c) const { return c.theta; }
  double operator()(const ArccosSqrtRamp& r) const {
    const double u = std::clamp(t / r.duration, 0.0, 1.0);
    return std::acos(std::sqrt(u));
  }
  double operator()(const PiecewiseLinearDepth& p) const {
    const auto& k = p.knots;
    if (t <= k.front().first) return k.front().second;
    if (t >= k.back().first) return k.back().second;
    auto hi = std::upper_bound(k.begin(), k.end(), t,
                               [](double x, const auto& knot) { return x < knot.first; });
    auto lo = hi - 1;
    const double w = (t - lo->first) / (hi->first - lo->first);
    return lo->second + w * (hi->second - lo->second);
  }
};

struct ThetaRateAt {
  double t;
  double operator()(const ConstantDepth&) const { return 0.0; }
  double operator()(const ArccosSqrtRamp& r) const {
    if (t < 0.0 || t > r.duration) return 0.0;
    const double u = t / r.duration;
    const double denom = 2.0 * r.duration * std::sqrt(u * (1.0 - u));
    if (denom == 0.0) return -std::numeric_limits<double>::infinity();
    return -1.0 / denom;
  }
  double operator()(const PiecewiseLinearDepth& p) const {
    const auto& k = p.knots;
    if (t < k.front().first || t >= k.back().first) return 0.0;
    auto hi = std::upper_bound(k.begin(), k.end(), t,
                               [](double x, const auto& knot) { return x < knot.first; });
    auto lo = hi - 1;
    return (hi->second - lo->second) / (hi->first - lo->first);
  }
};

void validate_profile(const ModulationSchedule::Profile& profile) {
  auto in_range = [](double th) { return std::isfinite(th) && th >= 0.0 && th <= kPi / 2 + 1e-12; };
  if (const auto* c = std::get_if<ConstantDepth>(&profile)) {
    if (!in_range(c->theta)) throw InvalidArgument("theta must lie in [0, pi/2]");
  } else if (const auto* r = std::get_if<ArccosSqrtRamp>(&profile)) {
    if (!std::isfinite(r->duration) || r->duration <= 0.0)
      throw InvalidArgument("ramp duration must be > 0");
  } else {
    const auto& k = std::get<PiecewiseLinearDepth>(profile).knots;
    if (k.empty()) throw InvalidArgument("piecewise theta table is empty");
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (!std::isfinite(k[i].first)) throw InvalidArgument("piecewise table time is not finite");
      if (!in_range(k[i].second)) throw InvalidArgument("piecewise theta must lie in [0, pi/2]");
      if (i > 0 && !(k[i].first > k[i - 1].first))
        throw InvalidArgument("piecewise table times must be strictly increasing");
    }
  }
}

}  // namespace

void PhysicalParams::validate() const {
  if (!std::isfinite(omega_B)) throw InvalidArgument("omega_B must be finite");
  require_finite_nonnegative(Omega, "Omega");
  require_finite_nonnegative(gamma, "gamma");
  if (!std::isfinite(gamma_e) || gamma_e <= 0.0) throw InvalidArgument("gamma_e must be > 0");
}

ModulationSchedule::ModulationSchedule(double omega, Profile profile)
    : omega_(omega), profile_(std::move(profile)) {
  if (!std::isfinite(omega_)) throw InvalidArgument("modulation omega must be finite");
  validate_profile(profile_);
}

ModulationSchedule ModulationSchedule::constant(double omega, double theta) {
  return ModulationSchedule(omega, ConstantDepth{theta});
}

ModulationSchedule ModulationSchedule::ramp(double omega, double duration) {
  return ModulationSchedule(omega, ArccosSqrtRamp{duration});
}

ModulationSchedule ModulationSchedule::piecewise(double omega,
                                                 std::vector<std::pair<double, double>> knots) {
  return ModulationSchedule(omega, PiecewiseLinearDepth{std::move(knots)});
}

double ModulationSchedule::theta(double t) const { return std::visit(ThetaAt{t}, profile_); }

double ModulationSchedule::theta_rate(double t) const {
  return std::visit(ThetaRateAt{t}, profile_);
}

double ModulationSchedule::max_theta() const {
  if (const auto* c = std::get_if<ConstantDepth>(&profile_)) return c->theta;
  if (std::holds_alternative<ArccosSqrtRamp>(profile_)) return kPi / 2;
  double m = 0.0;
  for (const auto& [t, th] : std::get<PiecewiseLinearDepth>(profile_).knots) m = std::max(m, th);
  return m;
}

ModulationSchedule ModulationSchedule::with_omega(double omega) const {
  return ModulationSchedule(omega, profile_);
}

KetState::KetState(const Vector4c& amplitudes) : amp_(amplitudes) {
  if (!amp_.allFinite()) throw InvalidArgument("ket amplitudes must be finite");
  if (std::abs(amp_.norm() - 1.0) > 1e-12) throw InvalidArgument("ket is not normalized");
}

KetState KetState::normalized(const Vector4c& amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("cannot normalize a zero ket");
  return KetState(amplitudes / n);
}

KetState KetState::basis(Level level) {
  Vector4c v = Vector4c::Zero();
  v[level] = 1.0;
  return KetState(v);
}

DensityMatrix::DensityMatrix(const Matrix4c& m) : m_(m) {
  if (!is_finite(m_)) throw InvalidArgument("density matrix has non-finite entries");
  if (hermiticity_residual(m_) > kHermiticityTolerance)
    throw InvalidArgument("density matrix is not Hermitian");
  if (std::abs(m_.trace().real() - 1.0) > kTraceTolerance)
    throw InvalidArgument("density matrix trace differs from 1");
  if (min_eigenvalue(m_) < kPositivityTolerance)
    throw InvalidArgument("density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::ground_mixed() {
  Matrix4c m = Matrix4c::Zero();
  m(kUp, kUp) = m(kMid, kMid) = m(kDown, kDown) = 1.0 / 3.0;
  return DensityMatrix(m);
}

DensityMatrix DensityMatrix::pure(const KetState& ket) {
  const Vector4c& a = ket.amplitudes();
  Matrix4c m = a * a.adjoint();
  return DensityMatrix(0.5 * (m + m.adjoint()));
}

Vector6 BlochMoments::to_vector() const {
  Vector6 v;
  v << Fx, Fy, Fz, Fzz, Azx, Azy;
  return v;
}

BlochMoments BlochMoments::from_vector(const Vector6& v) {
  return BlochMoments{v[0], v[1], v[2], v[3], v[4], v[5]};
}

bool BlochMoments::within_bounds(double tol) const {
  return Fx * Fx + Fy * Fy + Fz * Fz <= 1.0 + tol && Fzz >= -tol && Fzz <= 1.0 + tol;
}

double hermiticity_residual(const Matrix4c& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

double min_eigenvalue(const Matrix4c& m) {
  const Matrix4c h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool is_finite(const Matrix4c& m) { return m.allFinite(); }

}  // namespace tpump
