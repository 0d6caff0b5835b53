#pragma once

#include "tpump/types.hpp"

#include <random>

namespace testutil {

using tpump::cplx;
using tpump::Matrix4c;

// G G^dagger / Tr, a full-rank random state.
inline Matrix4c random_density(std::mt19937_64& rng, bool ground_only = false) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix4c g;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g(i, j) = cplx(n(rng), n(rng));
  if (ground_only) g.row(tpump::kExcited).setZero();
  Matrix4c rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

inline Matrix4c random_hermitian(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix4c g;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g(i, j) = cplx(n(rng), n(rng));
  return 0.5 * (g + g.adjoint());
}

// Generic Lindblad dissipator L rho L^dagger - {L^dagger L, rho} / 2.
inline Matrix4c lindblad(const Matrix4c& L, const Matrix4c& rho) {
  const Matrix4c LdL = L.adjoint() * L;
  return L * rho * L.adjoint() - 0.5 * (LdL * rho + rho * LdL);
}

template <class M>
double max_abs(const M& m) {
  return m.cwiseAbs().maxCoeff();
}

}  // namespace testutil
