#pragma once
// Shared test utilities: seeded random operators and small numeric helpers.

#include "smafc/core.hpp"
#include "smafc/rng.hpp"

#include <cmath>

namespace smafc::test {

inline CMatrix random_matrix(RngStream& rng, int dim) {
  CMatrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = Complex(rng.normal(), rng.normal());
  return m;
}

inline CMatrix random_hermitian(RngStream& rng, int dim) {
  CMatrix m = random_matrix(rng, dim);
  return CMatrix(0.5 * (m + m.adjoint()));
}

inline CMatrix random_unitary(RngStream& rng, int dim) {
  Eigen::HouseholderQR<CMatrix> qr(random_matrix(rng, dim));
  CMatrix q = qr.householderQ();
  CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < dim; ++i) {
    Complex d = r(i, i);
    q.col(i) *= d / std::abs(d);
  }
  return q;
}

inline DensityMatrix random_density(RngStream& rng, int dim) {
  CMatrix m = random_matrix(rng, dim);
  CMatrix rho = m * m.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(CMatrix(0.5 * (rho + rho.adjoint())));
}

inline PureState random_pure(RngStream& rng, int dim) {
  CVector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = Complex(rng.normal(), rng.normal());
  return PureState::normalized(v);
}

inline double binary_entropy(double p) {
  double s = 0.0;
  if (p > 0.0) s -= p * std::log2(p);
  if (p < 1.0) s -= (1.0 - p) * std::log2(1.0 - p);
  return s;
}

// Golden-section maximum of a unimodal scalar function on [lo, hi].
template <typename F>
double golden_max(F f, double lo, double hi, double tol = 1e-10) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

} // namespace smafc::test
