#pragma once
// Hermitian operator basis for d-level systems: the identity followed by the
// d^2 - 1 generalized Gell-Mann generators, normalized to Tr(g_i g_j) = 2 delta_ij.
// Order: symmetric pair terms in lexicographic (row, col) order, then the
// antisymmetric pair terms in the same order, then the diagonal terms.

#include "smafc/core.hpp"

#include <vector>

namespace smafc {

struct GeneratorBasis {
  int dim = 0;
  std::vector<CMatrix> operators; // operators[0] = identity

  int count() const { return static_cast<int>(operators.size()); }
};

inline GeneratorBasis su_generators(int dim) {
  if (dim < 2 || dim > 16) throw ModelError("su_generators: dimension must be in [2, 16]");
  GeneratorBasis basis;
  basis.dim = dim;
  basis.operators.reserve(static_cast<std::size_t>(dim) * dim);
  basis.operators.push_back(CMatrix::Identity(dim, dim));

  for (int j = 0; j < dim; ++j)
    for (int k = j + 1; k < dim; ++k) {
      CMatrix m = CMatrix::Zero(dim, dim);
      m(j, k) = 1.0;
      m(k, j) = 1.0;
      basis.operators.push_back(m);
    }
  for (int j = 0; j < dim; ++j)
    for (int k = j + 1; k < dim; ++k) {
      CMatrix m = CMatrix::Zero(dim, dim);
      m(j, k) = Complex(0.0, -1.0);
      m(k, j) = Complex(0.0, 1.0);
      basis.operators.push_back(m);
    }
  for (int l = 1; l < dim; ++l) {
    CMatrix m = CMatrix::Zero(dim, dim);
    double scale = std::sqrt(2.0 / (static_cast<double>(l) * (l + 1)));
    for (int j = 0; j < l; ++j) m(j, j) = scale;
    m(l, l) = -scale * l;
    basis.operators.push_back(m);
  }
  return basis;
}

// Expansion of a Hermitian matrix: h = sum_i c_i g_i with real c.
inline RVector hermitian_coefficients(const CMatrix& h, const GeneratorBasis& basis) {
  if (h.rows() != basis.dim || h.cols() != basis.dim)
    throw ModelError("hermitian_coefficients: dimension mismatch");
  if (!is_hermitian(h)) throw ModelError("hermitian_coefficients: input is not Hermitian");
  RVector c(basis.count());
  c[0] = h.trace().real() / basis.dim;
  for (int i = 1; i < basis.count(); ++i)
    c[i] = (basis.operators[i] * h).trace().real() / 2.0;
  return c;
}

// Expansion of an arbitrary matrix; coefficients are complex.
inline CVector matrix_coefficients(const CMatrix& m, const GeneratorBasis& basis) {
  if (m.rows() != basis.dim || m.cols() != basis.dim)
    throw ModelError("matrix_coefficients: dimension mismatch");
  CVector c(basis.count());
  c[0] = m.trace() / static_cast<double>(basis.dim);
  for (int i = 1; i < basis.count(); ++i)
    c[i] = (basis.operators[i] * m).trace() / 2.0;
  return c;
}

inline CMatrix from_coefficients(const RVector& c, const GeneratorBasis& basis) {
  if (c.size() != basis.count()) throw ModelError("from_coefficients: size mismatch");
  CMatrix m = CMatrix::Zero(basis.dim, basis.dim);
  for (int i = 0; i < basis.count(); ++i) m += c[i] * basis.operators[i];
  return m;
}

} // namespace smafc
