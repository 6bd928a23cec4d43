#pragma once
// Dense complex linear algebra for small Hilbert spaces: state types,
// Hermitian eigensolving, Uhlmann fidelity, von Neumann entropy.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

namespace smafc {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// A domain invariant was violated (non-physical state, bad pulse layout, ...).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed configuration, flag, or input file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical optimization did not converge.
class OptimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace tol {
inline constexpr double hermiticity = 1e-10;
inline constexpr double trace_one = 1e-10;
inline constexpr double psd = 1e-10;      // eigenvalues may dip this far below zero
inline constexpr double eig_clip = 1e-12; // clipped to zero before logs and roots
inline constexpr double norm_one = 1e-9;
inline constexpr double tp_residual = 1e-6;
} // namespace tol

inline bool is_hermitian(const CMatrix& m, double eps = tol::hermiticity) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= eps;
}

struct HermitianEig {
  RVector values; // ascending
  CMatrix vectors;
};

inline HermitianEig hermitian_eig(const CMatrix& m) {
  if (!is_hermitian(m)) throw ModelError("hermitian_eig: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(m);
  if (solver.info() != Eigen::Success) throw ModelError("hermitian_eig: eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

// Square root of a Hermitian PSD matrix. Eigenvalues in [-tol::psd, 0) are
// treated as exact zeros; anything lower is rejected.
inline CMatrix hermitian_sqrt(const CMatrix& m) {
  HermitianEig eig = hermitian_eig(m);
  RVector s = eig.values;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] < -tol::psd) throw ModelError("hermitian_sqrt: matrix is not positive semidefinite");
    s[i] = std::sqrt(std::max(s[i], 0.0));
  }
  return eig.vectors * s.asDiagonal() * eig.vectors.adjoint();
}

class PureState {
 public:
  explicit PureState(CVector amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.size() == 0) throw ModelError("PureState: empty amplitude vector");
    if (std::abs(amps_.squaredNorm() - 1.0) > tol::norm_one)
      throw ModelError("PureState: amplitudes are not normalized");
  }

  static PureState normalized(CVector a) {
    double n = a.norm();
    if (n <= 0.0) throw ModelError("PureState: zero vector cannot be normalized");
    return PureState(CVector(a / n));
  }

  static PureState basis(int dim, int index) {
    if (dim < 1 || index < 0 || index >= dim) throw ModelError("PureState::basis: index out of range");
    CVector a = CVector::Zero(dim);
    a[index] = 1.0;
    return PureState(std::move(a));
  }

  int dim() const { return static_cast<int>(amps_.size()); }
  const CVector& amplitudes() const { return amps_; }
  CMatrix projector() const { return amps_ * amps_.adjoint(); }

 private:
  CVector amps_;
};

class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix m) : mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols() || mat_.rows() == 0)
      throw ModelError("DensityMatrix: matrix must be square and non-empty");
    if (!is_hermitian(mat_)) throw ModelError("DensityMatrix: matrix is not Hermitian");
    if (std::abs(mat_.trace().real() - 1.0) > tol::trace_one ||
        std::abs(mat_.trace().imag()) > tol::trace_one)
      throw ModelError("DensityMatrix: trace is not 1");
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(mat_, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -tol::psd)
      throw ModelError("DensityMatrix: matrix is not positive semidefinite");
  }

  static DensityMatrix pure(const PureState& psi) { return DensityMatrix(psi.projector()); }

  static DensityMatrix maximally_mixed(int dim) {
    if (dim < 1) throw ModelError("DensityMatrix: dimension must be positive");
    return DensityMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
  }

  int dim() const { return static_cast<int>(mat_.rows()); }
  const CMatrix& matrix() const { return mat_; }
  RVector eigenvalues() const { return hermitian_eig(mat_).values; }

 private:
  CMatrix mat_;
};

// Uhlmann fidelity F(a, b) = (Tr sqrt(sqrt(a) b sqrt(a)))^2, clamped to [0, 1].
inline double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw ModelError("fidelity: dimension mismatch");
  CMatrix ra = hermitian_sqrt(a.matrix());
  CMatrix inner = ra * b.matrix() * ra;
  inner = 0.5 * (inner + inner.adjoint()); // roundoff symmetrization of an exact-Hermitian product
  HermitianEig eig = hermitian_eig(inner);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i)
    sum += std::sqrt(std::max(eig.values[i], 0.0));
  double f = sum * sum;
  return std::min(std::max(f, 0.0), 1.0);
}

// S(rho) = -Tr[rho log2 rho]; eigenvalues below tol::eig_clip contribute zero.
inline double von_neumann_entropy(const DensityMatrix& rho) {
  RVector ev = rho.eigenvalues();
  double s = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    double p = ev[i];
    if (p > tol::eig_clip) s -= p * std::log2(p);
  }
  return std::max(s, 0.0);
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

} // namespace smafc
