#pragma once
// Process matrices in the generator basis: E(rho) = sum_mn chi_mn g_m rho g_n.
// Construction helpers for common channels, the Choi-state map, and channel
// application with trace-preservation checks.

#include "smafc/core.hpp"
#include "smafc/generators.hpp"

#include <utility>
#include <vector>

namespace smafc {

class ProcessMatrix {
 public:
  ProcessMatrix(int dim, CMatrix chi) : dim_(dim), chi_(std::move(chi)) {
    int n = dim_ * dim_;
    if (dim_ < 2) throw ModelError("ProcessMatrix: dimension must be at least 2");
    if (chi_.rows() != n || chi_.cols() != n)
      throw ModelError("ProcessMatrix: chi must be d^2 x d^2");
    if (!is_hermitian(chi_, 1e-8)) throw ModelError("ProcessMatrix: chi is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(chi_, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-8)
      throw ModelError("ProcessMatrix: chi is not positive semidefinite");
  }

  int dim() const { return dim_; }
  const CMatrix& chi() const { return chi_; }
  double chi00() const { return chi_(0, 0).real(); }

 private:
  int dim_;
  CMatrix chi_;
};

// || sum_mn chi_mn g_n g_m - I ||_F ; zero exactly for a trace-preserving map.
inline double tp_residual(const CMatrix& chi, const GeneratorBasis& basis) {
  int n = basis.count();
  if (chi.rows() != n || chi.cols() != n) throw ModelError("tp_residual: size mismatch");
  CMatrix acc = CMatrix::Zero(basis.dim, basis.dim);
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k)
      acc += chi(m, k) * (basis.operators[k] * basis.operators[m]);
  acc -= CMatrix::Identity(basis.dim, basis.dim);
  return acc.norm();
}

inline double tp_residual(const ProcessMatrix& p, const GeneratorBasis& basis) {
  return tp_residual(p.chi(), basis);
}

inline double tp_residual(const ProcessMatrix& p) {
  return tp_residual(p.chi(), su_generators(p.dim()));
}

inline CMatrix apply_channel_raw(const CMatrix& chi, const GeneratorBasis& basis,
                                 const CMatrix& rho) {
  int n = basis.count();
  CMatrix out = CMatrix::Zero(basis.dim, basis.dim);
  for (int m = 0; m < n; ++m) {
    CMatrix left = basis.operators[m] * rho;
    for (int k = 0; k < n; ++k) {
      Complex w = chi(m, k);
      if (w != Complex(0.0, 0.0)) out += w * (left * basis.operators[k]);
    }
  }
  return out;
}

// E(rho); the output trace must stay within tol::tp_residual of 1 and is
// renormalized before the result is packaged.
inline DensityMatrix apply_channel(const ProcessMatrix& process, const DensityMatrix& rho) {
  if (process.dim() != rho.dim()) throw ModelError("apply_channel: dimension mismatch");
  GeneratorBasis basis = su_generators(process.dim());
  CMatrix out = apply_channel_raw(process.chi(), basis, rho.matrix());
  double tr = out.trace().real();
  if (std::abs(tr - 1.0) > tol::tp_residual)
    throw ModelError("apply_channel: output trace deviates beyond tolerance");
  out /= tr;
  out = 0.5 * (out + out.adjoint());
  return DensityMatrix(std::move(out));
}

// Choi state (I x E)(|Phi><Phi|) with |Phi> = sum_i |ii> / sqrt(d); reference
// system first. Trace one exactly when E is trace preserving.
inline DensityMatrix choi_state(const ProcessMatrix& process, const GeneratorBasis& basis) {
  if (process.dim() != basis.dim) throw ModelError("choi_state: basis dimension mismatch");
  if (tp_residual(process, basis) > tol::tp_residual)
    throw ModelError("choi_state: process is not trace preserving");
  int d = process.dim();
  CMatrix out = CMatrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      CMatrix eij = CMatrix::Zero(d, d);
      eij(i, j) = 1.0;
      CMatrix block = apply_channel_raw(process.chi(), basis, eij);
      out.block(i * d, j * d, d, d) = block / static_cast<double>(d);
    }
  out = 0.5 * (out + out.adjoint());
  return DensityMatrix(std::move(out));
}

inline DensityMatrix choi_state(const ProcessMatrix& process) {
  return choi_state(process, su_generators(process.dim()));
}

// chi of a channel given by Kraus operators: chi = sum_k c_k c_k^dag where
// c_k expands K_k in the generator basis.
inline ProcessMatrix kraus_process(int dim, const std::vector<CMatrix>& kraus) {
  GeneratorBasis basis = su_generators(dim);
  CMatrix chi = CMatrix::Zero(basis.count(), basis.count());
  for (const CMatrix& k : kraus) {
    if (k.rows() != dim || k.cols() != dim) throw ModelError("kraus_process: operator size mismatch");
    CVector c = matrix_coefficients(k, basis);
    chi += c * c.adjoint();
  }
  return ProcessMatrix(dim, std::move(chi));
}

inline ProcessMatrix identity_process(int dim) {
  return kraus_process(dim, {CMatrix::Identity(dim, dim)});
}

inline ProcessMatrix unitary_process(const CMatrix& u) {
  if (u.rows() != u.cols()) throw ModelError("unitary_process: matrix must be square");
  if ((u * u.adjoint() - CMatrix::Identity(u.rows(), u.rows())).norm() > 1e-9)
    throw ModelError("unitary_process: matrix is not unitary");
  return kraus_process(static_cast<int>(u.rows()), {u});
}

// Convex mixture of two channels on the same dimension.
inline ProcessMatrix mix_processes(const ProcessMatrix& a, const ProcessMatrix& b, double weight_b) {
  if (a.dim() != b.dim()) throw ModelError("mix_processes: dimension mismatch");
  if (weight_b < 0.0 || weight_b > 1.0) throw ModelError("mix_processes: weight must be in [0, 1]");
  return ProcessMatrix(a.dim(), (1.0 - weight_b) * a.chi() + weight_b * b.chi());
}

// rho -> Tr(rho) I / d. Diagonal chi: 1/d^2 on the identity, 1/(2d) on each generator.
inline ProcessMatrix fully_depolarizing_process(int dim) {
  int n = dim * dim;
  CMatrix chi = CMatrix::Zero(n, n);
  chi(0, 0) = 1.0 / static_cast<double>(n);
  for (int i = 1; i < n; ++i) chi(i, i) = 1.0 / (2.0 * dim);
  return ProcessMatrix(dim, std::move(chi));
}

// rho -> sum_n |n><n| rho |n><n| (complete phase erasure in the channel basis).
inline ProcessMatrix fully_dephasing_process(int dim) {
  std::vector<CMatrix> kraus;
  kraus.reserve(dim);
  for (int i = 0; i < dim; ++i) {
    CMatrix k = CMatrix::Zero(dim, dim);
    k(i, i) = 1.0;
    kraus.push_back(std::move(k));
  }
  return kraus_process(dim, kraus);
}

inline ProcessMatrix depolarizing_mix(int dim, double weight) {
  return mix_processes(identity_process(dim), fully_depolarizing_process(dim), weight);
}

inline ProcessMatrix dephasing_mix(int dim, double weight) {
  return mix_processes(identity_process(dim), fully_dephasing_process(dim), weight);
}

// Uhlmann fidelity between trace-normalized process matrices.
inline double process_fidelity(const ProcessMatrix& a, const ProcessMatrix& b) {
  if (a.dim() != b.dim()) throw ModelError("process_fidelity: dimension mismatch");
  DensityMatrix da(a.chi() / a.chi().trace().real());
  DensityMatrix db(b.chi() / b.chi().trace().real());
  return fidelity(da, db);
}

} // namespace smafc
