#pragma once

// State and process reconstruction from projective photon counts. Both
// estimators search over a triangular square root, which keeps every iterate
// physical, and both profile the unknown count scale out of the objective
// analytically instead of fitting it as an extra parameter.

#include "smafc/core.hpp"
#include "smafc/generators.hpp"
#include "smafc/optim.hpp"
#include "smafc/process.hpp"
#include "smafc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace smafc {

// Projective settings for qudit state reconstruction: every basis population,
// then the balanced real and imaginary superpositions of each basis pair.
// d^2 settings in total, just enough to be informationally complete.
struct MeasurementSet {
  int dim = 0;
  std::vector<CVector> states;

  static MeasurementSet standard(int dim) {
    if (dim < 2 || dim > 16)
      throw ConfigError("measurement set: dimension must be in [2, 16]");
    MeasurementSet set;
    set.dim = dim;
    for (int n = 0; n < dim; ++n) set.states.push_back(PureState::basis(dim, n).amplitudes());
    for (int n = 0; n < dim; ++n)
      for (int m = n + 1; m < dim; ++m) {
        CVector v = CVector::Zero(dim);
        v[n] = M_SQRT1_2;
        v[m] = M_SQRT1_2;
        set.states.push_back(v);
      }
    for (int n = 0; n < dim; ++n)
      for (int m = n + 1; m < dim; ++m) {
        CVector v = CVector::Zero(dim);
        v[n] = M_SQRT1_2;
        v[m] = Complex(0.0, M_SQRT1_2);
        set.states.push_back(v);
      }
    return set;
  }

  void validate() const {
    if (dim < 2) throw ConfigError("measurement set: dimension must be at least 2");
    if (states.empty()) throw ConfigError("measurement set: no settings");
    for (const CVector& s : states) {
      if (s.size() != dim) throw ConfigError("measurement set: setting dimension mismatch");
      if (std::abs(s.norm() - 1.0) > tol::norm_one)
        throw ConfigError("measurement set: settings must be unit vectors");
    }
  }

  // Row s maps the expansion (tr rho / d, coefficients of the generators) to
  // the click probability of setting s.
  RMatrix design_matrix() const {
    validate();
    GeneratorBasis basis = su_generators(dim);
    RMatrix design(static_cast<Eigen::Index>(states.size()), basis.count());
    for (std::size_t s = 0; s < states.size(); ++s) {
      design(static_cast<Eigen::Index>(s), 0) = 1.0;
      for (int i = 1; i < basis.count(); ++i)
        design(static_cast<Eigen::Index>(s), i) =
            (states[s].adjoint() * basis.operators[i] * states[s])(0, 0).real();
    }
    return design;
  }

  bool informationally_complete() const {
    Eigen::FullPivLU<RMatrix> lu(design_matrix());
    return lu.rank() == static_cast<Eigen::Index>(dim) * dim;
  }
};

// Triangular square-root coordinates: rho = T^dagger T / tr(T^dagger T) with
// T upper triangular, its diagonal in t[0..d-1] and each off-diagonal entry
// as a (re, im) pair in row-major pair order. Any t except zero maps to a
// valid state and every state is reached.
inline CMatrix triangular_from_params(int dim, const RVector& t) {
  if (t.size() != static_cast<Eigen::Index>(dim) * dim)
    throw ModelError("triangular_from_params: need d^2 parameters");
  CMatrix tri = CMatrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) tri(i, i) = t[i];
  int k = dim;
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      tri(i, j) = Complex(t[k], t[k + 1]);
      k += 2;
    }
  return tri;
}

inline CMatrix rho_matrix_from_t(int dim, const RVector& t) {
  CMatrix tri = triangular_from_params(dim, t);
  CMatrix m = tri.adjoint() * tri;
  double tr = m.trace().real();
  if (!(tr > 0.0)) throw ModelError("rho_from_t: zero parameter vector has no state");
  return m / tr;
}

inline DensityMatrix rho_from_t(int dim, const RVector& t) {
  return DensityMatrix(rho_matrix_from_t(dim, t));
}

// Inverse coordinate map. A small ridge keeps the factorization alive for
// rank-deficient states; the round-trip error it introduces stays near the
// ridge size itself.
inline RVector t_from_rho(const DensityMatrix& rho) {
  const int dim = rho.dim();
  CMatrix m = rho.matrix();
  double ridge = 1e-10 * m.trace().real();
  m += ridge * CMatrix::Identity(dim, dim);
  Eigen::LLT<CMatrix> llt(m);
  if (llt.info() != Eigen::Success) throw ModelError("t_from_rho: factorization failed");
  CMatrix tri = CMatrix(llt.matrixL()).adjoint();
  RVector t(dim * dim);
  for (int i = 0; i < dim; ++i) t[i] = tri(i, i).real();
  int k = dim;
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      t[k] = tri(i, j).real();
      t[k + 1] = tri(i, j).imag();
      k += 2;
    }
  return t;
}

struct QstOptions {
  int restarts = 5;
  double restart_spread = 0.3;
  double probability_floor = 1e-12;
  OptimOptions optim;
  std::uint64_t seed = 0; // restart perturbation stream
};

struct QstResult {
  DensityMatrix rho;
  double objective = 0.0;       // zero exactly when counts match probabilities
  double total_intensity = 0.0; // profiled counts-per-setting scale
  OptimResult optimizer;        // winning start
};

// Gaussian-statistics likelihood sum_s (N p_s - n_s)^2 / (2 N p_s) with the
// intensity N eliminated at its stationary point N* = sqrt(sum n^2/p / sum p).
// Cauchy-Schwarz makes the profiled value nonnegative, vanishing exactly when
// counts are proportional to probabilities, so the fit quality is readable
// from the raw objective. The value is accumulated residual by residual at N*
// rather than through the collapsed closed form sqrt(sum p * sum n^2/p) -
// sum n, whose cancellation of two near-equal totals costs enough precision
// at photon-count scales to corrupt finite-difference gradients.
inline QstResult qst_mle(const MeasurementSet& set, const RVector& counts,
                         const QstOptions& opts = {}) {
  set.validate();
  if (counts.size() != static_cast<Eigen::Index>(set.states.size()))
    throw ConfigError("qst_mle: one count per setting required");
  if (counts.minCoeff() < 0.0) throw ConfigError("qst_mle: counts cannot be negative");
  if (!(counts.sum() > 0.0)) throw ConfigError("qst_mle: all counts are zero");
  if (opts.restarts < 1) throw ConfigError("qst_mle: needs at least one start");

  const int dim = set.dim;
  const double floor = opts.probability_floor;

  auto probabilities = [&](const RVector& t, RVector& p) -> bool {
    CMatrix tri = triangular_from_params(dim, t);
    CMatrix m = tri.adjoint() * tri;
    double tr = m.trace().real();
    if (!(tr > 1e-300)) return false;
    for (std::size_t s = 0; s < set.states.size(); ++s) {
      double v = (set.states[s].adjoint() * m * set.states[s])(0, 0).real() / tr;
      p[static_cast<Eigen::Index>(s)] = std::max(v, floor);
    }
    return true;
  };

  Objective objective = [&](const RVector& t) -> double {
    RVector p(counts.size());
    if (!probabilities(t, p)) return std::numeric_limits<double>::infinity();
    double sum_p = p.sum();
    double sum_n2p = (counts.array().square() / p.array()).sum();
    double intensity = std::sqrt(sum_n2p / sum_p);
    if (!std::isfinite(intensity) || !(intensity > 0.0))
      return std::numeric_limits<double>::infinity();
    return 0.5 * ((counts.array() - intensity * p.array()).square() /
                  (intensity * p.array()))
                     .sum();
  };

  RVector x0 = t_from_rho(DensityMatrix::maximally_mixed(dim));
  RngStream rng(opts.seed, "qst/restarts");
  QstResult res{DensityMatrix::maximally_mixed(dim), 0.0, 0.0, {}};
  res.optimizer =
      multi_start_minimize(objective, x0, opts.optim, rng, opts.restarts, opts.restart_spread);
  res.objective = res.optimizer.value;
  res.rho = rho_from_t(dim, res.optimizer.x);

  RVector p(counts.size());
  probabilities(res.optimizer.x, p);
  res.total_intensity = std::sqrt((counts.array().square() / p.array()).sum() / p.sum());
  return res;
}

struct QptOptions {
  double tp_weight = 0.0; // penalty on the trace-preservation defect; 0 picks 10 * total counts
  int restarts = 2;
  double restart_spread = 0.2;
  // Central differences are not optional here. The penalty is quadratic with
  // its minimum on the trace-preserving manifold, where its true gradient is
  // zero; a forward difference across that valley reports a spurious slope of
  // order tp_weight * step that drowns the data gradient.
  OptimOptions optim{.max_iterations = 800, .central_differences = true};
  std::uint64_t seed = 0;
};

struct QptResult {
  ProcessMatrix chi;
  double objective = 0.0;
  double scale = 0.0;       // profiled counts-per-setting-pair intensity
  double tp_residual = 0.0; // of the reported process matrix
  OptimResult optimizer;
};

// Least-squares process reconstruction over chi = T^dagger T. Probabilities
// are bilinear in the precomputed overlaps b_m = <psi_j| g_m |phi_i>, the
// count scale C is profiled analytically, and a quadratic penalty holds the
// estimate near the trace-preserving manifold. The search starts from the
// linear inversion of the count model projected onto the positive cone, so
// with informationally complete settings the optimizer only polishes.
inline QptResult qpt_mle(int dim, const std::vector<CVector>& preparations,
                         const std::vector<CVector>& measurements, const RMatrix& counts,
                         const QptOptions& opts = {}) {
  if (dim < 2) throw ConfigError("qpt_mle: dimension must be at least 2");
  if (preparations.empty() || measurements.empty())
    throw ConfigError("qpt_mle: need preparations and measurement settings");
  for (const CVector& v : preparations)
    if (v.size() != dim || std::abs(v.norm() - 1.0) > tol::norm_one)
      throw ConfigError("qpt_mle: preparations must be unit vectors of the right dimension");
  for (const CVector& v : measurements)
    if (v.size() != dim || std::abs(v.norm() - 1.0) > tol::norm_one)
      throw ConfigError("qpt_mle: measurements must be unit vectors of the right dimension");
  if (counts.rows() != static_cast<Eigen::Index>(preparations.size()) ||
      counts.cols() != static_cast<Eigen::Index>(measurements.size()))
    throw ConfigError("qpt_mle: counts must be preparations x measurements");
  if (counts.minCoeff() < 0.0) throw ConfigError("qpt_mle: counts cannot be negative");
  if (!(counts.sum() > 0.0)) throw ConfigError("qpt_mle: all counts are zero");
  if (opts.restarts < 1) throw ConfigError("qpt_mle: needs at least one start");

  GeneratorBasis basis = su_generators(dim);
  const int n_ops = basis.count();
  const Eigen::Index rows = counts.size();

  CMatrix overlaps(rows, n_ops); // row (i, j), column m: <psi_j| g_m |phi_i>
  RVector c(rows);
  {
    Eigen::Index r = 0;
    for (std::size_t i = 0; i < preparations.size(); ++i)
      for (std::size_t j = 0; j < measurements.size(); ++j, ++r) {
        for (int m = 0; m < n_ops; ++m)
          overlaps(r, m) =
              (measurements[j].adjoint() * basis.operators[m] * preparations[i])(0, 0);
        c[r] = counts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
  }
  const CMatrix overlaps_conj = overlaps.conjugate();
  const double sum_c2 = c.squaredNorm();

  std::vector<CMatrix> pair_products; // g_k g_m flattened over (m, k)
  pair_products.reserve(static_cast<std::size_t>(n_ops) * n_ops);
  for (int m = 0; m < n_ops; ++m)
    for (int k = 0; k < n_ops; ++k)
      pair_products.push_back(basis.operators[k] * basis.operators[m]);

  const double tp_weight = opts.tp_weight > 0.0 ? opts.tp_weight : 10.0 * c.sum();

  Objective objective = [&](const RVector& t) -> double {
    CMatrix tri = triangular_from_params(n_ops, t);
    CMatrix chi = tri.adjoint() * tri;

    RVector p = ((overlaps * chi).cwiseProduct(overlaps_conj)).rowwise().sum().real();
    double sum_p2 = p.squaredNorm();
    if (!(sum_p2 > 1e-300)) return std::numeric_limits<double>::infinity();
    // Residual sum at the profiled scale C* = sqrt(sum c^2 / sum p^2). Equal
    // to 2 (sqrt(sum c^2 sum p^2) - c.p) but free of that form's cancellation.
    double scale = std::sqrt(sum_c2 / sum_p2);
    if (!std::isfinite(scale)) return std::numeric_limits<double>::infinity();
    double data = (c.array() - scale * p.array()).square().sum() / scale;

    CMatrix acc = CMatrix::Zero(dim, dim);
    for (int m = 0; m < n_ops; ++m)
      for (int k = 0; k < n_ops; ++k)
        acc.noalias() += chi(m, k) * pair_products[static_cast<std::size_t>(m) * n_ops + k];
    acc -= CMatrix::Identity(dim, dim);
    return data + tp_weight * acc.squaredNorm();
  };

  // Start from the Hermitian linear inversion of the count model in the real
  // coordinates (diagonal entries, then a re/im pair per upper off-diagonal).
  // The unknown count scale rides along in the solution and is removed by the
  // same trace-preservation normalization applied to the final estimate. Any
  // degeneracy on the way falls back to the identity process start.
  RVector x0 = RVector::Zero(n_ops * n_ops);
  x0[0] = 1.0;
  {
    RMatrix design(rows, static_cast<Eigen::Index>(n_ops) * n_ops);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (int i = 0; i < n_ops; ++i) design(r, i) = std::norm(overlaps(r, i));
      int col = n_ops;
      for (int i = 0; i < n_ops; ++i)
        for (int j = i + 1; j < n_ops; ++j) {
          Complex w = overlaps(r, i) * std::conj(overlaps(r, j));
          design(r, col) = 2.0 * w.real();
          design(r, col + 1) = -2.0 * w.imag();
          col += 2;
        }
    }
    RVector v = design.colPivHouseholderQr().solve(c);
    CMatrix guess(n_ops, n_ops);
    for (int i = 0; i < n_ops; ++i) guess(i, i) = v[i];
    {
      int col = n_ops;
      for (int i = 0; i < n_ops; ++i)
        for (int j = i + 1; j < n_ops; ++j) {
          guess(i, j) = Complex(v[col], v[col + 1]);
          guess(j, i) = std::conj(guess(i, j));
          col += 2;
        }
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(guess);
    if (eig.info() == Eigen::Success) {
      CMatrix psd = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).asDiagonal() *
                    eig.eigenvectors().adjoint();
      CMatrix acc = CMatrix::Zero(dim, dim);
      for (int m = 0; m < n_ops; ++m)
        for (int k = 0; k < n_ops; ++k)
          acc.noalias() += psd(m, k) * pair_products[static_cast<std::size_t>(m) * n_ops + k];
      double tp_scale = acc.trace().real() / dim;
      if (std::isfinite(tp_scale) && tp_scale > 0.0) {
        psd /= tp_scale;
        psd += (1e-10 * psd.trace().real()) * CMatrix::Identity(n_ops, n_ops);
        Eigen::LLT<CMatrix> llt(psd);
        if (llt.info() == Eigen::Success) {
          CMatrix tri = CMatrix(llt.matrixL()).adjoint();
          for (int i = 0; i < n_ops; ++i) x0[i] = tri(i, i).real();
          int col = n_ops;
          for (int i = 0; i < n_ops; ++i)
            for (int j = i + 1; j < n_ops; ++j) {
              x0[col] = tri(i, j).real();
              x0[col + 1] = tri(i, j).imag();
              col += 2;
            }
        }
      }
    }
  }
  RngStream rng(opts.seed, "qpt/restarts");
  OptimResult best =
      multi_start_minimize(objective, x0, opts.optim, rng, opts.restarts, opts.restart_spread);

  CMatrix tri = triangular_from_params(n_ops, best.x);
  CMatrix chi = tri.adjoint() * tri;
  CMatrix acc = CMatrix::Zero(dim, dim);
  for (int m = 0; m < n_ops; ++m)
    for (int k = 0; k < n_ops; ++k)
      acc.noalias() += chi(m, k) * pair_products[static_cast<std::size_t>(m) * n_ops + k];
  double scale_fix = acc.trace().real() / dim;
  if (!(scale_fix > 0.0)) throw OptimError("qpt_mle: estimate collapsed to zero");
  chi /= scale_fix;

  QptResult res{ProcessMatrix(dim, chi), best.value, 0.0, 0.0, {}};
  res.tp_residual = tp_residual(res.chi);
  RVector p = ((overlaps * chi).cwiseProduct(overlaps_conj)).rowwise().sum().real();
  double sum_p2 = p.squaredNorm();
  res.scale = sum_p2 > 0.0 ? std::sqrt(sum_c2 / sum_p2) : 0.0;
  res.optimizer = std::move(best);
  return res;
}

// Poisson click totals for every setting against a known state; the common
// intensity plays the role of trials x mean photon number x efficiency.
inline RVector simulate_state_counts(const MeasurementSet& set, const DensityMatrix& rho,
                                     double intensity, std::uint64_t seed) {
  set.validate();
  if (rho.dim() != set.dim) throw ModelError("simulate_state_counts: dimension mismatch");
  if (!(intensity > 0.0)) throw ConfigError("simulate_state_counts: intensity must be positive");
  RngStream rng(seed, "tomo/state-counts");
  RVector n(static_cast<Eigen::Index>(set.states.size()));
  for (std::size_t s = 0; s < set.states.size(); ++s) {
    double p = (set.states[s].adjoint() * rho.matrix() * set.states[s])(0, 0).real();
    n[static_cast<Eigen::Index>(s)] =
        static_cast<double>(rng.poisson(intensity * std::clamp(p, 0.0, 1.0)));
  }
  return n;
}

inline RMatrix simulate_process_counts(const ProcessMatrix& process,
                                       const std::vector<CVector>& preparations,
                                       const std::vector<CVector>& measurements, double intensity,
                                       std::uint64_t seed) {
  if (!(intensity > 0.0)) throw ConfigError("simulate_process_counts: intensity must be positive");
  RngStream rng(seed, "tomo/process-counts");
  RMatrix n(static_cast<Eigen::Index>(preparations.size()),
            static_cast<Eigen::Index>(measurements.size()));
  for (std::size_t i = 0; i < preparations.size(); ++i) {
    DensityMatrix out = apply_channel(process, DensityMatrix::pure(PureState(preparations[i])));
    for (std::size_t j = 0; j < measurements.size(); ++j) {
      double p = (measurements[j].adjoint() * out.matrix() * measurements[j])(0, 0).real();
      n(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          static_cast<double>(rng.poisson(intensity * std::clamp(p, 0.0, 1.0)));
    }
  }
  return n;
}

// Exact expected counts, the noiseless counterpart of the samplers above.
inline RVector expected_state_counts(const MeasurementSet& set, const DensityMatrix& rho,
                                     double intensity) {
  set.validate();
  if (rho.dim() != set.dim) throw ModelError("expected_state_counts: dimension mismatch");
  RVector n(static_cast<Eigen::Index>(set.states.size()));
  for (std::size_t s = 0; s < set.states.size(); ++s)
    n[static_cast<Eigen::Index>(s)] =
        intensity * (set.states[s].adjoint() * rho.matrix() * set.states[s])(0, 0).real();
  return n;
}

inline RMatrix expected_process_counts(const ProcessMatrix& process,
                                       const std::vector<CVector>& preparations,
                                       const std::vector<CVector>& measurements,
                                       double intensity) {
  RMatrix n(static_cast<Eigen::Index>(preparations.size()),
            static_cast<Eigen::Index>(measurements.size()));
  for (std::size_t i = 0; i < preparations.size(); ++i) {
    DensityMatrix out = apply_channel(process, DensityMatrix::pure(PureState(preparations[i])));
    for (std::size_t j = 0; j < measurements.size(); ++j)
      n(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          intensity * (measurements[j].adjoint() * out.matrix() * measurements[j])(0, 0).real();
  }
  return n;
}

} // namespace smafc
