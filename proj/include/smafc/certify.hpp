#pragma once

// Quantum-versus-classical certification. A reconstructed storage channel
// earns its keep in three ways: beating the fidelity any classical
// measure-and-resend strategy could reach at the same photon statistics,
// carrying positive one-shot capacity lower bounds, and preserving enough
// entanglement to certify the full qudit dimension.

#include "smafc/core.hpp"
#include "smafc/generators.hpp"
#include "smafc/optim.hpp"
#include "smafc/process.hpp"
#include "smafc/rng.hpp"
#include "smafc/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace smafc {

// Best storage fidelity available to an intercept-and-resend attack on a
// Poissonian source of mean photon number mu, granted a memory that need
// only return a fraction eta_M of the non-vacuum trials. The attacker keeps
// the trials with the most photons, so the threshold n_min is the smallest
// count whose exceedance probability fits inside the retrieval budget; gamma
// is the sliver of budget filled at the threshold itself. Estimating a
// d-level state from N copies caps the resend fidelity at (N+1)/(N+d).
struct ClassicalBound {
  double bound = 0.0;
  int n_min = 0;
  double gamma = 0.0;
};

inline ClassicalBound classical_bound_detail(int dim, double mean_photon,
                                             double retrieval_efficiency) {
  if (dim < 2) throw ConfigError("classical bound: dimension must be at least 2");
  if (!(mean_photon > 0.0)) throw ConfigError("classical bound: mean photon number must be positive");
  if (!(retrieval_efficiency > 0.0) || retrieval_efficiency > 1.0)
    throw ConfigError("classical bound: retrieval efficiency must lie in (0, 1]");

  std::vector<double> pmf;
  pmf.push_back(std::exp(-mean_photon));
  while (pmf.size() < 500) {
    double next = pmf.back() * mean_photon / static_cast<double>(pmf.size());
    pmf.push_back(next);
    if (pmf.size() > mean_photon && next < 1e-18) break;
  }
  std::vector<double> tail(pmf.size() + 1, 0.0); // tail[i] = P(N >= i)
  for (std::size_t i = pmf.size(); i-- > 0;) tail[i] = tail[i + 1] + pmf[i];

  const double budget = (1.0 - pmf[0]) * retrieval_efficiency;
  std::size_t n_min = 0;
  while (n_min + 1 < tail.size() && tail[n_min + 1] > budget) ++n_min;

  ClassicalBound res;
  res.n_min = static_cast<int>(n_min);
  res.gamma = std::max(0.0, budget - tail[n_min + 1]);
  double numerator = (static_cast<double>(n_min) + 1.0) /
                     (static_cast<double>(n_min) + dim) * res.gamma;
  for (std::size_t n = n_min + 1; n < pmf.size(); ++n)
    numerator += (static_cast<double>(n) + 1.0) / (static_cast<double>(n) + dim) * pmf[n];
  res.bound = numerator / budget;
  return res;
}

inline double classical_bound(int dim, double mean_photon, double retrieval_efficiency) {
  return classical_bound_detail(dim, mean_photon, retrieval_efficiency).bound;
}

// Limit of a lossless memory: every non-vacuum trial must be returned, so
// the attacker averages (N+1)/(N+d) over the full photon distribution.
inline double classical_bound_unit_efficiency(int dim, double mean_photon) {
  if (dim < 2) throw ConfigError("classical bound: dimension must be at least 2");
  if (!(mean_photon > 0.0)) throw ConfigError("classical bound: mean photon number must be positive");
  std::vector<double> pmf;
  pmf.push_back(std::exp(-mean_photon));
  while (pmf.size() < 500) {
    double next = pmf.back() * mean_photon / static_cast<double>(pmf.size());
    pmf.push_back(next);
    if (pmf.size() > mean_photon && next < 1e-18) break;
  }
  double numerator = 0.0;
  for (std::size_t n = 1; n < pmf.size(); ++n)
    numerator += (static_cast<double>(n) + 1.0) / (static_cast<double>(n) + dim) * pmf[n];
  return numerator / (1.0 - pmf[0]);
}

namespace detail {

inline double entropy_bits(const CMatrix& m) {
  CMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ModelError("entropy: eigensolver failed");
  double s = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    double p = solver.eigenvalues()[i];
    if (p > tol::eig_clip) s -= p * std::log2(p);
  }
  return s;
}

inline CMatrix unitary_exp(const CMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian);
  if (solver.info() != Eigen::Success) throw ModelError("unitary_exp: eigensolver failed");
  CVector phases(solver.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i)
    phases[i] = std::exp(Complex(0.0, solver.eigenvalues()[i]));
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

// Columns m of the stacked map |psi> -> (I x g_m)|psi> for a purification
// laid out reference-major: amplitude of |r>|s> lives at index r * d + s.
inline CMatrix purified_overlap_columns(const GeneratorBasis& basis, const CVector& psi) {
  const int d = basis.dim;
  CMatrix a(psi.size(), basis.count());
  for (int m = 0; m < basis.count(); ++m)
    for (int r = 0; r < d; ++r)
      a.block(r * d, m, d, 1) = basis.operators[m] * psi.segment(r * d, d);
  return a;
}

} // namespace detail

// Coherent information of the channel for a given input: the output entropy
// minus the entropy of the joint state with a reference that purifies the
// input. Positive values witness that quantum correlations survive storage.
inline double coherent_information(const ProcessMatrix& process, const DensityMatrix& rho) {
  if (process.dim() != rho.dim())
    throw ModelError("coherent_information: channel and state dimensions differ");
  GeneratorBasis basis = su_generators(process.dim());
  if (tp_residual(process.chi(), basis) > tol::tp_residual)
    throw ModelError("coherent_information: channel is not trace preserving");

  const int d = process.dim();
  HermitianEig eig = hermitian_eig(rho.matrix());
  CVector psi = CVector::Zero(d * d);
  for (int r = 0; r < d; ++r) {
    double w = std::max(0.0, eig.values[r]);
    psi.segment(r * d, d) = std::sqrt(w) * eig.vectors.col(r);
  }

  CMatrix a = detail::purified_overlap_columns(basis, psi);
  CMatrix joint = a * process.chi() * a.adjoint();
  CMatrix output = apply_channel_raw(process.chi(), basis, rho.matrix());
  return detail::entropy_bits(output) - detail::entropy_bits(joint);
}

struct CapacityOptions {
  int restarts = 3;
  double restart_spread = 0.3;
  OptimOptions optim;
  std::uint64_t seed = 0;
};

// Largest coherent information over input states, clamped at zero. A
// maximizer over the triangular state coordinates is a valid one-shot
// quantum-capacity lower bound whether or not the search is exhaustive.
inline double q1_lower_bound(const ProcessMatrix& process, const CapacityOptions& opts = {}) {
  const int d = process.dim();
  GeneratorBasis basis = su_generators(d);
  if (tp_residual(process.chi(), basis) > tol::tp_residual)
    throw ModelError("q1_lower_bound: channel is not trace preserving");
  if (opts.restarts < 1) throw ConfigError("q1_lower_bound: needs at least one start");

  Objective objective = [&](const RVector& t) -> double {
    CMatrix tri = triangular_from_params(d, t);
    CMatrix m = tri.adjoint() * tri;
    double tr = m.trace().real();
    if (!(tr > 1e-300)) return std::numeric_limits<double>::infinity();
    m /= tr;

    Eigen::SelfAdjointEigenSolver<CMatrix> solver(m);
    if (solver.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    CVector psi = CVector::Zero(d * d);
    for (int r = 0; r < d; ++r) {
      double w = std::max(0.0, solver.eigenvalues()[r]);
      psi.segment(r * d, d) = std::sqrt(w) * solver.eigenvectors().col(r);
    }
    CMatrix a = detail::purified_overlap_columns(basis, psi);
    CMatrix joint = a * process.chi() * a.adjoint();
    CMatrix output = apply_channel_raw(process.chi(), basis, m);
    return detail::entropy_bits(joint) - detail::entropy_bits(output);
  };

  RVector x0 = t_from_rho(DensityMatrix::maximally_mixed(d));
  RngStream rng(opts.seed, "capacity/q1");
  OptimResult best =
      multi_start_minimize(objective, x0, opts.optim, rng, opts.restarts, opts.restart_spread);
  return std::max(0.0, -best.value);
}

// Input-prior optimization of a discrete memoryless channel, rows indexing
// symbols and columns outcomes. Alternating updates converge from below
// while max_x D_x converges from above, so the duality gap is an exit test.
struct ChannelCapacity {
  double bits = 0.0;
  RVector priors;
};

inline ChannelCapacity blahut_arimoto(const RMatrix& conditional, int max_iterations = 300,
                                      double tolerance = 1e-12) {
  const Eigen::Index n_in = conditional.rows();
  const Eigen::Index n_out = conditional.cols();
  if (n_in < 1 || n_out < 1) throw ConfigError("blahut_arimoto: empty channel");
  for (Eigen::Index x = 0; x < n_in; ++x) {
    if (conditional.row(x).minCoeff() < -1e-9)
      throw ConfigError("blahut_arimoto: negative conditional probability");
    if (std::abs(conditional.row(x).sum() - 1.0) > 1e-6)
      throw ConfigError("blahut_arimoto: conditional rows must sum to one");
  }

  RVector p = RVector::Constant(n_in, 1.0 / static_cast<double>(n_in));
  RVector d_x(n_in);
  double info = 0.0;
  for (int iter = 0; iter < max_iterations; ++iter) {
    RVector q = conditional.transpose() * p;
    for (Eigen::Index x = 0; x < n_in; ++x) {
      double acc = 0.0;
      for (Eigen::Index y = 0; y < n_out; ++y) {
        double w = conditional(x, y);
        if (w > 0.0 && q[y] > 0.0) acc += w * std::log2(w / q[y]);
      }
      d_x[x] = acc;
    }
    info = p.dot(d_x);
    if (d_x.maxCoeff() - info < tolerance) break;

    for (Eigen::Index x = 0; x < n_in; ++x) p[x] *= std::exp2(d_x[x]);
    double norm = p.sum();
    if (!(norm > 0.0)) break; // channel carries nothing
    p /= norm;
  }
  return {std::max(0.0, info), p};
}

struct AccessibleInfoOptions {
  int measurement_restarts = 3; // computational frame, average-output eigenframe, perturbations
  int prior_iterations = 300;
  OptimOptions optim;
  std::uint64_t seed = 0;
};

struct AccessibleInfoResult {
  double bits = 0.0;
  RVector priors;
  CMatrix measurement_frame; // columns are the projective outcomes
};

namespace detail {

inline RMatrix outcome_probabilities(const std::vector<CMatrix>& outputs, const CMatrix& frame) {
  RMatrix p(static_cast<Eigen::Index>(outputs.size()), frame.cols());
  for (std::size_t x = 0; x < outputs.size(); ++x) {
    CMatrix rotated = frame.adjoint() * outputs[x] * frame;
    for (Eigen::Index y = 0; y < frame.cols(); ++y)
      p(static_cast<Eigen::Index>(x), y) = std::max(0.0, rotated(y, y).real());
    double s = p.row(static_cast<Eigen::Index>(x)).sum();
    if (!(s > 0.0)) throw ModelError("accessible information: output state lost all weight");
    p.row(static_cast<Eigen::Index>(x)) /= s;
  }
  return p;
}

} // namespace detail

// Mutual information between stored symbols and read-out results, maximized
// over a projective measurement basis and the symbol priors. The ensemble
// itself stays fixed, which matches a read-out chain that can rotate its
// analysis basis but not re-engineer the source.
inline AccessibleInfoResult accessible_information(const ProcessMatrix& process,
                                                   const std::vector<CVector>& inputs,
                                                   const AccessibleInfoOptions& opts = {}) {
  const int d = process.dim();
  GeneratorBasis basis = su_generators(d);
  if (tp_residual(process.chi(), basis) > tol::tp_residual)
    throw ModelError("accessible_information: channel is not trace preserving");
  if (inputs.size() < 2) throw ConfigError("accessible_information: need at least two symbols");
  for (const CVector& v : inputs)
    if (v.size() != d || std::abs(v.norm() - 1.0) > tol::norm_one)
      throw ConfigError("accessible_information: symbols must be unit vectors");
  if (opts.measurement_restarts < 1)
    throw ConfigError("accessible_information: needs at least one start");

  std::vector<CMatrix> outputs;
  CMatrix average = CMatrix::Zero(d, d);
  for (const CVector& v : inputs) {
    CMatrix out = apply_channel_raw(process.chi(), basis, v * v.adjoint());
    out = 0.5 * (out + out.adjoint());
    outputs.push_back(out);
    average += out / static_cast<double>(inputs.size());
  }

  AccessibleInfoResult best;
  best.bits = -1.0;
  RngStream rng(opts.seed, "capacity/accessible");
  for (int r = 0; r < opts.measurement_restarts; ++r) {
    CMatrix frame0 = CMatrix::Identity(d, d);
    if (r == 1) frame0 = hermitian_eig(average).vectors;
    RVector h0 = RVector::Zero(d * d);
    if (r >= 2)
      for (Eigen::Index i = 0; i < h0.size(); ++i) h0[i] = rng.normal(0.0, 0.4);

    Objective objective = [&](const RVector& h) -> double {
      CMatrix frame =
          frame0 * detail::unitary_exp(from_coefficients(h, basis));
      RMatrix p = detail::outcome_probabilities(outputs, frame);
      return -blahut_arimoto(p, opts.prior_iterations).bits;
    };

    OptimResult run;
    try {
      run = bfgs_minimize(objective, h0, opts.optim);
    } catch (const OptimError&) {
      continue;
    }
    if (-run.value > best.bits) {
      CMatrix frame = frame0 * detail::unitary_exp(from_coefficients(run.x, basis));
      ChannelCapacity cap =
          blahut_arimoto(detail::outcome_probabilities(outputs, frame), opts.prior_iterations);
      best.bits = cap.bits;
      best.priors = cap.priors;
      best.measurement_frame = frame;
    }
  }
  if (best.bits < 0.0) throw OptimError("accessible_information: every start failed");
  return best;
}

struct C1Result {
  double bits = 0.0;
  RVector priors;
  CMatrix input_frame;       // columns are the transmitted symbols
  CMatrix measurement_frame; // columns are the projective outcomes
};

// One-shot classical capacity lower bound: d orthonormal pure symbols and a
// projective read-out, jointly tuned, with the priors handled by the inner
// alternating update. Any feasible point lower-bounds the true capacity.
inline C1Result c1_lower_bound(const ProcessMatrix& process, const AccessibleInfoOptions& opts = {}) {
  const int d = process.dim();
  GeneratorBasis basis = su_generators(d);
  if (tp_residual(process.chi(), basis) > tol::tp_residual)
    throw ModelError("c1_lower_bound: channel is not trace preserving");
  if (opts.measurement_restarts < 1) throw ConfigError("c1_lower_bound: needs at least one start");

  auto evaluate = [&](const CMatrix& frame0, const RVector& params) {
    CMatrix input_frame =
        detail::unitary_exp(from_coefficients(RVector(params.head(d * d)), basis));
    CMatrix measurement_frame =
        frame0 * detail::unitary_exp(from_coefficients(RVector(params.tail(d * d)), basis));
    std::vector<CMatrix> outputs;
    for (int x = 0; x < d; ++x) {
      CVector v = input_frame.col(x);
      CMatrix out = apply_channel_raw(process.chi(), basis, v * v.adjoint());
      outputs.push_back(0.5 * (out + out.adjoint()));
    }
    RMatrix p = detail::outcome_probabilities(outputs, measurement_frame);
    return std::make_tuple(blahut_arimoto(p, opts.prior_iterations),
                           std::move(input_frame), std::move(measurement_frame));
  };

  // average computational-symbol output, for the eigenframe start
  CMatrix average = CMatrix::Zero(d, d);
  for (int x = 0; x < d; ++x) {
    CVector v = CVector::Zero(d);
    v[x] = 1.0;
    average += apply_channel_raw(process.chi(), basis, v * v.adjoint()) / static_cast<double>(d);
  }
  average = 0.5 * (average + average.adjoint());

  C1Result best;
  best.bits = -1.0;
  RngStream rng(opts.seed, "capacity/c1");
  for (int r = 0; r < opts.measurement_restarts; ++r) {
    CMatrix frame0 = CMatrix::Identity(d, d);
    if (r == 1) frame0 = hermitian_eig(average).vectors;
    RVector x0 = RVector::Zero(2 * d * d);
    if (r >= 2)
      for (Eigen::Index i = 0; i < x0.size(); ++i) x0[i] = rng.normal(0.0, 0.4);

    Objective objective = [&](const RVector& params) -> double {
      return -std::get<0>(evaluate(frame0, params)).bits;
    };

    OptimResult run;
    try {
      run = bfgs_minimize(objective, x0, opts.optim);
    } catch (const OptimError&) {
      continue;
    }
    if (-run.value > best.bits) {
      auto [cap, input_frame, measurement_frame] = evaluate(frame0, run.x);
      best.bits = cap.bits;
      best.priors = cap.priors;
      best.input_frame = input_frame;
      best.measurement_frame = measurement_frame;
    }
  }
  if (best.bits < 0.0) throw OptimError("c1_lower_bound: every start failed");
  return best;
}

// Entanglement-dimension witness read from the process matrix: chi00 is the
// overlap of the Choi state with the maximally entangled state, and beating
// (k - 1) / d certifies a Schmidt number of at least k.
struct SchmidtCertificate {
  double fidelity = 0.0;
  int certified_dimension = 1;
};

inline SchmidtCertificate schmidt_certificate(const ProcessMatrix& process) {
  SchmidtCertificate cert;
  cert.fidelity = std::clamp(process.chi00(), 0.0, 1.0);
  const int d = process.dim();
  for (int k = d; k >= 1; --k)
    if (cert.fidelity > (static_cast<double>(k) - 1.0) / d) {
      cert.certified_dimension = k;
      break;
    }
  return cert;
}

} // namespace smafc
