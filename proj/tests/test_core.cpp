#include "smafc/core.hpp"
#include "smafc/generators.hpp"
#include "smafc/process.hpp"

#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace smafc;
using test::random_density;
using test::random_hermitian;
using test::random_pure;
using test::random_unitary;

namespace {

CMatrix pauli(char which) {
  CMatrix m(2, 2);
  switch (which) {
    case 'x': m << 0, 1, 1, 0; break;
    case 'y': m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0); break;
    case 'z': m << 1, 0, 0, -1; break;
    default: m.setIdentity();
  }
  return m;
}

} // namespace

TEST_CASE("generator basis matches the Pauli set at d = 2") {
  GeneratorBasis basis = su_generators(2);
  REQUIRE(basis.count() == 4);
  CHECK((basis.operators[0] - CMatrix::Identity(2, 2)).norm() < 1e-15);
  CHECK((basis.operators[1] - pauli('x')).norm() < 1e-15);
  CHECK((basis.operators[2] - pauli('y')).norm() < 1e-15);
  CHECK((basis.operators[3] - pauli('z')).norm() < 1e-15);
}

TEST_CASE("generator basis matches the Gell-Mann set at d = 3 up to ordering") {
  GeneratorBasis basis = su_generators(3);
  REQUIRE(basis.count() == 9);

  std::vector<CMatrix> textbook;
  auto m = [] { return CMatrix::Zero(3, 3).eval(); };
  CMatrix l1 = m(); l1(0, 1) = 1; l1(1, 0) = 1; textbook.push_back(l1);
  CMatrix l2 = m(); l2(0, 1) = Complex(0, -1); l2(1, 0) = Complex(0, 1); textbook.push_back(l2);
  CMatrix l3 = m(); l3(0, 0) = 1; l3(1, 1) = -1; textbook.push_back(l3);
  CMatrix l4 = m(); l4(0, 2) = 1; l4(2, 0) = 1; textbook.push_back(l4);
  CMatrix l5 = m(); l5(0, 2) = Complex(0, -1); l5(2, 0) = Complex(0, 1); textbook.push_back(l5);
  CMatrix l6 = m(); l6(1, 2) = 1; l6(2, 1) = 1; textbook.push_back(l6);
  CMatrix l7 = m(); l7(1, 2) = Complex(0, -1); l7(2, 1) = Complex(0, 1); textbook.push_back(l7);
  CMatrix l8 = m(); l8(0, 0) = 1; l8(1, 1) = 1; l8(2, 2) = -2; l8 /= std::sqrt(3.0); textbook.push_back(l8);

  for (const CMatrix& t : textbook) {
    bool found = false;
    for (int i = 1; i < basis.count(); ++i)
      if ((basis.operators[i] - t).norm() < 1e-12) { found = true; break; }
    CHECK(found);
  }
}

TEST_CASE("generator basis family sizes at d = 4") {
  GeneratorBasis basis = su_generators(4);
  REQUIRE(basis.count() == 16);
  int symmetric = 0, antisymmetric = 0, diagonal = 0;
  for (int i = 1; i < basis.count(); ++i) {
    const CMatrix& g = basis.operators[i];
    if (g.imag().norm() > 1e-14) antisymmetric++;
    else if (g.diagonal().norm() > 1e-14) diagonal++;
    else symmetric++;
  }
  CHECK(symmetric == 6);
  CHECK(antisymmetric == 6);
  CHECK(diagonal == 3);
}

TEST_CASE("generators are traceless, Hermitian, and pairwise orthogonal") {
  for (int d : {2, 3, 4, 5, 6}) {
    GeneratorBasis basis = su_generators(d);
    REQUIRE(basis.count() == d * d);
    for (int i = 1; i < basis.count(); ++i) {
      CHECK(std::abs(basis.operators[i].trace()) < 1e-14);
      CHECK(is_hermitian(basis.operators[i], 1e-14));
    }
    for (int i = 1; i < basis.count(); ++i)
      for (int j = i; j < basis.count(); ++j) {
        double want = (i == j) ? 2.0 : 0.0;
        CHECK(std::abs((basis.operators[i] * basis.operators[j]).trace().real() - want) < 1e-12);
      }
  }
}

TEST_CASE("generator expansion reconstructs random Hermitian matrices") {
  RngStream rng(11, "core/expansion");
  for (int d : {2, 3, 5}) {
    GeneratorBasis basis = su_generators(d);
    CMatrix h = random_hermitian(rng, d);
    RVector c = hermitian_coefficients(h, basis);
    CHECK((from_coefficients(c, basis) - h).norm() < 1e-10);
  }
}

TEST_CASE("generator basis rejects out-of-range dimensions") {
  CHECK_THROWS_AS(su_generators(1), ModelError);
  CHECK_THROWS_AS(su_generators(17), ModelError);
}

TEST_CASE("hermitian eigendecomposition round-trips up to dimension 25") {
  RngStream rng(12, "core/eig");
  for (int d : {2, 5, 16, 25}) {
    CMatrix h = random_hermitian(rng, d);
    HermitianEig eig = hermitian_eig(h);
    CMatrix back = eig.vectors * eig.values.asDiagonal() * eig.vectors.adjoint();
    CHECK((back - h).norm() < 1e-9 * std::max(1.0, h.norm()));
  }
  CHECK_THROWS_AS(hermitian_eig(CMatrix::Random(3, 3)), ModelError);
}

TEST_CASE("density matrix validation") {
  CMatrix bad = CMatrix::Identity(2, 2);
  CHECK_THROWS_AS(DensityMatrix(bad), ModelError); // trace 2

  CMatrix neg(2, 2);
  neg << 1.5, 0, 0, -0.5;
  CHECK_THROWS_AS(DensityMatrix(neg), ModelError);

  CMatrix nonherm(2, 2);
  nonherm << 0.5, Complex(0.1, 0.2), Complex(0.1, -0.1), 0.5;
  CHECK_THROWS_AS(DensityMatrix(nonherm), ModelError);

  CHECK_NOTHROW(DensityMatrix::maximally_mixed(5));
  CHECK_THROWS_AS(PureState(CVector::Zero(3)), ModelError);
}

TEST_CASE("fidelity on known pairs") {
  DensityMatrix zero = DensityMatrix::pure(PureState::basis(2, 0));
  DensityMatrix one = DensityMatrix::pure(PureState::basis(2, 1));
  DensityMatrix mixed = DensityMatrix::maximally_mixed(2);

  CHECK(fidelity(zero, zero) == Catch::Approx(1.0).margin(1e-12));
  CHECK(fidelity(zero, one) == Catch::Approx(0.0).margin(1e-12));
  CHECK(fidelity(zero, mixed) == Catch::Approx(0.5).margin(1e-12));

  DensityMatrix d3 = DensityMatrix::maximally_mixed(3);
  CHECK_THROWS_AS(fidelity(zero, d3), ModelError);
}

TEST_CASE("fidelity is symmetric, bounded, and reduces to overlap for pure inputs") {
  RngStream rng(13, "core/fidelity");
  for (int rep = 0; rep < 20; ++rep) {
    int d = 2 + rep % 4;
    DensityMatrix a = random_density(rng, d);
    DensityMatrix b = random_density(rng, d);
    double fab = fidelity(a, b);
    double fba = fidelity(b, a);
    CHECK(fab >= 0.0);
    CHECK(fab <= 1.0);
    CHECK(std::abs(fab - fba) < 1e-9);

    PureState psi = random_pure(rng, d);
    double overlap = (psi.amplitudes().adjoint() * a.matrix() * psi.amplitudes())(0, 0).real();
    CHECK(fidelity(DensityMatrix::pure(psi), a) == Catch::Approx(overlap).margin(1e-9));
  }
}

TEST_CASE("entropy of reference states") {
  CHECK(von_neumann_entropy(DensityMatrix::pure(PureState::basis(4, 1))) ==
        Catch::Approx(0.0).margin(1e-12));
  CHECK(von_neumann_entropy(DensityMatrix::maximally_mixed(4)) == Catch::Approx(2.0).margin(1e-12));

  CMatrix half = CMatrix::Zero(4, 4);
  half(0, 0) = 0.5;
  half(1, 1) = 0.5;
  CHECK(von_neumann_entropy(DensityMatrix(half)) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("entropy is invariant under unitary conjugation") {
  RngStream rng(14, "core/entropy");
  for (int rep = 0; rep < 10; ++rep) {
    int d = 2 + rep % 3;
    DensityMatrix rho = random_density(rng, d);
    CMatrix u = random_unitary(rng, d);
    DensityMatrix rotated(CMatrix(u * rho.matrix() * u.adjoint()));
    CHECK(std::abs(von_neumann_entropy(rho) - von_neumann_entropy(rotated)) < 1e-9);
  }
}

TEST_CASE("choi state of the identity channel is the maximally entangled projector") {
  DensityMatrix choi = choi_state(identity_process(2));
  CVector phi = CVector::Zero(4);
  phi[0] = 1.0 / std::sqrt(2.0);
  phi[3] = 1.0 / std::sqrt(2.0);
  CHECK((choi.matrix() - phi * phi.adjoint()).norm() < 1e-12);

  DensityMatrix choi4 = choi_state(identity_process(4));
  RVector ev = choi4.eigenvalues();
  CHECK(ev.maxCoeff() == Catch::Approx(1.0).margin(1e-10));
  CHECK(ev.head(15).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("choi state of the fully depolarizing channel is maximally mixed") {
  DensityMatrix choi = choi_state(fully_depolarizing_process(2));
  CHECK((choi.matrix() - CMatrix::Identity(4, 4) / 4.0).norm() < 1e-12);
}

TEST_CASE("choi state rejects non-trace-preserving input") {
  CMatrix chi = identity_process(2).chi() * 0.7;
  ProcessMatrix scaled(2, chi);
  CHECK_THROWS_AS(choi_state(scaled), ModelError);
}

TEST_CASE("channel builders are trace preserving") {
  GeneratorBasis b2 = su_generators(2);
  GeneratorBasis b4 = su_generators(4);
  CHECK(tp_residual(identity_process(4), b4) < 1e-12);
  CHECK(tp_residual(fully_depolarizing_process(4), b4) < 1e-12);
  CHECK(tp_residual(fully_dephasing_process(4), b4) < 1e-12);
  CHECK(tp_residual(depolarizing_mix(2, 0.3), b2) < 1e-12);
  CHECK(tp_residual(dephasing_mix(4, 0.028), b4) < 1e-12);
}

TEST_CASE("depolarizing and dephasing mixtures hit their closed-form chi00") {
  // identity weight (1 - w) plus w times the fully mixing channel
  CHECK(depolarizing_mix(4, 0.028).chi00() ==
        Catch::Approx(1.0 - 0.028 + 0.028 / 16.0).margin(1e-12));
  CHECK(dephasing_mix(4, 0.028).chi00() == Catch::Approx(0.979).margin(1e-12));
  CHECK(depolarizing_mix(4, 0.02).chi00() == Catch::Approx(0.98125).margin(1e-12));
}

TEST_CASE("apply_channel matches a direct Kraus sum") {
  RngStream rng(15, "core/apply");
  DensityMatrix rho = random_density(rng, 2);

  DensityMatrix out = apply_channel(fully_depolarizing_process(2), rho);
  CMatrix kraus_sum = (rho.matrix() + pauli('x') * rho.matrix() * pauli('x') +
                       pauli('y') * rho.matrix() * pauli('y') +
                       pauli('z') * rho.matrix() * pauli('z')) /
                      4.0;
  CHECK((out.matrix() - kraus_sum).norm() < 1e-12);
  CHECK((out.matrix() - CMatrix::Identity(2, 2) / 2.0).norm() < 1e-12);

  DensityMatrix id_out = apply_channel(identity_process(2), rho);
  CHECK((id_out.matrix() - rho.matrix()).norm() < 1e-12);

  ProcessMatrix lossy(2, identity_process(2).chi() * 0.5);
  CHECK_THROWS_AS(apply_channel(lossy, rho), ModelError);
}

TEST_CASE("unitary processes act by conjugation") {
  RngStream rng(16, "core/unitary");
  CMatrix u = random_unitary(rng, 3);
  DensityMatrix rho = random_density(rng, 3);
  DensityMatrix out = apply_channel(unitary_process(u), rho);
  CHECK((out.matrix() - u * rho.matrix() * u.adjoint()).norm() < 1e-10);
}

TEST_CASE("process fidelity separates identity from mixed channels") {
  ProcessMatrix id = identity_process(4);
  CHECK(process_fidelity(id, id) == Catch::Approx(1.0).margin(1e-10));
  double f = process_fidelity(id, dephasing_mix(4, 0.028));
  CHECK(f < 1.0);
  CHECK(f > 0.9);
}
