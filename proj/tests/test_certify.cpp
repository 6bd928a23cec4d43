#include <catch2/catch_amalgamated.hpp>

#include "smafc/certify.hpp"

#include "helpers.hpp"

#include <cmath>
#include <vector>

using namespace smafc;

namespace {

ProcessMatrix bit_flip(double p) {
  CMatrix x(2, 2);
  x << 0, 1, 1, 0;
  return kraus_process(2, {std::sqrt(1.0 - p) * CMatrix::Identity(2, 2), std::sqrt(p) * x});
}

ProcessMatrix phase_flip(double p) {
  CMatrix z(2, 2);
  z << 1, 0, 0, -1;
  return kraus_process(2, {std::sqrt(1.0 - p) * CMatrix::Identity(2, 2), std::sqrt(p) * z});
}

} // namespace

TEST_CASE("classical storage bound matches hand-computed references") {
  ClassicalBound b = classical_bound_detail(5, 0.38, 0.3);
  CHECK(b.bound == Catch::Approx(0.3954338648445368).margin(1e-12));
  CHECK(b.n_min == 1);
  CHECK(b.gamma == Catch::Approx(0.03857032194934431).margin(1e-12));

  CHECK(classical_bound(2, 0.76, 0.029) == Catch::Approx(0.8183902518181927).margin(1e-12));

  ClassicalBound c = classical_bound_detail(4, 0.98, 0.1);
  CHECK(c.bound == Catch::Approx(0.5892455639534525).margin(1e-12));
  CHECK(c.n_min == 3);

  CHECK(classical_bound_unit_efficiency(2, 0.76) ==
        Catch::Approx(0.698823968333984).margin(1e-12));
}

TEST_CASE("budgeted bound collapses to the lossless form at full efficiency") {
  for (int d : {2, 3, 5})
    for (double mu : {0.1, 0.76, 2.0}) {
      INFO("d " << d << " mu " << mu);
      CHECK(std::abs(classical_bound(d, mu, 1.0) - classical_bound_unit_efficiency(d, mu)) <
            1e-12);
    }
}

TEST_CASE("classical bound responds monotonically to its inputs") {
  // a smaller retrieval budget lets the attacker keep only photon-rich trials
  CHECK(classical_bound(5, 0.38, 0.1) > classical_bound(5, 0.38, 0.5));
  CHECK(classical_bound(5, 0.38, 0.5) > classical_bound(5, 0.38, 0.9));

  // brighter pulses leak more copies
  CHECK(classical_bound(5, 0.1, 0.3) < classical_bound(5, 0.9, 0.3));
  CHECK(classical_bound(5, 0.9, 0.3) < classical_bound(5, 3.0, 0.3));

  // higher-dimensional states are harder to estimate
  CHECK(classical_bound(2, 0.38, 0.3) > classical_bound(3, 0.38, 0.3));
  CHECK(classical_bound(3, 0.38, 0.3) > classical_bound(8, 0.38, 0.3));

  // single-photon limit of the qubit bound
  CHECK(classical_bound_unit_efficiency(2, 1e-9) == Catch::Approx(2.0 / 3.0).margin(1e-6));
}

TEST_CASE("classical bound refuses bad parameters") {
  CHECK_THROWS_AS(classical_bound(1, 0.38, 0.3), ConfigError);
  CHECK_THROWS_AS(classical_bound(5, 0.0, 0.3), ConfigError);
  CHECK_THROWS_AS(classical_bound(5, 0.38, 0.0), ConfigError);
  CHECK_THROWS_AS(classical_bound(5, 0.38, 1.2), ConfigError);
  CHECK_THROWS_AS(classical_bound_unit_efficiency(1, 0.38), ConfigError);
}

TEST_CASE("coherent information reference channels") {
  SECTION("identity keeps the full input entropy") {
    CHECK(coherent_information(identity_process(2), DensityMatrix::maximally_mixed(2)) ==
          Catch::Approx(1.0).margin(1e-9));
    CHECK(coherent_information(identity_process(4), DensityMatrix::maximally_mixed(4)) ==
          Catch::Approx(2.0).margin(1e-9));
  }
  SECTION("pure inputs carry no entanglement with the reference") {
    DensityMatrix pure = DensityMatrix::pure(PureState::basis(2, 0));
    CHECK(coherent_information(identity_process(2), pure) == Catch::Approx(0.0).margin(1e-9));
  }
  SECTION("complete depolarization destroys one full bit beyond the output entropy") {
    CHECK(coherent_information(fully_depolarizing_process(2), DensityMatrix::maximally_mixed(2)) ==
          Catch::Approx(-1.0).margin(1e-9));
  }
  SECTION("phase flips cost exactly their entropy") {
    CHECK(coherent_information(phase_flip(0.1), DensityMatrix::maximally_mixed(2)) ==
          Catch::Approx(0.5310044064107188).margin(1e-9));
  }
  SECTION("dimension and trace-preservation guards") {
    CHECK_THROWS_AS(coherent_information(identity_process(2), DensityMatrix::maximally_mixed(3)),
                    ModelError);
    CMatrix lossy = CMatrix::Zero(4, 4);
    lossy(0, 0) = 0.5;
    CHECK_THROWS_AS(coherent_information(ProcessMatrix(2, lossy), DensityMatrix::maximally_mixed(2)),
                    ModelError);
  }
}

TEST_CASE("one-shot quantum capacity lower bound") {
  SECTION("identity channels reach their dimension") {
    double q2 = q1_lower_bound(identity_process(2));
    CHECK(q2 >= 1.0 - 1e-3);
    CHECK(q2 <= 1.0 + 1e-9);
    double q4 = q1_lower_bound(identity_process(4));
    CHECK(q4 >= 2.0 - 1e-3);
    CHECK(q4 <= 2.0 + 1e-9);
  }
  SECTION("complete depolarization carries nothing") {
    CHECK(q1_lower_bound(fully_depolarizing_process(2)) <= 1e-6);
  }
  SECTION("weak depolarization matches the symmetric-input value") {
    CHECK(q1_lower_bound(depolarizing_mix(2, 0.1)) ==
          Catch::Approx(0.49681626831941617).margin(1e-4));
    CHECK(q1_lower_bound(depolarizing_mix(2, 0.2)) ==
          Catch::Approx(0.15241532017542614).margin(1e-4));
  }
  SECTION("monotone in the depolarizing weight") {
    double a = q1_lower_bound(identity_process(2));
    double b = q1_lower_bound(depolarizing_mix(2, 0.1));
    double c = q1_lower_bound(depolarizing_mix(2, 0.2));
    CHECK(a > b);
    CHECK(b > c);
    CHECK(c >= 0.0);
  }
}

TEST_CASE("discrete channel capacity via alternating prior updates") {
  SECTION("noiseless binary channel") {
    RMatrix p = RMatrix::Identity(2, 2);
    ChannelCapacity cap = blahut_arimoto(p);
    CHECK(cap.bits == Catch::Approx(1.0).margin(1e-9));
    CHECK(cap.priors[0] == Catch::Approx(0.5).margin(1e-6));
  }
  SECTION("binary symmetric channel") {
    RMatrix p(2, 2);
    p << 0.9, 0.1, 0.1, 0.9;
    ChannelCapacity cap = blahut_arimoto(p);
    CHECK(cap.bits == Catch::Approx(0.5310044064107188).margin(1e-9));
    CHECK(cap.priors[0] == Catch::Approx(0.5).margin(1e-6));
  }
  SECTION("asymmetric erase-one-symbol channel") {
    RMatrix p(2, 2);
    p << 1.0, 0.0, 0.5, 0.5;
    ChannelCapacity cap = blahut_arimoto(p);
    CHECK(cap.bits == Catch::Approx(0.32192809488736235).margin(1e-9));
    CHECK(cap.priors.sum() == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("useless channel") {
    RMatrix p = RMatrix::Constant(2, 2, 0.5);
    CHECK(blahut_arimoto(p).bits == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("row validation") {
    RMatrix p(1, 2);
    p << 0.7, 0.2;
    CHECK_THROWS_AS(blahut_arimoto(p), ConfigError);
  }
}

TEST_CASE("accessible information of stored symbols") {
  std::vector<CVector> computational = {PureState::basis(2, 0).amplitudes(),
                                        PureState::basis(2, 1).amplitudes()};

  SECTION("identity channel distinguishes orthogonal symbols perfectly") {
    AccessibleInfoResult res = accessible_information(identity_process(2), computational);
    CHECK(res.bits == Catch::Approx(1.0).margin(1e-6));
  }
  SECTION("bit flips reduce orthogonal symbols to a binary symmetric channel") {
    AccessibleInfoResult res = accessible_information(bit_flip(0.1), computational);
    CHECK(res.bits == Catch::Approx(0.5310044064107188).margin(1e-6));
    CHECK(res.priors[0] == Catch::Approx(0.5).margin(1e-4));
  }
  SECTION("non-orthogonal symbols cannot be read out completely") {
    CVector plus(2);
    plus << M_SQRT1_2, M_SQRT1_2;
    std::vector<CVector> symbols = {PureState::basis(2, 0).amplitudes(), plus};
    AccessibleInfoResult res = accessible_information(identity_process(2), symbols);
    CHECK(res.bits == Catch::Approx(0.39912396330714395).margin(1e-4));
  }
  SECTION("input validation") {
    CHECK_THROWS_AS(accessible_information(identity_process(2), {computational[0]}), ConfigError);
    std::vector<CVector> unnormalized = computational;
    unnormalized[0] *= 0.7;
    CHECK_THROWS_AS(accessible_information(identity_process(2), unnormalized), ConfigError);
  }
}

TEST_CASE("classical capacity lower bound through stored qudits") {
  SECTION("identity reaches the full symbol alphabet") {
    C1Result res = c1_lower_bound(identity_process(4));
    CHECK(res.bits >= 2.0 - 1e-3);
    CHECK(res.bits <= 2.0 + 1e-9);
  }
  SECTION("a dephasing admixture leaves computational symbols untouched") {
    C1Result res = c1_lower_bound(dephasing_mix(4, 0.028));
    CHECK(res.bits >= 1.9);
  }
  SECTION("complete depolarization carries nothing") {
    CHECK(c1_lower_bound(fully_depolarizing_process(2)).bits <= 1e-6);
  }
  SECTION("bit flips are transparent to symbols stored in the flip eigenbasis") {
    AccessibleInfoOptions opts;
    opts.measurement_restarts = 5;
    C1Result res = c1_lower_bound(bit_flip(0.1), opts);
    CHECK(res.bits >= 0.5310044064107188 - 1e-6); // computational symbols always available
    CHECK(res.bits <= 1.0 + 1e-9);
  }
}

TEST_CASE("entanglement dimension certificate") {
  SchmidtCertificate ident = schmidt_certificate(identity_process(4));
  CHECK(ident.fidelity == Catch::Approx(1.0).margin(1e-12));
  CHECK(ident.certified_dimension == 4);

  SchmidtCertificate strong = schmidt_certificate(dephasing_mix(4, 0.1));
  CHECK(strong.fidelity == Catch::Approx(0.925).margin(1e-12));
  CHECK(strong.certified_dimension == 4);

  CHECK(schmidt_certificate(dephasing_mix(4, 0.32)).certified_dimension == 4);
  CHECK(schmidt_certificate(dephasing_mix(4, 0.36)).certified_dimension == 3);

  SchmidtCertificate depol = schmidt_certificate(fully_depolarizing_process(4));
  CHECK(depol.fidelity == Catch::Approx(0.0625).margin(1e-12));
  CHECK(depol.certified_dimension == 1);

  // overlap exactly at a threshold does not certify the next dimension
  SchmidtCertificate dephased = schmidt_certificate(fully_dephasing_process(4));
  CHECK(dephased.fidelity == Catch::Approx(0.25).margin(1e-12));
  CHECK(dephased.certified_dimension == 1);
}
