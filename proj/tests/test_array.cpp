#include "smafc/array.hpp"

#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

using namespace smafc;

namespace {

// Two-channel equal superposition with a relative phase.
PathState two_channel(int a, int b, double phase) {
  CVector c(2);
  c << Complex(M_SQRT1_2, 0.0),
      Complex(M_SQRT1_2 * std::cos(phase), M_SQRT1_2 * std::sin(phase));
  return PathState({a, b}, c);
}

} // namespace

TEST_CASE("channel validation enforces the AOD tone grid") {
  ChannelConfig c;
  c.index = 3;
  c.rf_frequency = rf_grid_base + 2 * rf_grid_step;
  CHECK_NOTHROW(c.validate());

  c.rf_frequency = rf_grid_base + 2.4 * rf_grid_step;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.rf_frequency = rf_grid_base + 11 * rf_grid_step;
  CHECK_THROWS_AS(c.validate(), ConfigError);

  c.rf_frequency = rf_grid_base;
  c.index = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.index = 1;
  c.path_efficiency = 1.2;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("default arrays are valid and span the tone grid") {
  auto array = default_array();
  REQUIRE(array.size() == 11);
  for (const ChannelConfig& c : array) c.validate();
  CHECK(array.front().rf_frequency == Catch::Approx(65.75e6));
  CHECK(array.back().rf_frequency == Catch::Approx(104.25e6));

  // the default comb reproduces the measured echo pair by construction
  CHECK(afc_efficiency(array[0].comb, 0.5e-6) == Catch::Approx(0.392).margin(1e-12));
  CHECK(afc_efficiency(array[0].comb, 1.0e-6) == Catch::Approx(0.313).margin(1e-12));

  auto slow = default_array_200khz();
  CHECK(slow[0].comb.delta == Catch::Approx(200e3));
  CHECK(afc_efficiency(slow[0].comb, 10e-6) == Catch::Approx(0.1525118847828754).epsilon(1e-10));
}

TEST_CASE("path states validate their channel lists") {
  CHECK_NOTHROW(PathState::basis(4));
  CHECK_THROWS_AS(PathState({4, 4}, CVector::Ones(2) / M_SQRT2), ModelError);
  CHECK_THROWS_AS(PathState({5, 4}, CVector::Ones(2) / M_SQRT2), ModelError);
  CHECK_THROWS_AS(PathState({0}, CVector::Ones(1)), ModelError);
  CHECK_THROWS_AS(PathState({4}, CVector::Ones(1) * 0.5), ModelError);
  CHECK(PathState::superposition({4, 5}, CVector::Ones(2)).coefficients.norm() ==
        Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("projection probabilities between path states") {
  PathState plus = two_channel(6, 7, 0.0);
  PathState minus = two_channel(6, 7, M_PI);
  CHECK(encode_measurement(plus, plus) == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(encode_measurement(plus, minus) == Catch::Approx(0.0).margin(1e-15));
  CHECK(encode_measurement(PathState::basis(1), PathState::basis(2)) == 0.0);

  // scanning the read phase traces a full-visibility cosine fringe
  double vmax = 0.0, vmin = 1.0;
  for (int k = 0; k < 64; ++k) {
    double p = encode_measurement(two_channel(6, 7, 2.0 * M_PI * k / 64.0), plus);
    vmax = std::max(vmax, p);
    vmin = std::min(vmin, p);
    CHECK(p == Catch::Approx(std::pow(std::cos(M_PI * k / 64.0), 2)).margin(1e-12));
  }
  CHECK((vmax - vmin) / (vmax + vmin) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("crosstalk ratios in dB") {
  CHECK(optical_crosstalk_db(100.0, 100.0) == Catch::Approx(0.0).margin(1e-12));
  CHECK(optical_crosstalk_db(1e-4 * 5e5, 5e5) == Catch::Approx(-40.0).epsilon(1e-12));
  CHECK(optical_crosstalk_db(1e-2 * 5e5, 5e5) == Catch::Approx(-20.0).epsilon(1e-12));
  CHECK_THROWS_AS(optical_crosstalk_db(10.0, 0.0), ModelError);
}

TEST_CASE("count simulation: empty beam, mean value, determinism") {
  std::vector<TimeBin> bins = {{0.0, 50e-9}};
  RVector p(1);
  p << 0.392;

  CountRecord empty = simulate_counts(bins, p, 1000, 0.0, 7, "empty");
  CHECK(empty.counts[0] == 0);

  const std::int64_t trials = 1'000'000;
  CountRecord rec = simulate_counts(bins, p, trials, 0.14, 42, "echo1");
  double lambda = trials * 0.14 * 0.392;
  CHECK(std::abs(rec.counts[0] - lambda) < 4.0 * std::sqrt(lambda));

  CountRecord replay = simulate_counts(bins, p, trials, 0.14, 42, "echo1");
  CHECK(replay.counts == rec.counts);
  CHECK(replay.seed == rec.seed);
  CountRecord other = simulate_counts(bins, p, trials, 0.14, 43, "echo1");
  CHECK(other.counts != rec.counts);

  RVector bad(1);
  bad << 1.5;
  CHECK_THROWS_AS(simulate_counts(bins, bad, 10, 0.1, 1), ModelError);
}

TEST_CASE("count simulation mean over a hundred seeds") {
  std::vector<TimeBin> bins = {{0.0, 50e-9}, {200e-9, 50e-9}};
  RVector p(2);
  p << 0.3, 0.05;
  const std::int64_t trials = 100'000;
  const double mu = 0.14;
  double sum0 = 0.0, sum1 = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    CountRecord rec = simulate_counts(bins, p, trials, mu, seed, "sweep");
    sum0 += static_cast<double>(rec.counts[0]);
    sum1 += static_cast<double>(rec.counts[1]);
  }
  double l0 = trials * mu * p[0], l1 = trials * mu * p[1];
  CHECK(std::abs(sum0 / 100.0 - l0) < 4.0 * std::sqrt(l0) / 10.0);
  CHECK(std::abs(sum1 / 100.0 - l1) < 4.0 * std::sqrt(l1) / 10.0);
}

TEST_CASE("dark counts add a uniform floor") {
  std::vector<TimeBin> bins = {{0.0, 50e-9}};
  RVector p = RVector::Zero(1);
  CountRecord rec = simulate_counts(bins, p, 1'000'000, 0.5, 9, "dark", 1e-3);
  CHECK(std::abs(rec.counts[0] - 1000.0) < 4.0 * std::sqrt(1000.0));
}

TEST_CASE("gaussian wavepacket binning") {
  double fwhm = 30e-9;
  CHECK(gaussian_bin_fraction(1e-6, fwhm, 1e-6 - 200e-9, 400e-9) == Catch::Approx(1.0).margin(1e-12));
  CHECK(gaussian_bin_fraction(1e-6, fwhm, 1e-6 - 200e-9, 200e-9) == Catch::Approx(0.5).margin(1e-12));
  double parts = 0.0;
  for (int k = 0; k < 8; ++k)
    parts += gaussian_bin_fraction(1e-6, fwhm, 1e-6 - 200e-9 + k * 50e-9, 50e-9);
  CHECK(parts == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("single-channel storage and natural recall") {
  auto array = default_array();
  CrosstalkModel xtalk = default_crosstalk();

  RetrievalOutcome out = store_and_retrieve(PathState::basis(4), array, xtalk);
  CHECK(out.emission_time == Catch::Approx(0.5e-6));
  CHECK(out.echo_order == 1);
  CHECK(encode_measurement(PathState::basis(4), out.state) == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(out.raw_efficiency == Catch::Approx(0.392 * 0.34).epsilon(1e-12));
  CHECK(out.channel_efficiency[0] == Catch::Approx(0.392 * 0.34).epsilon(1e-12));

  // on-channel detection carries the full intensity, neighbors 1e-4 of it
  CHECK(out.detection_probability[3] == Catch::Approx(0.392 * 0.34).epsilon(1e-9));
  CHECK(out.detection_probability[4] == Catch::Approx(1e-4 * 0.392 * 0.34).epsilon(1e-9));
}

TEST_CASE("on-demand recall at the second echo") {
  auto array = default_array();
  CrosstalkModel xtalk = default_crosstalk();
  std::map<int, StarkControl> controls;
  controls[4] = recall_control(array[3].stark, array[3].comb.delta, 2);

  RetrievalOutcome out = store_and_retrieve(PathState::basis(4), array, xtalk, controls);
  CHECK(out.emission_time == Catch::Approx(1.0e-6));
  CHECK(out.echo_order == 2);
  // the completed pulse pair leaves no Stark phase behind
  CHECK(out.raw_efficiency == Catch::Approx(0.313 * 0.34).epsilon(1e-12));
}

TEST_CASE("balanced superpositions survive storage exactly") {
  auto array = default_array();
  CrosstalkModel xtalk = default_crosstalk();
  std::map<int, StarkControl> controls;
  for (int ch : {6, 7}) controls[ch] = recall_control(array[0].stark, 2.0e6, 2);

  PathState in = two_channel(6, 7, M_PI / 2.0);
  RetrievalOutcome out = store_and_retrieve(in, array, xtalk, controls);
  CHECK(encode_measurement(in, out.state) == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(out.raw_efficiency == Catch::Approx(0.313 * 0.34).epsilon(1e-12));
}

TEST_CASE("five-channel superposition with an efficiency spread") {
  auto array = default_array();
  CrosstalkModel xtalk = default_crosstalk();
  std::map<int, StarkControl> controls;
  double eta2 = afc_efficiency(array[0].comb, 1.0e-6);
  // pin per-channel efficiencies to 30% +- 1 point
  std::vector<double> targets = {0.29, 0.295, 0.30, 0.305, 0.31};
  for (int k = 0; k < 5; ++k) {
    array[4 + k].path_efficiency = targets[static_cast<std::size_t>(k)] / eta2;
    controls[5 + k] = recall_control(array[0].stark, 2.0e6, 2);
  }

  CVector amp = CVector::Constant(5, Complex(1.0 / std::sqrt(5.0), 0.0));
  PathState psi1({5, 6, 7, 8, 9}, amp);
  RetrievalOutcome out = store_and_retrieve(psi1, array, xtalk, controls);

  double mean = std::accumulate(targets.begin(), targets.end(), 0.0) / 5.0;
  CHECK(out.raw_efficiency == Catch::Approx(mean).epsilon(1e-12));
  CHECK(out.raw_efficiency >= 0.29);
  CHECK(out.raw_efficiency <= 0.31);
  CHECK(encode_measurement(psi1, out.state) >= 0.99);
  for (int k = 0; k < 5; ++k)
    CHECK(out.channel_efficiency[static_cast<std::size_t>(k)] ==
          Catch::Approx(targets[static_cast<std::size_t>(k)]).epsilon(1e-12));
}

TEST_CASE("a lone neighbor pulse degrades the echo by less than one percent") {
  auto array = default_array();
  CrosstalkModel xtalk = default_crosstalk();
  double tau = suppression_pulse_duration(array[0].stark);

  std::map<int, StarkControl> quiet;
  quiet[5] = recall_control(array[4].stark, 2.0e6, 2);
  double baseline = store_and_retrieve(PathState::basis(5), array, xtalk, quiet).raw_efficiency;

  std::map<int, StarkControl> noisy = quiet;
  noisy[6] = array[5].stark;
  noisy[6].pulses = {{100e-9, tau, +1}}; // suppression with no recall on the neighbor
  double perturbed = store_and_retrieve(PathState::basis(5), array, xtalk, noisy).raw_efficiency;

  double degradation = 1.0 - perturbed / baseline;
  CHECK(degradation == Catch::Approx(0.007444494559460169).epsilon(1e-9));
  CHECK(degradation < 0.01);
  CHECK(degradation > 0.0);
}

TEST_CASE("a completed neighbor pulse pair leaves no trace") {
  auto array = default_array();
  CrosstalkModel xtalk = default_crosstalk();

  std::map<int, StarkControl> quiet;
  quiet[5] = recall_control(array[4].stark, 2.0e6, 2);
  double baseline = store_and_retrieve(PathState::basis(5), array, xtalk, quiet).raw_efficiency;

  std::map<int, StarkControl> paired = quiet;
  paired[6] = recall_control(array[5].stark, 2.0e6, 2); // recalls at the same time
  double with_pair = store_and_retrieve(PathState::basis(5), array, xtalk, paired).raw_efficiency;
  CHECK(with_pair == Catch::Approx(baseline).epsilon(1e-12));
}

TEST_CASE("optical leakage scales with the isolation and vanishes at the floor") {
  auto array = default_array();
  CrosstalkModel strong = default_crosstalk();
  CrosstalkModel weak = default_crosstalk();
  weak.optical_db = RMatrix::Constant(11, 11, -60.0);
  weak.optical_db.diagonal().setZero();
  CrosstalkModel off = default_crosstalk();
  off.optical_db = RMatrix::Constant(11, 11, -3000.0);
  off.optical_db.diagonal().setZero();

  PathState in = PathState::basis(6);
  double s = store_and_retrieve(in, array, strong).detection_probability[0];
  double w = store_and_retrieve(in, array, weak).detection_probability[0];
  RVector clean = store_and_retrieve(in, array, off).detection_probability;

  CHECK(s > w);
  CHECK(w > 0.0);
  CHECK(clean[0] < 1e-250); // numerically indistinguishable from no crosstalk
  CHECK(clean[5] == Catch::Approx(0.392 * 0.34).epsilon(1e-12));
}

TEST_CASE("coherent leakage interferes, incoherent leakage adds") {
  auto array = default_array();
  CrosstalkModel inc = default_crosstalk();
  CrosstalkModel coh = default_crosstalk();
  coh.coherent_optical = true;

  PathState aligned = two_channel(6, 7, 0.0);
  double p_inc = store_and_retrieve(aligned, array, inc).detection_probability[4];
  double p_coh = store_and_retrieve(aligned, array, coh).detection_probability[4];
  CHECK(p_coh > p_inc * 1.5); // in-phase amplitudes leak constructively

  PathState opposed = two_channel(6, 7, M_PI);
  double q_coh = store_and_retrieve(opposed, array, coh).detection_probability[4];
  CHECK(q_coh < p_inc * 0.5); // opposite phases cancel at the neighbor

  // a single source leaks identically either way
  double b_inc = store_and_retrieve(PathState::basis(6), array, inc).detection_probability[4];
  double b_coh = store_and_retrieve(PathState::basis(6), array, coh).detection_probability[4];
  CHECK(b_inc == Catch::Approx(b_coh).epsilon(1e-12));
}

TEST_CASE("retrieval rejects inconsistent configurations") {
  auto array = default_array();
  CrosstalkModel xtalk = default_crosstalk();

  CHECK_THROWS_AS(store_and_retrieve(PathState::basis(4), {}, xtalk), ConfigError);

  // comb spacing differs across superposed channels
  auto mixed = array;
  mixed[6].comb.delta = 1.0e6;
  CHECK_THROWS_AS(store_and_retrieve(two_channel(6, 7, 0.0), mixed, xtalk), ModelError);

  // channels recalled at different echo orders cannot carry one superposition
  std::map<int, StarkControl> split;
  split[6] = recall_control(array[5].stark, 2.0e6, 2);
  split[7] = recall_control(array[6].stark, 2.0e6, 3);
  CHECK_THROWS_AS(store_and_retrieve(two_channel(6, 7, 0.0), array, xtalk, split), ModelError);

  // a suppressed channel never releases its share
  std::map<int, StarkControl> held;
  held[6] = recall_control(array[5].stark, 2.0e6, 2);
  held[7] = array[6].stark;
  held[7].pulses = {{100e-9, suppression_pulse_duration(array[6].stark), +1}};
  CHECK_THROWS_AS(store_and_retrieve(two_channel(6, 7, 0.0), array, xtalk, held), ModelError);

  // state references a channel the array does not have
  std::vector<ChannelConfig> small(array.begin(), array.begin() + 3);
  CHECK_THROWS_AS(store_and_retrieve(PathState::basis(9), small, default_crosstalk(3)), ModelError);

  // crosstalk matrix shape must match
  CHECK_THROWS_AS(store_and_retrieve(PathState::basis(1), small, default_crosstalk(11)),
                  ConfigError);
}
