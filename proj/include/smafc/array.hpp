#pragma once

// The multichannel memory: a row of waveguide channels addressed by AOD tone,
// each with its own comb and electrode, storing path-encoded superpositions.
// Crosstalk enters twice: optically as count leakage between waveguide
// outputs, electrically as a fraction of a neighbor's control field reaching
// a channel's ions and advancing their Stark phase.

#include "smafc/afc.hpp"
#include "smafc/core.hpp"
#include "smafc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace smafc {

inline constexpr double rf_grid_base = 65.75e6; // [Hz] first AOD tone
inline constexpr double rf_grid_step = 3.85e6;  // [Hz] tone spacing
inline constexpr int max_channels = 11;

struct ChannelConfig {
  int index = 1;                      // position in the array, 1-based
  double rf_frequency = rf_grid_base; // AOD tone addressing this channel [Hz]
  CombConfig comb;
  StarkControl stark;
  double path_efficiency = 0.34; // end-to-end optical throughput

  void validate() const {
    if (index < 1 || index > max_channels) throw ConfigError("channel: index out of range");
    double k = (rf_frequency - rf_grid_base) / rf_grid_step;
    double k_round = std::round(k);
    if (k_round < 0 || k_round > max_channels - 1 || std::abs(k - k_round) > 1e-6)
      throw ConfigError("channel: rf frequency off the AOD tone grid");
    if (path_efficiency < 0.0 || path_efficiency > 1.0)
      throw ConfigError("channel: path efficiency must lie in [0, 1]");
    comb.validate();
    stark.validate();
  }
};

struct CrosstalkModel {
  RMatrix optical_db;                      // entry (i, j): input channel i leaking to output j [dB]
  double electrical_field_fraction = 0.05; // neighbor field seen by a channel's ions
  bool coherent_optical = false;           // mix amplitudes instead of counts

  void validate(int n_channels) const {
    if (optical_db.rows() != n_channels || optical_db.cols() != n_channels)
      throw ConfigError("crosstalk: optical matrix shape must match the channel count");
    for (int i = 0; i < n_channels; ++i) {
      if (std::abs(optical_db(i, i)) > 1e-12)
        throw ConfigError("crosstalk: optical matrix diagonal must be 0 dB");
      for (int j = 0; j < n_channels; ++j)
        if (i != j && optical_db(i, j) > 0.0)
          throw ConfigError("crosstalk: off-diagonal leakage cannot exceed 0 dB");
    }
    if (electrical_field_fraction < 0.0 || electrical_field_fraction > 1.0)
      throw ConfigError("crosstalk: electrical field fraction must lie in [0, 1]");
  }
};

// Path-encoded superposition over a subset of channels.
struct PathState {
  std::vector<int> channels; // 1-based, distinct, ascending
  CVector coefficients;      // unit norm, aligned with channels

  PathState() = default;
  PathState(std::vector<int> ch, CVector coeff)
      : channels(std::move(ch)), coefficients(std::move(coeff)) {
    validate();
  }

  static PathState basis(int channel) {
    CVector c(1);
    c << Complex(1.0, 0.0);
    return PathState({channel}, c);
  }

  static PathState superposition(std::vector<int> ch, CVector coeff) {
    double n = coeff.norm();
    if (!(n > 0.0)) throw ModelError("path state: zero vector");
    return PathState(std::move(ch), coeff / n);
  }

  void validate() const {
    if (channels.empty()) throw ModelError("path state: empty channel list");
    if (static_cast<Eigen::Index>(channels.size()) != coefficients.size())
      throw ModelError("path state: channel and coefficient counts differ");
    for (std::size_t i = 0; i < channels.size(); ++i) {
      if (channels[i] < 1 || channels[i] > max_channels)
        throw ModelError("path state: channel index out of range");
      if (i > 0 && channels[i] <= channels[i - 1])
        throw ModelError("path state: channels must be distinct and ascending");
    }
    if (std::abs(coefficients.norm() - 1.0) > tol::norm_one)
      throw ModelError("path state: coefficients must have unit norm");
  }

  Complex coefficient_for(int channel) const {
    for (std::size_t i = 0; i < channels.size(); ++i)
      if (channels[i] == channel) return coefficients[static_cast<Eigen::Index>(i)];
    return Complex(0.0, 0.0);
  }
};

// Projection probability of one path state onto another; channels missing
// from either state contribute amplitude zero.
inline double encode_measurement(const PathState& setting, const PathState& output) {
  setting.validate();
  output.validate();
  Complex overlap(0.0, 0.0);
  for (std::size_t i = 0; i < setting.channels.size(); ++i)
    overlap += std::conj(setting.coefficients[static_cast<Eigen::Index>(i)]) *
               output.coefficient_for(setting.channels[i]);
  return std::norm(overlap);
}

// Count-ratio crosstalk in dB between an addressed channel and a neighbor.
inline double optical_crosstalk_db(double counts_ij, double counts_ii) {
  if (!(counts_ii > 0.0)) throw ModelError("optical_crosstalk_db: on-channel counts must be positive");
  if (counts_ij < 0.0) throw ModelError("optical_crosstalk_db: counts cannot be negative");
  return 10.0 * std::log10(counts_ij / counts_ii);
}

struct TimeBin {
  double start = 0.0; // [s]
  double width = 0.0; // [s]
};

// One detection histogram. Counts are raw photon detections, so a bin may
// exceed the trial count when the mean photon number is large.
struct CountRecord {
  std::string setting_id;
  std::vector<TimeBin> bins;
  std::vector<std::int64_t> counts;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
};

// Poisson photon statistics: each trial carries Poisson(mu) photons and each
// photon lands in bin b with probability p_b, so the per-bin totals are
// independent Poisson variates with mean trials * (mu * p_b + dark_rate).
inline CountRecord simulate_counts(const std::vector<TimeBin>& bins, const RVector& probabilities,
                                   std::int64_t trials, double mean_photon, std::uint64_t seed,
                                   const std::string& setting_id = "",
                                   double dark_rate = 0.0) {
  if (static_cast<Eigen::Index>(bins.size()) != probabilities.size())
    throw ModelError("simulate_counts: bin and probability counts differ");
  if (trials <= 0) throw ModelError("simulate_counts: trials must be positive");
  if (mean_photon < 0.0) throw ModelError("simulate_counts: mean photon number cannot be negative");
  if (dark_rate < 0.0) throw ModelError("simulate_counts: dark rate cannot be negative");
  for (Eigen::Index b = 0; b < probabilities.size(); ++b)
    if (probabilities[b] < 0.0 || probabilities[b] > 1.0 + 1e-12)
      throw ModelError("simulate_counts: bin probability outside [0, 1]");

  RngStream rng(seed, "counts/" + setting_id);
  CountRecord rec;
  rec.setting_id = setting_id;
  rec.bins = bins;
  rec.trials = trials;
  rec.seed = seed;
  rec.counts.resize(bins.size());
  for (std::size_t b = 0; b < bins.size(); ++b) {
    double lambda = static_cast<double>(trials) *
                    (mean_photon * probabilities[static_cast<Eigen::Index>(b)] + dark_rate);
    rec.counts[b] = static_cast<std::int64_t>(rng.poisson(lambda));
  }
  return rec;
}

// Fraction of a Gaussian wavepacket of the given FWHM, centered at `center`,
// that falls inside [start, start + width]. Used to bin echo intensity into
// histogram slots.
inline double gaussian_bin_fraction(double center, double fwhm, double start, double width) {
  if (!(fwhm > 0.0)) throw ModelError("gaussian_bin_fraction: FWHM must be positive");
  if (width < 0.0) throw ModelError("gaussian_bin_fraction: width cannot be negative");
  double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  double inv = 1.0 / (sigma * std::sqrt(2.0));
  return 0.5 * (std::erf((start + width - center) * inv) - std::erf((start - center) * inv));
}

struct RetrievalOutcome {
  PathState state;                        // renormalized retrieved superposition
  double emission_time = 0.0;             // [s]
  int echo_order = 0;
  std::vector<double> channel_efficiency; // aligned with the input channels
  double raw_efficiency = 0.0;            // amplitude-weighted mean of channel efficiencies
  RVector detection_probability;          // per array output after optical leakage
};

namespace detail {

inline const ChannelConfig& channel_by_index(const std::vector<ChannelConfig>& array, int index) {
  for (const ChannelConfig& c : array)
    if (c.index == index) return c;
  throw ModelError("store_and_retrieve: state references a channel missing from the array");
}

inline const StarkControl& control_for(const ChannelConfig& cfg,
                                       const std::map<int, StarkControl>& controls) {
  auto it = controls.find(cfg.index);
  return it == controls.end() ? cfg.stark : it->second;
}

} // namespace detail

// End-to-end storage and on-demand recall of a path superposition. Every
// superposed channel must emit at one common time; per-channel amplitudes
// pick up the comb efficiency, the optical path, and the Stark phase left by
// the channel's own pulses plus the leaked fraction of its neighbors'.
inline RetrievalOutcome store_and_retrieve(const PathState& input,
                                           const std::vector<ChannelConfig>& array,
                                           const CrosstalkModel& xtalk,
                                           const std::map<int, StarkControl>& controls = {}) {
  input.validate();
  if (array.empty()) throw ConfigError("store_and_retrieve: empty array");
  for (const ChannelConfig& c : array) c.validate();
  for (std::size_t i = 1; i < array.size(); ++i)
    if (array[i].index <= array[i - 1].index)
      throw ConfigError("store_and_retrieve: array channels must be distinct and ascending");
  xtalk.validate(static_cast<int>(array.size()));

  double delta = detail::channel_by_index(array, input.channels.front()).comb.delta;
  Emission common{};
  bool first = true;
  for (int ch : input.channels) {
    const ChannelConfig& cfg = detail::channel_by_index(array, ch);
    if (std::abs(cfg.comb.delta - delta) > 1e-9 * delta)
      throw ModelError("store_and_retrieve: superposed channels must share a comb spacing");
    Emission em = emission_time(cfg.comb, detail::control_for(cfg, controls));
    if (!em.emitted)
      throw ModelError("store_and_retrieve: a superposed channel never re-emits");
    if (first) {
      common = em;
      first = false;
    } else if (em.order != common.order ||
               std::abs(em.time - common.time) > 1e-12 * common.time) {
      throw ModelError("store_and_retrieve: superposed channels emit at different times");
    }
  }

  const auto n = static_cast<Eigen::Index>(array.size());
  // Signed field-on time each array channel has accumulated by the emission,
  // own electrode plus the leaked fraction from adjacent electrodes.
  std::vector<double> own_area(array.size());
  for (std::size_t i = 0; i < array.size(); ++i)
    own_area[i] = accumulated_pulse_area(detail::control_for(array[i], controls).pulses,
                                         common.time);

  CVector retrieved = CVector::Zero(n);
  std::vector<double> channel_eff(input.channels.size(), 0.0);
  double raw = 0.0;
  for (std::size_t k = 0; k < input.channels.size(); ++k) {
    int ch = input.channels[k];
    std::size_t pos = 0;
    while (array[pos].index != ch) ++pos;
    const ChannelConfig& cfg = array[pos];

    double tau_eff = own_area[pos];
    if (pos > 0 && array[pos - 1].index == ch - 1)
      tau_eff += xtalk.electrical_field_fraction * own_area[pos - 1];
    if (pos + 1 < array.size() && array[pos + 1].index == ch + 1)
      tau_eff += xtalk.electrical_field_fraction * own_area[pos + 1];

    double ctrl = echo_amplitude_factor(detail::control_for(cfg, controls), tau_eff);
    double amp = std::sqrt(afc_efficiency(cfg.comb, common.time) * cfg.path_efficiency) * ctrl;
    channel_eff[k] = amp * amp;
    raw += std::norm(input.coefficients[static_cast<Eigen::Index>(k)]) * amp * amp;
    retrieved[static_cast<Eigen::Index>(pos)] =
        input.coefficients[static_cast<Eigen::Index>(k)] * amp;
  }
  if (!(retrieved.norm() > 0.0))
    throw ModelError("store_and_retrieve: retrieval amplitude vanished on every channel");

  RMatrix leak = RMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      leak(i, j) = std::pow(10.0, xtalk.optical_db(i, j) / 10.0);

  RetrievalOutcome out;
  out.emission_time = common.time;
  out.echo_order = common.order;
  out.channel_efficiency = std::move(channel_eff);
  out.raw_efficiency = raw;

  if (xtalk.coherent_optical) {
    CVector mixed = CVector::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        mixed[j] += std::sqrt(leak(i, j)) * retrieved[i];
    out.detection_probability = mixed.cwiseAbs2();
    std::vector<int> all_ch;
    CVector coeff(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      all_ch.push_back(array[static_cast<std::size_t>(j)].index);
      coeff[j] = mixed[j];
    }
    out.state = PathState::superposition(std::move(all_ch), coeff);
  } else {
    RVector intensity = retrieved.cwiseAbs2();
    out.detection_probability = leak.transpose() * intensity;
    out.state = PathState::superposition(input.channels, [&] {
      CVector c(static_cast<Eigen::Index>(input.channels.size()));
      for (std::size_t k = 0; k < input.channels.size(); ++k) {
        std::size_t pos = 0;
        while (array[pos].index != input.channels[k]) ++pos;
        c[static_cast<Eigen::Index>(k)] = retrieved[static_cast<Eigen::Index>(pos)];
      }
      return c;
    }());
  }
  return out;
}

// Control template with the standard suppression/recall pair for echo order n:
// both pulses at the midpoints of their windows, quarter-period duration.
inline StarkControl recall_control(const StarkControl& base, double delta, int order) {
  if (order < 1) throw ConfigError("recall_control: echo order must be at least 1");
  StarkControl ctrl = base;
  double window = 1.0 / delta;
  double tau = suppression_pulse_duration(ctrl);
  if (tau * 2.0 > window)
    throw ConfigError("recall_control: suppression pulse does not fit the comb period");
  ctrl.pulses.clear();
  ctrl.pulses.push_back({0.5 * window - 0.5 * tau, tau, +1});
  ctrl.pulses.push_back({(order - 0.5) * window - 0.5 * tau, tau, -1});
  return ctrl;
}

// The demonstrated device: eleven channels on the AOD tone grid with a 2 MHz
// comb whose depth and decoherence rate are pinned by the measured first and
// second echo efficiencies.
inline std::vector<ChannelConfig> default_array() {
  CombConfig tmpl;
  tmpl.delta = 2.0e6;
  tmpl.finesse = 8.7;
  tmpl.peak_depth = 10.6;
  tmpl.gamma_tilde = 0.0;
  CombConfig comb = fit_comb_to_echoes(tmpl, 0.392, 0.5e-6, 0.313, 1.0e-6).comb;

  std::vector<ChannelConfig> array;
  for (int k = 0; k < max_channels; ++k) {
    ChannelConfig c;
    c.index = k + 1;
    c.rf_frequency = rf_grid_base + k * rf_grid_step;
    c.comb = comb;
    c.path_efficiency = 0.34;
    array.push_back(c);
  }
  return array;
}

// The long-storage configuration: a 200 kHz comb traded for lower efficiency
// but a 5 us recall grid, as used for random-access storage.
inline std::vector<ChannelConfig> default_array_200khz() {
  std::vector<ChannelConfig> array = default_array();
  for (ChannelConfig& c : array) {
    c.comb.delta = 200.0e3;
    c.comb.finesse = 9.8;
    c.comb.peak_depth = 5.7;
    c.comb.gamma_tilde = 5.5e4;
  }
  return array;
}

inline CrosstalkModel default_crosstalk(int n_channels = max_channels) {
  CrosstalkModel x;
  x.optical_db = RMatrix::Constant(n_channels, n_channels, -40.0);
  x.optical_db.diagonal().setZero();
  x.electrical_field_fraction = 0.05;
  return x;
}

} // namespace smafc
