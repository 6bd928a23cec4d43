#pragma once

// Atomic frequency comb storage with Stark-shift control.
//
// A comb of absorption teeth with spacing delta rephases an absorbed photon
// into an echo at multiples of 1/delta. A DC electric field applied across
// the storage crystal splits the comb into two sub-ensembles whose Stark
// shifts have opposite sign; holding the field for a quarter of the Stark
// period moves the sub-ensembles out of phase and suppresses the echo, and a
// second, opposite-polarity hold restores the phase so the echo re-emerges
// one comb period later per elapsed window. All quantities are SI.

#include "smafc/core.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace smafc {

struct CombConfig {
  double delta = 200.0e3;      // tooth spacing [Hz]
  double finesse = 9.8;        // spacing over tooth FWHM
  double peak_depth = 5.7;     // optical depth at a tooth centre
  double gamma_tilde = 5.5e4;  // effective decoherence rate [1/s]

  // Absorption-weighted depth of a Gaussian-tooth comb. The echo strength
  // depends on the comb only through this combination.
  double effective_depth() const {
    return peak_depth / finesse * std::sqrt(M_PI / (4.0 * std::log(2.0)));
  }

  void validate() const {
    if (!(delta > 0.0)) throw ConfigError("comb: tooth spacing must be positive");
    if (!(finesse > 1.0)) throw ConfigError("comb: finesse must exceed 1");
    if (peak_depth < 0.0) throw ConfigError("comb: peak depth must be nonnegative");
    if (gamma_tilde < 0.0) throw ConfigError("comb: decoherence rate must be nonnegative");
  }
};

// First-order echo efficiency after a storage time t.
inline double afc_efficiency(const CombConfig& comb, double storage_time) {
  comb.validate();
  if (storage_time < 0.0) throw ModelError("afc_efficiency: negative storage time");
  double dt = comb.effective_depth();
  double g = storage_time * comb.gamma_tilde;
  return dt * dt * std::exp(-dt) * std::exp(-g * g);
}

// Decoherence rate from a pair of echo efficiencies at two storage times.
// Only the ratio enters, so the comb shape cancels out.
inline double fit_gamma_tilde(double eta1, double t1, double eta2, double t2) {
  if (!(eta1 > 0.0) || !(eta2 > 0.0)) throw ModelError("fit_gamma_tilde: efficiencies must be positive");
  if (!(t2 > t1) || t1 < 0.0) throw ModelError("fit_gamma_tilde: storage times must satisfy 0 <= t1 < t2");
  if (!(eta1 > eta2)) throw ModelError("fit_gamma_tilde: efficiency must decay with storage time");
  return std::sqrt(std::log(eta1 / eta2) / (t2 * t2 - t1 * t1));
}

struct CombFit {
  CombConfig comb;
  double residual = 0.0; // worst absolute efficiency mismatch at the two anchors
};

// Joint fit of (gamma_tilde, peak_depth) to two measured echoes, keeping the
// template's spacing and finesse. The ratio of the echoes pins gamma_tilde
// and the absolute level then pins the depth; with two unknowns and two
// measurements the fit is exact whenever the level is reachable, i.e. at or
// below the d~ = 2 maximum of d~^2 exp(-d~).
inline CombFit fit_comb_to_echoes(const CombConfig& tmpl, double eta1, double t1,
                                  double eta2, double t2) {
  tmpl.validate();
  double gamma = fit_gamma_tilde(eta1, t1, eta2, t2);
  double level = eta1 * std::exp(t1 * t1 * gamma * gamma); // d~^2 exp(-d~) at t = 0

  const double peak = 4.0 * std::exp(-2.0);
  if (level > peak * (1.0 + 1e-12))
    throw ModelError("fit_comb_to_echoes: echo level exceeds the single-pass maximum");
  level = std::min(level, peak);

  auto shape = [](double dt) { return dt * dt * std::exp(-dt); };
  bool ascending = tmpl.effective_depth() <= 2.0;
  double lo = ascending ? 1e-9 : 2.0;
  double hi = ascending ? 2.0 : 200.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    bool below = shape(mid) < level;
    if (below == ascending) lo = mid; else hi = mid;
  }
  double dt = 0.5 * (lo + hi);

  CombFit fit;
  fit.comb = tmpl;
  fit.comb.gamma_tilde = gamma;
  fit.comb.peak_depth = dt * tmpl.finesse * std::sqrt(4.0 * std::log(2.0) / M_PI);
  fit.residual = std::max(std::abs(afc_efficiency(fit.comb, t1) - eta1),
                          std::abs(afc_efficiency(fit.comb, t2) - eta2));
  return fit;
}

struct StarkPulse {
  double start = 0.0;    // field switch-on [s], measured from absorption
  double duration = 0.0; // hold time [s]
  int polarity = +1;     // field sign, +1 or -1

  double end() const { return start + duration; }

  void validate() const {
    if (start < 0.0) throw ConfigError("stark pulse: start must be nonnegative");
    if (!(duration > 0.0)) throw ConfigError("stark pulse: duration must be positive");
    if (polarity != 1 && polarity != -1) throw ConfigError("stark pulse: polarity must be +1 or -1");
  }
};

struct StarkControl {
  double stark_coefficient = 28.0e3; // differential Stark shift [Hz per V/cm]
  double field = 176.8;              // applied field magnitude [V/cm]
  double tau_inh = 70.1e-9;          // dephasing time of the Stark-shift spread [s]
  std::vector<StarkPulse> pulses;    // ordered by start time

  void validate() const {
    if (!(stark_coefficient > 0.0)) throw ConfigError("stark: coefficient must be positive");
    if (!(field > 0.0)) throw ConfigError("stark: field must be positive");
    if (!(tau_inh > 0.0)) throw ConfigError("stark: tau_inh must be positive");
    for (const StarkPulse& p : pulses) p.validate();
    for (std::size_t i = 1; i < pulses.size(); ++i)
      if (pulses[i].start < pulses[i - 1].end())
        throw ConfigError("stark: pulses must not overlap");
  }
};

// Splitting between the two Stark sub-ensembles while the field is on.
inline double stark_frequency(const StarkControl& c) {
  return c.stark_coefficient * c.field;
}

// Hold time that moves the sub-ensembles a quarter period apart, the point
// of maximal echo suppression.
inline double suppression_pulse_duration(const StarkControl& c) {
  return 1.0 / (4.0 * stark_frequency(c));
}

// Signed field-on time accumulated by `time`. A pulse still in progress
// contributes its elapsed part.
inline double accumulated_pulse_area(const std::vector<StarkPulse>& pulses, double time) {
  double area = 0.0;
  for (const StarkPulse& p : pulses)
    if (p.start < time)
      area += p.polarity * (std::min(time, p.end()) - p.start);
  return area;
}

// Echo amplitude left after the sub-ensembles have accumulated a net signed
// field-on time tau_eff. The cosine is the two-ensemble interference and the
// Gaussian is the spread of Stark shifts across the ensemble; a cancelled
// pulse pair (tau_eff = 0) leaves the echo untouched.
inline double echo_amplitude_factor(const StarkControl& c, double tau_eff) {
  double frac = tau_eff / c.tau_inh;
  return std::exp(-0.5 * frac * frac) * std::cos(2.0 * M_PI * stark_frequency(c) * tau_eff);
}

struct Emission {
  bool emitted = false;
  int order = 0;     // echo emerges at order / delta
  double time = 0.0; // [s]
};

// Where the echo comes out for a given control sequence. No pulses means the
// natural first-order echo; one suppression pulse holds the excitation; a
// pulse pair of opposite polarity releases it at the end of the window that
// contains the second pulse. Anything else is rejected rather than modelled.
inline Emission emission_time(const CombConfig& comb, const StarkControl& control) {
  comb.validate();
  control.validate();
  const double window = 1.0 / comb.delta;
  const auto& pulses = control.pulses;

  Emission em;
  if (pulses.empty()) {
    em.emitted = true;
    em.order = 1;
    em.time = 1.0 / comb.delta;
    return em;
  }
  if (pulses.size() > 2)
    throw ModelError("emission_time: control sequences use at most two pulses");

  const StarkPulse& first = pulses.front();
  if (first.end() > window * (1.0 + 1e-12))
    throw ModelError("emission_time: suppression pulse must finish inside the first comb period");

  if (pulses.size() == 1) return em; // held in the medium, nothing emitted

  const StarkPulse& second = pulses.back();
  if (second.polarity == first.polarity)
    throw ModelError("emission_time: recall pulse must have opposite polarity");

  // The recall pulse selects the echo order by the window it sits in.
  int order = static_cast<int>(std::floor(second.start / window * (1.0 + 1e-12))) + 1;
  double win_lo = (order - 1) * window;
  double win_hi = order * window;
  if (second.start < win_lo - 1e-12 * window || second.end() > win_hi * (1.0 + 1e-12))
    throw ModelError("emission_time: recall pulse must fit inside a single comb period");

  em.emitted = true;
  em.order = order;
  em.time = order / comb.delta; // echo lands exactly on the comb-period grid
  return em;
}

// Early/late amplitude pair of a time-bin qubit, unit norm.
struct TimeBinState {
  Complex alpha{1.0, 0.0};          // early-bin amplitude
  Complex beta{0.0, 0.0};           // late-bin amplitude
  double bin_separation = 200.0e-9; // [s]

  TimeBinState() = default;
  TimeBinState(Complex a, Complex b, double separation = 200.0e-9)
      : alpha(a), beta(b), bin_separation(separation) {
    double n = std::norm(a) + std::norm(b);
    if (std::abs(n - 1.0) > tol::norm_one)
      throw ModelError("time-bin state: amplitudes must have unit norm");
    if (!(bin_separation > 0.0)) throw ModelError("time-bin state: bin separation must be positive");
  }

  CVector vector() const {
    CVector v(2);
    v << alpha, beta;
    return v;
  }
};

// Readout interferometer: one arm delays by exactly the bin separation, so
// the late bin of the direct arm overlaps the early bin of the delayed arm in
// a middle time slot where they interfere.
struct AnalyzerConfig {
  double storage_time = 200.0e-9; // delay-arm excess path [s], equal to the bin separation
  double p0 = 0.3;                // direct-arm intensity transmission
  double p1 = 0.3;                // delay-arm intensity transmission
  double detuning = 0.0;          // frequency offset between the arms [Hz]

  void validate() const {
    if (!(storage_time > 0.0)) throw ConfigError("analyzer: delay must be positive");
    if (p0 < 0.0 || p1 < 0.0 || p0 + p1 > 1.0 + 1e-12)
      throw ConfigError("analyzer: arm transmissions must be nonnegative with p0 + p1 <= 1");
  }
};

struct AnalyzerOutput {
  double early = 0.0;  // detection probability in the leading slot
  double middle = 0.0; // interference slot
  double late = 0.0;   // trailing slot

  double total() const { return early + middle + late; }
};

// Detection probabilities in the three output slots: direct-arm early bin,
// the interfering overlap, and delay-arm late bin. The slots need not sum to
// one because the complementary interferometer port is not monitored. The
// delay must equal the qubit's bin separation or the wavepackets miss each
// other and the middle slot means nothing.
inline AnalyzerOutput analyzer_project(const AnalyzerConfig& cfg, const TimeBinState& state,
                                       double extra_phase = 0.0) {
  cfg.validate();
  if (std::abs(cfg.storage_time - state.bin_separation) > 1e-12 * cfg.storage_time)
    throw ModelError("analyzer_project: delay does not match the qubit bin separation");
  double theta = 2.0 * M_PI * cfg.detuning * cfg.storage_time + extra_phase;
  Complex delayed_early = state.alpha * std::sqrt(cfg.p1) * std::exp(Complex(0.0, theta));
  Complex direct_late = state.beta * std::sqrt(cfg.p0);

  AnalyzerOutput out;
  out.early = std::norm(state.alpha) * cfg.p0;
  out.middle = std::norm(delayed_early + direct_late);
  out.late = std::norm(state.beta) * cfg.p1;
  return out;
}

} // namespace smafc
