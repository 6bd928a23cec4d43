#pragma once

// Random-access storage: several time-bin qubits written into distinct
// channels and read back in an arbitrary order. The echo order n of each
// channel is the scheduling degree of freedom; the AOD that addresses
// channels needs its rise time between consecutive retargetings, which is
// what makes ordering nontrivial.

#include "smafc/afc.hpp"
#include "smafc/array.hpp"
#include "smafc/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace smafc {

struct WriteEvent {
  int qubit = 0;   // 1-based id, write order
  int channel = 0; // 1-based array index
  double time = 0; // [s]
};

struct ReadEvent {
  int qubit = 0;
  double time = 0; // [s]
};

struct PulseEvent {
  double time = 0;   // pulse center [s], absolute
  int polarity = +1;
};

struct Schedule {
  std::vector<WriteEvent> writes;
  std::vector<ReadEvent> reads;
  std::map<int, std::vector<PulseEvent>> electric_pulses; // keyed by channel
  double aod_rise_time = 1.9e-6;
};

struct QubitSpec {
  TimeBinState state;
  int channel = 0;
};

// Greedy schedule construction: writes go down back to back at the rise-time
// pitch, then each requested read takes the smallest echo order that clears
// the previous AOD event by the rise time. Smallest-n keeps echoes early,
// where the comb efficiency is highest.
inline Schedule build_schedule(const std::vector<QubitSpec>& qubits, const std::vector<int>& order,
                               const CombConfig& comb, const StarkControl& ctrl,
                               int n_max = 10, double aod_rise_time = 1.9e-6) {
  comb.validate();
  ctrl.validate();
  if (qubits.empty()) throw ConfigError("build_schedule: no qubits");
  if (order.size() != qubits.size())
    throw ConfigError("build_schedule: order must be a permutation of the qubit ids");
  {
    std::vector<int> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
      if (sorted[i] != static_cast<int>(i) + 1)
        throw ConfigError("build_schedule: order must be a permutation of the qubit ids");
  }
  for (std::size_t i = 0; i < qubits.size(); ++i)
    for (std::size_t j = i + 1; j < qubits.size(); ++j)
      if (qubits[i].channel == qubits[j].channel)
        throw ConfigError("build_schedule: two qubits share a channel");

  const double window = 1.0 / comb.delta;
  const double tau = suppression_pulse_duration(ctrl);
  const double rise = aod_rise_time;
  if (!(rise > 0.0)) throw ConfigError("build_schedule: rise time must be positive");
  for (const QubitSpec& q : qubits)
    if (q.state.bin_separation + tau > 0.5 * window - 0.5 * tau)
      throw ConfigError("build_schedule: late bin not absorbed before the suppression pulse");

  Schedule s;
  s.aod_rise_time = rise;
  for (std::size_t i = 0; i < qubits.size(); ++i)
    s.writes.push_back({static_cast<int>(i) + 1, qubits[i].channel, static_cast<double>(i) * rise});

  double previous_event = s.writes.back().time;
  for (int id : order) {
    const WriteEvent& w = s.writes[static_cast<std::size_t>(id - 1)];
    int n = 2;
    while (n <= n_max && w.time + n * window < previous_event + rise - 1e-15) ++n;
    if (n > n_max)
      throw ConfigError("build_schedule: read order infeasible within the maximum echo order");
    double read_time = w.time + n * window;
    s.reads.push_back({id, read_time});
    s.electric_pulses[w.channel] = {{w.time + 0.5 * window, +1},
                                    {w.time + (n - 0.5) * window, -1}};
    previous_event = read_time;
  }
  return s;
}

struct Violation {
  std::string rule;   // short machine-checkable tag
  std::string detail; // offending events, human readable
};

// Checks a schedule against every timing constraint and reports all
// violations instead of stopping at the first.
inline std::vector<Violation> validate_schedule(const Schedule& s, const CombConfig& comb) {
  comb.validate();
  std::vector<Violation> v;
  const double window = 1.0 / comb.delta;
  const double slack = 1e-12;

  for (std::size_t i = 1; i < s.writes.size(); ++i)
    if (s.writes[i].time < s.writes[i - 1].time)
      v.push_back({"write-order", "write of qubit " + std::to_string(s.writes[i].qubit) +
                                      " precedes that of qubit " +
                                      std::to_string(s.writes[i - 1].qubit)});
  for (std::size_t i = 1; i < s.reads.size(); ++i)
    if (s.reads[i].time < s.reads[i - 1].time)
      v.push_back({"read-order", "read of qubit " + std::to_string(s.reads[i].qubit) +
                                     " precedes that of qubit " +
                                     std::to_string(s.reads[i - 1].qubit)});

  for (std::size_t i = 0; i < s.writes.size(); ++i)
    for (std::size_t j = i + 1; j < s.writes.size(); ++j)
      if (s.writes[i].channel == s.writes[j].channel)
        v.push_back({"channel-collision", "qubits " + std::to_string(s.writes[i].qubit) + " and " +
                                              std::to_string(s.writes[j].qubit) +
                                              " share channel " +
                                              std::to_string(s.writes[i].channel)});

  // every AOD retargeting, write or read, needs the rise time before the next
  std::vector<std::pair<double, std::string>> events;
  for (const WriteEvent& w : s.writes)
    events.emplace_back(w.time, "write q" + std::to_string(w.qubit));
  for (const ReadEvent& r : s.reads)
    events.emplace_back(r.time, "read q" + std::to_string(r.qubit));
  std::sort(events.begin(), events.end());
  for (std::size_t i = 1; i < events.size(); ++i)
    if (events[i].first - events[i - 1].first < s.aod_rise_time - slack)
      v.push_back({"rise-time", events[i - 1].second + " to " + events[i].second + " is " +
                                    std::to_string((events[i].first - events[i - 1].first) * 1e6) +
                                    " us"});

  for (const WriteEvent& w : s.writes) {
    auto pulses_it = s.electric_pulses.find(w.channel);
    const ReadEvent* read = nullptr;
    for (const ReadEvent& r : s.reads)
      if (r.qubit == w.qubit) read = &r;

    if (pulses_it == s.electric_pulses.end() || pulses_it->second.empty()) {
      // natural first echo; a read, if any, must sit at one comb period
      if (read && std::abs(read->time - (w.time + window)) > slack * std::max(read->time, 1.0))
        v.push_back({"read-grid", "qubit " + std::to_string(w.qubit) +
                                      " read off the natural echo time"});
      continue;
    }

    const std::vector<PulseEvent>& pulses = pulses_it->second;
    if (pulses.size() != 2) {
      v.push_back({"pulse-count", "channel " + std::to_string(w.channel) + " has " +
                                      std::to_string(pulses.size()) + " pulses, expected 2"});
      continue;
    }
    const PulseEvent& a = pulses[0];
    const PulseEvent& b = pulses[1];
    if (b.time < a.time)
      v.push_back({"pulse-order", "channel " + std::to_string(w.channel) +
                                      " recall precedes suppression"});
    if (a.polarity == b.polarity)
      v.push_back({"pulse-polarity", "channel " + std::to_string(w.channel) +
                                         " pulses share a polarity"});
    if (a.time < w.time || a.time > w.time + window)
      v.push_back({"pulse-window", "channel " + std::to_string(w.channel) +
                                       " suppression pulse outside the first comb period"});
    double rel = b.time - w.time;
    int n = static_cast<int>(std::floor(rel / window)) + 1;
    if (rel < 0.0)
      v.push_back({"pulse-window", "channel " + std::to_string(w.channel) +
                                       " recall pulse before the write"});
    if (read) {
      double expected = w.time + n * window;
      if (std::abs(read->time - expected) > slack * std::max(expected, 1.0))
        v.push_back({"read-grid", "qubit " + std::to_string(w.qubit) + " read at " +
                                      std::to_string(read->time * 1e6) +
                                      " us but its recall pulse selects " +
                                      std::to_string(expected * 1e6) + " us"});
      if (read->time < w.time)
        v.push_back({"read-order", "qubit " + std::to_string(w.qubit) + " read before write"});
    }
  }
  return v;
}

struct NoiseParams {
  double phase_sigma = 0.0;     // Gaussian read-out phase jitter [rad]
  double background_rate = 0.0; // spurious detection probability per trial per slot
};

struct RaqmOptions {
  std::int64_t trials = 100000;
  double mean_photon = 0.76;
  int phase_points = 16; // fringe scan resolution
};

struct QubitReport {
  int qubit = 0;
  int channel = 0;
  int echo_order = 0;
  double read_time = 0.0;
  double expected_efficiency = 0.0; // comb echo x optical path x Stark factor
  double f_early = 0.0;
  double f_late = 0.0;
  double f_superposition = 0.0;
  double visibility = 0.0;
  double f_total = 0.0;
  std::vector<CountRecord> records;
};

namespace detail {

// Fidelity estimator for a computational-basis input: S counts in the
// correct exclusive slot, N in the wrong one.
inline double basis_fidelity(double s_counts, double n_counts) {
  if (s_counts + 2.0 * n_counts <= 0.0) return 1.0;
  return (s_counts + n_counts) / (s_counts + 2.0 * n_counts);
}

} // namespace detail

// Simulates the full read-out characterization of every scheduled qubit:
// computational-basis preparations give the early/late fidelities, a fringe
// scan of a balanced superposition gives the visibility, and the three
// combine into the standard time-bin total fidelity F = F_el/3 + 2 F_pm/3.
inline std::vector<QubitReport> run_schedule(const Schedule& s,
                                             const std::vector<ChannelConfig>& array,
                                             const CrosstalkModel& xtalk,
                                             const AnalyzerConfig& analyzer,
                                             const NoiseParams& noise, const RaqmOptions& opts,
                                             std::uint64_t seed) {
  if (array.empty()) throw ConfigError("run_schedule: empty array");
  const CombConfig& comb = array.front().comb;
  for (const ChannelConfig& c : array)
    if (std::abs(c.comb.delta - comb.delta) > 1e-9 * comb.delta)
      throw ModelError("run_schedule: channels must share one comb spacing");
  {
    std::vector<Violation> v = validate_schedule(s, comb);
    if (!v.empty())
      throw ModelError("run_schedule: schedule invalid, first violation: " + v.front().rule +
                       " (" + v.front().detail + ")");
  }
  analyzer.validate();
  if (noise.phase_sigma < 0.0 || noise.background_rate < 0.0)
    throw ConfigError("run_schedule: noise parameters cannot be negative");
  if (opts.trials <= 0 || opts.phase_points < 4)
    throw ConfigError("run_schedule: need positive trials and at least 4 fringe points");

  const double window = 1.0 / comb.delta;
  const double damping = std::exp(-0.5 * noise.phase_sigma * noise.phase_sigma);

  std::vector<QubitReport> reports;
  for (const WriteEvent& w : s.writes) {
    const ChannelConfig* cfg = nullptr;
    for (const ChannelConfig& c : array)
      if (c.index == w.channel) cfg = &c;
    if (!cfg) throw ModelError("run_schedule: schedule uses a channel missing from the array");

    const ReadEvent* read = nullptr;
    for (const ReadEvent& r : s.reads)
      if (r.qubit == w.qubit) read = &r;
    if (!read) throw ModelError("run_schedule: qubit " + std::to_string(w.qubit) + " never read");

    QubitReport rep;
    rep.qubit = w.qubit;
    rep.channel = w.channel;
    rep.read_time = read->time;
    rep.echo_order = static_cast<int>(std::llround((read->time - w.time) / window));
    double storage = rep.echo_order * window;

    // Stark phase at this qubit's read time: its own pulse pair has closed,
    // but a neighbor whose recall is still pending leaves a field imprint.
    double tau = suppression_pulse_duration(cfg->stark);
    auto area_at = [&](int channel, double t) {
      auto it = s.electric_pulses.find(channel);
      if (it == s.electric_pulses.end()) return 0.0;
      std::vector<StarkPulse> pulses;
      for (const PulseEvent& p : it->second)
        pulses.push_back({p.time - 0.5 * tau, tau, p.polarity});
      return accumulated_pulse_area(pulses, t);
    };
    double tau_eff = area_at(w.channel, read->time) +
                     xtalk.electrical_field_fraction *
                         (area_at(w.channel - 1, read->time) + area_at(w.channel + 1, read->time));
    double ctrl_amp = echo_amplitude_factor(cfg->stark, tau_eff);
    rep.expected_efficiency =
        afc_efficiency(cfg->comb, storage) * cfg->path_efficiency * ctrl_amp * ctrl_amp;

    std::string tag = "raqm/q" + std::to_string(w.qubit);
    std::vector<TimeBin> slots = {{read->time, analyzer.storage_time},
                                  {read->time + analyzer.storage_time, analyzer.storage_time},
                                  {read->time + 2.0 * analyzer.storage_time, analyzer.storage_time}};

    auto slot_probabilities = [&](const TimeBinState& state, double extra_phase) {
      AnalyzerOutput base = analyzer_project(analyzer, state, extra_phase);
      AnalyzerOutput opposite = analyzer_project(analyzer, state, extra_phase + M_PI);
      double mean_mid = 0.5 * (base.middle + opposite.middle);
      RVector p(3);
      p << base.early, mean_mid + damping * (base.middle - mean_mid), base.late;
      return p;
    };

    auto count_record = [&](const TimeBinState& state, double extra_phase,
                            const std::string& label) {
      RVector p = slot_probabilities(state, extra_phase) * rep.expected_efficiency;
      return simulate_counts(slots, p, opts.trials, opts.mean_photon, seed, tag + "/" + label,
                             noise.background_rate);
    };

    TimeBinState early(Complex(1, 0), Complex(0, 0), analyzer.storage_time);
    TimeBinState late(Complex(0, 0), Complex(1, 0), analyzer.storage_time);
    TimeBinState super(Complex(M_SQRT1_2, 0), Complex(0, -M_SQRT1_2), analyzer.storage_time);

    CountRecord rec_e = count_record(early, 0.0, "early");
    CountRecord rec_l = count_record(late, 0.0, "late");
    rep.f_early = detail::basis_fidelity(static_cast<double>(rec_e.counts[0]),
                                         static_cast<double>(rec_e.counts[2]));
    rep.f_late = detail::basis_fidelity(static_cast<double>(rec_l.counts[2]),
                                        static_cast<double>(rec_l.counts[0]));
    rep.records.push_back(rec_e);
    rep.records.push_back(rec_l);

    std::int64_t cmax = 0, cmin = std::numeric_limits<std::int64_t>::max();
    for (int k = 0; k < opts.phase_points; ++k) {
      double theta = 2.0 * M_PI * k / opts.phase_points;
      CountRecord rec = count_record(super, theta, "fringe" + std::to_string(k));
      cmax = std::max(cmax, rec.counts[1]);
      cmin = std::min(cmin, rec.counts[1]);
      rep.records.push_back(rec);
    }
    rep.visibility = (cmax + cmin) > 0
                         ? static_cast<double>(cmax - cmin) / static_cast<double>(cmax + cmin)
                         : 0.0;
    rep.f_superposition = 0.5 * (rep.visibility + 1.0);
    rep.f_total = (0.5 * (rep.f_early + rep.f_late)) / 3.0 + 2.0 * rep.f_superposition / 3.0;
    reports.push_back(std::move(rep));
  }
  return reports;
}

} // namespace smafc
