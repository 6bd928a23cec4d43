#pragma once

// Reproducible experiment pipelines. A config file names a scenario, a seed,
// a trial budget, and an output directory; run_pipeline executes the scenario
// and writes every artifact plus a manifest listing content hashes. Nothing
// here consults the clock or the environment, so a config and seed determine
// the artifact bytes exactly.

#include <smafc/certify.hpp>
#include <smafc/io.hpp>
#include <smafc/tomography.hpp>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace smafc {

inline constexpr std::string_view version_string = "0.1.0";

struct ExperimentConfig {
  std::string scenario;     // multiplex | raqm | qst | qpt | bounds | capacity
  std::string array_config; // optional JSON file overriding the built-in array
  std::uint64_t seed = 1;
  std::int64_t trials = 100000;
  std::string output_dir = "out";
  json params = json::object(); // scenario-specific knobs

  void validate() const {
    static const std::set<std::string> known{"multiplex", "raqm", "qst",
                                             "qpt",       "bounds", "capacity"};
    if (!known.count(scenario)) throw ConfigError("config: unknown scenario '" + scenario + "'");
    if (trials <= 0) throw ConfigError("config: trials must be positive");
    if (output_dir.empty()) throw ConfigError("config: output directory must be set");
    if (!params.is_object()) throw ConfigError("config: params must be a JSON object");
    if (!array_config.empty() && !std::filesystem::exists(array_config))
      throw ConfigError("config: array config file not found: " + array_config);
  }

  json to_json() const {
    return json{{"scenario", scenario}, {"array_config", array_config}, {"seed", seed},
                {"trials", trials},     {"output_dir", output_dir},     {"params", params}};
  }
};

inline ExperimentConfig experiment_config_from_json(const json& j,
                                                    const std::filesystem::path& base_dir = {}) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  ExperimentConfig cfg;
  cfg.scenario = j.value("scenario", std::string{});
  cfg.array_config = j.value("array_config", std::string{});
  cfg.seed = j.value("seed", std::uint64_t{1});
  cfg.trials = j.value("trials", std::int64_t{100000});
  cfg.output_dir = j.value("output_dir", std::string{"out"});
  cfg.params = j.value("params", json::object());
  if (!cfg.array_config.empty() && !base_dir.empty()) {
    std::filesystem::path p(cfg.array_config);
    if (p.is_relative()) cfg.array_config = (base_dir / p).lexically_normal().string();
  }
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& file) {
  json j;
  try {
    j = json::parse(read_file(file));
  } catch (const json::exception& e) {
    throw ConfigError("config: cannot parse " + file.string() + ": " + e.what());
  }
  return experiment_config_from_json(j, file.parent_path());
}

// ---------------------------------------------------------------------------
// array construction

struct ArrayConfig {
  std::vector<ChannelConfig> channels;
  CrosstalkModel crosstalk;
};

// The built-in arrays cover both published operating points; a file may
// override the comb, the Stark control, the optical path, and the crosstalk
// levels uniformly across channels.
inline ArrayConfig load_array_config(const ExperimentConfig& cfg) {
  ArrayConfig a;
  a.channels = cfg.scenario == "raqm" ? default_array_200khz() : default_array();
  a.crosstalk = default_crosstalk();
  if (cfg.array_config.empty()) return a;

  json j;
  try {
    j = json::parse(read_file(cfg.array_config));
  } catch (const json::exception& e) {
    throw ConfigError("array config: cannot parse " + cfg.array_config + ": " + e.what());
  }
  for (ChannelConfig& c : a.channels) {
    if (j.contains("comb")) {
      const json& cm = j.at("comb");
      c.comb.delta = cm.value("delta", c.comb.delta);
      c.comb.finesse = cm.value("finesse", c.comb.finesse);
      c.comb.peak_depth = cm.value("peak_depth", c.comb.peak_depth);
      c.comb.gamma_tilde = cm.value("gamma_tilde", c.comb.gamma_tilde);
    }
    if (j.contains("stark")) {
      const json& st = j.at("stark");
      c.stark.stark_coefficient = st.value("stark_coefficient", c.stark.stark_coefficient);
      c.stark.field = st.value("field", c.stark.field);
      c.stark.tau_inh = st.value("tau_inh", c.stark.tau_inh);
    }
    c.path_efficiency = j.value("path_efficiency", c.path_efficiency);
  }
  if (j.contains("electrical_field_fraction"))
    a.crosstalk.electrical_field_fraction = j.at("electrical_field_fraction").get<double>();
  if (j.contains("optical_leak_db")) {
    double db = j.at("optical_leak_db").get<double>();
    int n = static_cast<int>(a.channels.size());
    a.crosstalk.optical_db = RMatrix::Constant(n, n, db);
    a.crosstalk.optical_db.diagonal().setZero();
  }
  for (const ChannelConfig& c : a.channels) c.validate();
  a.crosstalk.validate(static_cast<int>(a.channels.size()));
  return a;
}

// ---------------------------------------------------------------------------
// shared parsing helpers

// Channel superposition written as +-joined tokens: "C5", "C5+C8", "C5+iC8".
// A leading i multiplies that term by the imaginary unit. The aliases psi1
// and psi2 name the equal superposition of the whole block, the latter with
// an i on the third channel. Channels live in [base, base + dim).
inline PureState parse_state_spec(int dim, const json& spec, int base_channel = 5) {
  if (dim < 1) throw ConfigError("state spec: dimension must be positive");
  if (spec.is_object()) {
    auto re = spec.at("re").get<std::vector<double>>();
    auto im = spec.value("im", std::vector<double>(re.size(), 0.0));
    if (static_cast<int>(re.size()) != dim || im.size() != re.size())
      throw ConfigError("state spec: amplitude count must match the dimension");
    CVector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = Complex(re[static_cast<std::size_t>(i)],
                                                 im[static_cast<std::size_t>(i)]);
    return PureState::normalized(v);
  }
  if (!spec.is_string()) throw ConfigError("state spec: expected a string or an {re, im} object");
  const std::string s = spec.get<std::string>();
  if (s == "psi1" || s == "psi2") {
    if (dim < 3) throw ConfigError("state spec: psi aliases need dimension >= 3");
    CVector v = CVector::Constant(dim, Complex(1.0, 0.0));
    if (s == "psi2") v[2] = Complex(0.0, 1.0);
    return PureState::normalized(v);
  }
  CVector v = CVector::Zero(dim);
  std::size_t pos = 0;
  bool any = false;
  while (pos < s.size()) {
    Complex amp(1.0, 0.0);
    if (s[pos] == 'i') {
      amp = Complex(0.0, 1.0);
      ++pos;
    }
    if (pos >= s.size() || s[pos] != 'C')
      throw ConfigError("state spec: expected a channel token like C5 in '" + s + "'");
    ++pos;
    int channel = 0;
    std::size_t digits = 0;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      channel = channel * 10 + (s[pos] - '0');
      ++pos;
      ++digits;
    }
    if (digits == 0) throw ConfigError("state spec: channel token without a number in '" + s + "'");
    int index = channel - base_channel;
    if (index < 0 || index >= dim)
      throw ConfigError("state spec: channel C" + std::to_string(channel) +
                        " lies outside the addressed block");
    if (v[index] != Complex(0.0, 0.0))
      throw ConfigError("state spec: channel C" + std::to_string(channel) + " appears twice");
    v[index] = amp;
    any = true;
    if (pos < s.size()) {
      if (s[pos] != '+') throw ConfigError("state spec: terms must be joined with + in '" + s + "'");
      ++pos;
      if (pos == s.size()) throw ConfigError("state spec: trailing + in '" + s + "'");
    }
  }
  if (!any) throw ConfigError("state spec: empty string");
  return PureState::normalized(v);
}

// Labels for MeasurementSet::standard settings, in construction order: the
// basis states, then the real pair superpositions, then the imaginary ones.
inline std::vector<std::string> standard_setting_labels(int dim, int base_channel = 5) {
  std::vector<std::string> labels;
  auto ch = [&](int n) { return "C" + std::to_string(base_channel + n); };
  for (int n = 0; n < dim; ++n) labels.push_back(ch(n));
  for (int n = 0; n < dim; ++n)
    for (int m = n + 1; m < dim; ++m) labels.push_back(ch(n) + "+" + ch(m));
  for (int n = 0; n < dim; ++n)
    for (int m = n + 1; m < dim; ++m) labels.push_back(ch(n) + "+i" + ch(m));
  return labels;
}

// Independent Gaussian phase noise of width sigma on every channel damps each
// off-diagonal element by exp(-sigma^2) in expectation, populations unchanged.
inline DensityMatrix dephase_channels(const DensityMatrix& rho, double sigma) {
  if (sigma < 0.0) throw ConfigError("dephase_channels: sigma must be nonnegative");
  if (sigma == 0.0) return rho;
  CMatrix m = rho.matrix();
  const double damp = std::exp(-sigma * sigma);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (i != j) m(i, j) *= damp;
  return DensityMatrix(m);
}

inline ProcessMatrix make_process(int dim, const json& spec) {
  if (!spec.is_object() || !spec.contains("name"))
    throw ConfigError("channel spec: expected an object with a name");
  const std::string name = spec.at("name").get<std::string>();
  const double weight = spec.value("weight", 0.0);
  if (name == "identity") return identity_process(dim);
  if (name == "depolarizing") return depolarizing_mix(dim, weight);
  if (name == "dephasing") return dephasing_mix(dim, weight);
  throw ConfigError("channel spec: unknown channel '" + name + "'");
}

// ---------------------------------------------------------------------------
// artifact collection

class ArtifactSink {
 public:
  explicit ArtifactSink(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, std::string_view content) {
    for (const json& e : entries_)
      if (e.at("name").get<std::string>() == name)
        throw ConfigError("pipeline: artifact written twice: " + name);
    atomic_write(dir_ / name, content);
    entries_.push_back(json{{"name", name},
                            {"bytes", content.size()},
                            {"fnv1a64", content_hash_hex(content)}});
  }

  void write_json(const std::string& name, const json& j) { write(name, dump_json(j)); }

  json manifest_entries() const {
    std::vector<json> sorted = entries_;
    std::sort(sorted.begin(), sorted.end(), [](const json& a, const json& b) {
      return a.at("name").get<std::string>() < b.at("name").get<std::string>();
    });
    return json(sorted);
  }

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<json> entries_;
};

// ---------------------------------------------------------------------------
// scenarios

namespace detail {

inline std::string run_tag(const ExperimentConfig& cfg) {
  return "scenario=" + cfg.scenario + " seed=" + std::to_string(cfg.seed);
}

// Efficiency and control characterization of one array: the echo decay
// curve, the suppression scan over pulse duration, and both crosstalk checks.
inline json run_multiplex(const ExperimentConfig& cfg, const ArrayConfig& array,
                          ArtifactSink& sink) {
  const ChannelConfig& ch = array.channels.front();
  const json& p = cfg.params;

  const int points = p.value("points", 61);
  const double max_t = p.value("max_storage_time", 15.0e-6);
  if (points < 2 || !(max_t > 0.0)) throw ConfigError("multiplex: bad storage-time grid");
  std::vector<std::vector<double>> curve;
  for (int i = 0; i < points; ++i) {
    double t = max_t * i / (points - 1);
    curve.push_back({t, afc_efficiency(ch.comb, t)});
  }
  sink.write("efficiency_curve.csv", csv_table({"storage_time", "efficiency"}, curve, run_tag(cfg)));

  const double tau = suppression_pulse_duration(ch.stark);
  std::vector<std::vector<double>> scan;
  for (int i = 0; i <= 120; ++i) {
    double duration = 2.0 * tau * i / 120.0;
    double amp = echo_amplitude_factor(ch.stark, duration);
    scan.push_back({duration, amp, amp * amp});
  }
  sink.write("suppression_scan.csv",
             csv_table({"pulse_duration", "amplitude_factor", "intensity_factor"}, scan,
                       run_tag(cfg)));

  const double fraction = array.crosstalk.electrical_field_fraction;
  const double neighbor_amp = echo_amplitude_factor(ch.stark, fraction * tau);
  const double degradation = 1.0 - neighbor_amp * neighbor_amp;

  const double mu = p.value("mean_photon", 0.38);
  const double storage = 1.0 / ch.comb.delta;
  const double eta = afc_efficiency(ch.comb, storage) * ch.path_efficiency;
  const double leak_db = array.crosstalk.optical_db(0, 1);
  const double leak = std::pow(10.0, leak_db / 10.0);
  std::vector<TimeBin> bins{{storage - 100.0e-9, 200.0e-9}};
  RVector p_on(1), p_off(1);
  p_on << eta;
  p_off << eta * leak;
  CountRecord on = simulate_counts(bins, p_on, cfg.trials, mu, cfg.seed, "optical-on");
  CountRecord off = simulate_counts(bins, p_off, cfg.trials, mu, cfg.seed, "optical-off");
  sink.write_json("counts_on.json", count_record_to_json(on));
  sink.write_json("counts_off.json", count_record_to_json(off));

  const double ratio = on.counts[0] > 0
                           ? static_cast<double>(off.counts[0]) / static_cast<double>(on.counts[0])
                           : 0.0;
  return json{{"seed", cfg.seed},
              {"comb", json{{"delta", ch.comb.delta},
                            {"finesse", ch.comb.finesse},
                            {"peak_depth", ch.comb.peak_depth},
                            {"gamma_tilde", ch.comb.gamma_tilde}}},
              {"suppression_pulse_duration", tau},
              {"electrical",
               json{{"field_fraction", fraction},
                    {"neighbor_amplitude_factor", neighbor_amp},
                    {"neighbor_degradation", degradation}}},
              {"optical", json{{"leak_db", leak_db},
                               {"on_counts", on.counts[0]},
                               {"off_counts", off.counts[0]},
                               {"off_on_ratio", ratio}}}};
}

// Random-access storage of several time-bin qubits with arbitrary read order:
// plans the schedule, validates it, runs the count-level characterization,
// and exports the timeline and the per-qubit fidelity table.
inline json run_raqm(const ExperimentConfig& cfg, const ArrayConfig& array, ArtifactSink& sink) {
  const json& p = cfg.params;
  const auto order = p.value("order", std::vector<int>{2, 1, 3});
  const auto channels = p.value("channels", std::vector<int>{5, 6, 7});
  if (order.size() != channels.size())
    throw ConfigError("raqm: read order and channel list must have the same length");

  const double bin_sep = p.value("bin_separation", 200.0e-9);
  std::vector<QubitSpec> qubits;
  for (int ch : channels)
    qubits.push_back({TimeBinState(Complex(M_SQRT1_2, 0.0), Complex(M_SQRT1_2, 0.0), bin_sep), ch});

  const ChannelConfig& ref = [&]() -> const ChannelConfig& {
    for (const ChannelConfig& c : array.channels)
      if (c.index == channels.front()) return c;
    throw ConfigError("raqm: first channel missing from the array");
  }();
  const double rise = p.value("aod_rise_time", 1.9e-6);
  const int n_max = p.value("max_echo_order", 10);

  Schedule s = build_schedule(qubits, order, ref.comb, ref.stark, n_max, rise);
  std::vector<Violation> violations = validate_schedule(s, ref.comb);

  json sched = schedule_to_json(s);
  sched["seed"] = cfg.seed;
  sink.write_json("schedule.json", sched);
  sink.write("timeline.csv", csv_schedule_timeline(s, run_tag(cfg)));
  if (!violations.empty()) {
    std::string msg = "raqm: schedule fails validation:";
    for (const Violation& v : violations) msg += " [" + v.rule + "] " + v.detail;
    throw ModelError(msg);
  }

  NoiseParams noise{p.value("phase_sigma", 0.0), p.value("background_rate", 0.0)};
  RaqmOptions ropts;
  ropts.trials = cfg.trials;
  ropts.mean_photon = p.value("mean_photon", 0.76);
  ropts.phase_points = p.value("phase_points", 16);
  AnalyzerConfig analyzer;
  analyzer.storage_time = bin_sep;

  std::vector<QubitReport> reports =
      run_schedule(s, array.channels, array.crosstalk, analyzer, noise, ropts, cfg.seed);

  std::vector<std::vector<double>> table;
  json qubit_json = json::array();
  for (const QubitReport& r : reports) {
    table.push_back({static_cast<double>(r.qubit), static_cast<double>(r.channel),
                     static_cast<double>(r.echo_order), r.read_time, r.expected_efficiency,
                     r.f_early, r.f_late, r.f_superposition, r.visibility, r.f_total});
    qubit_json.push_back(qubit_report_to_json(r));
  }
  sink.write("fidelity_table.csv",
             csv_table({"qubit", "channel", "echo_order", "read_time", "expected_efficiency",
                        "f_early", "f_late", "f_superposition", "visibility", "f_total"},
                       table, run_tag(cfg)));

  return json{{"seed", cfg.seed},
              {"order", order},
              {"channels", channels},
              {"trials", cfg.trials},
              {"noise", json{{"phase_sigma", noise.phase_sigma},
                             {"background_rate", noise.background_rate}}},
              {"qubits", std::move(qubit_json)}};
}

// State tomography round trip: prepare a channel superposition, optionally
// dephase it, sample counts over the standard settings, reconstruct, and
// report fidelities against both the ideal input and the dephased truth.
inline json run_qst(const ExperimentConfig& cfg, ArtifactSink& sink) {
  const json& p = cfg.params;
  const int dim = p.value("dim", 4);
  const int base = p.value("base_channel", 5);
  const json state_spec = p.value("state", json("C5+C8"));
  const double sigma = p.value("phase_sigma", 0.0);
  const double intensity = p.value("counts_per_setting", static_cast<double>(cfg.trials));
  const std::string sample = p.value("sample", "poisson");

  PureState input = parse_state_spec(dim, state_spec, base);
  DensityMatrix truth = dephase_channels(DensityMatrix::pure(input), sigma);
  MeasurementSet set = MeasurementSet::standard(dim);

  RVector counts;
  if (sample == "expected")
    counts = expected_state_counts(set, truth, intensity);
  else if (sample == "poisson")
    counts = simulate_state_counts(set, truth, intensity, cfg.seed);
  else
    throw ConfigError("qst: sample must be poisson or expected");

  QstOptions qopts;
  qopts.seed = cfg.seed;
  qopts.restarts = p.value("restarts", qopts.restarts);
  QstResult res = qst_mle(set, counts, qopts);

  std::vector<std::string> labels = standard_setting_labels(dim, base);
  json counts_json = json{{"seed", cfg.seed},
                          {"dim", dim},
                          {"intensity", intensity},
                          {"sample", sample},
                          {"settings", labels},
                          {"counts", std::vector<double>(counts.data(), counts.data() + counts.size())}};
  sink.write_json("counts.json", counts_json);

  json rho_json = density_to_json(res.rho);
  rho_json["seed"] = cfg.seed;
  sink.write_json("rho.json", rho_json);
  sink.write("rho_bars.csv", csv_matrix_bars(res.rho.matrix(), run_tag(cfg)));

  return json{{"seed", cfg.seed},
              {"dim", dim},
              {"state", state_spec},
              {"phase_sigma", sigma},
              {"sample", sample},
              {"counts_per_setting", intensity},
              {"fidelity_vs_input", fidelity(res.rho, DensityMatrix::pure(input))},
              {"fidelity_vs_truth", fidelity(res.rho, truth)},
              {"objective", res.objective},
              {"total_intensity", res.total_intensity},
              {"settings", labels.size()}};
}

// Process tomography round trip on a synthetic channel, with the stored-state
// consistency check: the reconstructed map applied to a two-channel
// superposition must keep its fidelity within a hair of chi00.
inline json run_qpt(const ExperimentConfig& cfg, ArtifactSink& sink) {
  const json& p = cfg.params;
  const int dim = p.value("dim", 4);
  const int base = p.value("base_channel", 5);
  const double intensity = p.value("counts_per_setting", static_cast<double>(cfg.trials));
  const std::string sample = p.value("sample", "poisson");
  const json channel_spec = p.value("channel", json{{"name", "identity"}});

  ProcessMatrix truth = make_process(dim, channel_spec);
  MeasurementSet set = MeasurementSet::standard(dim);

  RMatrix counts;
  if (sample == "expected")
    counts = expected_process_counts(truth, set.states, set.states, intensity);
  else if (sample == "poisson")
    counts = simulate_process_counts(truth, set.states, set.states, intensity, cfg.seed);
  else
    throw ConfigError("qpt: sample must be poisson or expected");

  QptOptions qopts;
  qopts.seed = cfg.seed;
  qopts.restarts = p.value("restarts", qopts.restarts);
  qopts.tp_weight = p.value("tp_weight", qopts.tp_weight);
  QptResult res = qpt_mle(dim, set.states, set.states, counts, qopts);

  json chi_json = process_to_json(res.chi);
  chi_json["seed"] = cfg.seed;
  sink.write_json("chi.json", chi_json);
  sink.write("chi_bars.csv", csv_matrix_bars(res.chi.chi(), run_tag(cfg)));

  std::vector<std::string> labels = standard_setting_labels(dim, base);
  json counts_rows = json::array();
  for (Eigen::Index i = 0; i < counts.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index jx = 0; jx < counts.cols(); ++jx) row.push_back(counts(i, jx));
    counts_rows.push_back(std::move(row));
  }
  sink.write_json("counts.json", json{{"seed", cfg.seed},
                                      {"dim", dim},
                                      {"intensity", intensity},
                                      {"sample", sample},
                                      {"preparations", labels},
                                      {"measurements", labels},
                                      {"counts", std::move(counts_rows)}});

  // Witness state spanning the block: first and last channel in balanced
  // superposition, the same probe the bar charts single out.
  CVector v = CVector::Zero(dim);
  v[0] = M_SQRT1_2;
  v[dim - 1] = M_SQRT1_2;
  PureState witness(v);
  DensityMatrix out = apply_channel(res.chi, DensityMatrix::pure(witness));
  const double chi00 = res.chi.chi()(0, 0).real();
  const double f_witness = fidelity(out, DensityMatrix::pure(witness));

  return json{{"seed", cfg.seed},
              {"dim", dim},
              {"channel", channel_spec},
              {"sample", sample},
              {"counts_per_setting", intensity},
              {"chi00", chi00},
              {"tp_residual", res.tp_residual},
              {"objective", res.objective},
              {"scale", res.scale},
              {"process_fidelity_vs_truth", process_fidelity(res.chi, truth)},
              {"witness",
               json{{"state", "C" + std::to_string(base) + "+C" + std::to_string(base + dim - 1)},
                    {"fidelity", f_witness},
                    {"meets_chi00_relation", f_witness >= chi00 - 0.01}}}};
}

// Classical-storage fidelity ceiling: a bound curve over memory efficiency
// for each requested mean photon number, plus the quoted operating point.
inline json run_bounds(const ExperimentConfig& cfg, ArtifactSink& sink) {
  const json& p = cfg.params;
  const int d = p.value("d", 5);
  const auto mus = p.value("mu", std::vector<double>{0.38, 0.76});
  const int points = p.value("eta_points", 50);
  const double eta_min = p.value("eta_min", 0.02);
  if (mus.empty() || points < 2 || !(eta_min > 0.0) || eta_min > 1.0)
    throw ConfigError("bounds: bad sweep grid");

  std::vector<std::string> header{"eta_m"};
  for (double mu : mus) header.push_back("bound_mu_" + format_double(mu));
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < points; ++i) {
    double eta = eta_min + (1.0 - eta_min) * i / (points - 1);
    std::vector<double> row{eta};
    for (double mu : mus) row.push_back(classical_bound(d, mu, eta));
    rows.push_back(std::move(row));
  }
  sink.write("bounds.csv", csv_table(header, rows, run_tag(cfg)));

  const json op_spec = p.value("operating", json{{"d", 5}, {"mu", 0.38}, {"eta_m", 0.3}});
  const int od = op_spec.value("d", 5);
  const double omu = op_spec.value("mu", 0.38);
  const double oeta = op_spec.value("eta_m", 0.3);
  ClassicalBound op = classical_bound_detail(od, omu, oeta);

  double unit_gap = 0.0;
  for (double mu : mus)
    unit_gap = std::max(
        unit_gap, std::abs(classical_bound(d, mu, 1.0) - classical_bound_unit_efficiency(d, mu)));

  return json{{"seed", cfg.seed},
              {"d", d},
              {"mu", mus},
              {"operating", json{{"d", od},
                                 {"mu", omu},
                                 {"eta_m", oeta},
                                 {"bound", op.bound},
                                 {"n_min", op.n_min},
                                 {"gamma", op.gamma}}},
              {"unit_efficiency_gap", unit_gap},
              {"timebin_anchor", classical_bound(2, 0.76, 0.029)}};
}

// Capacity certification of a channel: accessible-information and coherent-
// information lower bounds plus the entanglement-dimension certificate.
inline json run_capacity(const ExperimentConfig& cfg, ArtifactSink& sink) {
  const json& p = cfg.params;
  ProcessMatrix proc = [&]() {
    if (p.contains("chi_path")) {
      const std::string path = p.at("chi_path").get<std::string>();
      if (!std::filesystem::exists(path))
        throw ConfigError("capacity: chi file not found: " + path);
      return process_from_json(json::parse(read_file(path)));
    }
    const int dim = p.value("dim", 4);
    return make_process(dim, p.value("channel", json{{"name", "dephasing"}, {"weight", 0.028}}));
  }();
  const int dim = proc.dim();

  CapacityOptions copts;
  copts.seed = cfg.seed;
  copts.restarts = p.value("q1_restarts", copts.restarts);
  AccessibleInfoOptions aopts;
  aopts.seed = cfg.seed;
  aopts.measurement_restarts = p.value("c1_restarts", aopts.measurement_restarts);

  const double q1 = q1_lower_bound(proc, copts);
  C1Result c1 = c1_lower_bound(proc, aopts);
  const double ic_mixed = coherent_information(proc, DensityMatrix::maximally_mixed(dim));
  SchmidtCertificate cert = schmidt_certificate(proc);

  json report{{"seed", cfg.seed},
              {"dim", dim},
              {"c1_bits", c1.bits},
              {"c1_priors", std::vector<double>(c1.priors.data(), c1.priors.data() + c1.priors.size())},
              {"q1_bits", q1},
              {"coherent_information_mixed_input", ic_mixed},
              {"schmidt", json{{"fidelity", cert.fidelity},
                               {"certified_dimension", cert.certified_dimension}}}};
  if (p.contains("chi_path"))
    report["chi_path"] = p.at("chi_path");
  else
    report["channel"] = p.value("channel", json{{"name", "dephasing"}, {"weight", 0.028}});
  sink.write_json("capacity.json", report);
  return report;
}

} // namespace detail

// ---------------------------------------------------------------------------

struct PipelineResult {
  std::filesystem::path output_dir;
  json manifest;
};

inline PipelineResult run_pipeline(const ExperimentConfig& cfg) {
  cfg.validate();
  ArrayConfig array = load_array_config(cfg);
  ArtifactSink sink(cfg.output_dir);

  json report;
  if (cfg.scenario == "multiplex")
    report = detail::run_multiplex(cfg, array, sink);
  else if (cfg.scenario == "raqm")
    report = detail::run_raqm(cfg, array, sink);
  else if (cfg.scenario == "qst")
    report = detail::run_qst(cfg, sink);
  else if (cfg.scenario == "qpt")
    report = detail::run_qpt(cfg, sink);
  else if (cfg.scenario == "bounds")
    report = detail::run_bounds(cfg, sink);
  else
    report = detail::run_capacity(cfg, sink);
  if (!report.contains("seed")) throw ModelError("pipeline: report must record the seed");
  sink.write_json("report.json", report);

  const std::string config_dump = dump_json(cfg.to_json());
  json manifest{{"artifacts", sink.manifest_entries()},
                {"config", cfg.to_json()},
                {"config_hash", content_hash_hex(config_dump)},
                {"scenario", cfg.scenario},
                {"seed", cfg.seed},
                {"version", std::string(version_string)}};
  atomic_write(sink.dir() / "manifest.json", dump_json(manifest));
  return {sink.dir(), std::move(manifest)};
}

} // namespace smafc
