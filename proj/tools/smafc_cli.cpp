// Command-line front end. Every subcommand assembles an ExperimentConfig,
// hands it to run_pipeline, and reports where the artifacts landed. Errors
// leave as one JSON object on stderr with a typed exit code: 2 for config
// problems, 3 for model violations, 4 for optimizer failures.

#include <smafc/smafc.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

using smafc::json;

void emit_error(const std::string& type, const std::string& message) {
  std::cerr << json{{"error", json{{"type", type}, {"message", message}}}}.dump() << "\n";
}

struct GlobalArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::int64_t trials = 0;
  bool seed_set = false;
  bool out_set = false;
  bool trials_set = false;
};

smafc::ExperimentConfig assemble(const GlobalArgs& g, const std::string& default_scenario) {
  smafc::ExperimentConfig cfg;
  if (!g.config_path.empty())
    cfg = smafc::load_experiment_config(g.config_path);
  else
    cfg.scenario = default_scenario;
  if (g.seed_set) cfg.seed = g.seed;
  if (g.out_set) cfg.output_dir = g.out_dir;
  if (g.trials_set) cfg.trials = g.trials;
  return cfg;
}

int report_run(const smafc::ExperimentConfig& cfg) {
  smafc::PipelineResult res = smafc::run_pipeline(cfg);
  std::cout << cfg.scenario << ": wrote " << res.manifest.at("artifacts").size() + 1
            << " artifacts to " << res.output_dir.string() << "\n";
  json report = json::parse(smafc::read_file(res.output_dir / "report.json"));
  if (cfg.scenario == "qst")
    std::cout << "  fidelity vs input: " << report.at("fidelity_vs_input").get<double>() << "\n";
  if (cfg.scenario == "qpt")
    std::cout << "  chi00: " << report.at("chi00").get<double>() << "\n";
  if (cfg.scenario == "bounds")
    std::cout << "  classical bound at the operating point: "
              << report.at("operating").at("bound").get<double>() << "\n";
  if (cfg.scenario == "capacity")
    std::cout << "  c1: " << report.at("c1_bits").get<double>()
              << " bits, q1: " << report.at("q1_bits").get<double>() << " bits\n";
  if (cfg.scenario == "raqm")
    for (const json& q : report.at("qubits"))
      std::cout << "  qubit " << q.at("qubit").get<int>() << " read at "
                << q.at("read_time").get<double>() << " s, F = " << q.at("f_total").get<double>()
                << "\n";
  return 0;
}

// Schedule construction without the count-level characterization: emits the
// plan artifacts and fails with a model error when validation finds a
// timing conflict.
int run_plan(const GlobalArgs& g, const std::vector<int>& order, const std::vector<int>& channels,
             double rise) {
  if (order.size() != channels.size())
    throw smafc::ConfigError("plan: read order and channel list must have the same length");
  std::vector<smafc::ChannelConfig> array = smafc::default_array_200khz();
  const smafc::ChannelConfig& ref = smafc::detail::channel_by_index(array, channels.front());

  std::vector<smafc::QubitSpec> qubits;
  for (int ch : channels)
    qubits.push_back(
        {smafc::TimeBinState(smafc::Complex(M_SQRT1_2, 0.0), smafc::Complex(M_SQRT1_2, 0.0)), ch});
  smafc::Schedule s = smafc::build_schedule(qubits, order, ref.comb, ref.stark, 10, rise);
  std::vector<smafc::Violation> violations = smafc::validate_schedule(s, ref.comb);

  smafc::ArtifactSink sink(g.out_set ? g.out_dir : "out/plan");
  const std::uint64_t seed = g.seed_set ? g.seed : 1;
  json sched = smafc::schedule_to_json(s);
  sched["seed"] = seed;
  sink.write_json("schedule.json", sched);
  sink.write("timeline.csv",
             smafc::csv_schedule_timeline(s, "scenario=plan seed=" + std::to_string(seed)));

  json vjson = json::array();
  for (const smafc::Violation& v : violations)
    vjson.push_back(json{{"rule", v.rule}, {"detail", v.detail}});
  json report{{"seed", seed}, {"order", order}, {"channels", channels}, {"violations", vjson}};
  sink.write_json("report.json", report);

  json manifest{{"artifacts", sink.manifest_entries()},
                {"scenario", "plan"},
                {"seed", seed},
                {"version", std::string(smafc::version_string)}};
  smafc::atomic_write(sink.dir() / "manifest.json", smafc::dump_json(manifest));

  if (!violations.empty()) {
    std::string msg = "schedule fails validation:";
    for (const smafc::Violation& v : violations) msg += " [" + v.rule + "] " + v.detail;
    throw smafc::ModelError(msg);
  }
  std::cout << "plan: wrote " << sink.manifest_entries().size() + 1 << " artifacts to "
            << sink.dir().string() << "\n";
  for (const smafc::ReadEvent& r : s.reads)
    std::cout << "  qubit " << r.qubit << " read at " << r.time << " s\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multichannel Stark-modulated AFC memory: simulation, reconstruction, bounds"};
  app.require_subcommand(1);

  GlobalArgs g;
  auto* config_opt = app.add_option("--config", g.config_path, "Experiment config JSON");
  auto* seed_opt = app.add_option("--seed", g.seed, "Master seed for all sub-streams");
  auto* out_opt = app.add_option("--out", g.out_dir, "Output directory");
  auto* trials_opt =
      app.add_option("--trials", g.trials, "Trials per counting run")->check(CLI::PositiveNumber);

  auto add_sub = [&](const std::string& name, const std::string& desc) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->fallthrough();
    return sub;
  };

  // simulate
  CLI::App* simulate = add_sub("simulate", "Run a multiplex or raqm scenario");
  std::string sim_scenario = "multiplex";
  simulate->add_option("--scenario", sim_scenario, "multiplex or raqm")
      ->check(CLI::IsMember({"multiplex", "raqm"}));
  std::vector<int> sim_order;
  simulate->add_option("--order", sim_order, "Read order for raqm, e.g. 2,1,3")->delimiter(',');

  // plan
  CLI::App* plan = add_sub("plan", "Build and validate a read-out schedule");
  std::vector<int> plan_order{2, 1, 3};
  std::vector<int> plan_channels{5, 6, 7};
  double plan_rise = 1.9e-6;
  plan->add_option("--order", plan_order, "Read order, e.g. 2,1,3")->delimiter(',');
  plan->add_option("--channels", plan_channels, "Storage channels, e.g. 5,6,7")->delimiter(',');
  plan->add_option("--rise", plan_rise, "AOD rise time [s]")->check(CLI::PositiveNumber);

  // tomo
  CLI::App* tomo = add_sub("tomo", "State tomography round trip");
  int tomo_dim = 0;
  std::string tomo_state, tomo_sample;
  double tomo_sigma = -1.0;
  tomo->add_option("--dim", tomo_dim, "Qudit dimension")->check(CLI::Range(2, 16));
  tomo->add_option("--state", tomo_state, "Input state, e.g. C5+iC8 or psi1");
  tomo->add_option("--sample", tomo_sample, "poisson or expected");
  tomo->add_option("--phase-sigma", tomo_sigma, "Channel phase noise width [rad]");

  // qpt
  CLI::App* qpt = add_sub("qpt", "Process tomography round trip");
  int qpt_dim = 0;
  std::string qpt_channel, qpt_sample;
  double qpt_weight = -1.0;
  qpt->add_option("--dim", qpt_dim, "Qudit dimension")->check(CLI::Range(2, 16));
  qpt->add_option("--channel", qpt_channel, "identity, depolarizing, or dephasing");
  qpt->add_option("--weight", qpt_weight, "Mixing weight of the noisy part");
  qpt->add_option("--sample", qpt_sample, "poisson or expected");

  // bound
  CLI::App* bound = add_sub("bound", "Classical storage fidelity bound");
  int bound_d = 0;
  std::vector<double> bound_mu;
  double bound_eta = -1.0;
  bound->add_option("--d", bound_d, "Hilbert space dimension")->check(CLI::Range(2, 64));
  bound->add_option("--mu", bound_mu, "Mean photon numbers for the sweep")->delimiter(',');
  bound->add_option("--eta", bound_eta, "Memory efficiency of the operating point");

  // capacity
  CLI::App* capacity = add_sub("capacity", "Channel capacity lower bounds");
  std::string cap_chi, cap_channel;
  int cap_dim = 0;
  double cap_weight = -1.0;
  capacity->add_option("--chi", cap_chi, "Process matrix JSON file");
  capacity->add_option("--dim", cap_dim, "Qudit dimension for synthetic channels")
      ->check(CLI::Range(2, 16));
  capacity->add_option("--channel", cap_channel, "identity, depolarizing, or dephasing");
  capacity->add_option("--weight", cap_weight, "Mixing weight of the noisy part");

  // demo
  CLI::App* demo = add_sub("demo", "Bundled four-dimensional tomography demo");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("config", e.what());
    return 2;
  }

  g.seed_set = seed_opt->count() > 0;
  g.out_set = out_opt->count() > 0;
  g.trials_set = trials_opt->count() > 0;
  (void)config_opt;

  try {
    if (simulate->parsed()) {
      smafc::ExperimentConfig cfg = assemble(g, sim_scenario);
      if (cfg.scenario != "multiplex" && cfg.scenario != "raqm")
        throw smafc::ConfigError("simulate: config scenario must be multiplex or raqm");
      if (simulate->count("--scenario") > 0 && !g.config_path.empty() &&
          cfg.scenario != sim_scenario)
        throw smafc::ConfigError("simulate: --scenario disagrees with the config file");
      if (!sim_order.empty()) cfg.params["order"] = sim_order;
      return report_run(cfg);
    }
    if (plan->parsed()) return run_plan(g, plan_order, plan_channels, plan_rise);
    if (tomo->parsed()) {
      smafc::ExperimentConfig cfg = assemble(g, "qst");
      if (cfg.scenario != "qst") throw smafc::ConfigError("tomo: config scenario must be qst");
      if (tomo_dim > 0) cfg.params["dim"] = tomo_dim;
      if (!tomo_state.empty()) cfg.params["state"] = tomo_state;
      if (!tomo_sample.empty()) cfg.params["sample"] = tomo_sample;
      if (tomo_sigma >= 0.0) cfg.params["phase_sigma"] = tomo_sigma;
      return report_run(cfg);
    }
    if (qpt->parsed()) {
      smafc::ExperimentConfig cfg = assemble(g, "qpt");
      if (cfg.scenario != "qpt") throw smafc::ConfigError("qpt: config scenario must be qpt");
      if (qpt_dim > 0) cfg.params["dim"] = qpt_dim;
      if (!qpt_channel.empty()) {
        json spec{{"name", qpt_channel}};
        if (qpt_weight >= 0.0) spec["weight"] = qpt_weight;
        cfg.params["channel"] = spec;
      }
      if (!qpt_sample.empty()) cfg.params["sample"] = qpt_sample;
      return report_run(cfg);
    }
    if (bound->parsed()) {
      smafc::ExperimentConfig cfg = assemble(g, "bounds");
      if (cfg.scenario != "bounds")
        throw smafc::ConfigError("bound: config scenario must be bounds");
      if (bound_d > 0) {
        cfg.params["d"] = bound_d;
        cfg.params["operating"]["d"] = bound_d;
      }
      if (!bound_mu.empty()) {
        cfg.params["mu"] = bound_mu;
        cfg.params["operating"]["mu"] = bound_mu.front();
      }
      if (bound_eta > 0.0) cfg.params["operating"]["eta_m"] = bound_eta;
      return report_run(cfg);
    }
    if (capacity->parsed()) {
      smafc::ExperimentConfig cfg = assemble(g, "capacity");
      if (cfg.scenario != "capacity")
        throw smafc::ConfigError("capacity: config scenario must be capacity");
      if (!cap_chi.empty()) cfg.params["chi_path"] = cap_chi;
      if (cap_dim > 0) cfg.params["dim"] = cap_dim;
      if (!cap_channel.empty()) {
        json spec{{"name", cap_channel}};
        if (cap_weight >= 0.0) spec["weight"] = cap_weight;
        cfg.params["channel"] = spec;
      }
      return report_run(cfg);
    }
    if (demo->parsed()) {
      smafc::ExperimentConfig cfg;
      cfg.scenario = "qst";
      cfg.seed = 7;
      cfg.trials = 100000;
      cfg.output_dir = "out/demo";
      cfg.params = json{{"dim", 4}, {"base_channel", 5}, {"state", "C5+C8"},
                        {"sample", "poisson"}};
      if (g.seed_set) cfg.seed = g.seed;
      if (g.out_set) cfg.output_dir = g.out_dir;
      if (g.trials_set) cfg.trials = g.trials;
      return report_run(cfg);
    }
    emit_error("config", "no subcommand selected");
    return 2;
  } catch (const smafc::ConfigError& e) {
    emit_error("config", e.what());
    return 2;
  } catch (const smafc::ModelError& e) {
    emit_error("model", e.what());
    return 3;
  } catch (const smafc::OptimError& e) {
    emit_error("optimizer", e.what());
    return 4;
  } catch (const json::exception& e) {
    emit_error("config", e.what());
    return 2;
  }
}
