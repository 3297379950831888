#include "stratvote/cli.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "stratvote/analytics.hpp"
#include "stratvote/config.hpp"
#include "stratvote/errors.hpp"
#include "stratvote/serialization.hpp"

namespace stratvote {

using nlohmann::json;

namespace {

enum class Format { Csv, Json };

struct CommonOptions {
  std::string preset;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string format;
  std::optional<int> replications;
  std::optional<int> threads;

  std::optional<int> n, n_e, n_g, steps, s1, s2;
  std::optional<double> two_beta, mu, sigma, alpha, initial_capital, p_transition;
  std::string principle, ruin, migration, alpha_grid;
};

void add_common(CLI::App& cmd, CommonOptions& o) {
  cmd.add_option("--preset", o.preset, "Named figure preset (fig1a ... fig7d)");
  cmd.add_option("--config", o.config_path, "JSON config file or an earlier output with a manifest");
  cmd.add_option("--seed", o.seed, "Master seed");
  cmd.add_option("--out", o.out_path, "Output file (default: stdout)");
  cmd.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd.add_option("--replications", o.replications, "Replications per cell");
  cmd.add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  cmd.add_option("--n", o.n, "Number of participants");
  cmd.add_option("--n-e", o.n_e, "Number of egoists");
  cmd.add_option("--n-g", o.n_g, "Number of group members");
  cmd.add_option("--two-beta", o.two_beta, "Egoist share 2*beta");
  cmd.add_option("--mu", o.mu, "Mean of proposal increments");
  cmd.add_option("--sigma", o.sigma, "Standard deviation of proposal increments");
  cmd.add_option("--alpha", o.alpha, "Decision threshold");
  cmd.add_option("--principle", o.principle, "Group principle: A, B or A'");
  cmd.add_option("--steps", o.steps, "Steps per trajectory");
  cmd.add_option("--initial-capital", o.initial_capital, "Initial capital of every participant");
  cmd.add_option("--ruin", o.ruin, "on/off")->check(CLI::IsMember({"on", "off", "true", "false"}));
  cmd.add_option("--migration", o.migration, "none, levels or increments")
      ->check(CLI::IsMember({"none", "levels", "increments"}));
  cmd.add_option("--s1", o.s1, "Lagging steps before an egoist may join");
  cmd.add_option("--s2", o.s2, "Lagging steps before a member may leave");
  cmd.add_option("--p-transition", o.p_transition, "Migration probability once eligible");
  cmd.add_option("--alpha-grid", o.alpha_grid, "start:stop:step or comma-separated list");
}

json parse_alpha_grid_flag(const std::string& text) {
  auto to_number = [](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ValidationError("alpha_grid", "cannot parse \"" + s + "\"");
    }
  };
  std::vector<std::string> parts;
  const char sep = text.find(':') != std::string::npos ? ':' : ',';
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, sep);) parts.push_back(part);
  if (sep == ':') {
    if (parts.size() != 3) throw ValidationError("alpha_grid", "range form is start:stop:step");
    return {{"start", to_number(parts[0])}, {"stop", to_number(parts[1])}, {"step", to_number(parts[2])}};
  }
  json list = json::array();
  for (const std::string& p : parts) list.push_back(to_number(p));
  return list;
}

json flag_layer(const CommonOptions& o, const json& lower) {
  json j = json::object();
  if (o.n) j["n"] = *o.n;
  if (o.n_e) j["n_e"] = *o.n_e;
  if (o.n_g) j["n_g"] = *o.n_g;
  if (o.two_beta) j["two_beta"] = *o.two_beta;
  if (o.mu) j["mu"] = *o.mu;
  if (o.sigma) j["sigma"] = *o.sigma;
  if (o.alpha) j["alpha"] = *o.alpha;
  if (!o.principle.empty()) j["principle"] = o.principle;
  if (o.steps) j["steps"] = *o.steps;
  if (o.initial_capital) j["initial_capital"] = *o.initial_capital;
  if (!o.ruin.empty()) j["ruin"] = o.ruin == "on" || o.ruin == "true";
  if (o.seed) j["seed"] = *o.seed;
  if (o.replications) j["replications"] = *o.replications;
  if (o.threads) j["threads"] = *o.threads;
  if (!o.alpha_grid.empty()) j["alpha_grid"] = parse_alpha_grid_flag(o.alpha_grid);

  // Migration flags refine whatever the lower layers configured.
  const bool tunes_migration = o.s1 || o.s2 || o.p_transition;
  if (o.migration == "none") {
    if (tunes_migration) throw ValidationError("migration", "--s1/--s2/--p-transition given with --migration none");
    j["migration"] = nullptr;
  } else if (!o.migration.empty() || tunes_migration) {
    json m = lower.contains("migration") && lower.at("migration").is_object() ? lower.at("migration") : json::object();
    if (!o.migration.empty()) m["mode"] = o.migration;
    if (!m.contains("mode")) throw ValidationError("migration", "--s1/--s2/--p-transition need --migration levels|increments");
    if (o.s1) m["s1"] = *o.s1;
    if (o.s2) m["s2"] = *o.s2;
    if (o.p_transition) m["p_transition"] = *o.p_transition;
    j["migration"] = m;
  }
  return j;
}

ResolvedConfig resolve(const CommonOptions& o, bool require_alpha) {
  json file = json::object();
  if (!o.config_path.empty()) file = load_config_file(o.config_path);

  std::string preset = o.preset;
  if (preset.empty() && file.contains("preset") && file.at("preset").is_string()) {
    preset = file.at("preset").get<std::string>();
  }
  json merged = preset.empty() ? json::object() : preset_layer(preset);
  merged = merge_layers(merged, file);
  if (!preset.empty()) merged["preset"] = preset;
  merged = merge_layers(merged, flag_layer(o, merged));
  return resolve_config(merged, require_alpha);
}

Format output_format(const CommonOptions& o, Format fallback) {
  if (o.format.empty()) return fallback;
  return o.format == "json" ? Format::Json : Format::Csv;
}

json make_manifest(const std::string& command, const ResolvedConfig& config, const CommonOptions& o) {
  return {{"tool", kToolName},
          {"version", kToolVersion},
          {"command", command},
          {"preset", config.preset.empty() ? json(nullptr) : json(config.preset)},
          {"config", canonical_json(config, command == "sweep" || command == "compare")},
          {"master_seed", config.master_seed()},
          {"seed_rule", std::string(kSeedRule)},
          {"outputs", json::array({o.out_path.empty() ? "-" : o.out_path})}};
}

// Renders into memory first so a failed run leaves no partial file behind.
void emit(const CommonOptions& o, std::ostream& out, const std::function<void(std::ostream&)>& write) {
  if (o.out_path.empty()) {
    write(out);
    return;
  }
  std::ostringstream buffer;
  write(buffer);
  std::ofstream file(o.out_path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open output file " + o.out_path);
  file << buffer.str();
  file.flush();
  if (!file) throw IoError("failed writing output file " + o.out_path);
}

void write_json(std::ostream& os, const json& doc) { os << doc.dump(2) << '\n'; }

int run_simulate(const CommonOptions& o, std::ostream& out) {
  const ResolvedConfig config = resolve(o, true);
  SimulationConfig sim = config.simulation;
  sim.seed = derive_seed(config.master_seed(), 0, 0);
  const TrajectoryLog log = run_trajectory(sim);
  const json manifest = make_manifest("simulate", config, o);
  emit(o, out, [&](std::ostream& os) {
    if (output_format(o, Format::Csv) == Format::Json) write_json(os, trajectory_to_json(log, manifest));
    else write_trajectory_csv(os, log, manifest);
  });
  return kExitOk;
}

int run_sweep(const CommonOptions& o, std::ostream& out, bool compare) {
  const ResolvedConfig config = resolve(o, false);
  const SweepTable table = sweep_alpha(config.sweep_spec());
  const ComparisonReport report = compare ? compare_sweep(table) : tabulate_sweep(table);
  const json manifest = make_manifest(compare ? "compare" : "sweep", config, o);
  emit(o, out, [&](std::ostream& os) {
    if (output_format(o, Format::Csv) == Format::Json) write_json(os, comparison_to_json(report, manifest));
    else write_comparison_csv(os, report, manifest);
  });
  return compare && !report.all_pass() ? kExitCompareFailed : kExitOk;
}

int run_predict(const CommonOptions& o, std::ostream& out) {
  if (output_format(o, Format::Json) != Format::Json) throw ValidationError("format", "predict writes JSON only");
  const ResolvedConfig config = resolve(o, false);
  const SimulationConfig& sim = config.simulation;
  const PredictionReport report =
      build_prediction_report(sim.population, sim.env.mu, sim.env.sigma,
                              config.has_alpha ? std::optional<double>(sim.alpha) : std::nullopt, sim.principle,
                              sim.steps);
  json doc = to_json(report);
  doc["manifest"] = make_manifest("predict", config, o);
  emit(o, out, [&](std::ostream& os) { write_json(os, doc); });
  return kExitOk;
}

struct DemoOptions {
  int n = 3;
  double capital = 9.0;
  double cut = 0.5;
  double alpha = 0.5;
  std::string out_path;
  std::string format;
};

int run_demo(const DemoOptions& d, std::ostream& out) {
  const DispossessionDemo demo = run_dispossession_demo(d.n, d.capital, d.cut, d.alpha);
  const json manifest = {{"tool", kToolName},
                         {"version", kToolVersion},
                         {"command", "dispossess-demo"},
                         {"config", {{"n", d.n}, {"capital", d.capital}, {"cut", d.cut}, {"alpha", d.alpha}}},
                         {"outputs", json::array({d.out_path.empty() ? "-" : d.out_path})}};
  CommonOptions sink;
  sink.out_path = d.out_path;
  emit(sink, out, [&](std::ostream& os) {
    if (d.format == "csv") write_dispossession_csv(os, demo, manifest);
    else write_json(os, dispossession_to_json(demo, manifest));
  });
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Voting societies of egoists and a group: simulation, sweeps and closed-form predictions",
               args.empty() ? kToolName : args.front()};
  app.require_subcommand(1);

  CommonOptions simulate_opts, sweep_opts, predict_opts, compare_opts;
  CLI::App* simulate = app.add_subcommand("simulate", "Run one trajectory and write per-step means");
  CLI::App* sweep = app.add_subcommand("sweep", "Replicated threshold sweep");
  CLI::App* predict = app.add_subcommand("predict", "Closed-form zones and expected increments");
  CLI::App* compare = app.add_subcommand("compare", "Sweep checked against closed-form predictions");
  add_common(*simulate, simulate_opts);
  add_common(*sweep, sweep_opts);
  add_common(*predict, predict_opts);
  add_common(*compare, compare_opts);

  DemoOptions demo_opts;
  CLI::App* demo = app.add_subcommand("dispossess-demo", "Replay the successive dispossession chain");
  demo->add_option("--n", demo_opts.n, "Participants (at least 3)");
  demo->add_option("--capital", demo_opts.capital, "Initial capital");
  demo->add_option("--cut", demo_opts.cut, "Organizer's share of each confiscated holding, in [0, 1)");
  demo->add_option("--alpha", demo_opts.alpha, "Decision threshold");
  demo->add_option("--out", demo_opts.out_path, "Output file (default: stdout)");
  demo->add_option("--format", demo_opts.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  if (args.empty()) argv.push_back(kToolName);
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (simulate->parsed()) return run_simulate(simulate_opts, out);
    if (sweep->parsed()) return run_sweep(sweep_opts, out, false);
    if (compare->parsed()) {
      const int code = run_sweep(compare_opts, out, true);
      if (code == kExitCompareFailed) err << "compare: some cells are outside tolerance\n";
      return code;
    }
    if (predict->parsed()) return run_predict(predict_opts, out);
    if (demo->parsed()) return run_demo(demo_opts, out);
  } catch (const UnsupportedRegime& e) {
    err << "unsupported: " << e.what() << '\n';
    return kExitUnsupported;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const InvalidInput& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kExitValidation;
  } catch (const StructuralError& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace stratvote
