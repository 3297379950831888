#include "stratvote/config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "stratvote/errors.hpp"

namespace stratvote {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 17> kKnownKeys = {
    "n",     "n_e",  "n_g",       "two_beta",     "mu",      "sigma",      "alpha",   "principle", "steps",
    "initial_capital", "ruin", "migration", "seed", "replications", "threads", "alpha_grid", "preset"};

constexpr std::array<std::string_view, 3> kSplitKeys = {"n_e", "n_g", "two_beta"};

json figure_series(int n, double mu, double two_beta, double initial_capital) {
  return {{"n", n},
          {"mu", mu},
          {"sigma", 10.0},
          {"two_beta", two_beta},
          {"principle", "B"},
          {"steps", 1000},
          {"initial_capital", initial_capital},
          {"ruin", false},
          {"migration", nullptr},
          {"replications", 200}};
}

// Trajectory figures: 200 participants, a = 700.
json trajectory_preset(double mu, double two_beta, double alpha) {
  json j = figure_series(200, mu, two_beta, 700.0);
  j["alpha"] = alpha;
  return j;
}

// Threshold-sweep figures: 450 participants, a = 3000, α swept over [0, 1].
json sweep_preset(double mu, double two_beta) {
  json j = figure_series(450, mu, two_beta, 3000.0);
  j["alpha_grid"] = {{"start", 0.0}, {"stop", 1.0}, {"step", 0.01}};
  return j;
}

const std::map<std::string, json, std::less<>>& presets() {
  static const std::map<std::string, json, std::less<>> table = [] {
    std::map<std::string, json, std::less<>> t;
    t["fig1a"] = trajectory_preset(0.0, 0.5, 0.5);
    t["fig1b"] = trajectory_preset(-1.0, 0.92, 0.48);
    t["fig1c"] = trajectory_preset(-1.0, 0.92, 0.5);
    t["fig2a"] = trajectory_preset(-1.0, 0.08, 0.07);
    t["fig2b"] = trajectory_preset(-1.0, 0.08, 0.04);
    t["fig3"] = trajectory_preset(0.5, 0.08, 0.97);
    t["fig4"] = sweep_preset(0.0, 0.5);
    t["fig5a"] = sweep_preset(0.0, 0.92);
    t["fig5b"] = sweep_preset(0.0, 0.08);
    t["fig5"] = t["fig5a"];
    const std::array<double, 6> fig6_mu = {0.2, -0.2, 1.0, -1.0, 2.0, -2.0};
    for (std::size_t i = 0; i < fig6_mu.size(); ++i) {
      t[std::string("fig6") + static_cast<char>('a' + i)] = sweep_preset(fig6_mu[i], 0.5);
    }
    t["fig6"] = t["fig6a"];
    t["fig7a"] = sweep_preset(0.5, 0.92);
    t["fig7b"] = sweep_preset(-0.5, 0.92);
    t["fig7c"] = sweep_preset(0.5, 0.08);
    t["fig7d"] = sweep_preset(-0.5, 0.08);
    t["fig7"] = t["fig7a"];
    return t;
  }();
  return table;
}

void check_keys(const json& layer) {
  if (!layer.is_object()) throw ValidationError("config", "must be a JSON object");
  for (const auto& [key, value] : layer.items()) {
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end()) {
      throw ValidationError(key, "unknown configuration key");
    }
  }
}

double get_number(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (!v.is_number()) throw ValidationError(key, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError(key, "must be finite");
  return x;
}

int get_int(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (std::isfinite(x) && x == std::round(x) && std::abs(x) < 2e9) return static_cast<int>(x);
  }
  throw ValidationError(key, "must be an integer");
}

std::optional<int> maybe_int(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get_int(j, key);
}

PopulationProfile resolve_population(const json& j) {
  const auto n = maybe_int(j, "n");
  const auto n_e = maybe_int(j, "n_e");
  const auto n_g = maybe_int(j, "n_g");
  const bool has_share = j.contains("two_beta") && !j.at("two_beta").is_null();

  if (has_share && (n_e || n_g)) {
    throw ValidationError("two_beta", "give either two_beta or n_e/n_g, not both");
  }
  if (has_share) {
    if (!n) throw ValidationError("n", "required together with two_beta");
    return PopulationProfile::from_share(*n, get_number(j, "two_beta"));
  }
  if (n_e && n_g) return PopulationProfile::from_counts(n ? *n : *n_e + *n_g, *n_e, *n_g);
  if (n && n_e) return PopulationProfile::from_counts(*n, *n_e, *n - *n_e);
  if (n && n_g) return PopulationProfile::from_counts(*n, *n - *n_g, *n_g);
  throw ValidationError("n_e", "population split missing: give n with two_beta, or n_e and n_g");
}

MigrationOptions resolve_migration(const json& m) {
  if (!m.is_object()) throw ValidationError("migration", "must be null or an object");
  MigrationOptions out;
  for (const auto& [key, value] : m.items()) {
    if (key == "mode") {
      const std::string mode = value.is_string() ? value.get<std::string>() : "";
      if (mode == "levels") out.mode = MigrationMode::CapitalLevels;
      else if (mode == "increments") out.mode = MigrationMode::CapitalIncrements;
      else throw ValidationError("migration.mode", "must be \"levels\" or \"increments\"");
    } else if (key == "s1") {
      out.s1 = get_int(m, key);
    } else if (key == "s2") {
      out.s2 = get_int(m, key);
    } else if (key == "p_transition") {
      out.p_transition = get_number(m, key);
    } else {
      throw ValidationError("migration." + key, "unknown configuration key");
    }
  }
  out.validate();
  return out;
}

double round_grid(double x) { return std::round(x * 1e12) / 1e12; }

std::vector<double> resolve_grid(const json& g) {
  if (g.is_array()) {
    std::vector<double> grid;
    for (const json& v : g) {
      if (!v.is_number()) throw ValidationError("alpha_grid", "entries must be numbers");
      grid.push_back(round_grid(v.get<double>()));
    }
    return grid;
  }
  if (g.is_object()) {
    for (const auto& [key, value] : g.items()) {
      if (key != "start" && key != "stop" && key != "step") {
        throw ValidationError("alpha_grid." + key, "unknown configuration key");
      }
    }
    for (const char* key : {"start", "stop", "step"}) {
      if (!g.contains(key)) throw ValidationError(std::string("alpha_grid.") + key, "missing");
    }
    return expand_alpha_range(get_number(g, "start"), get_number(g, "stop"), get_number(g, "step"));
  }
  throw ValidationError("alpha_grid", "must be an array or {start, stop, step}");
}

std::uint64_t get_seed(const json& j) {
  const json& v = j.at("seed");
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ValidationError("seed", "must be a non-negative integer");
}

json extract_manifest_config(const json& doc) {
  const json* manifest = nullptr;
  if (doc.is_object() && doc.contains("tool")) manifest = &doc;
  else if (doc.is_object() && doc.contains("manifest") && doc.at("manifest").is_object()) manifest = &doc.at("manifest");
  if (!manifest) return doc;
  if (!manifest->contains("config")) throw ValidationError("config", "manifest has no config member");
  return manifest->at("config");
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, layer] : presets()) names.push_back(name);
  return names;
}

json preset_layer(std::string_view name) {
  const auto it = presets().find(name);
  if (it == presets().end()) throw ValidationError("preset", "unknown preset \"" + std::string(name) + "\"");
  json layer = it->second;
  layer["preset"] = std::string(name);
  return layer;
}

json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();

  constexpr std::string_view kManifestPrefix = "# manifest: ";
  if (text.starts_with(kManifestPrefix)) {
    const auto end = text.find('\n');
    text = text.substr(kManifestPrefix.size(), end == std::string::npos ? std::string::npos : end - kManifestPrefix.size());
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("config", std::string("not valid JSON: ") + e.what());
  }
  json layer = extract_manifest_config(doc);
  check_keys(layer);
  return layer;
}

json merge_layers(const json& lower, const json& upper) {
  check_keys(lower);
  check_keys(upper);
  json out = lower;
  const bool replaces_split = std::any_of(kSplitKeys.begin(), kSplitKeys.end(),
                                          [&](std::string_view k) { return upper.contains(k); });
  if (replaces_split) {
    for (std::string_view k : kSplitKeys) out.erase(std::string(k));
  }
  for (const auto& [key, value] : upper.items()) out[key] = value;
  return out;
}

std::vector<double> expand_alpha_range(double start, double stop, double step) {
  if (!(step > 0.0)) throw ValidationError("alpha_grid.step", "must be positive");
  if (stop < start) throw ValidationError("alpha_grid.stop", "must not be below start");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> grid;
  grid.reserve(count);
  for (std::size_t k = 0; k < count; ++k) grid.push_back(round_grid(start + static_cast<double>(k) * step));
  return grid;
}

SweepSpec ResolvedConfig::sweep_spec() const {
  SweepSpec spec;
  spec.base = simulation;
  spec.alpha_grid = alpha_grid;
  spec.replications = replications;
  spec.master_seed = simulation.seed;
  spec.threads = threads;
  return spec;
}

ResolvedConfig resolve_config(const json& merged, bool require_alpha) {
  check_keys(merged);
  ResolvedConfig out;
  SimulationConfig& sim = out.simulation;

  if (merged.contains("preset") && merged.at("preset").is_string()) out.preset = merged.at("preset").get<std::string>();
  sim.population = resolve_population(merged);

  if (!merged.contains("mu")) throw ValidationError("mu", "required");
  if (!merged.contains("sigma")) throw ValidationError("sigma", "required");
  sim.env = {get_number(merged, "mu"), get_number(merged, "sigma")};

  if (merged.contains("alpha") && !merged.at("alpha").is_null()) {
    sim.alpha = get_number(merged, "alpha");
    out.has_alpha = true;
  } else if (require_alpha) {
    throw ValidationError("alpha", "required");
  }

  if (merged.contains("principle")) {
    const json& p = merged.at("principle");
    if (!p.is_string()) throw ValidationError("principle", "must be a string");
    try {
      sim.principle = parse_principle(p.get<std::string>());
    } catch (const InvalidInput& e) {
      throw ValidationError("principle", e.what());
    }
  }
  if (merged.contains("steps")) sim.steps = get_int(merged, "steps");
  if (merged.contains("initial_capital")) sim.initial_capital = get_number(merged, "initial_capital");
  if (merged.contains("ruin")) {
    if (!merged.at("ruin").is_boolean()) throw ValidationError("ruin", "must be true or false");
    sim.ruin_enabled = merged.at("ruin").get<bool>();
  }
  if (merged.contains("migration") && !merged.at("migration").is_null()) {
    sim.migration = resolve_migration(merged.at("migration"));
  }
  if (merged.contains("seed")) sim.seed = get_seed(merged);
  if (merged.contains("replications")) out.replications = get_int(merged, "replications");
  if (out.replications < 1) throw ValidationError("replications", "must be at least 1");
  if (merged.contains("threads")) out.threads = get_int(merged, "threads");
  if (out.threads < 0) throw ValidationError("threads", "must be non-negative");

  if (merged.contains("alpha_grid") && !merged.at("alpha_grid").is_null()) {
    out.alpha_grid = resolve_grid(merged.at("alpha_grid"));
  } else {
    out.alpha_grid = expand_alpha_range(0.0, 1.0, 0.01);
  }
  try {
    out.alpha_grid = normalize_alpha_grid(out.alpha_grid);
  } catch (const InvalidInput& e) {
    throw ValidationError("alpha_grid", e.what());
  }

  sim.validate();
  return out;
}

json canonical_json(const ResolvedConfig& config, bool include_sweep) {
  const SimulationConfig& sim = config.simulation;
  json j = {{"n", sim.population.n()},
            {"n_e", sim.population.n_e},
            {"n_g", sim.population.n_g},
            {"mu", sim.env.mu},
            {"sigma", sim.env.sigma},
            {"alpha", config.has_alpha ? json(sim.alpha) : json(nullptr)},
            {"principle", std::string(to_string(sim.principle))},
            {"steps", sim.steps},
            {"initial_capital", sim.initial_capital},
            {"ruin", sim.ruin_enabled},
            {"seed", sim.seed}};
  if (include_sweep) {
    j["replications"] = config.replications;
    j["alpha_grid"] = config.alpha_grid;
  }
  if (sim.migration) {
    j["migration"] = {{"mode", sim.migration->mode == MigrationMode::CapitalLevels ? "levels" : "increments"},
                      {"s1", sim.migration->s1},
                      {"s2", sim.migration->s2},
                      {"p_transition", sim.migration->p_transition}};
  } else {
    j["migration"] = nullptr;
  }
  if (!config.preset.empty()) j["preset"] = config.preset;
  return j;
}

}  // namespace stratvote
