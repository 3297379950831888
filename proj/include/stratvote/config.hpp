#pragma once

// Configuration layering: preset < config file < command-line flags.
//
// Every layer is a JSON object using the keys below. A layer that names any of
// n_e, n_g or two_beta replaces the population split of earlier layers, so a
// preset's 2β does not fight an explicit n_e/n_g pair given later.
//
//   n, n_e, n_g, two_beta        population (n_e + n_g must equal n)
//   mu, sigma                    environment, required
//   alpha                        threshold, required for simulate
//   principle                    "A", "B" or "A'"
//   steps, initial_capital, ruin
//   migration                    null or {mode: levels|increments, s1, s2, p_transition}
//   seed                         master seed
//   replications, threads
//   alpha_grid                   [..] or {start, stop, step}
//   preset                       name of the base preset (file layer only)

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stratvote/dynamics.hpp"
#include "stratvote/experiments.hpp"

namespace stratvote {

std::vector<std::string> preset_names();

/// Keys of a named preset; throws ValidationError("preset") for unknown names.
nlohmann::json preset_layer(std::string_view name);

/// Reads a config layer from a JSON file. Output manifests are accepted too:
/// a JSON document with a "manifest" member, a bare manifest (has "tool"), or
/// a CSV whose first line is "# manifest: {...}". Throws IoError when the file
/// cannot be read and ValidationError when it is not valid JSON.
nlohmann::json load_config_file(const std::filesystem::path& path);

/// Overlays `upper` onto `lower`, applying the population replacement rule.
/// Unknown keys are rejected.
nlohmann::json merge_layers(const nlohmann::json& lower, const nlohmann::json& upper);

struct ResolvedConfig {
  std::string preset;  // empty when none
  SimulationConfig simulation;  // seed holds the master seed
  bool has_alpha = false;
  std::vector<double> alpha_grid;
  int replications = 200;
  int threads = 0;

  std::uint64_t master_seed() const noexcept { return simulation.seed; }
  SweepSpec sweep_spec() const;
};

/// Validates a merged layer. μ, σ and the population are always required;
/// α only when `require_alpha` is set.
ResolvedConfig resolve_config(const nlohmann::json& merged, bool require_alpha);

/// Fully explicit key set that resolves back to the same configuration.
/// Sweep keys (replications, alpha_grid) are left out unless requested.
nlohmann::json canonical_json(const ResolvedConfig& config, bool include_sweep = true);

/// Expands {start, stop, step} into a grid with values rounded to 1e-12.
std::vector<double> expand_alpha_range(double start, double stop, double step);

}  // namespace stratvote
