#pragma once

// Voting trajectories with optional ruin and egoist <-> group migration.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "stratvote/environment.hpp"
#include "stratvote/model.hpp"

namespace stratvote {

enum class MigrationMode : std::uint8_t {
  CapitalLevels,      // compare capitals with the other category's mean capital
  CapitalIncrements,  // compare this step's realized increments instead
};

struct MigrationOptions {
  MigrationMode mode = MigrationMode::CapitalLevels;
  int s1 = 10;  // consecutive lagging steps before an egoist may join
  int s2 = 10;  // consecutive lagging steps before a member may leave
  double p_transition = 0.1;

  void validate() const;
};

struct SimulationConfig {
  PopulationProfile population;
  EnvironmentParams env;
  double alpha = 0.5;
  GroupPrinciple principle = GroupPrinciple::B;
  int steps = 1000;
  double initial_capital = 0.0;
  bool ruin_enabled = false;
  std::optional<MigrationOptions> migration;
  std::uint64_t seed = 0;  // trajectory seed, used as-is

  void validate() const;
  bool stationary() const noexcept { return !ruin_enabled && !migration; }
};

/// End-of-step snapshot. Means are over active members and NaN for an empty
/// category.
struct StepRecord {
  std::size_t step = 0;  // 1-based
  double mean_e = 0.0;
  double mean_g = 0.0;
  VoteOutcome vote;
  int n_active_e = 0;
  int n_active_g = 0;
  int n_ruined_e = 0;  // cumulative
  int n_ruined_g = 0;
  int ruined_now = 0;
  int joined = 0;
  int left = 0;
};

struct TrajectorySummary {
  double avg_mean_e = 0.0;  // category means averaged over steps
  double avg_mean_g = 0.0;
  double final_mean_e = 0.0;
  double final_mean_g = 0.0;
  std::size_t accepted = 0;
  std::size_t steps_run = 0;
  bool terminated_early = false;

  double acceptance_rate() const noexcept {
    return steps_run == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(steps_run);
  }
};

struct TrajectoryLog {
  SimulationConfig config;
  std::vector<StepRecord> records;
  TrajectorySummary summary;
  SocietyState final_state;
};

/// Mean capital of active participants holding `role`; NaN if there are none.
double category_mean(const SocietyState& state, Role role);

struct StepResult {
  SocietyState state;
  StepRecord record;
};

/// Vote on `proposal` and apply it. The record carries the vote and the
/// post-application category means.
StepResult step(const SocietyState& state, const Proposal& proposal, const SimulationConfig& config);

struct RuinResult {
  SocietyState state;
  int ruined_e = 0;
  int ruined_g = 0;
  bool all_ruined = false;
};

/// Every active participant with negative capital leaves; its capital is frozen.
RuinResult apply_ruin(const SocietyState& state);

struct MigrationResult {
  SocietyState state;
  int joined = 0;
  int left = 0;
};

/// `lag` holds one consecutive-lag counter per participant and is updated in
/// place. `realized` are this step's applied increments (zeros on rejection);
/// only read in CapitalIncrements mode.
MigrationResult apply_migration(const SocietyState& state, std::span<const double> realized,
                                std::vector<int>& lag, const MigrationOptions& options,
                                std::mt19937_64& rng);

TrajectoryLog run_trajectory(const SimulationConfig& config);

}  // namespace stratvote
