#include "stratvote/dynamics.hpp"

#include <cmath>
#include <limits>

#include "stratvote/errors.hpp"

namespace stratvote {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Mixed into the trajectory seed so migration draws never touch the proposal stream.
constexpr std::uint64_t kMigrationSalt = 0x6D69677261746521ULL;

double mean_of(std::span<const double> values, const SocietyState& state, Role role) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state.roles[i] != role) continue;
    sum += values[i];
    ++count;
  }
  return count == 0 ? kNaN : sum / static_cast<double>(count);
}

void fill_means(StepRecord& record, const SocietyState& state) {
  record.mean_e = category_mean(state, Role::Egoist);
  record.mean_g = category_mean(state, Role::GroupMember);
  const PopulationProfile active = state.active_profile();
  record.n_active_e = active.n_e;
  record.n_active_g = active.n_g;
}

double nan_skipping_average(const std::vector<StepRecord>& records, double StepRecord::*field) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const StepRecord& r : records) {
    const double v = r.*field;
    if (std::isnan(v)) continue;
    sum += v;
    ++count;
  }
  return count == 0 ? kNaN : sum / static_cast<double>(count);
}

}  // namespace

void MigrationOptions::validate() const {
  if (s1 < 1) throw ValidationError("migration.s1", "must be at least 1");
  if (s2 < 1) throw ValidationError("migration.s2", "must be at least 1");
  if (!(p_transition >= 0.0 && p_transition <= 1.0)) {
    throw ValidationError("migration.p_transition", "must lie in [0, 1]");
  }
}

void SimulationConfig::validate() const {
  if (population.n_e < 0 || population.n_g < 0 || population.n() < 1) {
    throw ValidationError("n", "population must have at least one participant");
  }
  env.validate();
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha", "must lie in [0, 1]");
  if (steps < 1) throw ValidationError("steps", "must be at least 1");
  if (!std::isfinite(initial_capital)) throw ValidationError("initial_capital", "must be finite");
  if (migration) migration->validate();
}

double category_mean(const SocietyState& state, Role role) {
  return mean_of(state.capitals, state, role);
}

StepResult step(const SocietyState& state, const Proposal& proposal, const SimulationConfig& config) {
  StepResult out;
  out.record.vote = vote(proposal, state, config.principle, config.alpha);
  out.state = apply_proposal(state, proposal, out.record.vote.accepted);
  out.record.step = out.state.step_index;
  fill_means(out.record, out.state);
  return out;
}

RuinResult apply_ruin(const SocietyState& state) {
  RuinResult out{state, 0, 0, false};
  bool any_active = false;
  for (std::size_t i = 0; i < out.state.size(); ++i) {
    const Role role = out.state.roles[i];
    if (role == Role::Ruined) continue;
    if (out.state.capitals[i] < 0.0) {
      if (role == Role::Egoist) ++out.ruined_e;
      else ++out.ruined_g;
      out.state.roles[i] = Role::Ruined;
    } else {
      any_active = true;
    }
  }
  out.all_ruined = !any_active;
  return out;
}

MigrationResult apply_migration(const SocietyState& state, std::span<const double> realized,
                                std::vector<int>& lag, const MigrationOptions& options,
                                std::mt19937_64& rng) {
  if (lag.size() != state.size()) throw StructuralError("apply_migration: lag counter size mismatch");
  const bool by_increments = options.mode == MigrationMode::CapitalIncrements;
  if (by_increments && realized.size() != state.size()) {
    throw StructuralError("apply_migration: realized increment size mismatch");
  }
  const std::span<const double> values = by_increments ? realized : std::span<const double>(state.capitals);
  const double egoist_mean = mean_of(values, state, Role::Egoist);
  const double group_mean = mean_of(values, state, Role::GroupMember);

  MigrationResult out{state, 0, 0};
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (std::size_t i = 0; i < state.size(); ++i) {
    const Role role = state.roles[i];
    if (role == Role::Ruined) {
      lag[i] = 0;
      continue;
    }
    const bool egoist = role == Role::Egoist;
    const double other_mean = egoist ? group_mean : egoist_mean;
    // NaN (empty opposite category) compares false.
    if (!(values[i] < other_mean)) {
      lag[i] = 0;
      continue;
    }
    ++lag[i];
    const int required = egoist ? options.s1 : options.s2;
    if (lag[i] < required) continue;
    if (uniform(rng) < options.p_transition) {
      out.state.roles[i] = egoist ? Role::GroupMember : Role::Egoist;
      lag[i] = 0;
      if (egoist) ++out.joined;
      else ++out.left;
    }
  }
  return out;
}

TrajectoryLog run_trajectory(const SimulationConfig& config) {
  config.validate();
  TrajectoryLog log;
  log.config = config;
  log.records.reserve(static_cast<std::size_t>(config.steps));

  SocietyState state = SocietyState::uniform(config.population, config.initial_capital);
  ProposalStream stream(config.env, config.seed);
  std::mt19937_64 migration_rng(splitmix64(config.seed ^ kMigrationSalt));
  std::vector<int> lag(state.size(), 0);
  std::vector<double> realized(state.size(), 0.0);
  int ruined_e = 0;
  int ruined_g = 0;

  for (int t = 0; t < config.steps; ++t) {
    const Proposal proposal = stream.next(state);
    StepResult result = step(state, proposal, config);
    StepRecord& record = result.record;
    state = std::move(result.state);

    if (config.ruin_enabled) {
      RuinResult ruin = apply_ruin(state);
      ruined_e += ruin.ruined_e;
      ruined_g += ruin.ruined_g;
      record.ruined_now = ruin.ruined_e + ruin.ruined_g;
      state = std::move(ruin.state);
    }
    if (config.migration) {
      for (std::size_t i = 0; i < state.size(); ++i) {
        const double d = proposal.increments[i];
        realized[i] = record.vote.accepted && !std::isnan(d) ? d : 0.0;
      }
      MigrationResult moved = apply_migration(state, realized, lag, *config.migration, migration_rng);
      record.joined = moved.joined;
      record.left = moved.left;
      state = std::move(moved.state);
    }
    record.n_ruined_e = ruined_e;
    record.n_ruined_g = ruined_g;
    fill_means(record, state);
    log.records.push_back(record);

    if (record.n_active_e + record.n_active_g == 0) {
      log.summary.terminated_early = true;
      break;
    }
  }

  TrajectorySummary& summary = log.summary;
  summary.steps_run = log.records.size();
  for (const StepRecord& r : log.records) summary.accepted += r.vote.accepted ? 1 : 0;
  summary.avg_mean_e = nan_skipping_average(log.records, &StepRecord::mean_e);
  summary.avg_mean_g = nan_skipping_average(log.records, &StepRecord::mean_g);
  summary.final_mean_e = log.records.back().mean_e;
  summary.final_mean_g = log.records.back().mean_g;
  log.final_state = std::move(state);
  return log;
}

}  // namespace stratvote
