#pragma once

// Replicated trajectories, threshold sweeps and Monte Carlo vs. closed-form
// comparison tables.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <string_view>
#include <thread>
#include <vector>

#include "stratvote/analytics.hpp"
#include "stratvote/dynamics.hpp"

namespace stratvote {

/// Number of worker threads to use for `requested` (0 = hardware concurrency).
unsigned resolve_threads(int requested) noexcept;

/// Runs `count` independent work items on up to `threads` workers. Results are
/// stored by index, so the output does not depend on scheduling.
template <typename Result, typename Work>
std::vector<Result> parallel_map(std::size_t count, int threads, Work&& work) {
  std::vector<Result> results(count);
  const unsigned workers = std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = work(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    body();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

/// Runs `replications` trajectories of `config` with seeds
/// derive_seed(master_seed, alpha_index, r) and reduces each log with `reduce`.
template <typename Reduce>
auto run_replicated(const SimulationConfig& config, int replications, std::uint64_t master_seed,
                    std::uint64_t alpha_index, int threads, Reduce&& reduce) {
  using Result = std::decay_t<decltype(reduce(std::declval<const TrajectoryLog&>()))>;
  return parallel_map<Result>(static_cast<std::size_t>(replications), threads, [&](std::size_t r) {
    SimulationConfig cell = config;
    cell.seed = derive_seed(master_seed, alpha_index, r);
    return reduce(run_trajectory(cell));
  });
}

struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean across replications
  std::size_t count = 0;
};

/// Sample mean with its standard error; NaN entries are skipped.
MeanEstimate estimate_mean(std::span<const double> values);

struct SweepSpec {
  SimulationConfig base;  // alpha ignored
  std::vector<double> alpha_grid;
  int replications = 200;
  std::uint64_t master_seed = 0;
  int threads = 0;

  void validate() const;
};

/// Sorts and removes duplicates; throws on values outside [0, 1].
std::vector<double> normalize_alpha_grid(std::vector<double> grid);

struct CategoryStats {
  MeanEstimate avg_capital;   // step-and-category averaged capital
  MeanEstimate final_delta;   // final category mean minus initial capital
};

struct SweepCell {
  double alpha = 0.0;
  std::size_t alpha_index = 0;
  std::optional<Zone> zone;
  CategoryStats egoist;
  CategoryStats group;
  MeanEstimate gap;  // group minus egoist step-averaged capital
  double acceptance_rate = 0.0;
  double acceptance_se = 0.0;
  std::size_t accepted = 0;
  std::size_t steps_total = 0;
};

struct SweepTable {
  SweepSpec spec;
  std::vector<SweepCell> cells;
};

SweepTable sweep_alpha(const SweepSpec& spec);

struct RateEstimate {
  double rate = 0.0;
  double se = 0.0;
  std::size_t accepted = 0;
  std::size_t trials = 0;
};

/// Pooled acceptance frequency over `replications` trajectories with binomial SE.
RateEstimate acceptance_rate(const SimulationConfig& config, int replications, std::uint64_t master_seed,
                             int threads = 0);

enum class Category : std::uint8_t { Egoist, Group };

/// (step-averaged mean - a) / (final mean - a) for one log; NaN when the
/// final mean equals a.
double step_mean_ratio(const TrajectoryLog& log, Category category);

struct IdentityVerdict {
  Category category = Category::Egoist;
  double expected_ratio = 0.5;  // (s + 1) / 2s for end-of-step records
  double observed_ratio = 0.0;  // mean step-average delta / mean final delta
  double discrepancy = 0.0;     // mean of (step-average delta - expected_ratio * final delta)
  double se = 0.0;
  bool pass = false;
};

/// Checks that the step-averaged capital moves half as far from the initial
/// value as the final capital, within 3 cross-replication standard errors.
/// Requires stationary configurations (no ruin, no migration).
std::vector<IdentityVerdict> step_mean_identity_check(std::span<const TrajectoryLog> logs);

enum class ToleranceClass : std::uint8_t {
  None,         // no prediction for this cell
  ThreeSE,      // exact expectation: |observed - predicted| <= 3 SE
  TenPercent,   // estimate: relative error of the increment <= 10%
  ExactStatic,  // nothing accepted -> observed equals initial capital exactly
};

std::string_view tolerance_name(ToleranceClass tolerance);

struct ComparisonRow {
  double alpha = 0.0;
  std::optional<Zone> zone;
  std::string_view category;  // "egoist", "group" or "gap"
  double mean_capital_avg = 0.0;
  double se = 0.0;
  double acceptance_rate = 0.0;
  std::optional<double> prediction;  // same units as mean_capital_avg
  ToleranceClass tolerance = ToleranceClass::None;
  std::optional<bool> pass;
};

struct ComparisonReport {
  SweepSpec spec;
  std::vector<ComparisonRow> rows;

  bool all_pass() const noexcept;
  std::size_t failures() const noexcept;
};

/// Attaches predictions and verdicts to an existing sweep.
ComparisonReport compare_sweep(const SweepTable& table);

/// Same rows as compare_sweep without predictions or verdicts.
ComparisonReport tabulate_sweep(const SweepTable& table);

/// sweep_alpha followed by compare_sweep.
ComparisonReport compare_mc_vs_analytic(const SweepSpec& spec);

struct DispossessionStep {
  std::size_t victim = 0;
  VoteOutcome vote;
  std::vector<double> capitals;  // after the vote
};

struct DispossessionRun {
  std::string_view society;  // "all-egoist" or "all-group-B"
  std::vector<DispossessionStep> steps;
  std::size_t accepted = 0;
  std::vector<double> final_capitals;
};

struct DispossessionDemo {
  int n = 3;
  double initial_capital = 9.0;
  double organizer_cut = 0.5;
  double alpha = 0.5;
  std::vector<Proposal> chain;
  DispossessionRun egoists;
  DispossessionRun group;
};

/// Feeds the dispossession chain (victims in index order) to an all-egoist
/// society and to a society that is one principle-B group.
DispossessionDemo run_dispossession_demo(int n, double initial_capital, double organizer_cut, double alpha);

/// Least-squares slope of y against 1..n; NaN entries are skipped.
double ols_slope(std::span<const double> y);

}  // namespace stratvote
