#include "stratvote/experiments.hpp"

#include <cmath>
#include <limits>

#include "stratvote/errors.hpp"

namespace stratvote {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ReplicationSummary {
  double avg_e = kNaN;
  double avg_g = kNaN;
  double final_e = kNaN;
  double final_g = kNaN;
  std::size_t accepted = 0;
  std::size_t steps = 0;
};

bool within_three_se(double observed, double predicted, double se) {
  const double diff = std::fabs(observed - predicted);
  if (se > 0.0) return diff <= 3.0 * se;
  return diff <= 1e-9 * std::max(1.0, std::fabs(predicted));
}

}  // namespace

unsigned resolve_threads(int requested) noexcept {
  if (requested > 0) return static_cast<unsigned>(requested);
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

MeanEstimate estimate_mean(std::span<const double> values) {
  MeanEstimate out;
  double sum = 0.0;
  for (double v : values) {
    if (std::isnan(v)) continue;
    sum += v;
    ++out.count;
  }
  if (out.count == 0) {
    out.mean = kNaN;
    return out;
  }
  out.mean = sum / static_cast<double>(out.count);
  if (out.count > 1) {
    double ss = 0.0;
    for (double v : values) {
      if (!std::isnan(v)) ss += (v - out.mean) * (v - out.mean);
    }
    const double variance = ss / static_cast<double>(out.count - 1);
    out.se = std::sqrt(variance / static_cast<double>(out.count));
  }
  return out;
}

std::vector<double> normalize_alpha_grid(std::vector<double> grid) {
  for (double a : grid) {
    if (!(a >= 0.0 && a <= 1.0)) throw ValidationError("alpha_grid", "values must lie in [0, 1]");
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

void SweepSpec::validate() const {
  if (alpha_grid.empty()) throw ValidationError("alpha_grid", "must not be empty");
  if (normalize_alpha_grid(alpha_grid) != alpha_grid) {
    throw ValidationError("alpha_grid", "must be sorted and free of duplicates");
  }
  if (replications < 1) throw ValidationError("replications", "must be at least 1");
  SimulationConfig probe = base;
  probe.alpha = alpha_grid.front();
  probe.validate();
}

SweepTable sweep_alpha(const SweepSpec& spec) {
  spec.validate();
  const std::size_t reps = static_cast<std::size_t>(spec.replications);
  const std::size_t total = spec.alpha_grid.size() * reps;

  const auto runs = parallel_map<ReplicationSummary>(total, spec.threads, [&](std::size_t k) {
    const std::size_t alpha_index = k / reps;
    const std::size_t r = k % reps;
    SimulationConfig config = spec.base;
    config.alpha = spec.alpha_grid[alpha_index];
    config.seed = derive_seed(spec.master_seed, alpha_index, r);
    const TrajectoryLog log = run_trajectory(config);
    ReplicationSummary out;
    out.avg_e = log.summary.avg_mean_e;
    out.avg_g = log.summary.avg_mean_g;
    out.final_e = log.summary.final_mean_e;
    out.final_g = log.summary.final_mean_g;
    out.accepted = log.summary.accepted;
    out.steps = log.summary.steps_run;
    return out;
  });

  const PopulationProfile& pop = spec.base.population;
  std::optional<ZonePartition> partition;
  if (pop.n_e >= 1) {
    const double p = approval_probability(spec.base.env.mu, spec.base.env.sigma).p;
    partition = zone_partition(pop.beta(), pop.n_e, p);
  }

  SweepTable table;
  table.spec = spec;
  const double a = spec.base.initial_capital;
  for (std::size_t i = 0; i < spec.alpha_grid.size(); ++i) {
    SweepCell cell;
    cell.alpha = spec.alpha_grid[i];
    cell.alpha_index = i;
    if (partition) cell.zone = classify_zone(cell.alpha, *partition);
    std::vector<double> avg_e, avg_g, fin_e, fin_g, gap;
    for (std::size_t r = 0; r < reps; ++r) {
      const ReplicationSummary& s = runs[i * reps + r];
      avg_e.push_back(s.avg_e);
      avg_g.push_back(s.avg_g);
      fin_e.push_back(s.final_e - a);
      fin_g.push_back(s.final_g - a);
      gap.push_back(s.avg_g - s.avg_e);
      cell.accepted += s.accepted;
      cell.steps_total += s.steps;
    }
    cell.egoist = {estimate_mean(avg_e), estimate_mean(fin_e)};
    cell.group = {estimate_mean(avg_g), estimate_mean(fin_g)};
    cell.gap = estimate_mean(gap);
    if (cell.steps_total > 0) {
      const double n = static_cast<double>(cell.steps_total);
      cell.acceptance_rate = static_cast<double>(cell.accepted) / n;
      cell.acceptance_se = std::sqrt(cell.acceptance_rate * (1.0 - cell.acceptance_rate) / n);
    }
    table.cells.push_back(std::move(cell));
  }
  return table;
}

RateEstimate acceptance_rate(const SimulationConfig& config, int replications, std::uint64_t master_seed,
                             int threads) {
  if (replications < 1) throw ValidationError("replications", "must be at least 1");
  const auto counts = run_replicated(config, replications, master_seed, 0, threads, [](const TrajectoryLog& log) {
    return std::pair<std::size_t, std::size_t>{log.summary.accepted, log.summary.steps_run};
  });
  RateEstimate out;
  for (const auto& [accepted, steps] : counts) {
    out.accepted += accepted;
    out.trials += steps;
  }
  if (out.trials > 0) {
    const double n = static_cast<double>(out.trials);
    out.rate = static_cast<double>(out.accepted) / n;
    out.se = std::sqrt(out.rate * (1.0 - out.rate) / n);
  }
  return out;
}

double step_mean_ratio(const TrajectoryLog& log, Category category) {
  const double a = log.config.initial_capital;
  const double avg = category == Category::Egoist ? log.summary.avg_mean_e : log.summary.avg_mean_g;
  const double fin = category == Category::Egoist ? log.summary.final_mean_e : log.summary.final_mean_g;
  if (fin == a) return kNaN;
  return (avg - a) / (fin - a);
}

std::vector<IdentityVerdict> step_mean_identity_check(std::span<const TrajectoryLog> logs) {
  if (logs.empty()) throw InvalidInput("step_mean_identity_check: no logs");
  for (const TrajectoryLog& log : logs) {
    if (!log.config.stationary() || log.summary.terminated_early) {
      throw UnsupportedRegime("step-mean identity needs a stationary configuration (no ruin, no migration)");
    }
  }
  std::vector<IdentityVerdict> out;
  for (Category category : {Category::Egoist, Category::Group}) {
    std::vector<double> avg_delta, final_delta, residual;
    IdentityVerdict v;
    v.category = category;
    const double s = static_cast<double>(logs.front().summary.steps_run);
    v.expected_ratio = (s + 1.0) / (2.0 * s);
    for (const TrajectoryLog& log : logs) {
      const double a = log.config.initial_capital;
      const double avg = category == Category::Egoist ? log.summary.avg_mean_e : log.summary.avg_mean_g;
      const double fin = category == Category::Egoist ? log.summary.final_mean_e : log.summary.final_mean_g;
      if (std::isnan(avg) || std::isnan(fin)) continue;
      avg_delta.push_back(avg - a);
      final_delta.push_back(fin - a);
      residual.push_back((avg - a) - v.expected_ratio * (fin - a));
    }
    if (residual.empty()) continue;
    const MeanEstimate num = estimate_mean(avg_delta);
    const MeanEstimate den = estimate_mean(final_delta);
    const MeanEstimate res = estimate_mean(residual);
    v.observed_ratio = den.mean == 0.0 ? kNaN : num.mean / den.mean;
    v.discrepancy = res.mean;
    v.se = res.se;
    v.pass = within_three_se(res.mean, 0.0, res.se);
    out.push_back(v);
  }
  return out;
}

std::string_view tolerance_name(ToleranceClass tolerance) {
  switch (tolerance) {
    case ToleranceClass::None: return "none";
    case ToleranceClass::ThreeSE: return "3se";
    case ToleranceClass::TenPercent: return "10pct";
    case ToleranceClass::ExactStatic: return "exact_static";
  }
  return "?";
}

bool ComparisonReport::all_pass() const noexcept { return failures() == 0; }

std::size_t ComparisonReport::failures() const noexcept {
  std::size_t n = 0;
  for (const ComparisonRow& row : rows) n += (row.pass && !*row.pass) ? 1 : 0;
  return n;
}

namespace {

struct CellPrediction {
  std::optional<double> egoist_delta;  // expected s-step increment
  std::optional<double> group_delta;
  std::optional<double> gap_delta;
  ToleranceClass egoist_tol = ToleranceClass::None;
  ToleranceClass group_tol = ToleranceClass::None;
  ToleranceClass gap_tol = ToleranceClass::None;
};

CellPrediction predict_cell(const SweepSpec& spec, double alpha, std::optional<Zone> zone) {
  CellPrediction out;
  const SimulationConfig& base = spec.base;
  const PopulationProfile& pop = base.population;
  if (!zone || pop.n_e < 1 || pop.n_g < 1) return out;
  const double mu = base.env.mu;
  const double sigma = base.env.sigma;
  const int s = base.steps;
  const double beta = pop.beta();

  auto set_all = [&](double e, double g, ToleranceClass tol) {
    out.egoist_delta = e;
    out.group_delta = g;
    out.gap_delta = g - e;
    out.egoist_tol = out.group_tol = out.gap_tol = tol;
  };

  if (*zone == Zone::Two) {
    set_all(0.0, 0.0, ToleranceClass::ExactStatic);
    return out;
  }
  if (*zone == Zone::One) {
    if (mu == 0.0) set_all(0.0, 0.0, ToleranceClass::ThreeSE);
    else set_all(mu * s, mu * s, ToleranceClass::TenPercent);
    out.gap_delta = 0.0;
    out.gap_tol = ToleranceClass::ThreeSE;
    return out;
  }
  if (base.principle == GroupPrinciple::APrime) return out;

  if (mu == 0.0) {
    constexpr double kTie = 1e-12;
    std::optional<NeutralRegime> regime;
    if (std::fabs(alpha - beta) < kTie) regime = NeutralRegime::AlphaEqualsBeta;
    else if (std::fabs(alpha - (1.0 - beta)) < kTie) regime = NeutralRegime::AlphaEqualsOneMinusBeta;
    else if (*zone == Zone::Three) regime = NeutralRegime::Zone3;
    if (!regime) return out;
    const NeutralPrediction p = neutral_expected_increments(*regime, base.principle, pop.n_e, pop.n_g, sigma, s);
    out.egoist_delta = p.egoist.expected_increment;
    out.group_delta = p.group.expected_increment;
    out.group_tol = ToleranceClass::TenPercent;
    // A zero expectation cannot be checked in relative terms.
    out.egoist_tol = p.egoist.expected_increment == 0.0 ? ToleranceClass::ThreeSE : ToleranceClass::TenPercent;
    return out;
  }

  if (*zone == Zone::Three && base.principle == GroupPrinciple::B) {
    const Zone3EnvironmentPrediction z = zone3_env_predictions(mu, sigma, pop.n_g, s);
    out.egoist_delta = z.egoist_s_step;
    out.group_delta = z.group_s_step;
    out.gap_delta = z.difference;
    out.egoist_tol = out.group_tol = out.gap_tol = ToleranceClass::ThreeSE;
  }
  return out;
}

ComparisonRow make_row(const SweepCell& cell, std::string_view category, const MeanEstimate& observed,
                       double origin, std::optional<double> delta, ToleranceClass tol, double step_factor) {
  ComparisonRow row;
  row.alpha = cell.alpha;
  row.zone = cell.zone;
  row.category = category;
  row.mean_capital_avg = observed.mean;
  row.se = observed.se;
  row.acceptance_rate = cell.acceptance_rate;
  if (!delta || tol == ToleranceClass::None || std::isnan(observed.mean)) return row;

  // The step-averaged capital moves (s + 1) / 2s of the way to the final value.
  const double predicted = origin + *delta * step_factor;
  row.prediction = predicted;
  row.tolerance = tol;
  switch (tol) {
    case ToleranceClass::ExactStatic:
      row.pass = cell.accepted == 0 ? observed.mean == predicted
                                    : within_three_se(observed.mean, predicted, observed.se);
      break;
    case ToleranceClass::ThreeSE:
      row.pass = within_three_se(observed.mean, predicted, observed.se);
      break;
    case ToleranceClass::TenPercent: {
      const double obs_delta = observed.mean - origin;
      const double pred_delta = predicted - origin;
      row.pass = std::fabs(obs_delta - pred_delta) <= 0.1 * std::fabs(pred_delta);
      break;
    }
    case ToleranceClass::None:
      break;
  }
  return row;
}

}  // namespace

ComparisonReport compare_sweep(const SweepTable& table) {
  ComparisonReport report;
  report.spec = table.spec;
  const double a = table.spec.base.initial_capital;
  const double s = table.spec.base.steps;
  const double factor = (s + 1.0) / (2.0 * s);
  for (const SweepCell& cell : table.cells) {
    const CellPrediction p = predict_cell(table.spec, cell.alpha, cell.zone);
    report.rows.push_back(make_row(cell, "egoist", cell.egoist.avg_capital, a, p.egoist_delta, p.egoist_tol, factor));
    report.rows.push_back(make_row(cell, "group", cell.group.avg_capital, a, p.group_delta, p.group_tol, factor));
    report.rows.push_back(make_row(cell, "gap", cell.gap, 0.0, p.gap_delta, p.gap_tol, factor));
  }
  return report;
}

ComparisonReport tabulate_sweep(const SweepTable& table) {
  ComparisonReport report;
  report.spec = table.spec;
  for (const SweepCell& cell : table.cells) {
    report.rows.push_back(make_row(cell, "egoist", cell.egoist.avg_capital, 0.0, {}, ToleranceClass::None, 1.0));
    report.rows.push_back(make_row(cell, "group", cell.group.avg_capital, 0.0, {}, ToleranceClass::None, 1.0));
    report.rows.push_back(make_row(cell, "gap", cell.gap, 0.0, {}, ToleranceClass::None, 1.0));
  }
  return report;
}

ComparisonReport compare_mc_vs_analytic(const SweepSpec& spec) { return compare_sweep(sweep_alpha(spec)); }

namespace {

DispossessionRun replay_chain(std::string_view society, SocietyState state, const std::vector<Proposal>& chain,
                              const std::vector<std::size_t>& order, GroupPrinciple principle, double alpha) {
  DispossessionRun run;
  run.society = society;
  for (std::size_t k = 0; k < chain.size(); ++k) {
    DispossessionStep step;
    step.victim = order[k];
    step.vote = vote(chain[k], state, principle, alpha);
    state = apply_proposal(state, chain[k], step.vote.accepted);
    step.capitals = state.capitals;
    run.accepted += step.vote.accepted ? 1 : 0;
    run.steps.push_back(std::move(step));
  }
  run.final_capitals = state.capitals;
  return run;
}

}  // namespace

DispossessionDemo run_dispossession_demo(int n, double initial_capital, double organizer_cut, double alpha) {
  if (n < 3) throw ValidationError("n", "the dispossession demo needs at least 3 participants");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha", "must lie in [0, 1]");
  DispossessionDemo demo;
  demo.n = n;
  demo.initial_capital = initial_capital;
  demo.organizer_cut = organizer_cut;
  demo.alpha = alpha;

  const SocietyState egoists = SocietyState::uniform(PopulationProfile{n, 0}, initial_capital);
  const SocietyState group = SocietyState::uniform(PopulationProfile{0, n}, initial_capital);
  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  demo.chain = dispossession_sequence(egoists, order, organizer_cut);
  demo.egoists = replay_chain("all-egoist", egoists, demo.chain, order, GroupPrinciple::B, alpha);
  demo.group = replay_chain("all-group-B", group, demo.chain, order, GroupPrinciple::B, alpha);
  return demo;
}

double ols_slope(std::span<const double> y) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (std::isnan(y[i])) continue;
    const double x = static_cast<double>(i + 1);
    sx += x;
    sy += y[i];
    sxx += x * x;
    sxy += x * y[i];
    ++n;
  }
  if (n < 2) return kNaN;
  const double nn = static_cast<double>(n);
  const double denom = nn * sxx - sx * sx;
  return (nn * sxy - sx * sy) / denom;
}

}  // namespace stratvote
