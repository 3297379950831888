#include "stratvote/serialization.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace stratvote {

using nlohmann::json;

namespace {

json number_or_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

template <typename T>
json optional_number(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json to_json(const Interval& interval) { return json::array({interval.lo, interval.hi}); }

json to_json(const Moments& m) { return {{"mean", m.mean}, {"variance", m.variance}, {"sd", m.sd()}}; }

json to_json(const CategoryPrediction& c) {
  return {{"expected_increment", c.expected_increment}, {"rms", optional_number(c.rms)}};
}

std::string_view bool_text(bool b) { return b ? "1" : "0"; }

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

json to_json(const MigrationOptions& options) {
  return {{"mode", options.mode == MigrationMode::CapitalLevels ? "levels" : "increments"},
          {"s1", options.s1},
          {"s2", options.s2},
          {"p_transition", options.p_transition}};
}

json to_json(const SimulationConfig& config) {
  return {{"n", config.population.n()},
          {"n_e", config.population.n_e},
          {"n_g", config.population.n_g},
          {"mu", config.env.mu},
          {"sigma", config.env.sigma},
          {"alpha", config.alpha},
          {"principle", std::string(to_string(config.principle))},
          {"steps", config.steps},
          {"initial_capital", config.initial_capital},
          {"ruin", config.ruin_enabled},
          {"migration", config.migration ? to_json(*config.migration) : json(nullptr)},
          {"seed", config.seed}};
}

json to_json(const VoteOutcome& o) {
  return {{"xi", o.xi},
          {"xi_e", o.xi_e},
          {"xi_g", o.xi_g},
          {"group_supports", o.group_supports},
          {"accepted", o.accepted},
          {"no_egoists", o.no_egoists},
          {"no_group", o.no_group}};
}

json to_json(const PredictionReport& r) {
  json out;
  out["population"] = {{"n", r.population.n()}, {"n_e", r.population.n_e}, {"n_g", r.population.n_g},
                       {"beta", r.population.beta()}};
  out["environment"] = {{"mu", r.mu}, {"sigma", r.sigma}};
  out["steps"] = r.steps;
  out["principle"] = std::string(to_string(r.principle));
  out["alpha"] = optional_number(r.alpha);
  out["p"] = r.approval.p;
  out["q"] = r.approval.q;
  out["xi_e"] = to_json(r.xi_e);
  out["xi_g"] = to_json(r.xi_g);
  out["concentration"] = {{"xi_e", to_json(r.xi_e_zone)},
                          {"xi_group_against", to_json(r.xi_unsupported_zone)},
                          {"xi_group_for", to_json(r.xi_supported_zone)}};
  out["zones"] = {{"boundaries", r.partition.boundaries},
                  {"zone3_exists", r.partition.zone3_exists},
                  {"alpha_zone", r.alpha_zone ? json(std::string(zone_name(*r.alpha_zone))) : json(nullptr)},
                  {"egoists_insufficient_two_beta", r.egoists_insufficient_two_beta}};
  json neutral = json::object();
  for (const NeutralPrediction& p : r.neutral) {
    neutral[std::string(regime_name(p.regime))][std::string(to_string(p.principle))] = {
        {"acceptance_probability", p.acceptance_probability},
        {"egoist", to_json(p.egoist)},
        {"group", to_json(p.group)},
        {"kind", p.approximation ? "approximation" : "exact"}};
  }
  out["neutral"] = r.neutral.empty() ? json(nullptr) : neutral;
  if (r.zone3_environment) {
    const Zone3EnvironmentPrediction& z = *r.zone3_environment;
    out["zone3_environment"]["B"] = {{"sigma_prime", z.sigma_prime},
                                     {"mu_prime", z.mu_prime},
                                     {"accept_prob", z.accept_prob},
                                     {"group_step_mean_conditional", optional_number(z.group_step_mean_conditional)},
                                     {"group_step_mean", z.group_step_mean},
                                     {"group_s_step", z.group_s_step},
                                     {"egoist_s_step", z.egoist_s_step},
                                     {"difference", z.difference},
                                     {"kind", "exact"}};
  } else {
    out["zone3_environment"] = nullptr;
  }
  return out;
}

void write_manifest_line(std::ostream& os, const json& manifest) {
  os << "# manifest: " << manifest.dump() << '\n';
}

void write_trajectory_csv(std::ostream& os, const TrajectoryLog& log, const json& manifest) {
  write_manifest_line(os, manifest);
  os << kTrajectoryCsvHeader << '\n';
  for (const StepRecord& r : log.records) {
    os << r.step << ',' << format_double(r.mean_e) << ',' << format_double(r.mean_g) << ','
       << bool_text(r.vote.accepted) << ',' << format_double(r.vote.xi) << ',' << format_double(r.vote.xi_e) << ','
       << format_double(r.vote.xi_g) << ',' << bool_text(r.vote.group_supports) << ',' << r.n_active_e << ','
       << r.n_active_g << '\n';
  }
}

json trajectory_to_json(const TrajectoryLog& log, const json& manifest) {
  json records = json::array();
  for (const StepRecord& r : log.records) {
    records.push_back({{"step", r.step},
                       {"mean_e", number_or_null(r.mean_e)},
                       {"mean_g", number_or_null(r.mean_g)},
                       {"vote", to_json(r.vote)},
                       {"n_active_e", r.n_active_e},
                       {"n_active_g", r.n_active_g},
                       {"n_ruined_e", r.n_ruined_e},
                       {"n_ruined_g", r.n_ruined_g},
                       {"ruined_now", r.ruined_now},
                       {"joined", r.joined},
                       {"left", r.left}});
  }
  const TrajectorySummary& s = log.summary;
  return {{"manifest", manifest},
          {"config", to_json(log.config)},
          {"summary",
           {{"avg_mean_e", number_or_null(s.avg_mean_e)},
            {"avg_mean_g", number_or_null(s.avg_mean_g)},
            {"final_mean_e", number_or_null(s.final_mean_e)},
            {"final_mean_g", number_or_null(s.final_mean_g)},
            {"accepted", s.accepted},
            {"steps_run", s.steps_run},
            {"acceptance_rate", s.acceptance_rate()},
            {"terminated_early", s.terminated_early}}},
          {"records", records}};
}

void write_comparison_csv(std::ostream& os, const ComparisonReport& report, const json& manifest) {
  write_manifest_line(os, manifest);
  os << kSweepCsvHeader << '\n';
  for (const ComparisonRow& row : report.rows) {
    os << format_double(row.alpha) << ',' << (row.zone ? zone_name(*row.zone) : "") << ',' << row.category << ','
       << format_double(row.mean_capital_avg) << ',' << format_double(row.se) << ','
       << format_double(row.acceptance_rate) << ',' << (row.prediction ? format_double(*row.prediction) : "") << ','
       << tolerance_name(row.tolerance) << ',' << (row.pass ? (*row.pass ? "pass" : "fail") : "") << '\n';
  }
}

json comparison_to_json(const ComparisonReport& report, const json& manifest) {
  json rows = json::array();
  for (const ComparisonRow& row : report.rows) {
    rows.push_back({{"alpha", row.alpha},
                    {"zone", row.zone ? json(std::string(zone_name(*row.zone))) : json(nullptr)},
                    {"category", std::string(row.category)},
                    {"mean_capital_avg", number_or_null(row.mean_capital_avg)},
                    {"se", row.se},
                    {"acceptance_rate", row.acceptance_rate},
                    {"prediction", optional_number(row.prediction)},
                    {"tolerance_class", std::string(tolerance_name(row.tolerance))},
                    {"pass", row.pass ? json(*row.pass) : json(nullptr)}});
  }
  json spec = {{"base", to_json(report.spec.base)},
               {"alpha_grid", report.spec.alpha_grid},
               {"replications", report.spec.replications},
               {"master_seed", report.spec.master_seed}};
  return {{"manifest", manifest}, {"spec", spec}, {"failures", report.failures()}, {"rows", rows}};
}

void write_dispossession_csv(std::ostream& os, const DispossessionDemo& demo, const json& manifest) {
  write_manifest_line(os, manifest);
  os << "society,proposal,victim,xi,accepted";
  for (int i = 0; i < demo.n; ++i) os << ",capital_" << i;
  os << '\n';
  for (const DispossessionRun* run : {&demo.egoists, &demo.group}) {
    for (std::size_t k = 0; k < run->steps.size(); ++k) {
      const DispossessionStep& s = run->steps[k];
      os << run->society << ',' << (k + 1) << ',' << s.victim << ',' << format_double(s.vote.xi) << ','
         << bool_text(s.vote.accepted);
      for (double c : s.capitals) os << ',' << format_double(c);
      os << '\n';
    }
  }
}

json dispossession_to_json(const DispossessionDemo& demo, const json& manifest) {
  auto run_json = [&](const DispossessionRun& run) {
    json steps = json::array();
    for (const DispossessionStep& s : run.steps) {
      steps.push_back({{"victim", s.victim}, {"vote", to_json(s.vote)}, {"capitals", s.capitals}});
    }
    bool all_below = true;
    for (double c : run.final_capitals) all_below = all_below && c < demo.initial_capital;
    return json{{"society", std::string(run.society)},
                {"accepted", run.accepted},
                {"proposals", run.steps.size()},
                {"final_capitals", run.final_capitals},
                {"all_below_start", all_below},
                {"steps", steps}};
  };
  json chain = json::array();
  for (const Proposal& p : demo.chain) chain.push_back(p.increments);
  return {{"manifest", manifest},
          {"n", demo.n},
          {"initial_capital", demo.initial_capital},
          {"organizer_cut", demo.organizer_cut},
          {"alpha", demo.alpha},
          {"chain", chain},
          {"runs", json::array({run_json(demo.egoists), run_json(demo.group)})}};
}

}  // namespace stratvote
