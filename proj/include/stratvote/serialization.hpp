#pragma once

// CSV and JSON writers. Every CSV starts with a single "# manifest: {...}"
// line; every JSON document carries the manifest under "manifest".

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "stratvote/analytics.hpp"
#include "stratvote/dynamics.hpp"
#include "stratvote/experiments.hpp"

namespace stratvote {

/// Shortest round-trip decimal form with '.' as separator; "nan" for NaN.
std::string format_double(double value);

nlohmann::json to_json(const SimulationConfig& config);
nlohmann::json to_json(const MigrationOptions& options);
nlohmann::json to_json(const VoteOutcome& outcome);
nlohmann::json to_json(const PredictionReport& report);

inline constexpr const char* kTrajectoryCsvHeader =
    "step,mean_e,mean_g,accepted,xi,xi_e,xi_g,group_supports,n_active_e,n_active_g";
inline constexpr const char* kSweepCsvHeader =
    "alpha,zone,category,mean_capital_avg,se,acceptance_rate,prediction,tolerance_class,pass";

void write_manifest_line(std::ostream& os, const nlohmann::json& manifest);

void write_trajectory_csv(std::ostream& os, const TrajectoryLog& log, const nlohmann::json& manifest);
nlohmann::json trajectory_to_json(const TrajectoryLog& log, const nlohmann::json& manifest);

void write_comparison_csv(std::ostream& os, const ComparisonReport& report, const nlohmann::json& manifest);
nlohmann::json comparison_to_json(const ComparisonReport& report, const nlohmann::json& manifest);

void write_dispossession_csv(std::ostream& os, const DispossessionDemo& demo, const nlohmann::json& manifest);
nlohmann::json dispossession_to_json(const DispossessionDemo& demo, const nlohmann::json& manifest);

}  // namespace stratvote
