#pragma once

// JSON reports and CSV curve files written by the command-line front end,
// plus readers for the CSV files.

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "json.hpp"

#include "divlab/analytic.hpp"
#include "divlab/simulator.hpp"

namespace divlab::report {

using Json = nlohmann::ordered_json;

struct AnalyticRequest {
    std::size_t m = 0;
    std::size_t n = 0;
    std::size_t k = 3;
    analytic::RepeatMode mode = analytic::RepeatMode::WithoutRepeat;
    std::size_t j = 0;  // 0 selects all m+n platforms
    double p = 0.5;
    analytic::Threshold threshold = analytic::Threshold::Inclusive;
    double duration = 900.0;
    double required = 300.0;
    double start_span = 0.0;  // 0 means the trial duration
};

/// Evaluates every closed-form quantity for the request. Quantities whose
/// preconditions fail are reported as null with a reason.
Json analytic_report(const AnalyticRequest& request);

/// Finite doubles as numbers, +inf as the string "Infinite".
Json number_or_infinite(double value);

Json policy_to_json(const PolicyKind& kind);
PolicyKind policy_from_json(const Json& j);

Json similarity_to_json(const SimilarityMatrix& sim);
SimilarityMatrix similarity_from_json(const Json& j);

Json mc_config_to_json(const McConfig& config);
McConfig mc_config_from_json(const Json& j);

/// Per-policy means in the layout {policy: {mean_vulnerable_fraction, ...}}.
Json metrics_json(const MetricsReport& report);

Json scenario_config_to_json(const ScenarioConfig& config, const std::vector<std::size_t>& platform_counts,
                             const std::vector<std::vector<ExploitSpec>>& exploits_per_count);

void write_cdf_csv(std::ostream& out, const EmpiricalCdf& cdf);
EmpiricalCdf read_cdf_csv(std::istream& in);

void write_scenario_csv(std::ostream& out, const std::vector<ScenarioPoint>& points);
std::vector<ScenarioPoint> read_scenario_csv(std::istream& in);

/// Writes `text` to `path`, creating parent directories. Throws on I/O failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace divlab::report
