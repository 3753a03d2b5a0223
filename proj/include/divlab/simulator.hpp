#pragma once

// Monte Carlo evaluation of migration policies against a similarity-driven
// attacker, and an event-driven continuous-time scenario engine.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "divlab/core.hpp"
#include "divlab/rng.hpp"

namespace divlab {

// ---------------------------------------------------------------------------
// Discrete-interval Monte Carlo study

struct McConfig {
    std::size_t trials = 500;
    std::size_t intervals = 100;
    std::size_t k = 3;
    std::vector<PolicyKind> policies = default_policies(3);
    std::uint64_t master_seed = 20140301;
    /// Worker threads; 0 means hardware concurrency. Never affects results.
    std::size_t threads = 0;

    void validate(std::size_t platform_count) const;
    static std::vector<PolicyKind> default_policies(std::size_t k);
};

/// RNG stream id of a policy within a trial; stable across policy subsets so a
/// policy's results do not depend on which other policies ran alongside it.
std::uint64_t policy_stream_id(const PolicyKind& kind);
inline constexpr std::uint64_t kLabelingStream = 0;

struct TrialTrace {
    std::vector<PlatformIndex> chosen;
    std::vector<bool> vulnerable;
    VulnerabilityLabeling labeling{{}};
    std::size_t clamped_areas = 0;
};

/// One uniformly chosen platform is vulnerable; every other platform i is then
/// vulnerable independently with probability S(seed, i).
VulnerabilityLabeling assign_vulnerabilities(const SimilarityMatrix& sim, Rng& rng);

TrialTrace run_mc_trial(const McConfig& config, const MigrationPolicy& policy, const SimilarityMatrix& sim,
                        const VulnerabilityLabeling& labeling, std::uint64_t seed);

/// Right-continuous empirical CDF at the distinct sample values. `cumulative`
/// is normalised by the full trial count, so values excluded from `values`
/// (never-compromised trials) leave the curve below 1.
struct EmpiricalCdf {
    std::vector<double> values;
    std::vector<double> cumulative;
};

EmpiricalCdf empirical_cdf(std::span<const double> samples, std::size_t population);

/// Area above a CDF supported on [0, 1], i.e. 1 - AUC.
double one_minus_auc(const EmpiricalCdf& cdf);

struct PolicyMetrics {
    std::string policy;
    std::vector<double> vulnerable_fraction;
    /// 1-based interval of the first compromise; nullopt = never compromised.
    std::vector<std::optional<std::size_t>> time_to_first_compromise;
    std::vector<double> compromised_fraction;

    EmpiricalCdf cdf_vulnerable;
    EmpiricalCdf cdf_time_to_compromise;
    EmpiricalCdf cdf_compromised;

    double mean_vulnerable_fraction = 0.0;
    double mean_vulnerability_rate = 0.0;  // 1 - AUC of cdf_vulnerable
    double mean_compromised_fraction = 0.0;
    double compromised_trial_fraction = 0.0;
    std::optional<double> mean_time_to_compromise;  // over compromised trials
    std::size_t clamped_areas = 0;
};

/// Interval k is compromised iff intervals k-K+1..k are all vulnerable.
PolicyMetrics compute_metrics(std::span<const TrialTrace> traces, std::size_t k, std::string policy = {});

struct MetricsReport {
    McConfig config;
    std::vector<PolicyMetrics> policies;

    const PolicyMetrics* find(const std::string& policy) const;
};

/// Every policy is evaluated on the same per-trial labeling.
MetricsReport run_mc_study(const McConfig& config, const SimilarityMatrix& sim);

// ---------------------------------------------------------------------------
// Continuous-time scenario engine

/// An exploit that becomes available at a time drawn uniformly from
/// [arrival_lo, arrival_hi] and from then on compromises every target.
struct ExploitSpec {
    std::vector<PlatformIndex> targets;
    std::optional<double> arrival_lo;  // defaults to 0
    std::optional<double> arrival_hi;  // defaults to the trial duration
};

struct ScenarioConfig {
    std::size_t platforms = 1;  // N
    double duration = 900.0;    // d, seconds
    double delay_lo = 20.0;     // inter-migration delay range, seconds
    double delay_hi = 30.0;
    std::vector<double> goals;  // T values, seconds
    std::vector<ExploitSpec> exploits;
    std::size_t samples = 300;
    std::uint64_t seed = 20140301;

    void validate() const;
    double mean_delay() const noexcept { return 0.5 * (delay_lo + delay_hi); }
};

struct ScenarioPoint {
    std::size_t platforms = 0;
    double goal_seconds = 0.0;
    std::size_t samples = 0;
    std::size_t successes = 0;
    double success_fraction = 0.0;
};

/// Longest stretch during which the active platform was compromised, for one
/// sample. Migration is uniform without immediate repeat; dwell times are
/// uniform in [delay_lo, delay_hi].
double simulate_longest_control(const ScenarioConfig& config, std::span<const ExploitSpec> exploits, Rng& rng);

/// A sample succeeds for goal T iff the attacker held the active platform
/// continuously for at least T seconds (and for a nonzero time) within the
/// trial. All goals share the same simulated samples.
std::vector<ScenarioPoint> run_scenario_study(const ScenarioConfig& config);

/// As above with one exploit model per sample (`per_sample.size()` must equal
/// `config.samples`).
std::vector<ScenarioPoint> run_scenario_study(const ScenarioConfig& config,
                                              std::span<const std::vector<ExploitSpec>> per_sample);

}  // namespace divlab
