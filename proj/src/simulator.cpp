#include "divlab/simulator.hpp"

#include <algorithm>
#include <exception>
#include <numeric>
#include <thread>

#include "divlab/scheduler.hpp"

namespace divlab {

std::vector<PolicyKind> McConfig::default_policies(std::size_t k) {
    return {DiversityPolicy{k, std::nullopt}, UniformNoRepeatPolicy{}, RandomKPolicy{k}};
}

void McConfig::validate(std::size_t platform_count) const {
    if (trials < 1) throw ValidationError("trials must be at least 1");
    if (k < 2) throw ValidationError("K must be at least 2");
    if (intervals < k) throw ValidationError("intervals must be at least K");
    if (policies.empty()) throw ValidationError("at least one policy is required");
    std::vector<std::string> names;
    for (const auto& p : policies) {
        MigrationPolicy{p, 0}.validate(platform_count);
        names.push_back(policy_name(p));
    }
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
        throw ValidationError("each policy kind may appear only once");
    }
}

std::uint64_t policy_stream_id(const PolicyKind& kind) { return 1 + kind.index(); }

VulnerabilityLabeling assign_vulnerabilities(const SimilarityMatrix& sim, Rng& rng) {
    const std::size_t n = sim.size();
    const PlatformIndex seed = uniform_index(rng, n);
    std::vector<bool> flags(n, false);
    for (PlatformIndex i = 0; i < n; ++i) {
        // One draw per platform, the seed included, keeps the stream layout fixed.
        const bool hit = bernoulli(rng, sim.similarity(seed, i));
        flags[i] = (i == seed) || hit;
    }
    return VulnerabilityLabeling(std::move(flags));
}

TrialTrace run_mc_trial(const McConfig& config, const MigrationPolicy& policy, const SimilarityMatrix& sim,
                        const VulnerabilityLabeling& labeling, std::uint64_t seed) {
    if (labeling.size() != sim.size()) throw ValidationError("labeling size does not match platform count");
    ScheduleState state(policy, sim.size(), Rng(seed));
    TrialTrace trace;
    trace.labeling = labeling;
    trace.chosen.reserve(config.intervals);
    trace.vulnerable.reserve(config.intervals);
    for (std::size_t k = 0; k < config.intervals; ++k) {
        const PlatformIndex p = state.advance(sim);
        trace.chosen.push_back(p);
        trace.vulnerable.push_back(labeling.vulnerable(p));
    }
    trace.clamped_areas = state.clamped_areas();
    return trace;
}

EmpiricalCdf empirical_cdf(std::span<const double> samples, std::size_t population) {
    EmpiricalCdf cdf;
    if (population == 0) return cdf;
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
        cdf.values.push_back(sorted[i]);
        cdf.cumulative.push_back(static_cast<double>(i + 1) / static_cast<double>(population));
    }
    return cdf;
}

double one_minus_auc(const EmpiricalCdf& cdf) {
    // Integrate F over [0, 1] as a right-continuous step function.
    double auc = 0.0;
    double level = 0.0;
    double x = 0.0;
    for (std::size_t i = 0; i < cdf.values.size(); ++i) {
        const double v = std::clamp(cdf.values[i], 0.0, 1.0);
        auc += level * (v - x);
        x = v;
        level = cdf.cumulative[i];
    }
    auc += level * (1.0 - x);
    return 1.0 - auc;
}

PolicyMetrics compute_metrics(std::span<const TrialTrace> traces, std::size_t k, std::string policy) {
    if (traces.empty()) throw ValidationError("compute_metrics needs at least one trace");
    if (k < 1) throw ValidationError("K must be at least 1");
    const std::size_t intervals = traces.front().vulnerable.size();
    if (intervals == 0) throw ValidationError("traces must be non-empty");

    PolicyMetrics out;
    out.policy = std::move(policy);
    std::vector<double> ttc_values;
    for (const auto& t : traces) {
        if (t.vulnerable.size() != intervals || t.chosen.size() != intervals) {
            throw ValidationError("traces have differing interval counts");
        }
        std::size_t vulnerable = 0;
        std::size_t compromised = 0;
        std::size_t run = 0;
        std::optional<std::size_t> first;
        for (std::size_t i = 0; i < intervals; ++i) {
            if (t.vulnerable[i]) {
                ++vulnerable;
                ++run;
            } else {
                run = 0;
            }
            if (run >= k) {
                ++compromised;
                if (!first) first = i + 1;
            }
        }
        const auto n = static_cast<double>(intervals);
        out.vulnerable_fraction.push_back(static_cast<double>(vulnerable) / n);
        out.compromised_fraction.push_back(static_cast<double>(compromised) / n);
        out.time_to_first_compromise.push_back(first);
        if (first) ttc_values.push_back(static_cast<double>(*first));
        out.clamped_areas += t.clamped_areas;
    }

    const std::size_t trials = traces.size();
    const auto mean = [trials](const std::vector<double>& v) {
        return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(trials);
    };
    out.cdf_vulnerable = empirical_cdf(out.vulnerable_fraction, trials);
    out.cdf_compromised = empirical_cdf(out.compromised_fraction, trials);
    out.cdf_time_to_compromise = empirical_cdf(ttc_values, trials);
    out.mean_vulnerable_fraction = mean(out.vulnerable_fraction);
    out.mean_vulnerability_rate = one_minus_auc(out.cdf_vulnerable);
    out.mean_compromised_fraction = mean(out.compromised_fraction);
    out.compromised_trial_fraction = static_cast<double>(ttc_values.size()) / static_cast<double>(trials);
    if (!ttc_values.empty()) {
        out.mean_time_to_compromise =
            std::accumulate(ttc_values.begin(), ttc_values.end(), 0.0) / static_cast<double>(ttc_values.size());
    }
    return out;
}

const PolicyMetrics* MetricsReport::find(const std::string& policy) const {
    for (const auto& p : policies) {
        if (p.policy == policy) return &p;
    }
    return nullptr;
}

namespace {

template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        for (std::size_t w = 0; w < threads; ++w) {
            workers.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < count; i += threads) fn(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace

MetricsReport run_mc_study(const McConfig& config, const SimilarityMatrix& sim) {
    config.validate(sim.size());
    const std::size_t policies = config.policies.size();
    // traces[p][t]: every slot is written by exactly one worker.
    std::vector<std::vector<TrialTrace>> traces(policies, std::vector<TrialTrace>(config.trials));

    parallel_for(config.trials, config.threads, [&](std::size_t trial) {
        Rng labeling_rng = make_rng(config.master_seed, trial, kLabelingStream);
        const auto labeling = assign_vulnerabilities(sim, labeling_rng);
        for (std::size_t p = 0; p < policies; ++p) {
            const auto& kind = config.policies[p];
            const auto seed = substream_seed(config.master_seed, trial, policy_stream_id(kind));
            traces[p][trial] = run_mc_trial(config, MigrationPolicy{kind, seed}, sim, labeling, seed);
        }
    });

    MetricsReport report;
    report.config = config;
    for (std::size_t p = 0; p < policies; ++p) {
        report.policies.push_back(compute_metrics(traces[p], config.k, policy_name(config.policies[p])));
    }
    return report;
}

}  // namespace divlab
