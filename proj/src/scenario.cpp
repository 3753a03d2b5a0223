#include <algorithm>
#include <limits>

#include "divlab/simulator.hpp"

namespace divlab {

void ScenarioConfig::validate() const {
    if (platforms < 1) throw ValidationError("scenario needs at least one platform");
    if (!(duration > 0.0)) throw ValidationError("scenario duration must be positive");
    if (!(delay_lo > 0.0) || delay_lo > delay_hi) {
        throw ValidationError("inter-migration delay range must satisfy 0 < lo <= hi");
    }
    if (samples < 1) throw ValidationError("scenario needs at least one sample");
    if (goals.empty()) throw ValidationError("scenario needs at least one attacker goal T");
    for (double t : goals) {
        if (!(t >= 0.0)) throw ValidationError("attacker goal T must be non-negative");
    }
    for (const auto& e : exploits) {
        for (auto target : e.targets) {
            if (target >= platforms) throw ValidationError("exploit target outside the selected platforms");
        }
        const double lo = e.arrival_lo.value_or(0.0);
        const double hi = e.arrival_hi.value_or(duration);
        if (!(lo >= 0.0) || lo > hi) throw ValidationError("exploit arrival window must satisfy 0 <= lo <= hi");
    }
}

double simulate_longest_control(const ScenarioConfig& config, std::span<const ExploitSpec> exploits, Rng& rng) {
    constexpr double never = std::numeric_limits<double>::infinity();
    std::vector<double> exploited_at(config.platforms, never);
    for (const auto& e : exploits) {
        const double arrival = uniform_real(rng, e.arrival_lo.value_or(0.0), e.arrival_hi.value_or(config.duration));
        for (auto target : e.targets) {
            if (target >= config.platforms) throw ValidationError("exploit target outside the selected platforms");
            exploited_at[target] = std::min(exploited_at[target], arrival);
        }
    }

    double longest = 0.0;
    double run_start = 0.0;
    bool run_open = false;
    double t = 0.0;
    PlatformIndex platform = uniform_index(rng, config.platforms);
    while (t < config.duration) {
        const double dwell = uniform_real(rng, config.delay_lo, config.delay_hi);
        const double end = std::min(t + dwell, config.duration);
        const double compromised_from = exploited_at[platform];
        if (compromised_from < end) {
            // Exploited platforms stay exploited, so control lasts to the end of the dwell.
            if (!(run_open && compromised_from <= t)) run_start = std::max(t, compromised_from);
            run_open = true;
            longest = std::max(longest, end - run_start);
        } else {
            run_open = false;
        }
        t += dwell;
        if (config.platforms > 1) {
            const PlatformIndex pick = uniform_index(rng, config.platforms - 1);
            platform = pick < platform ? pick : pick + 1;
        }
    }
    return longest;
}

namespace {

std::vector<ScenarioPoint> tally(const ScenarioConfig& config, const std::vector<double>& longest) {
    std::vector<ScenarioPoint> out;
    out.reserve(config.goals.size());
    for (double goal : config.goals) {
        ScenarioPoint point;
        point.platforms = config.platforms;
        point.goal_seconds = goal;
        point.samples = longest.size();
        point.successes = static_cast<std::size_t>(
            std::count_if(longest.begin(), longest.end(), [goal](double l) { return l > 0.0 && l >= goal; }));
        point.success_fraction = static_cast<double>(point.successes) / static_cast<double>(point.samples);
        out.push_back(point);
    }
    return out;
}

}  // namespace

std::vector<ScenarioPoint> run_scenario_study(const ScenarioConfig& config) {
    config.validate();
    std::vector<double> longest(config.samples);
    for (std::size_t s = 0; s < config.samples; ++s) {
        Rng rng = make_rng(config.seed, s, config.platforms);
        longest[s] = simulate_longest_control(config, config.exploits, rng);
    }
    return tally(config, longest);
}

std::vector<ScenarioPoint> run_scenario_study(const ScenarioConfig& config,
                                              std::span<const std::vector<ExploitSpec>> per_sample) {
    config.validate();
    if (per_sample.size() != config.samples) {
        throw ValidationError("need exactly one exploit model per scenario sample");
    }
    std::vector<double> longest(config.samples);
    for (std::size_t s = 0; s < config.samples; ++s) {
        Rng rng = make_rng(config.seed, s, config.platforms);
        longest[s] = simulate_longest_control(config, per_sample[s], rng);
    }
    return tally(config, longest);
}

}  // namespace divlab
