#include "divlab/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace divlab {

HeronArea heron_area(double a, double b, double c) {
    // Kahan's ordering keeps the product accurate for needle-like triangles.
    if (a < b) std::swap(a, b);
    if (a < c) std::swap(a, c);
    if (b < c) std::swap(b, c);
    const double radicand = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    if (radicand < 0.0) return {0.0, true};
    return {0.25 * std::sqrt(radicand), false};
}

DiversityChoice select_most_diverse(const DistanceView& distances, std::span<const PlatformIndex> history,
                                    std::size_t k) {
    if (k < 2) throw ValidationError("diversity selection needs K >= 2");
    if (history.empty()) throw ValidationError("diversity selection needs at least one prior platform");
    if (distances.count < k) {
        throw ValidationError("diversity selection with K=" + std::to_string(k) + " needs at least K platforms, have " +
                              std::to_string(distances.count));
    }
    const std::size_t used = std::min(history.size(), k - 1);
    const auto recent = history.subspan(history.size() - used);
    const PlatformIndex current = recent.back();

    DiversityChoice best;
    bool have_best = false;
    for (PlatformIndex j = 0; j < distances.count; ++j) {
        if (j == current) continue;
        double objective = 0.0;
        if (used == 1) {
            objective = distances(j, current);
        } else if (used == 2) {
            const auto h = heron_area(distances(j, recent[0]), distances(j, recent[1]), distances(recent[0], recent[1]));
            if (h.clamped) ++best.clamped_areas;
            objective = h.area;
        } else {
            for (std::size_t a = 0; a < used; ++a) {
                objective += distances(j, recent[a]);
                for (std::size_t b = a + 1; b < used; ++b) objective += distances(recent[a], recent[b]);
            }
        }
        if (!have_best || objective > best.objective) {
            best.platform = j;
            best.objective = objective;
            have_best = true;
        }
    }
    return best;
}

namespace {

std::size_t history_limit_for(const PolicyKind& kind) {
    if (const auto* d = std::get_if<DiversityPolicy>(&kind)) return d->k - 1;
    if (const auto* r = std::get_if<RandomKPolicy>(&kind)) return r->k - 1;
    return 1;
}

}  // namespace

ScheduleState::ScheduleState(MigrationPolicy policy, std::size_t platform_count, Rng rng)
    : policy_(std::move(policy)), platform_count_(platform_count), rng_(std::move(rng)) {
    policy_.validate(platform_count_);
    history_limit_ = std::max<std::size_t>(1, history_limit_for(policy_.kind));
    // The random subset is drawn once, before the first interval.
    if (const auto* r = std::get_if<RandomKPolicy>(&policy_.kind)) {
        policy_.kind = draw_random_k_rotation(platform_count_, r->k, rng_);
    }
}

std::optional<PlatformIndex> ScheduleState::current() const {
    if (history_.empty()) return std::nullopt;
    return history_.back();
}

void ScheduleState::record(PlatformIndex platform) {
    history_.push_back(platform);
    if (history_.size() > history_limit_) history_.erase(history_.begin());
    ++step_;
}

PlatformIndex ScheduleState::advance(const SimilarityMatrix& sim) {
    PlatformIndex next = 0;
    if (const auto* d = std::get_if<DiversityPolicy>(&policy_.kind)) {
        if (history_.empty()) {
            next = d->start ? *d->start : uniform_index(rng_, platform_count_);
        } else {
            next = next_platform_diversity(*this, sim);
        }
    } else if (std::holds_alternative<UniformNoRepeatPolicy>(policy_.kind)) {
        next = history_.empty() ? uniform_index(rng_, platform_count_) : next_platform_uniform(*this);
    } else {
        const auto& seq = std::get<FixedPeriodicPolicy>(policy_.kind).sequence;
        next = seq[step_ % seq.size()];
    }
    record(next);
    return next;
}

PlatformIndex next_platform_diversity(ScheduleState& state, const SimilarityMatrix& sim) {
    const auto* policy = std::get_if<DiversityPolicy>(&state.policy().kind);
    if (policy == nullptr) throw ValidationError("state does not hold a diversity policy");
    if (sim.size() != state.platform_count()) throw ValidationError("similarity matrix size does not match state");
    const auto distances = sim.distances();
    const auto choice =
        select_most_diverse(DistanceView{distances, sim.size()}, state.history(), policy->k);
    state.note_clamped(choice.clamped_areas);
    return choice.platform;
}

PlatformIndex next_platform_uniform(ScheduleState& state) {
    if (state.platform_count() < 2) throw ValidationError("uniform no-repeat selection needs at least 2 platforms");
    const auto cur = state.current();
    if (!cur) return uniform_index(state.rng(), state.platform_count());
    // Draw from the count-1 other platforms and skip over the current one.
    const PlatformIndex pick = uniform_index(state.rng(), state.platform_count() - 1);
    return pick < *cur ? pick : pick + 1;
}

FixedPeriodicPolicy draw_random_k_rotation(std::size_t platform_count, std::size_t k, Rng& rng) {
    if (k > platform_count) {
        throw ValidationError("random-K rotation: K=" + std::to_string(k) + " exceeds platform count " +
                              std::to_string(platform_count));
    }
    std::vector<PlatformIndex> pool(platform_count);
    std::iota(pool.begin(), pool.end(), PlatformIndex{0});
    // Partial Fisher-Yates: the first k slots are a uniform random ordered k-subset.
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + uniform_index(rng, platform_count - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return FixedPeriodicPolicy{std::move(pool)};
}

MigrationPolicy make_random_k_policy(const PlatformSet& platforms, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw ValidationError("random-K policy needs K >= 2");
    Rng rng(seed);
    return MigrationPolicy{draw_random_k_rotation(platforms.size(), k, rng), seed};
}

std::vector<PlatformIndex> generate_schedule(const MigrationPolicy& policy, const SimilarityMatrix& sim,
                                             std::size_t intervals, Rng rng) {
    ScheduleState state(policy, sim.size(), std::move(rng));
    std::vector<PlatformIndex> out;
    out.reserve(intervals);
    for (std::size_t i = 0; i < intervals; ++i) out.push_back(state.advance(sim));
    return out;
}

std::optional<Periodicity> detect_periodicity(std::span<const PlatformIndex> trace) {
    const std::size_t len = trace.size();
    if (len < 2) return std::nullopt;
    for (std::size_t p = 1; 2 * p <= len; ++p) {
        std::size_t transient = 0;
        for (std::size_t i = len - p; i-- > 0;) {
            if (trace[i] != trace[i + p]) {
                transient = i + 1;
                break;
            }
        }
        if (len - transient >= 2 * p && 2 * transient <= len) return Periodicity{p, transient};
    }
    return std::nullopt;
}

}  // namespace divlab
