#pragma once

// Migration policies: diversity-optimal selection over the similarity matrix,
// uniform random selection without immediate repeat, and fixed rotations
// (including the random K-subset rotation).

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "divlab/core.hpp"
#include "divlab/rng.hpp"

namespace divlab {

struct HeronArea {
    double area = 0.0;
    bool clamped = false;  // side lengths violated the triangle inequality
};

/// Triangle area from its side lengths. A negative radicand (non-metric
/// distances) is clamped to zero area and flagged.
HeronArea heron_area(double a, double b, double c);

/// Row-major pairwise distances between `count` platforms.
struct DistanceView {
    std::span<const double> values;
    std::size_t count = 0;

    double operator()(PlatformIndex i, PlatformIndex j) const { return values[i * count + j]; }
};

struct DiversityChoice {
    PlatformIndex platform = 0;
    double objective = 0.0;
    std::size_t clamped_areas = 0;
};

/// Picks the platform jointly most distant from the recent history (most
/// recent last). With one prior platform the objective is plain distance,
/// with two it is the Heron area of the triangle, with three or more it is
/// the summed pairwise distance. Only the last `k - 1` entries are used; the
/// current platform is never chosen. Ties go to the lowest index.
DiversityChoice select_most_diverse(const DistanceView& distances, std::span<const PlatformIndex> history,
                                    std::size_t k);

class ScheduleState {
public:
    ScheduleState(MigrationPolicy policy, std::size_t platform_count, Rng rng);

    const MigrationPolicy& policy() const noexcept { return policy_; }
    std::size_t platform_count() const noexcept { return platform_count_; }
    std::size_t step() const noexcept { return step_; }
    /// Most recent last; at most max(K - 1, 1) entries.
    const std::vector<PlatformIndex>& history() const noexcept { return history_; }
    std::optional<PlatformIndex> current() const;
    Rng& rng() noexcept { return rng_; }
    std::size_t clamped_areas() const noexcept { return clamped_areas_; }

    /// Chooses the platform for the next interval and records it.
    PlatformIndex advance(const SimilarityMatrix& sim);

    void record(PlatformIndex platform);
    void note_clamped(std::size_t count) noexcept { clamped_areas_ += count; }

private:
    MigrationPolicy policy_;
    std::size_t platform_count_;
    std::size_t history_limit_;
    std::vector<PlatformIndex> history_;
    std::size_t step_ = 0;
    Rng rng_;
    std::size_t clamped_areas_ = 0;
};

/// Diversity-optimal successor of the state's history. The state must use a
/// DiversityPolicy and hold at least one platform.
PlatformIndex next_platform_diversity(ScheduleState& state, const SimilarityMatrix& sim);

/// Uniform over every platform except the current one.
PlatformIndex next_platform_uniform(ScheduleState& state);

/// K distinct platforms drawn uniformly, rotated in a uniformly random order.
MigrationPolicy make_random_k_policy(const PlatformSet& platforms, std::size_t k, std::uint64_t seed);
FixedPeriodicPolicy draw_random_k_rotation(std::size_t platform_count, std::size_t k, Rng& rng);

/// The schedule a policy produces for `intervals` intervals.
std::vector<PlatformIndex> generate_schedule(const MigrationPolicy& policy, const SimilarityMatrix& sim,
                                             std::size_t intervals, Rng rng);

struct Periodicity {
    std::size_t period = 0;
    std::size_t transient = 0;
};

/// Smallest period p (and its shortest transient t) with trace[i] == trace[i+p]
/// for all i >= t. To count as periodic the repeating tail must hold at least
/// two full periods and at least half of the trace.
std::optional<Periodicity> detect_periodicity(std::span<const PlatformIndex> trace);

}  // namespace divlab
