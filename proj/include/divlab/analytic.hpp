#pragma once

// Closed-form attacker-success analytics for a system that migrates among
// m vulnerable and n invulnerable platforms.
//
// The vulnerable/invulnerable sequence of a uniform walk over the platforms is
// a two-state Markov chain: from a vulnerable platform the next one is
// vulnerable with probability p_vv, from an invulnerable one it stays
// invulnerable with probability p_ii. Persistence requirements are analysed
// on the run-length chain, whose state r counts the current run of
// consecutive vulnerable intervals (0 = last interval invulnerable, K = a run
// of K or more).

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "divlab/core.hpp"

namespace divlab::analytic {

__extension__ typedef unsigned __int128 Count;

class ChooseOverflow : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

/// Raised when a chain has no unique stationary distribution.
class DegenerateChain : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Binomial coefficient, exact. Throws ChooseOverflow rather than wrapping.
Count choose(std::uint64_t x, std::uint64_t y);
std::string to_string(Count value);

enum class RepeatMode { WithRepeat, WithoutRepeat };

/// Whether the attacker needs strictly more than the fraction p of the
/// selected platforms, or at least p.
enum class Threshold { Strict, Inclusive };

/// Probability that a random j-subset of the m+n platforms contains enough
/// vulnerable members to give the attacker the fraction p.
double p_success_aggregate(std::uint64_t m, std::uint64_t n, std::uint64_t j, double p,
                           Threshold threshold = Threshold::Inclusive);

/// Smallest vulnerable count that satisfies the aggregate threshold.
std::uint64_t aggregate_lower_limit(std::uint64_t j, double p, Threshold threshold);

class MarkovParams {
public:
    MarkovParams(std::size_t m, std::size_t n, RepeatMode mode);

    std::size_t m() const noexcept { return m_; }
    std::size_t n() const noexcept { return n_; }
    RepeatMode mode() const noexcept { return mode_; }

    /// P(v(s^k)) for a uniformly chosen platform.
    double p_v() const noexcept;
    /// P(v(s^{k+1}) | v(s^k)). Zero when there are no vulnerable platforms.
    double p_vv() const noexcept;
    /// P(not v(s^{k+1}) | not v(s^k)). Zero when every platform is vulnerable.
    double p_ii() const noexcept;

private:
    std::size_t m_;
    std::size_t n_;
    RepeatMode mode_;
};

inline double p_vv(const MarkovParams& params) { return params.p_vv(); }
inline double p_ii(const MarkovParams& params) { return params.p_ii(); }

struct RunLengthChain {
    std::size_t k = 0;
    std::vector<double> transition;  // (k+1) x (k+1), row-major

    std::size_t states() const noexcept { return k + 1; }
    double at(std::size_t from, std::size_t to) const { return transition[from * states() + to]; }
};

RunLengthChain run_length_chain(const MarkovParams& params, std::size_t k);

/// Stationary distribution of the chain by direct linear solve.
std::vector<double> steady_state(const RunLengthChain& chain);

/// The stationary vector in closed form: n/(m+n), then a_v * p_vv^r for the
/// open runs, then the tail mass a_v * sum_{i>=K} p_vv^i.
std::vector<double> steady_state_closed_form(const MarkovParams& params, std::size_t k);

/// Long-run fraction of intervals that belong to a vulnerable run of length
/// at least K, counting the K-1 intervals that lead into the run.
double expected_control_fraction(const MarkovParams& params, std::size_t k);

inline constexpr double kNeverCompromised = std::numeric_limits<double>::infinity();

/// Expected number of migration steps until the first run of K consecutive
/// vulnerable intervals, the starting interval included. Returns
/// kNeverCompromised when such a run cannot occur.
double expected_time_to_compromise(const MarkovParams& params, std::size_t k);

/// Probability that an attacker needing `required` seconds of presence, with
/// a start spread uniformly over `start_span` seconds, fits inside a trial of
/// `duration` seconds.
double p_success_finite_window(double duration, double required, double start_span);

}  // namespace divlab::analytic
