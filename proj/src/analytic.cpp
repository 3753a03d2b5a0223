#include "divlab/analytic.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace divlab::analytic {

namespace {

Count gcd(Count a, Count b) {
    while (b != 0) {
        const Count t = a % b;
        a = b;
        b = t;
    }
    return a;
}

}  // namespace

Count choose(std::uint64_t x, std::uint64_t y) {
    if (y > x) throw ValidationError("choose: y must not exceed x");
    y = std::min(y, x - y);
    Count result = 1;
    for (std::uint64_t i = 1; i <= y; ++i) {
        // result * (x - y + i) / i is always an integer; divide out the
        // common factor first to keep the product small.
        Count num = x - y + i;
        Count den = i;
        const Count g1 = gcd(result, den);
        result /= g1;
        den /= g1;
        // What is left of i divides num exactly.
        num /= den;
        Count next;
        if (__builtin_mul_overflow(result, num, &next)) {
            throw ChooseOverflow("choose(" + std::to_string(x) + ", " + std::to_string(y) +
                                 ") exceeds 128-bit range");
        }
        result = next;
    }
    return result;
}

std::string to_string(Count value) {
    if (value == 0) return "0";
    std::string out;
    while (value > 0) {
        out.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
        value /= 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::uint64_t aggregate_lower_limit(std::uint64_t j, double p, Threshold threshold) {
    const double target = p * static_cast<double>(j);
    const double nearest = std::round(target);
    // p*j is integral for the intended inputs (0.5*2, 0.3*10) even when the
    // product picks up rounding noise.
    const bool integral = std::abs(target - nearest) <= 1e-9 * std::max(1.0, target);
    if (integral) {
        const auto whole = static_cast<std::uint64_t>(nearest);
        return threshold == Threshold::Strict ? whole + 1 : whole;
    }
    return threshold == Threshold::Strict ? static_cast<std::uint64_t>(std::floor(target)) + 1
                                          : static_cast<std::uint64_t>(std::ceil(target));
}

double p_success_aggregate(std::uint64_t m, std::uint64_t n, std::uint64_t j, double p, Threshold threshold) {
    if (j < 1 || j > m + n) throw ValidationError("aggregate subselection size must satisfy 1 <= j <= m+n");
    if (!(p > 0.0 && p <= 1.0)) throw ValidationError("required fraction p must lie in (0, 1]");

    const std::uint64_t lo = std::max(aggregate_lower_limit(j, p, threshold), j > n ? j - n : 0);
    const std::uint64_t hi = std::min(m, j);
    Count favourable = 0;
    for (std::uint64_t i = lo; i <= hi; ++i) {
        Count term;
        if (__builtin_mul_overflow(choose(m, i), choose(n, j - i), &term) ||
            __builtin_add_overflow(favourable, term, &favourable)) {
            throw ChooseOverflow("aggregate success numerator exceeds 128-bit range");
        }
    }
    const Count total = choose(m + n, j);
    return static_cast<double>(static_cast<long double>(favourable) / static_cast<long double>(total));
}

MarkovParams::MarkovParams(std::size_t m, std::size_t n, RepeatMode mode) : m_(m), n_(n), mode_(mode) {
    if (m + n < 1) throw ValidationError("need at least one platform");
    if (mode == RepeatMode::WithoutRepeat && m + n < 2) {
        throw ValidationError("migration without repeat needs at least two platforms");
    }
}

double MarkovParams::p_v() const noexcept { return static_cast<double>(m_) / static_cast<double>(m_ + n_); }

double MarkovParams::p_vv() const noexcept {
    if (m_ == 0) return 0.0;
    const auto total = static_cast<double>(m_ + n_);
    if (mode_ == RepeatMode::WithRepeat) return static_cast<double>(m_) / total;
    return static_cast<double>(m_ - 1) / (total - 1.0);
}

double MarkovParams::p_ii() const noexcept {
    if (n_ == 0) return 0.0;
    const auto total = static_cast<double>(m_ + n_);
    if (mode_ == RepeatMode::WithRepeat) return static_cast<double>(n_) / total;
    return static_cast<double>(n_ - 1) / (total - 1.0);
}

RunLengthChain run_length_chain(const MarkovParams& params, std::size_t k) {
    if (k < 1) throw ValidationError("run length K must be at least 1");
    const double pvv = params.p_vv();
    const double pii = params.p_ii();
    RunLengthChain chain;
    chain.k = k;
    const std::size_t s = k + 1;
    chain.transition.assign(s * s, 0.0);
    chain.transition[0] = pii;
    chain.transition[1] = 1.0 - pii;
    for (std::size_t r = 1; r <= k; ++r) {
        chain.transition[r * s] = 1.0 - pvv;
        chain.transition[r * s + std::min(r + 1, k)] = pvv;
    }
    return chain;
}

std::vector<double> steady_state(const RunLengthChain& chain) {
    const auto s = static_cast<Eigen::Index>(chain.states());
    Eigen::MatrixXd a(s, s);
    for (Eigen::Index i = 0; i < s; ++i) {
        for (Eigen::Index j = 0; j < s; ++j) {
            // (P^T - I) x = 0
            a(i, j) = chain.at(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) - (i == j ? 1.0 : 0.0);
        }
    }
    // One balance equation is redundant; replace it with sum(x) = 1.
    a.row(s - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(s);
    b(s - 1) = 1.0;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) {
        throw DegenerateChain("run-length chain has no unique stationary distribution");
    }
    const Eigen::VectorXd x = lu.solve(b);
    return {x.data(), x.data() + s};
}

std::vector<double> steady_state_closed_form(const MarkovParams& params, std::size_t k) {
    if (k < 1) throw ValidationError("run length K must be at least 1");
    const double total = static_cast<double>(params.m() + params.n());
    const double vulnerable = static_cast<double>(params.m()) / total;
    const double pvv = params.p_vv();
    std::vector<double> pi(k + 1);
    pi[0] = static_cast<double>(params.n()) / total;
    // a_v * p_vv^r with a_v = vulnerable * (1 - p_vv) / p_vv, written so that
    // p_vv = 0 needs no division.
    for (std::size_t r = 1; r < k; ++r) {
        pi[r] = vulnerable * (1.0 - pvv) * std::pow(pvv, static_cast<double>(r - 1));
    }
    // a_v * sum_{i>=K} p_vv^i collapses to vulnerable * p_vv^(K-1).
    pi[k] = vulnerable * std::pow(pvv, static_cast<double>(k - 1));
    return pi;
}

double expected_control_fraction(const MarkovParams& params, std::size_t k) {
    if (k < 1) throw ValidationError("run length K must be at least 1");
    if (params.m() == 0) return 0.0;
    const double pvv = params.p_vv();
    const double pii = params.p_ii();
    if (pvv >= 1.0) return 1.0;

    const double mean_invulnerable_run = 1.0 / (1.0 - pii);
    const double mean_vulnerable_run = 1.0 / (1.0 - pvv);
    double short_runs = 0.0;  // sum_{i=1}^{K-1} i * p_vv^(i-1)
    double power = 1.0;
    for (std::size_t i = 1; i < k; ++i) {
        short_runs += static_cast<double>(i) * power;
        power *= pvv;
    }
    const double defended = (mean_invulnerable_run + (1.0 - pvv) * short_runs) /
                            (mean_invulnerable_run + mean_vulnerable_run);
    return std::clamp(1.0 - defended, 0.0, 1.0);
}

double expected_time_to_compromise(const MarkovParams& params, std::size_t k) {
    if (k < 1) throw ValidationError("run length K must be at least 1");
    if (params.m() == 0) return kNeverCompromised;

    const double pv = params.p_v();
    const double pvv = params.p_vv();
    const double pii = params.p_ii();
    const double mean_invulnerable_run = 1.0 / (1.0 - pii);
    const double lead_in = (1.0 - pv) * mean_invulnerable_run;
    const auto kd = static_cast<double>(k);

    // The (p_vv^(1-K) - 1) factor vanishes at K = 1 and at p_vv = 1.
    if (k == 1 || pvv >= 1.0) return kd + lead_in;
    if (pvv <= 0.0) return kNeverCompromised;

    const double p_km1 = std::pow(pvv, kd - 1.0);
    const double p_k = p_km1 * pvv;
    // Mean length of a vulnerable run that breaks before reaching K.
    const double short_run = (1.0 - kd * p_km1 + (kd - 1.0) * p_k) / ((1.0 - p_km1) * (1.0 - pvv));
    return kd + lead_in + (1.0 / p_km1 - 1.0) * (short_run + mean_invulnerable_run);
}

double p_success_finite_window(double duration, double required, double start_span) {
    if (!(duration > 0.0) || !(required > 0.0) || !(start_span > 0.0)) {
        throw ValidationError("finite-window inputs must all be positive");
    }
    return std::min(1.0, std::max(0.0, (duration - required) / start_span));
}

}  // namespace divlab::analytic
