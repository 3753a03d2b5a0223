#pragma once

// Domain types shared by the analytic, scheduler and simulator layers.
// Everything here is immutable after construction.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace divlab {

using PlatformIndex = std::size_t;

/// Raised when an input violates a documented precondition or invariant.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a similarity file cannot be read or parsed.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PlatformSet {
public:
    explicit PlatformSet(std::vector<std::string> names);

    std::size_t size() const noexcept { return names_.size(); }
    const std::string& name(PlatformIndex i) const { return names_.at(i); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    std::optional<PlatformIndex> find(const std::string& name) const;
    PlatformIndex index_of(const std::string& name) const;

    /// Anonymous platforms "P0".."P{count-1}".
    static PlatformSet numbered(std::size_t count);

    friend bool operator==(const PlatformSet&, const PlatformSet&) = default;

private:
    std::vector<std::string> names_;
};

/// Symmetric code-similarity scores in [0,1] with unit diagonal.
/// Stored canonically: the upper triangle is mirrored into the lower one.
class SimilarityMatrix {
public:
    static constexpr double kSymmetryTolerance = 1e-12;

    /// `rows` is row-major and must be square and match `platforms`.
    SimilarityMatrix(PlatformSet platforms, std::vector<std::vector<double>> rows);

    static SimilarityMatrix identity(PlatformSet platforms);
    static SimilarityMatrix constant(PlatformSet platforms, double off_diagonal);

    std::size_t size() const noexcept { return platforms_.size(); }
    const PlatformSet& platforms() const noexcept { return platforms_; }

    double similarity(PlatformIndex i, PlatformIndex j) const { return scores_[i * size() + j]; }
    double distance(PlatformIndex i, PlatformIndex j) const { return 1.0 - similarity(i, j); }

    /// Row-major 1 - S(i,j).
    std::vector<double> distances() const;

    friend bool operator==(const SimilarityMatrix&, const SimilarityMatrix&) = default;

private:
    PlatformSet platforms_;
    std::vector<double> scores_;
};

/// Parses the similarity CSV: a header row of platform names, then one row per
/// platform holding an optional leading name followed by `count` reals.
SimilarityMatrix parse_similarity_csv(std::istream& in);
SimilarityMatrix load_similarity_matrix(const std::filesystem::path& path);
void write_similarity_csv(std::ostream& out, const SimilarityMatrix& sim);

class VulnerabilityLabeling {
public:
    explicit VulnerabilityLabeling(std::vector<bool> flags);

    std::size_t size() const noexcept { return flags_.size(); }
    bool vulnerable(PlatformIndex i) const { return flags_.at(i); }
    const std::vector<bool>& flags() const noexcept { return flags_; }
    std::size_t vulnerable_count() const noexcept { return m_; }
    std::size_t invulnerable_count() const noexcept { return flags_.size() - m_; }

    friend bool operator==(const VulnerabilityLabeling&, const VulnerabilityLabeling&) = default;

private:
    std::vector<bool> flags_;
    std::size_t m_ = 0;
};

enum class Requirement { Continuous, Aggregate };
enum class Payoff { Binary, Fractional };

struct OngoingWindow {};
struct FiniteWindow {
    double duration_seconds;
};

struct ConsecutiveIntervals {
    std::size_t count;  // K
};
struct ControlSeconds {
    double seconds;  // T
};

struct ThreatModel {
    Requirement requirement = Requirement::Continuous;
    Payoff payoff = Payoff::Binary;
    std::variant<OngoingWindow, FiniteWindow> window = OngoingWindow{};
    std::variant<ConsecutiveIntervals, ControlSeconds> goal = ConsecutiveIntervals{3};

    void validate() const;
};

struct DiversityPolicy {
    std::size_t k;
    std::optional<PlatformIndex> start;  // random per trial when unset
};
struct UniformNoRepeatPolicy {};
struct RandomKPolicy {
    std::size_t k;
};
struct FixedPeriodicPolicy {
    std::vector<PlatformIndex> sequence;
};

using PolicyKind = std::variant<DiversityPolicy, UniformNoRepeatPolicy, RandomKPolicy, FixedPeriodicPolicy>;

struct MigrationPolicy {
    PolicyKind kind;
    std::uint64_t rng_seed = 0;

    /// Checks the policy against a platform count.
    void validate(std::size_t platform_count) const;
};

/// Stable short name used in reports: diversity, uniform, random_k, fixed.
std::string policy_name(const PolicyKind& kind);

}  // namespace divlab
