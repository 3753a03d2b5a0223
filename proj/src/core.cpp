#include "divlab/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace divlab {

namespace {

std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        out.emplace_back(trim(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::optional<double> parse_real(std::string_view text) {
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) return std::nullopt;
    return value;
}

}  // namespace

PlatformSet::PlatformSet(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) throw ValidationError("platform set must contain at least one platform");
    std::unordered_set<std::string> seen;
    for (const auto& n : names_) {
        if (n.empty()) throw ValidationError("platform names must be non-empty");
        if (!seen.insert(n).second) throw ValidationError("duplicate platform name: " + n);
    }
}

std::optional<PlatformIndex> PlatformSet::find(const std::string& name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<PlatformIndex>(it - names_.begin());
}

PlatformIndex PlatformSet::index_of(const std::string& name) const {
    if (auto i = find(name)) return *i;
    throw ValidationError("unknown platform: " + name);
}

PlatformSet PlatformSet::numbered(std::size_t count) {
    std::vector<std::string> names;
    names.reserve(count);
    for (std::size_t i = 0; i < count; ++i) names.push_back("P" + std::to_string(i));
    return PlatformSet(std::move(names));
}

SimilarityMatrix::SimilarityMatrix(PlatformSet platforms, std::vector<std::vector<double>> rows)
    : platforms_(std::move(platforms)) {
    const std::size_t n = platforms_.size();
    if (rows.size() != n) throw ValidationError("similarity matrix row count does not match platform count");
    for (const auto& r : rows) {
        if (r.size() != n) throw ValidationError("similarity matrix is not square");
    }
    scores_.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double s = rows[i][j];
            if (!(s >= 0.0 && s <= 1.0)) {
                std::ostringstream msg;
                msg << "similarity entry out of [0,1] at (" << platforms_.name(i) << ", " << platforms_.name(j)
                    << "): " << s;
                throw ValidationError(msg.str());
            }
        }
        if (rows[i][i] != 1.0) {
            throw ValidationError("similarity diagonal must be 1.0 for " + platforms_.name(i));
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(rows[i][j] - rows[j][i]) > kSymmetryTolerance) {
                std::ostringstream msg;
                msg << std::setprecision(17) << "similarity matrix is asymmetric at (" << platforms_.name(i) << ", "
                    << platforms_.name(j) << "): " << rows[i][j] << " vs " << rows[j][i];
                throw ValidationError(msg.str());
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        scores_[i * n + i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            scores_[i * n + j] = rows[i][j];
            scores_[j * n + i] = rows[i][j];
        }
    }
}

SimilarityMatrix SimilarityMatrix::identity(PlatformSet platforms) { return constant(std::move(platforms), 0.0); }

SimilarityMatrix SimilarityMatrix::constant(PlatformSet platforms, double off_diagonal) {
    const std::size_t n = platforms.size();
    std::vector<std::vector<double>> rows(n, std::vector<double>(n, off_diagonal));
    for (std::size_t i = 0; i < n; ++i) rows[i][i] = 1.0;
    return SimilarityMatrix(std::move(platforms), std::move(rows));
}

std::vector<double> SimilarityMatrix::distances() const {
    std::vector<double> d(scores_.size());
    std::transform(scores_.begin(), scores_.end(), d.begin(), [](double s) { return 1.0 - s; });
    return d;
}

SimilarityMatrix parse_similarity_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
            if (!trim(line).empty()) return true;
        }
        return false;
    };

    if (!next_line()) throw ParseError("similarity CSV is empty");
    auto header = split_fields(line);
    std::vector<std::string> names;
    for (auto& h : header) names.push_back(std::move(h));
    PlatformSet platforms = [&] {
        try {
            return PlatformSet(names);
        } catch (const ValidationError& e) {
            throw ParseError(std::string("bad header row: ") + e.what());
        }
    }();
    const std::size_t n = platforms.size();

    std::vector<std::vector<double>> rows;
    while (rows.size() < n) {
        if (!next_line()) {
            throw ParseError("similarity CSV has " + std::to_string(rows.size()) + " data rows, expected " +
                             std::to_string(n));
        }
        auto fields = split_fields(line);
        std::size_t offset = 0;
        if (fields.size() == n + 1) {
            const auto& expected = platforms.name(rows.size());
            if (fields[0] != expected) {
                throw ParseError("line " + std::to_string(line_no) + ": row name '" + fields[0] +
                                 "' does not match header order (expected '" + expected + "')");
            }
            offset = 1;
        } else if (fields.size() != n) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(n) + " values, got " +
                             std::to_string(fields.size()));
        }
        std::vector<double> row;
        row.reserve(n);
        for (std::size_t k = offset; k < fields.size(); ++k) {
            auto v = parse_real(fields[k]);
            if (!v) throw ParseError("line " + std::to_string(line_no) + ": not a real number: '" + fields[k] + "'");
            row.push_back(*v);
        }
        rows.push_back(std::move(row));
    }
    if (next_line()) throw ParseError("line " + std::to_string(line_no) + ": trailing data after matrix");

    return SimilarityMatrix(std::move(platforms), std::move(rows));
}

SimilarityMatrix load_similarity_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open similarity file: " + path.string());
    return parse_similarity_csv(in);
}

void write_similarity_csv(std::ostream& out, const SimilarityMatrix& sim) {
    const auto& names = sim.platforms().names();
    for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
    out << '\n';
    out << std::setprecision(17);
    for (std::size_t i = 0; i < names.size(); ++i) {
        out << names[i];
        for (std::size_t j = 0; j < names.size(); ++j) out << ',' << sim.similarity(i, j);
        out << '\n';
    }
}

VulnerabilityLabeling::VulnerabilityLabeling(std::vector<bool> flags) : flags_(std::move(flags)) {
    m_ = static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), true));
}

void ThreatModel::validate() const {
    if (const auto* w = std::get_if<FiniteWindow>(&window); w && !(w->duration_seconds > 0.0)) {
        throw ValidationError("finite window duration must be positive");
    }
    if (const auto* k = std::get_if<ConsecutiveIntervals>(&goal); k && k->count < 1) {
        throw ValidationError("K must be at least 1");
    }
    if (const auto* t = std::get_if<ControlSeconds>(&goal); t && !(t->seconds > 0.0)) {
        throw ValidationError("T must be positive");
    }
}

void MigrationPolicy::validate(std::size_t platform_count) const {
    auto check_k = [&](std::size_t k) {
        if (k < 2) throw ValidationError("policy K must be at least 2");
        if (k > platform_count) {
            throw ValidationError("policy K=" + std::to_string(k) + " exceeds platform count " +
                                  std::to_string(platform_count));
        }
    };
    if (const auto* d = std::get_if<DiversityPolicy>(&kind)) {
        check_k(d->k);
        if (d->start && *d->start >= platform_count) throw ValidationError("diversity start platform out of range");
    } else if (const auto* r = std::get_if<RandomKPolicy>(&kind)) {
        check_k(r->k);
    } else if (std::holds_alternative<UniformNoRepeatPolicy>(kind)) {
        if (platform_count < 2) throw ValidationError("uniform no-repeat policy needs at least 2 platforms");
    } else if (const auto* f = std::get_if<FixedPeriodicPolicy>(&kind)) {
        const auto& seq = f->sequence;
        if (seq.empty()) throw ValidationError("periodic sequence must be non-empty");
        for (std::size_t i = 0; i < seq.size(); ++i) {
            if (seq[i] >= platform_count) throw ValidationError("periodic sequence platform out of range");
            // A length-1 rotation would repeat itself at the wraparound.
            if (seq[i] == seq[(i + 1) % seq.size()]) {
                throw ValidationError("periodic sequence repeats a platform in adjacent positions");
            }
        }
    }
}

std::string policy_name(const PolicyKind& kind) {
    struct Namer {
        std::string operator()(const DiversityPolicy&) const { return "diversity"; }
        std::string operator()(const UniformNoRepeatPolicy&) const { return "uniform"; }
        std::string operator()(const RandomKPolicy&) const { return "random_k"; }
        std::string operator()(const FixedPeriodicPolicy&) const { return "fixed"; }
    };
    return std::visit(Namer{}, kind);
}

}  // namespace divlab
