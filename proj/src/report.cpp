#include "divlab/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace divlab::report {

namespace {

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("cannot format number");
    return {buf, ptr};
}

double parse_double(const std::string& text) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) throw ParseError("not a number: '" + text + "'");
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
        out.push_back(field);
    }
    return out;
}

const char* repeat_name(analytic::RepeatMode mode) {
    return mode == analytic::RepeatMode::WithRepeat ? "with_repeat" : "without_repeat";
}

}  // namespace

Json number_or_infinite(double value) {
    if (std::isinf(value) && value > 0) return "Infinite";
    return value;
}

Json analytic_report(const AnalyticRequest& r) {
    Json out;
    const std::size_t j = r.j == 0 ? r.m + r.n : r.j;
    const double span = r.start_span > 0.0 ? r.start_span : r.duration;
    out["inputs"] = {{"m", r.m},
                     {"n", r.n},
                     {"K", r.k},
                     {"repeat", repeat_name(r.mode)},
                     {"j", j},
                     {"p", r.p},
                     {"strict", r.threshold == analytic::Threshold::Strict},
                     {"d", r.duration},
                     {"a", r.required},
                     {"s", span}};

    Json errors = Json::object();
    auto attempt = [&](const char* key, auto&& fn) {
        try {
            out[key] = fn();
        } catch (const std::exception& e) {
            out[key] = nullptr;
            errors[key] = e.what();
        }
    };

    attempt("p_success_aggregate", [&] { return Json(analytic::p_success_aggregate(r.m, r.n, j, r.p, r.threshold)); });

    const analytic::MarkovParams params(r.m, r.n, r.mode);
    out["p_v"] = params.p_v();
    out["p_vv"] = params.p_vv();
    out["p_ii"] = params.p_ii();
    attempt("steady_state", [&] { return Json(analytic::steady_state(analytic::run_length_chain(params, r.k))); });
    attempt("expected_control_fraction", [&] { return Json(analytic::expected_control_fraction(params, r.k)); });
    attempt("expected_time_to_compromise",
            [&] { return number_or_infinite(analytic::expected_time_to_compromise(params, r.k)); });
    attempt("p_success_finite_window", [&] {
        const double fits = analytic::p_success_finite_window(r.duration, r.required, span);
        // Without a vulnerable platform the attacker is never present.
        return Json(r.m == 0 ? 0.0 : fits);
    });
    if (!errors.empty()) out["errors"] = errors;
    return out;
}

Json policy_to_json(const PolicyKind& kind) {
    Json j;
    j["kind"] = policy_name(kind);
    if (const auto* d = std::get_if<DiversityPolicy>(&kind)) {
        j["K"] = d->k;
        j["start"] = d->start ? Json(*d->start) : Json(nullptr);
    } else if (const auto* r = std::get_if<RandomKPolicy>(&kind)) {
        j["K"] = r->k;
    } else if (const auto* f = std::get_if<FixedPeriodicPolicy>(&kind)) {
        j["sequence"] = f->sequence;
    }
    return j;
}

PolicyKind policy_from_json(const Json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "diversity") {
        DiversityPolicy d{j.at("K").get<std::size_t>(), std::nullopt};
        if (j.contains("start") && !j["start"].is_null()) d.start = j["start"].get<std::size_t>();
        return d;
    }
    if (kind == "uniform") return UniformNoRepeatPolicy{};
    if (kind == "random_k") return RandomKPolicy{j.at("K").get<std::size_t>()};
    if (kind == "fixed") return FixedPeriodicPolicy{j.at("sequence").get<std::vector<PlatformIndex>>()};
    throw ValidationError("unknown policy kind: " + kind);
}

Json similarity_to_json(const SimilarityMatrix& sim) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < sim.size(); ++i) {
        std::vector<double> row;
        for (std::size_t j = 0; j < sim.size(); ++j) row.push_back(sim.similarity(i, j));
        rows.push_back(row);
    }
    return {{"platforms", sim.platforms().names()}, {"scores", rows}};
}

SimilarityMatrix similarity_from_json(const Json& j) {
    return SimilarityMatrix(PlatformSet(j.at("platforms").get<std::vector<std::string>>()),
                            j.at("scores").get<std::vector<std::vector<double>>>());
}

Json mc_config_to_json(const McConfig& config) {
    Json policies = Json::array();
    for (const auto& p : config.policies) policies.push_back(policy_to_json(p));
    return {{"trials", config.trials},
            {"intervals", config.intervals},
            {"K", config.k},
            {"policies", policies},
            {"master_seed", config.master_seed}};
}

McConfig mc_config_from_json(const Json& j) {
    McConfig c;
    c.trials = j.at("trials").get<std::size_t>();
    c.intervals = j.at("intervals").get<std::size_t>();
    c.k = j.at("K").get<std::size_t>();
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    c.policies.clear();
    for (const auto& p : j.at("policies")) c.policies.push_back(policy_from_json(p));
    return c;
}

Json metrics_json(const MetricsReport& report) {
    Json out;
    for (const auto& p : report.policies) {
        out[p.policy] = {
            {"mean_vulnerable_fraction", p.mean_vulnerable_fraction},
            {"mean_vulnerability_rate", p.mean_vulnerability_rate},
            {"mean_compromised_fraction", p.mean_compromised_fraction},
            {"compromised_trial_fraction", p.compromised_trial_fraction},
            {"mean_time_to_first_compromise",
             p.mean_time_to_compromise ? Json(*p.mean_time_to_compromise) : Json(nullptr)},
            {"trials", p.vulnerable_fraction.size()},
            {"heron_clamps", p.clamped_areas},
        };
    }
    return out;
}

Json scenario_config_to_json(const ScenarioConfig& config, const std::vector<std::size_t>& platform_counts,
                             const std::vector<std::vector<ExploitSpec>>& exploits_per_count) {
    Json models = Json::array();
    for (const auto& exploits : exploits_per_count) {
        Json model = Json::array();
        for (const auto& e : exploits) {
            model.push_back({{"targets", e.targets},
                             {"arrival_lo", e.arrival_lo.value_or(0.0)},
                             {"arrival_hi", e.arrival_hi.value_or(config.duration)}});
        }
        models.push_back(model);
    }
    return {{"N", platform_counts},
            {"duration", config.duration},
            {"delay_lo", config.delay_lo},
            {"delay_hi", config.delay_hi},
            {"T", config.goals},
            {"samples", config.samples},
            {"seed", config.seed},
            {"exploits", models}};
}

void write_cdf_csv(std::ostream& out, const EmpiricalCdf& cdf) {
    out << "value,cumulative_probability\n";
    for (std::size_t i = 0; i < cdf.values.size(); ++i) {
        out << format_double(cdf.values[i]) << ',' << format_double(cdf.cumulative[i]) << '\n';
    }
}

EmpiricalCdf read_cdf_csv(std::istream& in) {
    EmpiricalCdf cdf;
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{"value", "cumulative_probability"}) {
        throw ParseError("CDF CSV must start with 'value,cumulative_probability'");
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 2) throw ParseError("CDF CSV rows need two columns");
        cdf.values.push_back(parse_double(f[0]));
        cdf.cumulative.push_back(parse_double(f[1]));
    }
    return cdf;
}

void write_scenario_csv(std::ostream& out, const std::vector<ScenarioPoint>& points) {
    out << "N,T_seconds,success_fraction,samples\n";
    for (const auto& p : points) {
        out << p.platforms << ',' << format_double(p.goal_seconds) << ',' << format_double(p.success_fraction) << ','
            << p.samples << '\n';
    }
}

std::vector<ScenarioPoint> read_scenario_csv(std::istream& in) {
    std::vector<ScenarioPoint> points;
    std::string line;
    if (!std::getline(in, line) ||
        split_csv_line(line) != std::vector<std::string>{"N", "T_seconds", "success_fraction", "samples"}) {
        throw ParseError("scenario CSV must start with 'N,T_seconds,success_fraction,samples'");
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 4) throw ParseError("scenario CSV rows need four columns");
        ScenarioPoint p;
        p.platforms = static_cast<std::size_t>(std::stoull(f[0]));
        p.goal_seconds = parse_double(f[1]);
        p.success_fraction = parse_double(f[2]);
        p.samples = static_cast<std::size_t>(std::stoull(f[3]));
        p.successes = static_cast<std::size_t>(std::llround(p.success_fraction * static_cast<double>(p.samples)));
        points.push_back(p);
    }
    return points;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace divlab::report
