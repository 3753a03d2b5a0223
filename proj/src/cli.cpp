#include "divlab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "divlab/report.hpp"
#include "divlab/scheduler.hpp"
#include "divlab/simulator.hpp"

#ifndef DIVLAB_FIXTURE_DIR
#define DIVLAB_FIXTURE_DIR "data"
#endif

namespace divlab::cli {

namespace fs = std::filesystem;
using report::Json;

namespace {

constexpr std::uint64_t kDefaultSeed = 20140301;

const std::vector<std::string> kTestbedPool = {"Fedora", "Gentoo", "Debian", "FreeBSD", "CentOS"};
const std::vector<std::vector<std::string>> kTestbedExploits = {{"Gentoo"}, {"Fedora", "CentOS"}};

std::string default_similarity_path() { return std::string(DIVLAB_FIXTURE_DIR) + "/moss_5platform.csv"; }

Json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open manifest: " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed manifest " + path.string() + ": " + e.what());
    }
}

void emit(const Json& j, const std::string& out_path, std::ostream& out) {
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty()) {
        out << text;
    } else {
        report::write_text_file(out_path, text);
    }
}

std::string csv_text(const EmpiricalCdf& cdf) {
    std::ostringstream s;
    report::write_cdf_csv(s, cdf);
    return s.str();
}

PolicyKind policy_from_name(const std::string& name, std::size_t k, std::optional<PlatformIndex> start) {
    if (name == "diversity") return DiversityPolicy{k, start};
    if (name == "uniform") return UniformNoRepeatPolicy{};
    if (name == "random_k" || name == "random3" || name == "random-k") return RandomKPolicy{k};
    throw ValidationError("unknown policy '" + name + "' (expected diversity, uniform or random_k)");
}

// ---------------------------------------------------------------------------

struct AnalyticOptions {
    report::AnalyticRequest request;
    bool strict = false;
    std::string repeat = "without";
    std::string out;
};

int cmd_analytic(const AnalyticOptions& o, std::ostream& out) {
    auto request = o.request;
    request.threshold = o.strict ? analytic::Threshold::Strict : analytic::Threshold::Inclusive;
    if (o.repeat == "with") {
        request.mode = analytic::RepeatMode::WithRepeat;
    } else if (o.repeat == "without") {
        request.mode = analytic::RepeatMode::WithoutRepeat;
    } else {
        throw ValidationError("--repeat must be 'with' or 'without'");
    }
    emit(report::analytic_report(request), o.out, out);
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct ScheduleOptions {
    std::string similarity = default_similarity_path();
    std::string policy = "diversity";
    std::size_t k = 3;
    std::string start;
    std::size_t intervals = 30;
    std::optional<std::uint64_t> seed;
    std::string out;
};

int cmd_schedule(const ScheduleOptions& o, std::ostream& out) {
    const auto sim = load_similarity_matrix(o.similarity);
    std::optional<PlatformIndex> start;
    if (!o.start.empty()) start = sim.platforms().index_of(o.start);
    const auto seed = resolve_seed(o.seed, kDefaultSeed);
    const MigrationPolicy policy{policy_from_name(o.policy, o.k, start), seed};
    const auto trace = generate_schedule(policy, sim, o.intervals, Rng(seed));

    Json j;
    j["policy"] = report::policy_to_json(policy.kind);
    j["seed"] = seed;
    std::vector<std::string> names;
    for (auto p : trace) names.push_back(sim.platforms().name(p));
    j["schedule"] = names;
    if (auto period = detect_periodicity(trace)) {
        j["periodicity"] = {{"period", period->period}, {"transient", period->transient}};
        std::vector<std::string> cycle(names.begin() + static_cast<std::ptrdiff_t>(period->transient),
                                       names.begin() + static_cast<std::ptrdiff_t>(period->transient + period->period));
        j["cycle"] = cycle;
    } else {
        j["periodicity"] = nullptr;
    }
    emit(j, o.out, out);
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct McOptions {
    std::string similarity = default_similarity_path();
    std::size_t trials = 500;
    std::size_t intervals = 100;
    std::size_t k = 3;
    std::vector<std::string> policies = {"diversity", "uniform", "random_k"};
    std::string start;
    std::optional<std::uint64_t> seed;
    std::size_t threads = 0;
    std::string out = "results/mc";
    std::string manifest;
};

int cmd_mc(const McOptions& o, std::ostream& out) {
    McConfig config;
    std::optional<SimilarityMatrix> sim;
    std::string source;
    if (!o.manifest.empty()) {
        const auto m = read_json_file(o.manifest);
        if (m.value("command", "") != "mc") throw ValidationError("manifest is not for the mc command");
        config = report::mc_config_from_json(m.at("config"));
        sim = report::similarity_from_json(m.at("similarity"));
        source = m.value("similarity_source", "");
        if (o.seed) config.master_seed = *o.seed;
    } else {
        sim = load_similarity_matrix(o.similarity);
        source = o.similarity;
        config.trials = o.trials;
        config.intervals = o.intervals;
        config.k = o.k;
        config.master_seed = resolve_seed(o.seed, kDefaultSeed);
        std::optional<PlatformIndex> start;
        if (!o.start.empty()) start = sim->platforms().index_of(o.start);
        config.policies.clear();
        for (const auto& name : o.policies) config.policies.push_back(policy_from_name(name, o.k, start));
    }
    config.threads = o.threads;

    const auto result = run_mc_study(config, *sim);

    const fs::path dir = o.out;
    report::write_text_file(dir / "metrics.json", report::metrics_json(result).dump(2) + "\n");
    for (const auto& p : result.policies) {
        report::write_text_file(dir / p.policy / "cdf_vulnerable.csv", csv_text(p.cdf_vulnerable));
        report::write_text_file(dir / p.policy / "cdf_ttc.csv", csv_text(p.cdf_time_to_compromise));
        report::write_text_file(dir / p.policy / "cdf_compromised.csv", csv_text(p.cdf_compromised));
    }
    Json manifest;
    manifest["command"] = "mc";
    manifest["config"] = report::mc_config_to_json(config);
    manifest["similarity_source"] = source;
    manifest["similarity"] = report::similarity_to_json(*sim);
    manifest["rng"] = "mt19937_64 per (master_seed, trial, stream) via splitmix64; stream 0 = labeling, "
                      "1 + policy kind index = policy";
    report::write_text_file(dir / "run_manifest.json", manifest.dump(2) + "\n");

    out << report::metrics_json(result).dump(2) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct ScenarioOptions {
    std::vector<std::size_t> platforms = {1, 2, 3, 4, 5};
    std::vector<double> goals;
    std::string sweep;
    double duration = 900.0;
    double delay_lo = 20.0;
    double delay_hi = 30.0;
    std::size_t samples = 300;
    std::vector<std::string> exploits;
    std::optional<std::uint64_t> seed;
    std::string out = "results/scenario";
    std::string manifest;
};

std::vector<ExploitSpec> testbed_exploits(std::size_t n) {
    if (n > kTestbedPool.size()) {
        throw ValidationError("the default testbed pool has " + std::to_string(kTestbedPool.size()) +
                              " platforms; pass --exploit for larger N");
    }
    std::vector<ExploitSpec> out;
    for (const auto& targets : kTestbedExploits) {
        ExploitSpec e;
        for (const auto& name : targets) {
            const auto it = std::find(kTestbedPool.begin(), kTestbedPool.begin() + static_cast<std::ptrdiff_t>(n), name);
            if (it != kTestbedPool.begin() + static_cast<std::ptrdiff_t>(n)) {
                e.targets.push_back(static_cast<PlatformIndex>(it - kTestbedPool.begin()));
            }
        }
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<ExploitSpec> explicit_exploits(const std::vector<std::string>& specs, std::size_t n) {
    std::vector<ExploitSpec> out;
    for (const auto& spec : specs) {
        ExploitSpec e;
        std::stringstream ss(spec);
        std::string item;
        while (std::getline(ss, item, ',')) {
            std::size_t idx = 0;
            try {
                idx = static_cast<std::size_t>(std::stoull(item));
            } catch (const std::exception&) {
                throw ValidationError("--exploit expects comma-separated platform indices, got '" + spec + "'");
            }
            // Platforms beyond the first N are not in the selected set.
            if (idx < n) e.targets.push_back(idx);
        }
        out.push_back(std::move(e));
    }
    return out;
}

int cmd_scenario(const ScenarioOptions& o, std::ostream& out) {
    ScenarioConfig base;
    std::vector<std::size_t> counts;
    std::vector<std::vector<ExploitSpec>> models;

    if (!o.manifest.empty()) {
        const auto m = read_json_file(o.manifest);
        if (m.value("command", "") != "scenario") throw ValidationError("manifest is not for the scenario command");
        const auto& c = m.at("config");
        counts = c.at("N").get<std::vector<std::size_t>>();
        base.duration = c.at("duration").get<double>();
        base.delay_lo = c.at("delay_lo").get<double>();
        base.delay_hi = c.at("delay_hi").get<double>();
        base.goals = c.at("T").get<std::vector<double>>();
        base.samples = c.at("samples").get<std::size_t>();
        base.seed = o.seed ? *o.seed : c.at("seed").get<std::uint64_t>();
        for (const auto& model : c.at("exploits")) {
            std::vector<ExploitSpec> exploits;
            for (const auto& e : model) {
                exploits.push_back({e.at("targets").get<std::vector<PlatformIndex>>(), e.at("arrival_lo").get<double>(),
                                    e.at("arrival_hi").get<double>()});
            }
            models.push_back(std::move(exploits));
        }
        if (models.size() != counts.size()) throw ValidationError("manifest exploit models do not match N list");
    } else {
        counts = o.platforms;
        base.duration = o.duration;
        base.delay_lo = o.delay_lo;
        base.delay_hi = o.delay_hi;
        base.samples = o.samples;
        base.seed = resolve_seed(o.seed, kDefaultSeed);
        base.goals = o.goals;
        if (!o.sweep.empty()) {
            const auto swept = parse_sweep(o.sweep);
            base.goals.insert(base.goals.end(), swept.begin(), swept.end());
        }
        if (base.goals.empty()) base.goals = parse_sweep("0:900:30");
        for (auto n : counts) models.push_back(o.exploits.empty() ? testbed_exploits(n) : explicit_exploits(o.exploits, n));
    }
    if (counts.empty()) throw ValidationError("--N needs at least one platform count");

    std::vector<ScenarioPoint> points;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        ScenarioConfig config = base;
        config.platforms = counts[i];
        config.exploits = models[i];
        const auto grid = run_scenario_study(config);
        points.insert(points.end(), grid.begin(), grid.end());
    }

    const fs::path dir = o.out;
    std::ostringstream csv;
    report::write_scenario_csv(csv, points);
    report::write_text_file(dir / "success_fraction.csv", csv.str());
    Json manifest;
    manifest["command"] = "scenario";
    manifest["config"] = report::scenario_config_to_json(base, counts, models);
    manifest["rng"] = "mt19937_64 per (seed, sample, N) via splitmix64";
    report::write_text_file(dir / "run_manifest.json", manifest.dump(2) + "\n");

    out << csv.str();
    return kExitOk;
}

}  // namespace

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::uint64_t fallback) {
    if (flag) return *flag;
    if (const char* env = std::getenv(kSeedEnvVar); env != nullptr && *env != '\0') {
        try {
            std::size_t used = 0;
            const auto value = std::stoull(env, &used, 0);
            if (used == std::string(env).size()) return value;
        } catch (const std::exception&) {
        }
        throw ValidationError(std::string(kSeedEnvVar) + " is not an unsigned integer: '" + env + "'");
    }
    return fallback;
}

std::vector<double> parse_sweep(const std::string& text) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ValidationError("sweep must look like lo:hi:step, got '" + text + "'");
        }
    }
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
        throw ValidationError("sweep must look like lo:hi:step with step > 0 and hi >= lo, got '" + text + "'");
    }
    std::vector<double> out;
    const auto steps = static_cast<std::size_t>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    for (std::size_t i = 0; i <= steps; ++i) out.push_back(parts[0] + static_cast<double>(i) * parts[2]);
    return out;
}

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Temporal platform diversity analytics, scheduling and simulation", "divlab"};
    app.require_subcommand(1);

    AnalyticOptions ao;
    auto* analytic_cmd = app.add_subcommand("analytic", "Closed-form attacker success metrics");
    analytic_cmd->add_option("--m", ao.request.m, "Vulnerable platform count")->required();
    analytic_cmd->add_option("--n", ao.request.n, "Invulnerable platform count")->required();
    analytic_cmd->add_option("--K", ao.request.k, "Consecutive intervals the attacker needs")->capture_default_str();
    analytic_cmd->add_option("--j", ao.request.j, "Subselection size (default m+n)");
    analytic_cmd->add_option("--p", ao.request.p, "Fraction of platforms the attacker needs")->capture_default_str();
    analytic_cmd->add_flag("--strict", ao.strict, "Attacker needs strictly more than p");
    analytic_cmd->add_option("--repeat", ao.repeat, "with | without immediate repeat")->capture_default_str();
    analytic_cmd->add_option("--d", ao.request.duration, "Trial duration, seconds")->capture_default_str();
    analytic_cmd->add_option("--a", ao.request.required, "Required attacker presence, seconds")->capture_default_str();
    analytic_cmd->add_option("--s", ao.request.start_span, "Attack-start window span, seconds (default d)");
    analytic_cmd->add_option("--out", ao.out, "Write the JSON report here instead of stdout");

    ScheduleOptions so;
    std::uint64_t schedule_seed = 0;
    auto* schedule_cmd = app.add_subcommand("schedule", "Generate a migration schedule");
    schedule_cmd->add_option("--similarity", so.similarity, "Similarity CSV")->capture_default_str();
    schedule_cmd->add_option("--policy", so.policy, "diversity | uniform | random_k")->capture_default_str();
    schedule_cmd->add_option("--K", so.k, "Persistence requirement K")->capture_default_str();
    schedule_cmd->add_option("--start", so.start, "Start platform name (diversity)");
    schedule_cmd->add_option("--intervals", so.intervals, "Schedule length")->capture_default_str();
    auto* schedule_seed_opt = schedule_cmd->add_option("--seed", schedule_seed, "RNG seed");
    schedule_cmd->add_option("--out", so.out, "Write JSON here instead of stdout");

    McOptions mo;
    std::uint64_t mc_seed = 0;
    auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo policy comparison");
    mc_cmd->add_option("--similarity", mo.similarity, "Similarity CSV")->capture_default_str();
    mc_cmd->add_option("--trials", mo.trials, "Monte Carlo trials")->capture_default_str();
    mc_cmd->add_option("--intervals", mo.intervals, "Intervals per trial")->capture_default_str();
    mc_cmd->add_option("--K", mo.k, "Persistence requirement K")->capture_default_str();
    mc_cmd->add_option("--policies", mo.policies, "Policies to evaluate")->delimiter(',')->capture_default_str();
    mc_cmd->add_option("--start", mo.start, "Fixed diversity start platform (default random per trial)");
    auto* mc_seed_opt = mc_cmd->add_option("--seed", mc_seed, "Master seed");
    mc_cmd->add_option("--threads", mo.threads, "Worker threads (0 = all cores)")->capture_default_str();
    mc_cmd->add_option("--out", mo.out, "Output directory")->capture_default_str();
    mc_cmd->add_option("--manifest", mo.manifest, "Replay a run_manifest.json");

    ScenarioOptions co;
    std::uint64_t scenario_seed = 0;
    auto* scenario_cmd = app.add_subcommand("scenario", "Continuous-time migration scenario sweep");
    scenario_cmd->add_option("--N", co.platforms, "Platform counts")->capture_default_str();
    scenario_cmd->add_option("--T", co.goals, "Attacker goals, seconds");
    scenario_cmd->add_option("--T-sweep", co.sweep, "Attacker goal sweep lo:hi:step (default 0:900:30)");
    scenario_cmd->add_option("--d", co.duration, "Sample duration, seconds")->capture_default_str();
    scenario_cmd->add_option("--delay-lo", co.delay_lo, "Minimum inter-migration delay")->capture_default_str();
    scenario_cmd->add_option("--delay-hi", co.delay_hi, "Maximum inter-migration delay")->capture_default_str();
    scenario_cmd->add_option("--samples", co.samples, "Samples per configuration")->capture_default_str();
    scenario_cmd->add_option("--exploit", co.exploits,
                             "Exploit targets as comma-separated platform indices (repeatable); default is the "
                             "five-platform testbed model");
    auto* scenario_seed_opt = scenario_cmd->add_option("--seed", scenario_seed, "Master seed");
    scenario_cmd->add_option("--out", co.out, "Output directory")->capture_default_str();
    scenario_cmd->add_option("--manifest", co.manifest, "Replay a run_manifest.json");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    try {
        if (*analytic_cmd) return cmd_analytic(ao, out);
        if (*schedule_cmd) {
            if (*schedule_seed_opt) so.seed = schedule_seed;
            return cmd_schedule(so, out);
        }
        if (*mc_cmd) {
            if (*mc_seed_opt) mo.seed = mc_seed;
            return cmd_mc(mo, out);
        }
        if (*scenario_cmd) {
            if (*scenario_seed_opt) co.seed = scenario_seed;
            return cmd_scenario(co, out);
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitValidation;
}

}  // namespace divlab::cli
