#include "dyntrack/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#include "dyntrack/stats.hpp"

namespace dyntrack {

namespace fs = std::filesystem;

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void parallel_for(std::uint64_t count, std::uint32_t threads,
                  const std::function<void(std::uint64_t)>& fn) {
    std::uint32_t workers = threads != 0 ? threads : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = static_cast<std::uint32_t>(
        std::min<std::uint64_t>(workers, std::max<std::uint64_t>(count, 1)));
    if (workers <= 1) {
        for (std::uint64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            const std::uint64_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::uint32_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

MhbParams FunctionSpecConfig::resolve() const {
    MhbParams params;
    params.n = n;
    // tiny slack so exact-intended products like 0.1 * 100 do not round down
    params.r = static_cast<std::size_t>(
        std::floor(b * static_cast<double>(n) + 1e-9));
    params.ell = ell;
    params.theta = theta > 0.0 ? theta : c * static_cast<double>(n);
    return params;
}

std::uint32_t AlgorithmSpecConfig::resolve_lambda(std::size_t n) const {
    if (lambda != 0) return lambda;
    if (preset_c > 0.0 && preset_d > 0.0)
        return static_cast<std::uint32_t>(std::floor(
            preset_c * static_cast<double>(n) / (2.0 * (1.0 + preset_d)) + 1e-9));
    return 0;
}

void ExperimentConfig::validate() const {
    if (function.n == 0) throw ConfigError("function.n", "must be positive");
    if (!(function.b >= 0.0) || !(function.b < 0.5))
        throw ConfigError("function.b", "must lie in [0, 0.5) so that r < n/2");
    if (function.ell == 0 || function.ell > function.n)
        throw ConfigError("function.ell", "must lie in [1, n]");
    if (!(function.theta > 0.0) && !(function.c > 0.0))
        throw ConfigError("function.theta", "either theta > 0 or c > 0 is required");
    MhbParams params = function.resolve();
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("function", e.what());
    }
    try {
        (void)MutationOp::parse(algorithm.mutation);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("algorithm.mutation", e.what());
    }
    std::uint64_t generation_size = 2;
    if (algorithm.kind == AlgorithmSpecConfig::Kind::population) {
        const std::uint32_t lambda = algorithm.resolve_lambda(function.n);
        if (lambda == 0)
            throw ConfigError("algorithm.lambda",
                              "population size required: give lambda or the (c, d) preset");
        try {
            SelectionSpec::parse(algorithm.selection).validate(lambda);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("algorithm.selection", e.what());
        }
        generation_size = lambda;
    }
    if (budget < generation_size)
        throw ConfigError("budget", "smaller than one generation of evaluations");
    if (replicates == 0) throw ConfigError("replicates", "must be positive");
    if (init != "center" && init != "uniform-in-ball")
        throw ConfigError("init", "must be 'center' or 'uniform-in-ball'");
    const std::uint64_t evals = (budget / generation_size) * generation_size;
    const std::uint64_t window =
        report.window != 0
            ? report.window
            : (algorithm.kind == AlgorithmSpecConfig::Kind::population ? generation_size
                                                                       : std::uint64_t{1000});
    const std::uint64_t t0 = report.t0 != 0 ? report.t0 : window;
    if (t0 + window > evals)
        throw ConfigError("report.window",
                          "tracking window and offset exceed the run's evaluation count");
    if (!(report.c_prime >= 0.0) || !(report.c_prime <= 1.0))
        throw ConfigError("report.c_prime", "must lie in [0, 1]");
    if (!(report.gamma0 > 0.0) || !(report.gamma0 <= 1.0))
        throw ConfigError("report.gamma0", "must lie in (0, 1]");
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
    nlohmann::ordered_json j;
    j["function"] = {{"n", function.n}, {"b", function.b},   {"ell", function.ell},
                     {"theta", function.theta}, {"c", function.c}};
    nlohmann::ordered_json alg;
    alg["kind"] = algorithm.kind == AlgorithmSpecConfig::Kind::single ? "single" : "population";
    alg["lambda"] = algorithm.lambda;
    alg["preset_c"] = algorithm.preset_c;
    alg["preset_d"] = algorithm.preset_d;
    alg["selection"] = algorithm.selection;
    alg["mutation"] = algorithm.mutation;
    j["algorithm"] = alg;
    j["budget"] = budget;
    j["replicates"] = replicates;
    j["seed"] = seed;
    j["out_dir"] = out_dir;
    j["report"] = {{"window", report.window},
                   {"t0", report.t0},
                   {"c_prime", report.c_prime},
                   {"gamma0", report.gamma0},
                   {"windows_csv", report.windows_csv}};
    j["keep_trace"] = keep_trace;
    j["init"] = init;
    j["pressure_check"] = pressure_check == PressureCheck::off
                              ? "off"
                              : (pressure_check == PressureCheck::warn ? "warn" : "enforce");
    j["threads"] = threads;
    return j;
}

namespace {

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(key, e.what());
    }
}

} // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig config;
    if (j.contains("function")) {
        const auto& f = j.at("function");
        config.function.n = get_or<std::size_t>(f, "n", config.function.n);
        config.function.b = get_or<double>(f, "b", config.function.b);
        config.function.ell = get_or<std::size_t>(f, "ell", config.function.ell);
        config.function.theta = get_or<double>(f, "theta", config.function.theta);
        config.function.c = get_or<double>(f, "c", config.function.c);
    }
    if (j.contains("algorithm")) {
        const auto& a = j.at("algorithm");
        const std::string kind = get_or<std::string>(a, "kind", "single");
        if (kind == "single")
            config.algorithm.kind = AlgorithmSpecConfig::Kind::single;
        else if (kind == "population")
            config.algorithm.kind = AlgorithmSpecConfig::Kind::population;
        else
            throw ConfigError("algorithm.kind", "must be 'single' or 'population'");
        config.algorithm.lambda = get_or<std::uint32_t>(a, "lambda", 0);
        config.algorithm.preset_c = get_or<double>(a, "preset_c", 0.0);
        config.algorithm.preset_d = get_or<double>(a, "preset_d", 0.0);
        config.algorithm.selection =
            get_or<std::string>(a, "selection", config.algorithm.selection);
        config.algorithm.mutation =
            get_or<std::string>(a, "mutation", config.algorithm.mutation);
    }
    config.budget = get_or<std::uint64_t>(j, "budget", config.budget);
    config.replicates = get_or<std::uint32_t>(j, "replicates", config.replicates);
    config.seed = get_or<std::uint64_t>(j, "seed", config.seed);
    config.out_dir = get_or<std::string>(j, "out_dir", config.out_dir);
    if (j.contains("report")) {
        const auto& r = j.at("report");
        config.report.window = get_or<std::uint64_t>(r, "window", 0);
        config.report.t0 = get_or<std::uint64_t>(r, "t0", 0);
        config.report.c_prime = get_or<double>(r, "c_prime", config.report.c_prime);
        config.report.gamma0 = get_or<double>(r, "gamma0", config.report.gamma0);
        config.report.windows_csv = get_or<bool>(r, "windows_csv", false);
    }
    config.keep_trace = get_or<bool>(j, "keep_trace", false);
    config.init = get_or<std::string>(j, "init", config.init);
    const std::string pressure = get_or<std::string>(j, "pressure_check", "warn");
    if (pressure == "off")
        config.pressure_check = PressureCheck::off;
    else if (pressure == "warn")
        config.pressure_check = PressureCheck::warn;
    else if (pressure == "enforce")
        config.pressure_check = PressureCheck::enforce;
    else
        throw ConfigError("pressure_check", "must be 'off', 'warn' or 'enforce'");
    config.threads = get_or<std::uint32_t>(j, "threads", 0);
    return config;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path, std::string("invalid JSON: ") + e.what());
    }
    // a manifest can be re-run directly: its resolved config is nested
    if (j.contains("config")) return from_json(j.at("config"));
    return from_json(j);
}

namespace {

struct RunArtifacts {
    ReplicateSummary summary;
    std::vector<float> gen_fractions; // per-generation in-OPT fraction
    std::vector<std::uint64_t> gen_clocks;
    std::string summary_csv;
    std::string trace_csv;   // empty unless keep_trace
    std::string windows_csv; // empty unless report.windows_csv
};

std::uint64_t tracking_window(const ExperimentConfig& config, std::uint64_t generation_size) {
    if (config.report.window != 0) return config.report.window;
    return config.algorithm.kind == AlgorithmSpecConfig::Kind::population ? generation_size
                                                                          : 1000;
}

struct CoreRun {
    Trace trace{"", 0, false};
    std::vector<MhbInstance::Change> changes;
    ReplicateSummary summary;
};

CoreRun execute_replicate(const ExperimentConfig& config, std::uint32_t replicate,
                          bool keep_records) {
    const MhbParams params = config.function.resolve();
    const MutationOp op = MutationOp::parse(config.algorithm.mutation);
    MhbInstance f(params, RngStream(config.seed, 2 * replicate));
    RngStream rng(config.seed, 2 * replicate + 1);
    RunOptions options;
    options.keep_records = keep_records;

    std::uint64_t generation_size = 2;
    CoreRun core;
    if (config.algorithm.kind == AlgorithmSpecConfig::Kind::single) {
        const Bitstring x0 = config.init == "center"
                                 ? Bitstring::all_ones(params.n)
                                 : uniform_ball_population(params.n, params.r, 1, rng)[0];
        core.trace = run_single(f, op, x0, config.budget, rng, options);
    } else {
        const std::uint32_t lambda = config.algorithm.resolve_lambda(params.n);
        generation_size = lambda;
        const SelectionSpec selection = SelectionSpec::parse(config.algorithm.selection);
        const auto initial =
            config.init == "center"
                ? center_population(params.n, lambda)
                : uniform_ball_population(params.n, params.r, lambda, rng);
        core.trace = run_population(f, initial, selection, op, config.budget, rng, options);
    }

    ReplicateSummary& s = core.summary;
    s.replicate = replicate;
    s.evals_used = core.trace.query_count();
    s.generations = core.trace.generations().size();
    s.target_changes = f.history().size() - 1;

    double fraction_sum = 0.0;
    for (const auto& g : core.trace.generations()) {
        const double fr = g.in_opt_fraction();
        fraction_sum += fr;
        if (g.generation >= 1) {
            s.min_gen_fraction_after_first = std::min(s.min_gen_fraction_after_first, fr);
            if (fr < config.report.gamma0) ++s.generations_below_gamma0;
        }
    }
    s.mean_in_opt_fraction = fraction_sum / static_cast<double>(s.generations);

    const auto& flags = core.trace.optimal_flags();
    std::uint64_t half_hits = 0;
    const std::uint64_t half_start = flags.size() / 2;
    for (std::uint64_t t = half_start; t < flags.size(); ++t) half_hits += flags[t];
    s.final_half_opt_fraction =
        static_cast<double>(half_hits) / static_cast<double>(flags.size() - half_start);

    const std::uint64_t window = tracking_window(config, generation_size);
    const std::uint64_t t0 = config.report.t0 != 0 ? config.report.t0 : window;
    const TrackingReport tracking =
        tracking_score(core.trace, window, t0, config.report.c_prime);
    s.tracking_min_fraction = tracking.min_fraction;
    s.tracking_pass = tracking.passes();

    const LossReport losses = loss_events(core.trace, f);
    s.loss_episodes = losses.episodes.size();
    s.unrecovered_losses = losses.unrecovered_count();

    core.changes.assign(f.history().begin(), f.history().end());
    return core;
}

RunArtifacts run_one(const ExperimentConfig& config, std::uint32_t replicate,
                     bool build_csv_strings) {
    CoreRun core = execute_replicate(config, replicate, config.keep_trace);
    const std::uint64_t generation_size =
        config.algorithm.kind == AlgorithmSpecConfig::Kind::population
            ? config.algorithm.resolve_lambda(config.function.n)
            : 2;
    RunArtifacts art;
    art.summary = core.summary;
    const Trace& trace = core.trace;

    const auto& gens = trace.generations();
    art.gen_fractions.reserve(gens.size());
    art.gen_clocks.reserve(gens.size());
    for (const auto& g : gens) {
        art.gen_fractions.push_back(static_cast<float>(g.in_opt_fraction()));
        art.gen_clocks.push_back(g.clock);
    }

    if (build_csv_strings) {
        std::string& s = art.summary_csv;
        s = "generation,clock,in_opt_count,in_opt_fraction,dist_best_to_target\n";
        char line[160];
        for (const auto& g : gens) {
            std::snprintf(line, sizeof line, "%llu,%llu,%u,%s,%u\n",
                          static_cast<unsigned long long>(g.generation),
                          static_cast<unsigned long long>(g.clock), g.in_opt_count,
                          format_double(g.in_opt_fraction()).c_str(), g.best_distance);
            s += line;
        }
        if (config.report.windows_csv) {
            const std::uint64_t window = tracking_window(config, generation_size);
            const std::uint64_t t0 = config.report.t0 != 0 ? config.report.t0 : window;
            const TrackingReport tracking =
                tracking_score(trace, window, t0, config.report.c_prime);
            std::string& w = art.windows_csv;
            w = "window_start,fraction\n";
            for (std::size_t i = 0; i < tracking.fractions.size(); ++i) {
                std::snprintf(line, sizeof line, "%llu,%s\n",
                              static_cast<unsigned long long>(t0 + i),
                              format_double(tracking.fractions[i]).c_str());
                w += line;
            }
        }
        if (config.keep_trace) {
            std::string& t = art.trace_csv;
            t = "t,i_t,point_hex,value,was_optimal,generation\n";
            for (const auto& rec : trace.records()) {
                std::snprintf(line, sizeof line, "%llu,%llu,",
                              static_cast<unsigned long long>(rec.t),
                              static_cast<unsigned long long>(rec.eval_time));
                t += line;
                t += rec.point.to_hex();
                std::snprintf(line, sizeof line, ",%s,%d,%llu\n",
                              format_double(rec.value).c_str(), rec.was_optimal ? 1 : 0,
                              static_cast<unsigned long long>(rec.t / generation_size));
                t += line;
            }
        }
    }
    return art;
}

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << contents;
    if (!out) throw IoError("write failed: " + path.string());
}

} // namespace

ReplicateRun run_replicate(const ExperimentConfig& config, std::uint32_t replicate,
                           bool keep_records) {
    CoreRun core = execute_replicate(config, replicate, keep_records);
    return {core.summary, std::move(core.trace), std::move(core.changes)};
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();

    fs::path out = config.out_dir;
    if (out.empty()) {
        const char* env = std::getenv("DYNTRACK_OUT");
        out = env != nullptr && *env != '\0' ? fs::path(env) : fs::path(".");
    }
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw IoError("cannot create output directory " + out.string() + ": " + ec.message());

    ExperimentResult result;
    result.out_dir = out;

    const MhbParams params = config.function.resolve();
    if (config.algorithm.kind == AlgorithmSpecConfig::Kind::population &&
        config.pressure_check != PressureCheck::off) {
        const SelectionSpec selection = SelectionSpec::parse(config.algorithm.selection);
        const std::uint32_t lambda = config.algorithm.resolve_lambda(params.n);
        const double rho = (1.0 / 3.0) * std::pow(params.b() / static_cast<double>(params.ell),
                                                  static_cast<double>(params.ell));
        const double delta = 0.1;
        if (rho <= 0.0 || !pressure_satisfied(selection, std::min(rho, 0.999999), delta, lambda)) {
            const std::string message =
                "selection pressure below the tracking threshold " +
                format_double(tracking_pressure_threshold(params.b(), static_cast<std::uint32_t>(params.ell),
                                                  delta)) +
                " for " + config.algorithm.selection;
            if (config.pressure_check == PressureCheck::enforce)
                throw ConfigError("algorithm.selection", message);
            result.warnings.push_back(message);
        }
    }

    std::vector<RunArtifacts> artifacts(config.replicates);
    parallel_for(config.replicates, config.threads, [&](std::uint64_t k) {
        artifacts[k] = run_one(config, static_cast<std::uint32_t>(k), true);
        const fs::path summary_path = out / ("summary_r" + std::to_string(k) + ".csv");
        write_file(summary_path, artifacts[k].summary_csv);
        artifacts[k].summary_csv.clear();
        if (config.keep_trace) {
            write_file(out / ("trace_r" + std::to_string(k) + ".csv"), artifacts[k].trace_csv);
            artifacts[k].trace_csv.clear();
        }
        if (config.report.windows_csv) {
            write_file(out / ("windows_r" + std::to_string(k) + ".csv"),
                       artifacts[k].windows_csv);
            artifacts[k].windows_csv.clear();
        }
    });

    for (auto& art : artifacts) result.replicates.push_back(art.summary);

    // plotting series: per-generation mean and 95% CI across replicates,
    // strided so long runs stay a few thousand rows
    const std::uint64_t generations = artifacts.front().summary.generations;
    const std::uint64_t stride = std::max<std::uint64_t>(1, generations / 2000);
    std::string series = "generation,clock,mean_in_opt_fraction,ci_half_width\n";
    for (std::uint64_t g = 0; g < generations; g += stride) {
        std::vector<double> values;
        values.reserve(config.replicates);
        for (const auto& art : artifacts) values.push_back(art.gen_fractions[g]);
        double mean = values[0], half = 0.0;
        if (values.size() >= 2) {
            const auto ci = mean_ci(values, 0.95);
            mean = ci.mean;
            half = ci.half_width;
        }
        series += std::to_string(g) + "," + std::to_string(artifacts.front().gen_clocks[g]) +
                  "," + format_double(mean) + "," + format_double(half) + "\n";
    }
    write_file(out / "series.csv", series);

    // aggregate report
    nlohmann::ordered_json agg;
    agg["replicates"] = nlohmann::ordered_json::array();
    std::vector<double> means, final_half;
    std::uint64_t tracking_passes = 0, seeds_no_loss = 0, seeds_all_above_gamma0 = 0;
    for (const auto& art : artifacts) {
        const auto& s = art.summary;
        nlohmann::ordered_json r;
        r["replicate"] = s.replicate;
        r["evals_used"] = s.evals_used;
        r["generations"] = s.generations;
        r["target_changes"] = s.target_changes;
        r["mean_in_opt_fraction"] = s.mean_in_opt_fraction;
        r["min_gen_fraction_after_first"] = s.min_gen_fraction_after_first;
        r["final_half_opt_fraction"] = s.final_half_opt_fraction;
        r["tracking_min_fraction"] = s.tracking_min_fraction;
        r["tracking_pass"] = s.tracking_pass;
        r["loss_episodes"] = s.loss_episodes;
        r["unrecovered_losses"] = s.unrecovered_losses;
        r["generations_below_gamma0"] = s.generations_below_gamma0;
        agg["replicates"].push_back(r);
        means.push_back(s.mean_in_opt_fraction);
        final_half.push_back(s.final_half_opt_fraction);
        tracking_passes += s.tracking_pass ? 1 : 0;
        seeds_no_loss += s.loss_episodes == 0 ? 1 : 0;
        seeds_all_above_gamma0 += s.generations_below_gamma0 == 0 ? 1 : 0;
    }
    nlohmann::ordered_json summary;
    summary["tracking_pass_count"] = tracking_passes;
    summary["seeds_without_loss_episode"] = seeds_no_loss;
    summary["seeds_every_generation_above_gamma0"] = seeds_all_above_gamma0;
    if (means.size() >= 2) {
        const auto ci = mean_ci(means, 0.95);
        summary["mean_in_opt_fraction"] = ci.mean;
        summary["mean_in_opt_fraction_ci"] = ci.half_width;
        const auto fh = mean_ci(final_half, 0.95);
        summary["final_half_opt_fraction"] = fh.mean;
        summary["final_half_opt_fraction_ci"] = fh.half_width;
    } else {
        summary["mean_in_opt_fraction"] = means.front();
        summary["final_half_opt_fraction"] = final_half.front();
    }
    agg["summary"] = summary;
    write_file(out / "aggregate.json", agg.dump(2) + "\n");

    // manifest: everything needed for an exact replay
    nlohmann::ordered_json manifest;
    manifest["format"] = "dyntrack-experiment";
    manifest["format_version"] = 1;
    nlohmann::ordered_json resolved = config.to_json();
    resolved["out_dir"] = out.string();
    manifest["config"] = resolved;
    nlohmann::ordered_json derived;
    derived["r"] = params.r;
    derived["theta"] = params.theta;
    if (config.algorithm.kind == AlgorithmSpecConfig::Kind::population)
        derived["lambda"] = config.algorithm.resolve_lambda(params.n);
    derived["evals_used"] = artifacts.front().summary.evals_used;
    derived["budget_dropped"] = config.budget - artifacts.front().summary.evals_used;
    derived["series_stride"] = stride;
    derived["rng"] = "per replicate k: function stream 2k, algorithm stream 2k+1";
    manifest["derived"] = derived;
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (std::uint32_t k = 0; k < config.replicates; ++k) {
        files.push_back("summary_r" + std::to_string(k) + ".csv");
        if (config.keep_trace) files.push_back("trace_r" + std::to_string(k) + ".csv");
        if (config.report.windows_csv) files.push_back("windows_r" + std::to_string(k) + ".csv");
    }
    files.push_back("series.csv");
    files.push_back("aggregate.json");
    manifest["files"] = files;
    if (!result.warnings.empty()) manifest["warnings"] = result.warnings;
    result.manifest_path = out / "manifest.json";
    write_file(result.manifest_path, manifest.dump(2) + "\n");
    return result;
}

} // namespace dyntrack
