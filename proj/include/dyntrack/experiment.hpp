#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dyntrack/algorithms.hpp"
#include "dyntrack/analysis.hpp"

namespace dyntrack {

/// Configuration error carrying the offending field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error("config field '" + field + "': " + message),
          field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// Filesystem failure while reading inputs or writing results.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FunctionSpecConfig {
    std::size_t n = 100;
    double b = 0.1;       // radius fraction, r = floor(b*n)
    std::size_t ell = 1;
    double theta = 0.0;   // direct Poisson mean; if 0, derived as c*n
    double c = 0.0;

    MhbParams resolve() const;
};

struct AlgorithmSpecConfig {
    enum class Kind { single, population };
    Kind kind = Kind::single;
    std::uint32_t lambda = 0;     // explicit population size, or 0 with preset
    double preset_c = 0.0;        // lambda = floor(c*n / (2*(1+d))) when both set
    double preset_d = 0.0;
    std::string selection = "tournament:k=2"; // population only
    std::string mutation = "bitwise:chi=1";

    std::uint32_t resolve_lambda(std::size_t n) const;
};

struct ReportOptionsConfig {
    std::uint64_t window = 0; // 0: defaults to lambda (population) or 1000 (single)
    std::uint64_t t0 = 0;     // 0: defaults to window
    double c_prime = 0.25;
    double gamma0 = 0.5;      // partial-loss level for generation reporting
    bool windows_csv = false; // write per-window hit fractions per replicate
};

enum class PressureCheck { off, warn, enforce };

struct ExperimentConfig {
    FunctionSpecConfig function;
    AlgorithmSpecConfig algorithm;
    std::uint64_t budget = 100000;
    std::uint32_t replicates = 1;
    std::uint64_t seed = 1;
    std::string out_dir; // empty: DYNTRACK_OUT env var, else "."
    ReportOptionsConfig report;
    bool keep_trace = false;
    std::string init = "center"; // or "uniform-in-ball"
    PressureCheck pressure_check = PressureCheck::warn;
    std::uint32_t threads = 0; // 0: hardware concurrency

    void validate() const; // throws ConfigError
    nlohmann::ordered_json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_json_file(const std::string& path);
};

/// Per-replicate digest kept by the aggregate report; the heavyweight trace
/// lives only in the per-replicate CSV files.
struct ReplicateSummary {
    std::uint32_t replicate = 0;
    std::uint64_t evals_used = 0;
    std::uint64_t generations = 0;
    std::uint64_t target_changes = 0;
    double mean_in_opt_fraction = 0.0;
    double min_gen_fraction_after_first = 1.0;
    double final_half_opt_fraction = 0.0;
    double tracking_min_fraction = 0.0;
    bool tracking_pass = false;
    std::uint64_t loss_episodes = 0;
    std::uint64_t unrecovered_losses = 0;
    std::uint64_t generations_below_gamma0 = 0;
};

struct ExperimentResult {
    std::vector<ReplicateSummary> replicates;
    std::filesystem::path out_dir;
    std::filesystem::path manifest_path;
    std::vector<std::string> warnings;
};

/// Runs `replicates` independent runs on derived RNG streams (function
/// stream 2k, algorithm stream 2k+1 for replicate k), writes per-replicate
/// summary CSVs, the optional trace CSVs, an aggregate JSON report, a series
/// CSV for plotting, and a manifest from which the whole experiment can be
/// replayed byte-identically.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Runs one replicate in memory (no files); used by the runner, the
/// acceptance suite and tests.
struct ReplicateRun {
    ReplicateSummary summary;
    Trace trace;
    std::vector<MhbInstance::Change> changes;
};
ReplicateRun run_replicate(const ExperimentConfig& config, std::uint32_t replicate,
                           bool keep_records);

/// Chunked index-parallel helper; runs fn(i) for i in [0, count) on up to
/// `threads` worker threads (0 = hardware concurrency).
void parallel_for(std::uint64_t count, std::uint32_t threads,
                  const std::function<void(std::uint64_t)>& fn);

/// 17-significant-digit decimal form used for all floating point in CSV and
/// JSON output files.
std::string format_double(double value);

} // namespace dyntrack
