#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dyntrack/bitstring.hpp"

namespace dyntrack {

/// One fitness query: queried at step t, evaluated against the function copy
/// of time eval_time <= t. was_optimal is judged at the query time t,
/// regardless of the evaluation time.
struct QueryRecord {
    std::uint64_t t;
    std::uint64_t eval_time;
    Bitstring point;
    double value;
    bool was_optimal;
};

/// Per-generation population summary: membership is counted against the
/// optimal region in force at the generation's evaluation time.
struct GenerationSummary {
    std::uint64_t generation;
    std::uint64_t clock;            // evaluation time of this generation
    std::uint32_t population_size;
    std::uint32_t in_opt_count;
    std::uint32_t best_distance;    // min Hamming distance to the target

    double in_opt_fraction() const {
        return static_cast<double>(in_opt_count) / static_cast<double>(population_size);
    }
};

/// Full run record. Per-query optimality flags and per-generation summaries
/// are always kept; full query records (with search points) only when
/// requested, since they dominate memory on long runs.
class Trace {
public:
    Trace(std::string algorithm, std::uint32_t population_size, bool keep_records)
        : algorithm_(std::move(algorithm)), population_size_(population_size),
          keep_records_(keep_records) {}

    void add_query(QueryRecord record) {
        optimal_flags_.push_back(record.was_optimal ? 1 : 0);
        if (keep_records_) records_.push_back(std::move(record));
    }

    void add_generation(GenerationSummary summary) { generations_.push_back(summary); }

    const std::string& algorithm() const { return algorithm_; }
    std::uint32_t population_size() const { return population_size_; }
    bool has_records() const { return keep_records_; }

    std::uint64_t query_count() const { return optimal_flags_.size(); }
    bool query_was_optimal(std::uint64_t t) const { return optimal_flags_[t] != 0; }
    const std::vector<std::uint8_t>& optimal_flags() const { return optimal_flags_; }

    const std::vector<QueryRecord>& records() const { return records_; }
    const std::vector<GenerationSummary>& generations() const { return generations_; }

private:
    std::string algorithm_;
    std::uint32_t population_size_;
    bool keep_records_;
    std::vector<std::uint8_t> optimal_flags_;
    std::vector<QueryRecord> records_;
    std::vector<GenerationSummary> generations_;
};

} // namespace dyntrack
