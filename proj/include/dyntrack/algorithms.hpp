#pragma once

#include <cstdint>
#include <vector>

#include "dyntrack/dynamics.hpp"
#include "dyntrack/mutation.hpp"
#include "dyntrack/selection.hpp"
#include "dyntrack/trace.hpp"

namespace dyntrack {

struct RunOptions {
    bool keep_records = false; // store full query records, not just flags
};

/// Single-individual algorithm with consistent pairwise comparisons: each
/// iteration tau mutates the incumbent, evaluates offspring and incumbent on
/// the static copy f_{2*tau} (query times 2*tau and 2*tau+1), and accepts the
/// offspring iff its value is at least the incumbent's. With single-bit
/// mutation this is RLS; with bitwise chi=1 it is the (1+1) EA.
///
/// Requires x0 optimal at time 0; runs floor(budget/2) iterations.
Trace run_single(TrackedFunction& f, const MutationOp& op, const Bitstring& x0,
                 std::uint64_t budget, RngStream& rng, const RunOptions& options = {});

/// Non-elitist population algorithm: generation tau evaluates all lambda
/// members against the static copy f_{tau*lambda} (consuming clock times
/// tau*lambda .. (tau+1)*lambda - 1, one query per member), ranks them with a
/// fresh tie-break permutation, and produces the next generation by lambda
/// independent select-then-mutate draws.
///
/// Requires every initial member optimal at time 0; runs floor(budget/lambda)
/// generations.
Trace run_population(TrackedFunction& f, const std::vector<Bitstring>& initial,
                     const SelectionSpec& selection, const MutationOp& op,
                     std::uint64_t budget, RngStream& rng, const RunOptions& options = {});

/// Population of lambda copies of the all-ones string (the initial target
/// center).
std::vector<Bitstring> center_population(std::size_t n, std::uint32_t lambda);

/// Population of lambda points drawn uniformly from the radius-r ball around
/// the all-ones string.
std::vector<Bitstring> uniform_ball_population(std::size_t n, std::size_t r,
                                               std::uint32_t lambda, RngStream& rng);

} // namespace dyntrack
