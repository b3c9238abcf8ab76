#pragma once

#include <string>
#include <string_view>

#include "dyntrack/bitstring.hpp"
#include "dyntrack/rng.hpp"

namespace dyntrack {

/// Unary variation operator: either bitwise mutation (each bit flips
/// independently with probability chi/n) or the single-bit flip used by
/// random local search.
struct MutationOp {
    enum class Kind { bitwise, single_bit };

    Kind kind = Kind::bitwise;
    double chi = 1.0; // per-string expected flips; bitwise only

    static MutationOp bitwise(double chi) { return {Kind::bitwise, chi}; }
    static MutationOp single_bit() { return {Kind::single_bit, 0.0}; }

    /// Canonical text form, e.g. "bitwise:chi=1" or "single-bit".
    std::string to_string() const;
    static MutationOp parse(std::string_view text);
};

/// Independently mutated copy of x; x is unchanged.
Bitstring mutate(const MutationOp& op, const Bitstring& x, RngStream& rng);

/// Exact probability that mutating x yields exactly y.
double mutation_transition_prob(const MutationOp& op, const Bitstring& x, const Bitstring& y);

} // namespace dyntrack
