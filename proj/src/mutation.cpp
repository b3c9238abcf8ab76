#include "dyntrack/mutation.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace dyntrack {

std::string MutationOp::to_string() const {
    if (kind == Kind::single_bit) return "single-bit";
    char buf[64];
    std::snprintf(buf, sizeof buf, "bitwise:chi=%.17g", chi);
    return buf;
}

MutationOp MutationOp::parse(std::string_view text) {
    if (text == "single-bit") return single_bit();
    constexpr std::string_view prefix = "bitwise:chi=";
    if (text.substr(0, prefix.size()) == prefix) {
        const std::string value(text.substr(prefix.size()));
        std::size_t used = 0;
        const double chi = std::stod(value, &used);
        if (used != value.size() || chi < 0.0)
            throw std::invalid_argument("MutationOp::parse: bad chi value");
        return bitwise(chi);
    }
    throw std::invalid_argument("MutationOp::parse: unknown operator '" + std::string(text) + "'");
}

Bitstring mutate(const MutationOp& op, const Bitstring& x, RngStream& rng) {
    const std::size_t n = x.size();
    Bitstring y = x;
    if (op.kind == MutationOp::Kind::single_bit) {
        y.flip(static_cast<std::size_t>(rng.below(n)));
        return y;
    }
    if (op.chi < 0.0 || op.chi > static_cast<double>(n))
        throw std::invalid_argument("mutate: chi must be in [0, n]");
    const double p = op.chi / static_cast<double>(n);
    if (p <= 0.0) return y;
    if (p >= 1.0) {
        for (std::size_t i = 0; i < n; ++i) y.flip(i);
        return y;
    }
    // geometric gap skipping: positions between flips are iid Geometric(p)
    const double denom = std::log1p(-p);
    std::size_t i = static_cast<std::size_t>(std::floor(std::log1p(-rng.next_double()) / denom));
    while (i < n) {
        y.flip(i);
        i += 1 + static_cast<std::size_t>(std::floor(std::log1p(-rng.next_double()) / denom));
    }
    return y;
}

double mutation_transition_prob(const MutationOp& op, const Bitstring& x, const Bitstring& y) {
    const std::size_t n = x.size();
    const std::size_t dist = hamming(x, y); // checks length match
    if (op.kind == MutationOp::Kind::single_bit)
        return dist == 1 ? 1.0 / static_cast<double>(n) : 0.0;
    const double p = op.chi / static_cast<double>(n);
    if (p <= 0.0) return dist == 0 ? 1.0 : 0.0;
    if (p >= 1.0) return dist == n ? 1.0 : 0.0;
    return std::exp(static_cast<double>(dist) * std::log(p) +
                    static_cast<double>(n - dist) * std::log1p(-p));
}

} // namespace dyntrack
