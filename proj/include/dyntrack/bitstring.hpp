#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dyntrack/rng.hpp"

namespace dyntrack {

/// Fixed-length bit vector packed into 64-bit words. Length is immutable
/// after construction; all search points, targets and operator outputs use
/// this representation.
class Bitstring {
public:
    /// n zero bits.
    explicit Bitstring(std::size_t n);

    static Bitstring all_ones(std::size_t n);

    /// Parse the canonical text form "0101...", one character per bit.
    static Bitstring from_bits(std::string_view bits);

    /// Parse the hex trace form (bit 0 = most significant bit of the first
    /// hex digit, trailing pad bits zero).
    static Bitstring from_hex(std::string_view hex, std::size_t n);

    std::size_t size() const { return n_; }

    bool get(std::size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }

    void set(std::size_t i, bool v) {
        const std::uint64_t mask = std::uint64_t{1} << (i & 63);
        if (v)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }

    void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    std::size_t count_ones() const;

    std::string to_hex() const;
    std::string to_bit_string() const;

    std::span<const std::uint64_t> words() const { return words_; }

    bool operator==(const Bitstring& other) const = default;

private:
    std::size_t n_;
    std::vector<std::uint64_t> words_;
};

/// Number of differing positions. Throws std::invalid_argument on length
/// mismatch.
std::size_t hamming(const Bitstring& x, const Bitstring& y);

/// True iff hamming(x, center) <= radius.
bool in_ball(const Bitstring& x, const Bitstring& center, std::size_t radius);

/// Uniform sample from the C(n, distance) strings at Hamming distance
/// exactly `distance` from `center`. Requires 0 < distance <= n.
Bitstring sample_at_distance(const Bitstring& center, std::size_t distance, RngStream& rng);

} // namespace dyntrack
