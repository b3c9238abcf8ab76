#include "dyntrack/bitstring.hpp"

#include <bit>
#include <stdexcept>

namespace dyntrack {

namespace {

std::size_t word_count(std::size_t n) { return (n + 63) / 64; }

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

} // namespace

Bitstring::Bitstring(std::size_t n) : n_(n), words_(word_count(n), 0) {
    if (n == 0) throw std::invalid_argument("Bitstring: length must be positive");
}

Bitstring Bitstring::all_ones(std::size_t n) {
    Bitstring b(n);
    for (auto& w : b.words_) w = ~std::uint64_t{0};
    // clear pad bits so word-wise equality and popcount stay exact
    const std::size_t tail = n & 63;
    if (tail != 0) b.words_.back() &= (std::uint64_t{1} << tail) - 1;
    return b;
}

Bitstring Bitstring::from_bits(std::string_view bits) {
    Bitstring b(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1')
            b.set(i, true);
        else if (bits[i] != '0')
            throw std::invalid_argument("Bitstring::from_bits: invalid character");
    }
    return b;
}

Bitstring Bitstring::from_hex(std::string_view hex, std::size_t n) {
    if (hex.size() != (n + 3) / 4)
        throw std::invalid_argument("Bitstring::from_hex: digit count does not match length");
    Bitstring b(n);
    for (std::size_t d = 0; d < hex.size(); ++d) {
        const int v = hex_value(hex[d]);
        if (v < 0) throw std::invalid_argument("Bitstring::from_hex: invalid hex digit");
        for (std::size_t j = 0; j < 4; ++j) {
            const std::size_t i = 4 * d + j;
            const bool bit = (v >> (3 - j)) & 1;
            if (i < n) {
                b.set(i, bit);
            } else if (bit) {
                throw std::invalid_argument("Bitstring::from_hex: nonzero pad bit");
            }
        }
    }
    return b;
}

std::size_t Bitstring::count_ones() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
}

std::string Bitstring::to_hex() const {
    static const char digits[] = "0123456789ABCDEF";
    std::string out((n_ + 3) / 4, '0');
    for (std::size_t d = 0; d < out.size(); ++d) {
        int v = 0;
        for (std::size_t j = 0; j < 4; ++j) {
            const std::size_t i = 4 * d + j;
            if (i < n_ && get(i)) v |= 1 << (3 - j);
        }
        out[d] = digits[v];
    }
    return out;
}

std::string Bitstring::to_bit_string() const {
    std::string out(n_, '0');
    for (std::size_t i = 0; i < n_; ++i)
        if (get(i)) out[i] = '1';
    return out;
}

std::size_t hamming(const Bitstring& x, const Bitstring& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("hamming: length mismatch");
    std::size_t dist = 0;
    const auto xw = x.words(), yw = y.words();
    for (std::size_t i = 0; i < xw.size(); ++i)
        dist += static_cast<std::size_t>(std::popcount(xw[i] ^ yw[i]));
    return dist;
}

bool in_ball(const Bitstring& x, const Bitstring& center, std::size_t radius) {
    return hamming(x, center) <= radius;
}

Bitstring sample_at_distance(const Bitstring& center, std::size_t distance, RngStream& rng) {
    const std::size_t n = center.size();
    if (distance == 0 || distance > n)
        throw std::invalid_argument("sample_at_distance: distance must be in [1, n]");
    Bitstring out = center;
    // partial Fisher-Yates over the position array: first `distance` entries
    // form a uniform subset
    std::vector<std::uint32_t> pos(n);
    for (std::size_t i = 0; i < n; ++i) pos[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = 0; i < distance; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(pos[i], pos[j]);
        out.flip(pos[i]);
    }
    return out;
}

} // namespace dyntrack
