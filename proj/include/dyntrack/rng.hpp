#pragma once

#include <array>
#include <bit>
#include <cstdint>

namespace dyntrack {

/// Seeded counter-based random stream (Philox4x64-10).
///
/// A stream is identified by (seed, stream_id), which forms the Philox key;
/// the 256-bit block counter gives each stream a period of 2^130 outputs.
/// Identical identifiers yield identical output sequences, and distinct
/// stream_ids derived from one master seed are independent by construction,
/// which is how parallel replicates stay reproducible. Single consumer per
/// stream.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : seed_(seed), stream_id_(stream_id), key_{seed, stream_id} {}

    std::uint64_t next_u64() {
        if (available_ == 0) {
            block_ = philox_block(counter_, key_);
            // 256-bit counter increment
            if (++counter_[0] == 0 && ++counter_[1] == 0 && ++counter_[2] == 0) ++counter_[3];
            available_ = 4;
        }
        return block_[4 - available_--];
    }

    /// Uniform double in [0, 1), 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound). bound must be nonzero.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t mask = (bound <= 1) ? 0 : (~std::uint64_t{0} >> std::countl_zero(bound - 1));
        std::uint64_t v;
        do {
            v = next_u64() & mask;
        } while (v >= bound);
        return v;
    }

    bool bernoulli(double p) { return next_double() < p; }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// One keyed block of four outputs; exposed for known-answer tests.
    static std::array<std::uint64_t, 4> philox_block(std::array<std::uint64_t, 4> counter,
                                                     std::array<std::uint64_t, 2> key) {
        constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
        constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
        constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
        constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;
        for (int round = 0; round < 10; ++round) {
            const unsigned __int128 p0 =
                static_cast<unsigned __int128>(kMul0) * counter[0];
            const unsigned __int128 p1 =
                static_cast<unsigned __int128>(kMul1) * counter[2];
            const auto hi0 = static_cast<std::uint64_t>(p0 >> 64);
            const auto lo0 = static_cast<std::uint64_t>(p0);
            const auto hi1 = static_cast<std::uint64_t>(p1 >> 64);
            const auto lo1 = static_cast<std::uint64_t>(p1);
            counter = {hi1 ^ counter[1] ^ key[0], lo1, hi0 ^ counter[3] ^ key[1], lo0};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return counter;
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::array<std::uint64_t, 2> key_;
    std::array<std::uint64_t, 4> counter_{};
    std::array<std::uint64_t, 4> block_{};
    unsigned available_ = 0;
};

} // namespace dyntrack
