#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "dyntrack/bitstring.hpp"
#include "dyntrack/stats.hpp"

using namespace dyntrack;

TEST_CASE("hamming distance basics") {
    CHECK(hamming(Bitstring::from_bits("1111"), Bitstring::from_bits("1111")) == 0);
    CHECK(hamming(Bitstring::from_bits("1111"), Bitstring::from_bits("0000")) == 4);
    CHECK(hamming(Bitstring::from_bits("1010"), Bitstring::from_bits("1001")) == 2);
    CHECK_THROWS_AS(hamming(Bitstring(4), Bitstring(5)), std::invalid_argument);
}

TEST_CASE("hamming is symmetric and word-boundary safe") {
    RngStream rng(11);
    for (std::size_t n : std::initializer_list<std::size_t>{1, 63, 64, 65, 200}) {
        Bitstring a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a.set(i, rng.bernoulli(0.5));
            b.set(i, rng.bernoulli(0.5));
        }
        std::size_t manual = 0;
        for (std::size_t i = 0; i < n; ++i) manual += a.get(i) != b.get(i);
        CHECK(hamming(a, b) == manual);
        CHECK(hamming(b, a) == manual);
    }
}

TEST_CASE("in_ball") {
    const Bitstring x = Bitstring::from_bits("0110");
    CHECK(in_ball(x, x, 0));
    CHECK_FALSE(in_ball(Bitstring::from_bits("0000"), Bitstring::from_bits("1111"), 3));
    CHECK(in_ball(Bitstring::from_bits("0111"), Bitstring::from_bits("1111"), 1));
    CHECK_THROWS_AS(in_ball(Bitstring(4), Bitstring(6), 1), std::invalid_argument);
}

TEST_CASE("in_ball agrees with hamming, exhaustive n=10") {
    const std::size_t n = 10;
    for (std::uint32_t xa = 0; xa < (1u << n); xa += 7) {
        for (std::uint32_t xb = 0; xb < (1u << n); xb += 13) {
            Bitstring a(n), b(n);
            for (std::size_t i = 0; i < n; ++i) {
                a.set(i, (xa >> i) & 1);
                b.set(i, (xb >> i) & 1);
            }
            const std::size_t d = hamming(a, b);
            for (std::size_t r = 0; r <= n; ++r)
                CHECK(in_ball(a, b, r) == (d <= r));
        }
    }
}

TEST_CASE("triangle inequality on random triples") {
    RngStream rng(42);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t n = 1 + rng.below(16);
        Bitstring x(n), y(n), z(n);
        for (std::size_t i = 0; i < n; ++i) {
            x.set(i, rng.bernoulli(0.5));
            y.set(i, rng.bernoulli(0.5));
            z.set(i, rng.bernoulli(0.5));
        }
        CHECK(hamming(x, z) <= hamming(x, y) + hamming(y, z));
    }
}

TEST_CASE("all_ones") {
    const Bitstring ones = Bitstring::all_ones(3);
    CHECK(ones.to_bit_string() == "111");
    CHECK(hamming(Bitstring::all_ones(70), Bitstring::all_ones(70)) == 0);
    CHECK(in_ball(Bitstring::all_ones(5), Bitstring::all_ones(5), 0));
    CHECK(Bitstring::all_ones(130).count_ones() == 130);
    CHECK_THROWS_AS(Bitstring(0), std::invalid_argument);
}

TEST_CASE("sample_at_distance postconditions") {
    RngStream rng(7);
    const Bitstring center = Bitstring::from_bits("1011");
    // distance n is forced: the complement
    const Bitstring comp = sample_at_distance(center, 4, rng);
    CHECK(comp.to_bit_string() == "0100");
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 2 + rng.below(80);
        const std::size_t dist = 1 + rng.below(n);
        Bitstring c(n);
        for (std::size_t i = 0; i < n; ++i) c.set(i, rng.bernoulli(0.5));
        CHECK(hamming(c, sample_at_distance(c, dist, rng)) == dist);
    }
    CHECK_THROWS_AS(sample_at_distance(center, 0, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_at_distance(center, 5, rng), std::invalid_argument);
}

TEST_CASE("sample_at_distance distance-1 frequencies") {
    RngStream rng(123);
    const Bitstring center = Bitstring::all_ones(4);
    const std::uint64_t draws = 1000000;
    std::map<std::string, std::uint64_t> counts;
    for (std::uint64_t i = 0; i < draws; ++i)
        ++counts[sample_at_distance(center, 1, rng).to_bit_string()];
    CHECK(counts.size() == 4);
    const double sigma = std::sqrt(0.25 * 0.75 / static_cast<double>(draws));
    for (const auto& [key, c] : counts)
        CHECK(std::abs(static_cast<double>(c) / static_cast<double>(draws) - 0.25) <=
              3.0 * sigma);
}

TEST_CASE("sample_at_distance uniform over candidates (chi-square)") {
    RngStream rng(321);
    for (std::size_t n : std::initializer_list<std::size_t>{4, 6}) {
        Bitstring center(n);
        for (std::size_t i = 0; i < n; ++i) center.set(i, rng.bernoulli(0.5));
        for (std::size_t dist = 1; dist <= n; ++dist) {
            std::map<std::uint64_t, std::uint64_t> counts;
            const std::uint64_t draws = 200000;
            for (std::uint64_t i = 0; i < draws; ++i) {
                const Bitstring y = sample_at_distance(center, dist, rng);
                counts[y.words()[0] ^ center.words()[0]] += 1;
            }
            double candidates = 1.0;
            for (std::size_t i = 0; i < dist; ++i)
                candidates *= static_cast<double>(n - i) / static_cast<double>(i + 1);
            CHECK(static_cast<double>(counts.size()) == doctest::Approx(candidates));
            std::vector<std::uint64_t> observed;
            for (const auto& [mask, c] : counts) observed.push_back(c);
            std::vector<double> expected(observed.size(),
                                         static_cast<double>(draws) / candidates);
            if (observed.size() >= 2) {
                const auto res = chi_square_test(observed, expected);
                CHECK(res.p_value > 1e-6);
            }
        }
    }
}

TEST_CASE("hex serialization") {
    CHECK(Bitstring::all_ones(5).to_hex() == "F8");
    CHECK(Bitstring::from_bits("0111").to_hex() == "7");
    CHECK(Bitstring::from_bits("10110011").to_hex() == "B3");
    RngStream rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng.below(200);
        Bitstring b(n);
        for (std::size_t i = 0; i < n; ++i) b.set(i, rng.bernoulli(0.5));
        CHECK(Bitstring::from_hex(b.to_hex(), n) == b);
        CHECK(Bitstring::from_bits(b.to_bit_string()) == b);
    }
    CHECK_THROWS_AS(Bitstring::from_hex("G", 4), std::invalid_argument);
    CHECK_THROWS_AS(Bitstring::from_hex("FF", 4), std::invalid_argument);
    CHECK_THROWS_AS(Bitstring::from_hex("F", 5), std::invalid_argument);
    // pad bits must be zero: "F9" would set bit 5 of a 5-bit string
    CHECK_THROWS_AS(Bitstring::from_hex("F9", 5), std::invalid_argument);
    CHECK_THROWS_AS(Bitstring::from_bits("010X"), std::invalid_argument);
}
