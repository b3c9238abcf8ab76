#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "dyntrack/rng.hpp"
#include "dyntrack/stats.hpp"

using namespace dyntrack;

TEST_CASE("philox block function matches the reference vectors") {
    using Block = std::array<std::uint64_t, 4>;
    const Block zero = RngStream::philox_block({0, 0, 0, 0}, {0, 0});
    CHECK(zero == Block{0x16554d9eca36314cULL, 0xdb20fe9d672d0fdcULL, 0xd7e772cee186176bULL,
                        0x7e68b68aec7ba23bULL});
    const std::uint64_t ones = ~std::uint64_t{0};
    const Block full = RngStream::philox_block({ones, ones, ones, ones}, {ones, ones});
    CHECK(full == Block{0x87b092c3013fe90bULL, 0x438c3c67be8d0224ULL, 0x9cc7d7c69cd777b6ULL,
                        0xa09caebf594f0ba0ULL});
    const Block pi = RngStream::philox_block(
        {0x243f6a8885a308d3ULL, 0x13198a2e03707344ULL, 0xa4093822299f31d0ULL,
         0x082efa98ec4e6c89ULL},
        {0x452821e638d01377ULL, 0xbe5466cf34e90c6cULL});
    CHECK(pi == Block{0xa528f45403e61d95ULL, 0x38c72dbd566e9788ULL, 0xa5a1610e72fd18b5ULL,
                      0x57bd43b5e52b7fe6ULL});
}

TEST_CASE("rng streams are reproducible and distinct") {
    RngStream a(1234, 5), b(1234, 5), c(1234, 6);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 1000; ++i) {
        const auto va = a.next_u64();
        all_equal = all_equal && (va == b.next_u64());
        any_diff = any_diff || (va != c.next_u64());
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("rng below is in range and roughly uniform") {
    RngStream rng(99);
    std::vector<std::uint64_t> counts(7, 0);
    const std::uint64_t draws = 700000;
    for (std::uint64_t i = 0; i < draws; ++i) ++counts[rng.below(7)];
    std::vector<double> expected(7, static_cast<double>(draws) / 7.0);
    CHECK(chi_square_test(counts, expected).p_value > 1e-6);
}

TEST_CASE("poisson mean and variance, inversion regime") {
    RngStream rng(2024);
    const std::uint64_t m = 1000000;
    double sum = 0.0, sum_sq = 0.0;
    for (std::uint64_t i = 0; i < m; ++i) {
        const double v = static_cast<double>(sample_poisson(10.0, rng));
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / static_cast<double>(m);
    const double var = (sum_sq - static_cast<double>(m) * mean * mean) /
                       static_cast<double>(m - 1);
    CHECK(std::abs(mean - 10.0) <= 3.0 * std::sqrt(10.0 / static_cast<double>(m)));
    CHECK(std::abs(var - 10.0) <= 0.05);
}

TEST_CASE("poisson tiny theta") {
    RngStream rng(3);
    std::uint64_t zeros = 0;
    const std::uint64_t m = 100000;
    for (std::uint64_t i = 0; i < m; ++i) zeros += sample_poisson(0.001, rng) == 0;
    CHECK(static_cast<double>(zeros) / static_cast<double>(m) >= 0.998);
    CHECK_THROWS_AS(sample_poisson(0.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_poisson(-1.0, rng), std::invalid_argument);
}

TEST_CASE("poisson rejection regime matches exact pmf") {
    RngStream rng(77);
    const double theta = 50.0;
    const std::uint64_t m = 500000;
    double sum = 0.0;
    std::vector<std::uint64_t> counts(140, 0);
    for (std::uint64_t i = 0; i < m; ++i) {
        const std::uint64_t v = sample_poisson(theta, rng);
        sum += static_cast<double>(v);
        if (v < counts.size()) ++counts[v];
    }
    CHECK(std::abs(sum / static_cast<double>(m) - theta) <=
          3.0 * std::sqrt(theta / static_cast<double>(m)));
    std::vector<double> expected(counts.size());
    double p = std::exp(-theta);
    expected[0] = p * static_cast<double>(m);
    for (std::size_t k = 1; k < counts.size(); ++k) {
        p *= theta / static_cast<double>(k);
        expected[k] = p * static_cast<double>(m);
    }
    CHECK(chi_square_test(counts, expected).p_value > 1e-6);
}

TEST_CASE("poisson tail bound values and domination") {
    // closed form at theta=10, x=5 equals 32 e^{-5}
    CHECK(poisson_tail_bound(10.0, 5.0) == doctest::Approx(32.0 * std::exp(-5.0)).epsilon(1e-12));
    CHECK(poisson_cdf(10.0, 5) == doctest::Approx(0.0670859628).epsilon(1e-6));
    CHECK(poisson_cdf(10.0, 5) <= poisson_tail_bound(10.0, 5.0));
    // theta=20, x=10: bound equals 1024 e^{-10}
    CHECK(poisson_tail_bound(20.0, 10.0) ==
          doctest::Approx(1024.0 * std::exp(-10.0)).epsilon(1e-12));
    CHECK(poisson_cdf(20.0, 10) <= poisson_tail_bound(20.0, 10.0));
    for (double theta : {5.0, 10.0, 20.0, 50.0})
        for (std::uint64_t x = 1; x < static_cast<std::uint64_t>(theta); ++x)
            CHECK(poisson_cdf(theta, x) <= poisson_tail_bound(theta, static_cast<double>(x)));
    CHECK_THROWS_AS(poisson_tail_bound(10.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(poisson_tail_bound(10.0, 0.0), std::invalid_argument);
}

TEST_CASE("hypergeometric sampler") {
    RngStream rng(55);
    SUBCASE("no successes in the urn") {
        for (int i = 0; i < 100; ++i) CHECK(sample_hypergeometric(10, 0, 7, rng) == 0);
    }
    SUBCASE("pmf value N=6 K=3 draws=2") {
        CHECK(hypergeometric_pmf(6, 3, 2, 1) == doctest::Approx(0.6).epsilon(1e-12));
        std::uint64_t ones = 0;
        const std::uint64_t m = 200000;
        for (std::uint64_t i = 0; i < m; ++i) ones += sample_hypergeometric(6, 3, 2, rng) == 1;
        const double sigma = std::sqrt(0.6 * 0.4 / static_cast<double>(m));
        CHECK(std::abs(static_cast<double>(ones) / static_cast<double>(m) - 0.6) <= 3.0 * sigma);
    }
    SUBCASE("mean matches draws*K/N") {
        const std::uint64_t m = 200000;
        double sum = 0.0;
        for (std::uint64_t i = 0; i < m; ++i)
            sum += static_cast<double>(sample_hypergeometric(100, 30, 17, rng));
        CHECK(std::abs(sum / static_cast<double>(m) - 17.0 * 30.0 / 100.0) <= 0.05);
    }
    SUBCASE("chi-square against exact pmf, N=20") {
        const std::uint64_t m = 300000;
        std::vector<std::uint64_t> counts(13, 0);
        for (std::uint64_t i = 0; i < m; ++i) ++counts[sample_hypergeometric(20, 7, 12, rng)];
        std::vector<double> expected(13);
        for (std::uint64_t z = 0; z < 13; ++z)
            expected[z] = hypergeometric_pmf(20, 7, 12, z) * static_cast<double>(m);
        CHECK(chi_square_test(counts, expected).p_value > 1e-6);
    }
    CHECK_THROWS_AS(sample_hypergeometric(10, 11, 2, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_hypergeometric(10, 2, 11, rng), std::invalid_argument);
}

TEST_CASE("log inequality") {
    CHECK(ln_bound_holds(0.0)); // equality case
    CHECK(ln_bound_holds(1.0));
    CHECK(2.0 <= std::exp(0.75)); // the x=1 instance spelled out
    CHECK(ln_bound_holds(100.0));
    for (double x = 0.0; x <= 1000.0; x += 0.37) CHECK(ln_bound_holds(x));
    CHECK_THROWS_AS(ln_bound_holds(-0.1), std::invalid_argument);
}

TEST_CASE("mean_ci") {
    const std::vector<double> constant{5.0, 5.0, 5.0, 5.0};
    const auto c = mean_ci(constant, 0.95);
    CHECK(c.mean == doctest::Approx(5.0));
    CHECK(c.half_width == doctest::Approx(0.0));

    const std::vector<double> pair{0.0, 1.0};
    CHECK(mean_ci(pair, 0.95).mean == doctest::Approx(0.5));

    RngStream rng(8);
    std::vector<double> coins(1000000);
    for (auto& v : coins) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
    const auto mc = mean_ci(coins, 0.9973);
    CHECK(std::abs(mc.mean - 0.5) <= 0.0016);
    CHECK(mc.half_width == doctest::Approx(3.0 * 0.5 / 1000.0).epsilon(0.01));

    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(mean_ci(one, 0.95), std::invalid_argument);
}

TEST_CASE("normal quantile") {
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963985).epsilon(1e-6));
    CHECK(normal_quantile(0.0013498980316300946) == doctest::Approx(-3.0).epsilon(1e-6));
    CHECK(normal_quantile(0.1) == doctest::Approx(-normal_quantile(0.9)).epsilon(1e-9));
    CHECK_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
}

TEST_CASE("chi-square p-values") {
    CHECK(chi_square_pvalue(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(chi_square_pvalue(18.307038053275146, 10) == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(chi_square_pvalue(0.0, 5) == doctest::Approx(1.0));
    CHECK(gamma_q(0.5, 50.0) < 1e-20);
}
