#pragma once

#include <cstdint>
#include <span>
#include <utility>

#include "dyntrack/rng.hpp"

namespace dyntrack {

/// Poisson(theta) draw. Sequential inversion below theta = 30, transformed
/// rejection (PTRS) above; both are exact samplers. Requires theta > 0.
std::uint64_t sample_poisson(double theta, RngStream& rng);

/// Upper bound e^{-theta} (e*theta/x)^x on P[X <= x] for X ~ Pois(theta).
/// Requires 0 < x < theta.
double poisson_tail_bound(double theta, double x);

/// Exact P[X <= x] for X ~ Pois(theta), by pmf summation.
double poisson_cdf(double theta, std::uint64_t x);

/// Hypergeometric draw: successes among `draws` taken without replacement
/// from a population of `total` containing `successes` marked items.
std::uint64_t sample_hypergeometric(std::uint64_t total, std::uint64_t successes,
                                    std::uint64_t draws, RngStream& rng);

/// Exact hypergeometric pmf P[Z = z].
double hypergeometric_pmf(std::uint64_t total, std::uint64_t successes,
                          std::uint64_t draws, std::uint64_t z);

/// Exact binomial pmf C(n, k) p^k (1-p)^(n-k).
double binomial_pmf(std::uint64_t n, double p, std::uint64_t k);

/// Checks (1+x) <= exp((x/2) * (x+2)/(x+1)) for x >= 0.
bool ln_bound_holds(double x);

struct MeanCi {
    double mean;
    double half_width;
};

/// Sample mean with a normal-approximation confidence half-width.
/// Requires at least two samples and confidence in (0, 1).
MeanCi mean_ci(std::span<const double> samples, double confidence);

/// Quantile of the standard normal distribution (Acklam's rational
/// approximation, |error| < 1.2e-9). Requires p in (0, 1).
double normal_quantile(double p);

/// Upper tail P[X >= stat] for X ~ chi-square with `dof` degrees of freedom.
double chi_square_pvalue(double stat, std::uint64_t dof);

/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

/// Pearson chi-square statistic and p-value of observed counts against
/// expected counts; bins with expected count below `min_expected` are pooled
/// into the previous bin.
struct ChiSquareResult {
    double stat;
    std::uint64_t dof;
    double p_value;
};
ChiSquareResult chi_square_test(std::span<const std::uint64_t> observed,
                                std::span<const double> expected,
                                double min_expected = 5.0);

} // namespace dyntrack
