#include "dyntrack/stats.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace dyntrack {

namespace {

std::uint64_t poisson_inversion(double theta, RngStream& rng) {
    const double u = rng.next_double();
    double p = std::exp(-theta);
    double cum = p;
    std::uint64_t k = 0;
    const std::uint64_t cap = static_cast<std::uint64_t>(theta + 40.0 * std::sqrt(theta) + 60.0);
    while (u > cum && k < cap) {
        ++k;
        p *= theta / static_cast<double>(k);
        cum += p;
    }
    return k;
}

// Hormann's PTRS transformed-rejection sampler, exact for theta >= 10.
std::uint64_t poisson_ptrs(double theta, RngStream& rng) {
    const double b = 0.931 + 2.53 * std::sqrt(theta);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_theta = std::log(theta);
    for (;;) {
        const double u = rng.next_double() - 0.5;
        const double v = rng.next_double();
        const double us = 0.5 - std::abs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + theta + 0.43);
        if (us >= 0.07 && v <= v_r)
            return static_cast<std::uint64_t>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us))
            continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            kf * log_theta - theta - std::lgamma(kf + 1.0))
            return static_cast<std::uint64_t>(kf);
    }
}

double ln_choose(std::uint64_t n, std::uint64_t k) {
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

// Regularized lower incomplete gamma by series expansion; valid for x < a+1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma by continued fraction; valid for x >= a+1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

} // namespace

std::uint64_t sample_poisson(double theta, RngStream& rng) {
    if (!(theta > 0.0))
        throw std::invalid_argument("sample_poisson: theta must be positive");
    if (theta < 30.0)
        return poisson_inversion(theta, rng);
    return poisson_ptrs(theta, rng);
}

double poisson_tail_bound(double theta, double x) {
    if (!(x > 0.0) || !(x < theta))
        throw std::invalid_argument("poisson_tail_bound: requires 0 < x < theta");
    return std::exp(-theta + x * (1.0 + std::log(theta) - std::log(x)));
}

double poisson_cdf(double theta, std::uint64_t x) {
    double p = std::exp(-theta);
    double cum = p;
    for (std::uint64_t k = 1; k <= x; ++k) {
        p *= theta / static_cast<double>(k);
        cum += p;
    }
    return cum;
}

std::uint64_t sample_hypergeometric(std::uint64_t total, std::uint64_t successes,
                                    std::uint64_t draws, RngStream& rng) {
    if (successes > total || draws > total)
        throw std::invalid_argument("sample_hypergeometric: parameters out of range");
    // urn simulation, O(draws) exact
    std::uint64_t remaining = total;
    std::uint64_t good = successes;
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < draws; ++i) {
        if (rng.below(remaining) < good) {
            ++hits;
            --good;
        }
        --remaining;
    }
    return hits;
}

double hypergeometric_pmf(std::uint64_t total, std::uint64_t successes,
                          std::uint64_t draws, std::uint64_t z) {
    if (successes > total || draws > total)
        throw std::invalid_argument("hypergeometric_pmf: parameters out of range");
    if (z > draws || z > successes) return 0.0;
    if (draws - z > total - successes) return 0.0;
    return std::exp(ln_choose(successes, z) + ln_choose(total - successes, draws - z) -
                    ln_choose(total, draws));
}

double binomial_pmf(std::uint64_t n, double p, std::uint64_t k) {
    if (k > n) return 0.0;
    if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
    if (p >= 1.0) return k == n ? 1.0 : 0.0;
    return std::exp(ln_choose(n, k) + static_cast<double>(k) * std::log(p) +
                    static_cast<double>(n - k) * std::log1p(-p));
}

bool ln_bound_holds(double x) {
    if (x < 0.0)
        throw std::invalid_argument("ln_bound_holds: x must be nonnegative");
    return std::log1p(x) <= (x / 2.0) * (x + 2.0) / (x + 1.0);
}

MeanCi mean_ci(std::span<const double> samples, double confidence) {
    if (samples.size() < 2)
        throw std::invalid_argument("mean_ci: need at least two samples");
    if (!(confidence > 0.0) || !(confidence < 1.0))
        throw std::invalid_argument("mean_ci: confidence must be in (0, 1)");
    const double m = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= m;
    double ss = 0.0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (m - 1.0));
    const double z = normal_quantile(0.5 + confidence / 2.0);
    return {mean, z * sd / std::sqrt(m)};
}

double normal_quantile(double p) {
    if (!(p > 0.0) || !(p < 1.0))
        throw std::invalid_argument("normal_quantile: p must be in (0, 1)");
    // Acklam's algorithm
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    double q, r, x;
    if (p < p_low) {
        q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        q = p - 0.5;
        r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    return x;
}

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0)
        throw std::invalid_argument("gamma_q: invalid arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi_square_pvalue(double stat, std::uint64_t dof) {
    if (dof == 0)
        throw std::invalid_argument("chi_square_pvalue: dof must be positive");
    return gamma_q(static_cast<double>(dof) / 2.0, stat / 2.0);
}

ChiSquareResult chi_square_test(std::span<const std::uint64_t> observed,
                                std::span<const double> expected,
                                double min_expected) {
    if (observed.size() != expected.size() || observed.empty())
        throw std::invalid_argument("chi_square_test: size mismatch or empty input");
    std::vector<double> exp_pooled;
    std::vector<double> obs_pooled;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (!exp_pooled.empty() && (expected[i] < min_expected || exp_pooled.back() < min_expected)) {
            exp_pooled.back() += expected[i];
            obs_pooled.back() += static_cast<double>(observed[i]);
        } else {
            exp_pooled.push_back(expected[i]);
            obs_pooled.push_back(static_cast<double>(observed[i]));
        }
    }
    if (exp_pooled.size() < 2)
        throw std::invalid_argument("chi_square_test: fewer than two usable bins");
    double stat = 0.0;
    for (std::size_t i = 0; i < exp_pooled.size(); ++i) {
        const double diff = obs_pooled[i] - exp_pooled[i];
        stat += diff * diff / exp_pooled[i];
    }
    const std::uint64_t dof = exp_pooled.size() - 1;
    return {stat, dof, chi_square_pvalue(stat, dof)};
}

} // namespace dyntrack
