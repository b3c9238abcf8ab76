#include "dyntrack/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dyntrack/stats.hpp"

namespace dyntrack {

double DynamicFunction::evaluate(const Bitstring& x, std::uint64_t eval_time) {
    if (eval_time > clock_)
        throw std::invalid_argument("evaluate: evaluation time is in the future");
    ++clock_;
    extend_to(clock_);
    return value_at(x, eval_time);
}

HbInstance::HbInstance(Bitstring target, std::size_t radius)
    : target_(std::move(target)), radius_(radius) {
    if (2 * radius >= target_.size())
        throw std::invalid_argument("HbInstance: radius must be below n/2");
}

bool HbInstance::is_optimal_at(const Bitstring& x, std::uint64_t) const {
    return in_ball(x, target_, radius_);
}

std::size_t HbInstance::target_distance(const Bitstring& x, std::uint64_t) const {
    return hamming(x, target_);
}

double HbInstance::value_at(const Bitstring& x, std::uint64_t) const {
    return in_ball(x, target_, radius_) ? 1.0 : 0.0;
}

void MhbParams::validate() const {
    if (n == 0) throw std::invalid_argument("MhbParams: n must be positive");
    if (2 * r >= n) throw std::invalid_argument("MhbParams: requires r < n/2");
    if (ell == 0 || ell > n) throw std::invalid_argument("MhbParams: requires 1 <= ell <= n");
    if (!(theta > 0.0)) throw std::invalid_argument("MhbParams: theta must be positive");
}

MhbInstance::MhbInstance(const MhbParams& params, RngStream rng)
    : params_(params), rng_(rng) {
    params_.validate();
    history_.push_back({0, Bitstring::all_ones(params_.n)});
    // a zero first gap may not fire at time 0: the target at time 0 is the
    // all-ones string unconditionally, so the earliest change lands at 1
    next_change_time_ = std::max<std::uint64_t>(sample_poisson(params_.theta, rng_), 1);
}

void MhbInstance::extend_to(std::uint64_t t) {
    while (next_change_time_ <= t) {
        history_.push_back(
            {next_change_time_, sample_at_distance(history_.back().target, params_.ell, rng_)});
        next_change_time_ += sample_poisson(params_.theta, rng_);
    }
}

const Bitstring& MhbInstance::target_at(std::uint64_t t) const {
    if (t > clock())
        throw std::invalid_argument("target_at: time is in the future");
    // last change with time <= t; same-time changes compose, the latest wins
    auto it = std::upper_bound(history_.begin(), history_.end(), t,
                               [](std::uint64_t v, const Change& c) { return v < c.time; });
    return std::prev(it)->target;
}

bool MhbInstance::is_optimal_at(const Bitstring& x, std::uint64_t t) const {
    return in_ball(x, target_at(t), params_.r);
}

std::size_t MhbInstance::target_distance(const Bitstring& x, std::uint64_t t) const {
    return hamming(x, target_at(t));
}

double MhbInstance::value_at(const Bitstring& x, std::uint64_t t) const {
    return is_optimal_at(x, t) ? 1.0 : 0.0;
}

StabilityBound stability_bound(const MhbParams& params, double chi, double eps, double d) {
    params.validate();
    if (!(chi > 0.0) || !(eps > 0.0) || !(d > 0.0))
        throw std::invalid_argument("stability_bound: chi, eps, d must be positive");
    // validity condition n >= (1 + 1/eps) * chi, rearranged so that the
    // default eps = chi/(n-chi) passes at exact equality
    if (static_cast<double>(params.n) <= chi ||
        eps * (static_cast<double>(params.n) - chi) < chi * (1.0 - 1e-12))
        throw std::invalid_argument(
            "stability_bound: validity condition n >= (1 + 1/eps) * chi is violated; "
            "increase eps or n");
    const double n = static_cast<double>(params.n);
    const double ell = static_cast<double>(params.ell);
    const double kappa = params.theta / (1.0 + d);
    const double rho = std::pow(static_cast<double>(params.r) * chi / (n * ell), ell) *
                       std::exp(-(1.0 + eps) * chi);
    return {kappa, rho};
}

double default_stability_epsilon(const MhbParams& params, double chi) {
    const double n = static_cast<double>(params.n);
    if (!(chi > 0.0) || !(n > chi))
        throw std::invalid_argument("default_stability_epsilon: requires 0 < chi < n");
    return chi / (n - chi);
}

StabilityEstimate stability_estimate(const MhbParams& params, const MutationOp& op,
                                     std::uint64_t kappa, std::uint64_t trials, RngStream& rng) {
    params.validate();
    if (kappa == 0)
        throw std::invalid_argument("stability_estimate: window kappa must be positive");
    if (trials == 0)
        throw std::invalid_argument("stability_estimate: trials must be positive");

    const Bitstring center = Bitstring::all_ones(params.n);
    std::uint64_t successes = 0;
    std::uint64_t conditioned = 0;
    std::uint64_t multi = 0;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        // worst-case start: exactly on the ball boundary
        const Bitstring start =
            params.r > 0 ? sample_at_distance(center, params.r, rng) : center;
        std::uint64_t t1 = sample_poisson(params.theta, rng);
        std::uint64_t changes = 0;
        Bitstring target = center;
        if (t1 <= kappa) {
            ++changes;
            target = sample_at_distance(center, params.ell, rng);
            if (t1 + sample_poisson(params.theta, rng) <= kappa) ++changes;
        }
        if (changes >= 2) {
            ++multi;
            continue; // the low-probability failure event is reported, not scored
        }
        ++conditioned;
        if (in_ball(mutate(op, start, rng), target, params.r)) ++successes;
    }
    StabilityEstimate est{};
    est.trials = trials;
    est.conditioned_trials = conditioned;
    est.multi_change_events = multi;
    est.multi_change_freq = static_cast<double>(multi) / static_cast<double>(trials);
    est.rho_hat = conditioned ? static_cast<double>(successes) / static_cast<double>(conditioned)
                              : 0.0;
    est.std_error =
        conditioned ? std::sqrt(std::max(est.rho_hat * (1.0 - est.rho_hat), 1e-12) /
                                static_cast<double>(conditioned))
                    : 0.0;
    return est;
}

} // namespace dyntrack
