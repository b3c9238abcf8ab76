#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dyntrack/bitstring.hpp"
#include "dyntrack/mutation.hpp"
#include "dyntrack/rng.hpp"

namespace dyntrack {

/// Time-indexed fitness function under the two-timeline query model: every
/// evaluation advances the function clock by one, and queries may target any
/// past clock value. History is immutable, so re-evaluating a recorded
/// (point, time) pair reproduces the recorded value exactly.
class DynamicFunction {
public:
    virtual ~DynamicFunction() = default;

    std::uint64_t clock() const { return clock_; }

    /// Evaluates f_{eval_time}(x). Requires eval_time <= clock(); advances
    /// the clock by exactly one and extends the target process to the new
    /// clock value.
    double evaluate(const Bitstring& x, std::uint64_t eval_time);

protected:
    virtual double value_at(const Bitstring& x, std::uint64_t t) const = 0;
    virtual void extend_to(std::uint64_t /*t*/) {}

private:
    std::uint64_t clock_ = 0;
};

/// Dynamic function with an observable optimal region, for instrumentation:
/// the harness asks whether a point was optimal at a given time without
/// spending evaluations.
class TrackedFunction : public DynamicFunction {
public:
    virtual std::size_t dimension() const = 0;
    /// Instrumentation only; never advances the clock. Requires t <= clock().
    virtual bool is_optimal_at(const Bitstring& x, std::uint64_t t) const = 0;
    /// Hamming distance from x to the optimum center in force at time t.
    virtual std::size_t target_distance(const Bitstring& x, std::uint64_t t) const = 0;
};

/// Static Hamming ball fitness: 1 inside B_r(target), 0 outside. The
/// degenerate no-change dynamic (theta -> infinity).
class HbInstance final : public TrackedFunction {
public:
    HbInstance(Bitstring target, std::size_t radius);

    std::size_t dimension() const override { return target_.size(); }
    bool is_optimal_at(const Bitstring& x, std::uint64_t) const override;
    std::size_t target_distance(const Bitstring& x, std::uint64_t) const override;
    const Bitstring& target() const { return target_; }
    std::size_t radius() const { return radius_; }

protected:
    double value_at(const Bitstring& x, std::uint64_t) const override;

private:
    Bitstring target_;
    std::size_t radius_;
};

struct MhbParams {
    std::size_t n = 0;    // bitstring length
    std::size_t r = 0;    // ball radius, r < n/2
    std::size_t ell = 1;  // move distance, 1 <= ell <= n
    double theta = 1.0;   // Poisson mean of inter-change times

    void validate() const;
    double b() const { return static_cast<double>(r) / static_cast<double>(n); }
};

/// Moving Hamming Ball: the target starts at the all-ones string and jumps
/// exactly `ell` bits at times given by partial sums of iid Pois(theta)
/// draws. Zero inter-change draws are allowed, so several jumps can share a
/// time point and compose.
class MhbInstance final : public TrackedFunction {
public:
    MhbInstance(const MhbParams& params, RngStream rng);

    const MhbParams& params() const { return params_; }
    std::size_t dimension() const override { return params_.n; }

    /// Target in force at time t. Requires t <= clock().
    const Bitstring& target_at(std::uint64_t t) const;
    bool is_optimal_at(const Bitstring& x, std::uint64_t t) const override;
    std::size_t target_distance(const Bitstring& x, std::uint64_t t) const override;

    struct Change {
        std::uint64_t time;
        Bitstring target;
    };
    /// All target changes generated so far, including the initial target at
    /// time 0. Consecutive entries differ by exactly `ell` bits.
    std::span<const Change> history() const { return history_; }

protected:
    double value_at(const Bitstring& x, std::uint64_t t) const override;
    void extend_to(std::uint64_t t) override;

private:
    MhbParams params_;
    RngStream rng_;
    std::vector<Change> history_;
    std::uint64_t next_change_time_;
};

/// The analytical (kappa, rho) stability pair for a moving Hamming ball under
/// bitwise mutation: kappa = theta/(1+d), rho = (r*chi/(n*ell))^ell *
/// e^{-(1+eps)*chi}. Requires n >= (1 + 1/eps) * chi.
struct StabilityBound {
    double kappa;
    double rho;
};
StabilityBound stability_bound(const MhbParams& params, double chi, double eps, double d);

/// Smallest eps for which the bound's validity condition n >= (1+1/eps)*chi
/// holds with equality.
double default_stability_epsilon(const MhbParams& params, double chi);

struct StabilityEstimate {
    double rho_hat;             // success frequency among conditioned trials
    double std_error;
    double multi_change_freq;   // frequency of >= 2 changes inside the window
    std::uint64_t trials;
    std::uint64_t conditioned_trials;
    std::uint64_t multi_change_events;
};

/// Monte Carlo stability check: starts a point on the ball boundary, plays
/// the change process over a window of `kappa` steps, and tests whether one
/// mutation lands in the optimal region in force at the window's end.
/// Windows with two or more changes are the failure event of the stability
/// definition; they are counted separately and excluded from rho_hat.
StabilityEstimate stability_estimate(const MhbParams& params, const MutationOp& op,
                                     std::uint64_t kappa, std::uint64_t trials, RngStream& rng);

} // namespace dyntrack
