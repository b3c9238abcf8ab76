#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dyntrack/dynamics.hpp"
#include "dyntrack/mutation.hpp"
#include "dyntrack/trace.hpp"

namespace dyntrack {

/// Sliding-window tracking metric: fraction of optimal queries in every
/// window of `window` consecutive queries starting in [t0, T - window]. A run
/// tracks at level c' iff the minimum window fraction is at least c'.
struct TrackingReport {
    std::uint64_t window;
    std::uint64_t t0;
    double threshold;       // c'
    double min_fraction;
    double mean_fraction;
    double max_fraction;
    std::vector<double> fractions;

    bool passes() const { return min_fraction >= threshold; }
};

TrackingReport tracking_score(const Trace& trace, std::uint64_t window, std::uint64_t t0,
                              double threshold);

/// One-step drift of the border-distance process X_t = r - H(target, x) of
/// the accepted single-individual process, conditioned on X_t = i, with the
/// analytical companions: delta = chi*(1-b)*e^{-(1+eps)*chi}/2 away from the
/// border (interior states) and eta = r*chi/n toward the interior (border
/// state).
struct DriftEstimate {
    std::uint64_t state;       // distance to the ball border
    double mean;
    double std_error;
    std::uint64_t samples;
    double delta_bound;        // interior lower bound
    double eta_bound;          // border inward cap
};

DriftEstimate drift_estimate(const MhbParams& params, const MutationOp& op, std::uint64_t state,
                             std::uint64_t samples, RngStream& rng, double eps = 0.0);

/// Mean distance change contributed by one target move of ell bits against a
/// point at Hamming distance h: E[ell - 2 Z] = ell * (1 - 2h/n) with
/// Z ~ HGeo(n, h, ell) bits corrected.
double hypergeometric_drift(std::size_t n, std::size_t h, std::size_t ell);

struct OccupancyReport {
    double fraction_at_zero;
    double occupancy_bound;        // (delta*t - X0) / ((delta+eta)*t)
    std::uint64_t steps;
};

/// Empirical fraction of time a state sequence spends at 0, against the
/// occupancy lower bound implied by drift constants delta and eta.
OccupancyReport occupancy_fraction(std::span<const std::uint64_t> states, double delta,
                                   double eta);

/// Point-probability occupancy bound delta / (2*(delta+eta)) at a time
/// independent of the process.
double occupancy_point_bound(double delta, double eta);

/// Pessimistic gambler's-ruin probability q(r, d, x) of re-entering the
/// radius-r ball before reaching distance r+d, for a single-bit random walk
/// started at distance x, using the constant inward probability
/// (d+r-1)/n. Clamped to 1 for x <= r and 0 for x >= r+d. Requires
/// d + r < n/2.
double ruin_probability_closed(std::uint64_t r, std::uint64_t d, std::uint64_t n, std::uint64_t x);

/// Exact enter-probability of the single-bit walk: solves the recurrence
/// p_x = ((n-x)/n) p_{x+1} + (x/n) p_{x-1} with p_x = 1 for x <= r and
/// p_x = 0 for x >= r+d (tridiagonal system, residual below 1e-12).
double ruin_probability_exact(std::uint64_t r, std::uint64_t d, std::uint64_t n, std::uint64_t x);

/// Max-norm residual of the recurrence at the exact solution (solver
/// self-check).
double ruin_exact_residual(std::uint64_t r, std::uint64_t d, std::uint64_t n);

struct RuinEstimate {
    double estimate;
    double std_error;
    std::uint64_t walks;
};

/// Monte Carlo of the walk itself; `op` defaults to the single-bit operator,
/// bitwise mutation gives the empirical analogue for standard mutation.
RuinEstimate ruin_simulate(std::uint64_t r, std::uint64_t d, std::uint64_t n, std::uint64_t x,
                           std::uint64_t walks, RngStream& rng,
                           const MutationOp& op = MutationOp::single_bit());

/// A maximal span of generations with the incumbent (single runs) or the
/// whole population (population runs) outside the optimal region.
struct LossEpisode {
    std::uint64_t loss_generation;
    std::uint64_t loss_clock;
    std::optional<std::uint64_t> recovery_generation; // absent: not recovered in budget
    std::optional<std::uint64_t> recovery_clock;
};

struct LossReport {
    std::vector<LossEpisode> episodes;
    bool recovered_all() const;
    std::uint64_t unrecovered_count() const;

    // per-target-change ejection statistics (single-individual traces with
    // full records; zero counts otherwise)
    std::uint64_t changes_observed = 0;
    std::uint64_t changes_with_incumbent_inside = 0;
    std::uint64_t ejections = 0; // inside before the change, outside after
    double ejection_fraction() const {
        return changes_with_incumbent_inside == 0
                   ? 0.0
                   : static_cast<double>(ejections) /
                         static_cast<double>(changes_with_incumbent_inside);
    }
};

/// Loss/recovery episodes of a trace against the instance it was produced
/// on, plus the fraction of target changes that ejected an inside incumbent
/// (the per-change loss frequency compared against the constant
/// (2e-1)/(4(2e+1)) of the single-individual analysis).
LossReport loss_events(const Trace& trace, const MhbInstance& f);

/// The constant (2e-1) / (4(2e+1)).
double single_loss_probability_bound();

} // namespace dyntrack
