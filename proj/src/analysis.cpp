#include "dyntrack/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dyntrack {

TrackingReport tracking_score(const Trace& trace, std::uint64_t window, std::uint64_t t0,
                              double threshold) {
    const std::uint64_t total = trace.query_count();
    if (window == 0)
        throw std::invalid_argument("tracking_score: window must be positive");
    if (t0 + window > total)
        throw std::invalid_argument("tracking_score: window does not fit in the trace");

    const auto& flags = trace.optimal_flags();
    std::vector<std::uint64_t> prefix(total + 1, 0);
    for (std::uint64_t i = 0; i < total; ++i) prefix[i + 1] = prefix[i] + flags[i];

    TrackingReport report{window, t0, threshold, 1.0, 0.0, 0.0, {}};
    report.fractions.reserve(total - window - t0 + 1);
    double sum = 0.0;
    double min_f = 1.0, max_f = 0.0;
    for (std::uint64_t t = t0; t + window <= total; ++t) {
        const double f = static_cast<double>(prefix[t + window] - prefix[t]) /
                         static_cast<double>(window);
        report.fractions.push_back(f);
        sum += f;
        min_f = std::min(min_f, f);
        max_f = std::max(max_f, f);
    }
    report.min_fraction = min_f;
    report.max_fraction = max_f;
    report.mean_fraction = sum / static_cast<double>(report.fractions.size());
    return report;
}

DriftEstimate drift_estimate(const MhbParams& params, const MutationOp& op, std::uint64_t state,
                             std::uint64_t samples, RngStream& rng, double eps) {
    params.validate();
    if (state > params.r)
        throw std::invalid_argument("drift_estimate: state must be within [0, r]");
    if (samples == 0)
        throw std::invalid_argument("drift_estimate: samples must be positive");

    const Bitstring center = Bitstring::all_ones(params.n);
    const std::size_t h = params.r - static_cast<std::size_t>(state);
    const Bitstring x = h == 0 ? center : sample_at_distance(center, h, rng);

    double sum = 0.0, sum_sq = 0.0;
    for (std::uint64_t s = 0; s < samples; ++s) {
        const Bitstring y = mutate(op, x, rng);
        const std::size_t h2 = hamming(y, center);
        // accepted moves stay inside the ball; rejected moves contribute 0
        const double delta =
            h2 <= params.r ? static_cast<double>(h2) - static_cast<double>(h) : 0.0;
        sum += delta;
        sum_sq += delta * delta;
    }
    const double m = static_cast<double>(samples);
    const double mean = sum / m;
    const double var = std::max(0.0, (sum_sq - m * mean * mean) / (m - 1.0));

    const double chi = op.kind == MutationOp::Kind::bitwise ? op.chi : 1.0;
    const double b = params.b();
    DriftEstimate est{};
    est.state = state;
    est.mean = mean;
    est.std_error = std::sqrt(var / m);
    est.samples = samples;
    est.delta_bound = chi * (1.0 - b) * std::exp(-(1.0 + eps) * chi) / 2.0;
    est.eta_bound = static_cast<double>(params.r) * chi / static_cast<double>(params.n);
    return est;
}

double hypergeometric_drift(std::size_t n, std::size_t h, std::size_t ell) {
    if (n == 0 || h > n || ell > n)
        throw std::invalid_argument("hypergeometric_drift: parameters out of range");
    return static_cast<double>(ell) *
           (1.0 - 2.0 * static_cast<double>(h) / static_cast<double>(n));
}

OccupancyReport occupancy_fraction(std::span<const std::uint64_t> states, double delta,
                                   double eta) {
    if (states.empty())
        throw std::invalid_argument("occupancy_fraction: empty state sequence");
    if (!(delta > 0.0) || eta < 0.0)
        throw std::invalid_argument("occupancy_fraction: requires delta > 0 and eta >= 0");
    std::uint64_t zeros = 0;
    for (auto s : states) zeros += (s == 0);
    const double t = static_cast<double>(states.size());
    const double x0 = static_cast<double>(states.front());
    return {static_cast<double>(zeros) / t, (delta * t - x0) / ((delta + eta) * t),
            states.size()};
}

double occupancy_point_bound(double delta, double eta) {
    if (!(delta > 0.0) || eta < 0.0)
        throw std::invalid_argument("occupancy_point_bound: requires delta > 0 and eta >= 0");
    return delta / (2.0 * (delta + eta));
}

namespace {

void check_ruin_params(std::uint64_t r, std::uint64_t d, std::uint64_t n, std::uint64_t x,
                       bool closed_form) {
    if (d == 0) throw std::invalid_argument("ruin probability: requires d >= 1");
    if (closed_form) {
        if (2 * (d + r) >= n)
            throw std::invalid_argument(
                "ruin probability: the pessimistic closed form requires d + r < n/2");
    } else if (r + d > n) {
        throw std::invalid_argument("ruin probability: requires r + d <= n");
    }
    if (x > n)
        throw std::invalid_argument("ruin probability: start distance x exceeds n");
}

} // namespace

double ruin_probability_closed(std::uint64_t r, std::uint64_t d, std::uint64_t n,
                               std::uint64_t x) {
    check_ruin_params(r, d, n, x, true);
    if (x <= r) return 1.0;
    if (x >= r + d) return 0.0;
    const double s = static_cast<double>(d + r - 1) / static_cast<double>(n - d - r + 1);
    const double sd = std::pow(s, static_cast<double>(d));
    return (std::pow(s, static_cast<double>(x - r)) - sd) / (1.0 - sd);
}

namespace {

// Thomas solve of the enter-probability recurrence; returns p_{r+1..r+d-1}.
std::vector<double> ruin_exact_solve(std::uint64_t r, std::uint64_t d, std::uint64_t n) {
    const std::size_t m = static_cast<std::size_t>(d) - 1;
    std::vector<double> p(m);
    if (m == 0) return p;
    // unknown i holds state y = r + 1 + i:
    //   -(y/n) p_{y-1} + p_y - ((n-y)/n) p_{y+1} = 0,  p_r = 1, p_{r+d} = 0
    std::vector<double> c_star(m), d_star(m);
    const double nn = static_cast<double>(n);
    {
        const double y = static_cast<double>(r + 1);
        c_star[0] = -(nn - y) / nn;
        d_star[0] = y / nn;
    }
    for (std::size_t i = 1; i < m; ++i) {
        const double y = static_cast<double>(r + 1 + i);
        const double lower = -y / nn;
        const double denom = 1.0 - lower * c_star[i - 1];
        c_star[i] = (-(nn - y) / nn) / denom;
        d_star[i] = (0.0 - lower * d_star[i - 1]) / denom;
    }
    p[m - 1] = d_star[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) p[i] = d_star[i] - c_star[i] * p[i + 1];
    return p;
}

} // namespace

double ruin_probability_exact(std::uint64_t r, std::uint64_t d, std::uint64_t n,
                              std::uint64_t x) {
    check_ruin_params(r, d, n, x, false);
    if (x <= r) return 1.0;
    if (x >= r + d) return 0.0;
    const auto p = ruin_exact_solve(r, d, n);
    return p[static_cast<std::size_t>(x - r - 1)];
}

double ruin_exact_residual(std::uint64_t r, std::uint64_t d, std::uint64_t n) {
    check_ruin_params(r, d, n, r, false);
    const auto p = ruin_exact_solve(r, d, n);
    const double nn = static_cast<double>(n);
    double residual = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double y = static_cast<double>(r + 1 + i);
        const double prev = i == 0 ? 1.0 : p[i - 1];
        const double next = i + 1 == p.size() ? 0.0 : p[i + 1];
        residual = std::max(residual,
                            std::abs(p[i] - (nn - y) / nn * next - y / nn * prev));
    }
    return residual;
}

RuinEstimate ruin_simulate(std::uint64_t r, std::uint64_t d, std::uint64_t n, std::uint64_t x,
                           std::uint64_t walks, RngStream& rng, const MutationOp& op) {
    check_ruin_params(r, d, n, x, false);
    if (walks == 0)
        throw std::invalid_argument("ruin_simulate: walks must be positive");
    const Bitstring center = Bitstring::all_ones(n);
    std::uint64_t entered = 0;
    for (std::uint64_t w = 0; w < walks; ++w) {
        Bitstring cur = x == 0 ? center : sample_at_distance(center, x, rng);
        for (;;) {
            const std::size_t dist = hamming(cur, center);
            if (dist <= r) {
                ++entered;
                break;
            }
            if (dist >= r + d) break;
            cur = mutate(op, cur, rng);
        }
    }
    const double est = static_cast<double>(entered) / static_cast<double>(walks);
    const double se = std::sqrt(std::max(est * (1.0 - est), 1e-12) / static_cast<double>(walks));
    return {est, se, walks};
}

bool LossReport::recovered_all() const {
    return std::all_of(episodes.begin(), episodes.end(),
                       [](const LossEpisode& e) { return e.recovery_generation.has_value(); });
}

std::uint64_t LossReport::unrecovered_count() const {
    return static_cast<std::uint64_t>(
        std::count_if(episodes.begin(), episodes.end(),
                      [](const LossEpisode& e) { return !e.recovery_generation.has_value(); }));
}

LossReport loss_events(const Trace& trace, const MhbInstance& f) {
    if (trace.query_count() != f.clock())
        throw std::invalid_argument(
            "loss_events: trace and instance disagree on the number of evaluations");
    LossReport report;

    // episodes: whole population (or the incumbent) outside the region at a
    // generation's evaluation time
    const auto& gens = trace.generations();
    bool inside = true;
    for (const auto& g : gens) {
        const bool now_inside = g.in_opt_count > 0;
        if (inside && !now_inside)
            report.episodes.push_back({g.generation, g.clock, std::nullopt, std::nullopt});
        else if (!inside && now_inside) {
            report.episodes.back().recovery_generation = g.generation;
            report.episodes.back().recovery_clock = g.clock;
        }
        inside = now_inside;
    }

    // per-change ejection counts need the incumbent's search points
    if (trace.algorithm() == "single" && trace.has_records()) {
        const auto& records = trace.records();
        const auto history = f.history();
        const std::uint64_t iterations = records.size() / 2;
        for (std::size_t j = 1; j < history.size(); ++j) {
            const std::uint64_t t = history[j].time;
            const std::uint64_t tau = t / 2;
            if (tau >= iterations) break; // change beyond the last queried iteration
            // the incumbent during iteration tau is the second query of the pair
            const Bitstring& incumbent = records[2 * tau + 1].point;
            ++report.changes_observed;
            if (in_ball(incumbent, history[j - 1].target, f.params().r)) {
                ++report.changes_with_incumbent_inside;
                if (!in_ball(incumbent, history[j].target, f.params().r)) ++report.ejections;
            }
        }
    }
    return report;
}

double single_loss_probability_bound() {
    constexpr double two_e = 2.0 * 2.718281828459045235360287471352662498;
    return (two_e - 1.0) / (4.0 * (two_e + 1.0));
}

} // namespace dyntrack
