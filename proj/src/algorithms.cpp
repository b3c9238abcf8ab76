#include "dyntrack/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dyntrack {

Trace run_single(TrackedFunction& f, const MutationOp& op, const Bitstring& x0,
                 std::uint64_t budget, RngStream& rng, const RunOptions& options) {
    if (f.clock() != 0)
        throw std::invalid_argument("run_single: dynamic function has already been queried");
    if (budget < 2)
        throw std::invalid_argument("run_single: budget must allow at least one iteration");
    if (!f.is_optimal_at(x0, 0))
        throw std::invalid_argument("run_single: initial point is not optimal at time 0");

    Trace trace("single", 1, options.keep_records);
    Bitstring x = x0;
    const std::uint64_t iterations = budget / 2; // two evaluations per iteration
    for (std::uint64_t tau = 0; tau < iterations; ++tau) {
        const std::uint64_t copy_time = 2 * tau;
        Bitstring offspring = mutate(op, x, rng);

        const double v1 = f.evaluate(offspring, copy_time);
        trace.add_query({copy_time, copy_time, offspring, v1,
                         f.is_optimal_at(offspring, copy_time)});
        const double v2 = f.evaluate(x, copy_time);
        trace.add_query({copy_time + 1, copy_time, x, v2,
                         f.is_optimal_at(x, copy_time + 1)});

        const bool incumbent_optimal = f.is_optimal_at(x, copy_time);
        trace.add_generation({tau, copy_time, 1, incumbent_optimal ? 1u : 0u,
                              static_cast<std::uint32_t>(f.target_distance(x, copy_time))});

        if (v1 >= v2) x = std::move(offspring);
    }
    return trace;
}

Trace run_population(TrackedFunction& f, const std::vector<Bitstring>& initial,
                     const SelectionSpec& selection, const MutationOp& op,
                     std::uint64_t budget, RngStream& rng, const RunOptions& options) {
    if (f.clock() != 0)
        throw std::invalid_argument("run_population: dynamic function has already been queried");
    const std::size_t lambda = initial.size();
    if (lambda == 0)
        throw std::invalid_argument("run_population: empty initial population");
    selection.validate(static_cast<std::uint32_t>(lambda));
    if (budget < lambda)
        throw std::invalid_argument("run_population: budget must allow at least one generation");
    for (const auto& x : initial)
        if (!f.is_optimal_at(x, 0))
            throw std::invalid_argument(
                "run_population: initial population member is not optimal at time 0");

    Trace trace("population:" + selection.to_string(), static_cast<std::uint32_t>(lambda),
                options.keep_records);
    std::vector<Bitstring> population = initial;
    std::vector<double> values(lambda);
    const std::uint64_t generations = budget / lambda; // partial generations are dropped
    for (std::uint64_t tau = 0; tau < generations; ++tau) {
        const std::uint64_t copy_time = tau * lambda;
        for (std::size_t j = 0; j < lambda; ++j) {
            const std::uint64_t query_time = copy_time + j;
            values[j] = f.evaluate(population[j], copy_time);
            trace.add_query({query_time, copy_time, population[j], values[j],
                             f.is_optimal_at(population[j], query_time)});
        }

        std::uint32_t in_opt = 0;
        std::size_t best = f.dimension();
        for (const auto& member : population) {
            if (f.is_optimal_at(member, copy_time)) ++in_opt;
            best = std::min(best, f.target_distance(member, copy_time));
        }
        trace.add_generation({tau, copy_time, static_cast<std::uint32_t>(lambda), in_opt,
                              static_cast<std::uint32_t>(best)});

        if (tau + 1 == generations) break; // final generation's offspring are never queried

        RankedPopulation ranked(values, rng);
        std::vector<Bitstring> next;
        next.reserve(lambda);
        for (std::size_t i = 0; i < lambda; ++i)
            next.push_back(mutate(op, population[select(selection, ranked, rng)], rng));
        population = std::move(next);
    }
    return trace;
}

std::vector<Bitstring> center_population(std::size_t n, std::uint32_t lambda) {
    return std::vector<Bitstring>(lambda, Bitstring::all_ones(n));
}

std::vector<Bitstring> uniform_ball_population(std::size_t n, std::size_t r,
                                               std::uint32_t lambda, RngStream& rng) {
    const Bitstring center = Bitstring::all_ones(n);
    // distance j has weight C(n, j); sample the distance, then a uniform
    // point at that exact distance
    std::vector<double> log_weight(r + 1);
    log_weight[0] = 0.0;
    for (std::size_t j = 1; j <= r; ++j)
        log_weight[j] = log_weight[j - 1] +
                        std::log(static_cast<double>(n - j + 1) / static_cast<double>(j));
    const double max_lw = *std::max_element(log_weight.begin(), log_weight.end());
    std::vector<double> cdf(r + 1);
    double total = 0.0;
    for (std::size_t j = 0; j <= r; ++j) {
        total += std::exp(log_weight[j] - max_lw);
        cdf[j] = total;
    }
    std::vector<Bitstring> population;
    population.reserve(lambda);
    for (std::uint32_t i = 0; i < lambda; ++i) {
        const double u = rng.next_double() * total;
        const std::size_t j = static_cast<std::size_t>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        population.push_back(j == 0 ? center : sample_at_distance(center, j, rng));
    }
    return population;
}

} // namespace dyntrack
