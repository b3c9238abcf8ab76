#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dyntrack/rng.hpp"

namespace dyntrack {

/// One of the four selection mechanisms with its pressure parameter.
struct SelectionSpec {
    enum class Kind { k_tournament, mu_comma_lambda, linear_ranking, exponential_ranking };

    Kind kind = Kind::k_tournament;
    std::uint32_t k = 2;   // k_tournament
    std::uint32_t mu = 1;  // mu_comma_lambda
    double eta = 1.5;      // linear_ranking in (1, 2], exponential_ranking > 0

    static SelectionSpec tournament(std::uint32_t k);
    static SelectionSpec mu_comma(std::uint32_t mu);
    static SelectionSpec linear(double eta);
    static SelectionSpec exponential(double eta);

    /// Throws std::invalid_argument if the parameters are unusable for a
    /// population of size lambda (pass 0 to skip the lambda-dependent check).
    void validate(std::uint32_t lambda = 0) const;

    /// Canonical text form, e.g. "tournament:k=33", "mu-comma-lambda:mu=25",
    /// "linear-ranking:eta=2", "exponential-ranking:eta=33".
    std::string to_string() const;
    static SelectionSpec parse(std::string_view text);
};

/// Fitness ranking for one selection batch (one generation): individuals are
/// sorted best-first by fitness, ties broken by a uniformly random
/// permutation drawn once at construction. On the two-valued MHB landscape
/// ties dominate, so the permutation is what makes ranks (and the gamma-ranked
/// individual) well defined.
class RankedPopulation {
public:
    RankedPopulation(std::span<const double> fitness, RngStream& rng);

    std::size_t size() const { return sorted_.size(); }
    /// Individual index occupying `rank` (0 = best).
    std::size_t index_at_rank(std::size_t rank) const { return sorted_[rank]; }
    std::size_t rank_of(std::size_t index) const { return rank_[index]; }
    double fitness_of(std::size_t index) const { return fitness_[index]; }

private:
    std::vector<std::uint32_t> sorted_;
    std::vector<std::uint32_t> rank_;
    std::vector<double> fitness_;
};

/// One selection from a ranked batch; returns the chosen individual's index.
std::size_t select(const SelectionSpec& spec, const RankedPopulation& ranked, RngStream& rng);

/// Convenience single-shot form: ranks `fitness` (drawing a fresh tie-break
/// permutation) and selects once.
std::size_t select_once(const SelectionSpec& spec, std::span<const double> fitness, RngStream& rng);

/// Exact cumulative selection probability beta(gamma) for a population of
/// lambda distinct fitness values:
///
///   k-tournament        1 - (1 - ceil(gamma*lambda)/lambda)^k
///   (mu,lambda)         min(1, ceil(gamma*lambda)/mu)
///   linear ranking      gamma * (eta + gamma * (1 - eta))
///   exponential ranking (e^eta / (e^eta - 1)) * (1 - e^{-eta*gamma})
///
/// The discrete-rank forms use the exact rank ceil(gamma*lambda); the usual
/// continuous lower bounds, 1 - (1-gamma)^k for tournaments and
/// min(1, gamma*lambda/mu) for (mu,lambda), sit at or below these values and
/// coincide whenever gamma*lambda is an integer.
double beta_closed_form(const SelectionSpec& spec, double gamma, std::uint32_t lambda);

struct BetaEstimate {
    double estimate;
    double std_error;
    std::uint64_t samples;
};

/// Empirical beta(gamma): fraction of selections from a distinct-fitness
/// population of size lambda whose rank is within the top ceil(gamma*lambda).
BetaEstimate beta_empirical(const SelectionSpec& spec, std::uint32_t lambda, double gamma,
                            std::uint64_t samples, RngStream& rng);

/// Whether the mechanism meets its selective-pressure threshold
/// (parameter >= (1+delta)/rho, with linear ranking additionally capped at
/// eta <= 2). mu-comma-lambda compares lambda/mu and needs lambda > 0.
bool pressure_satisfied(const SelectionSpec& spec, double rho, double delta,
                        std::uint32_t lambda = 0);

/// Minimum pressure parameter (1+delta) * 3 * (ell/b)^ell sufficient for
/// tracking a moving Hamming ball with relative radius b and move distance ell.
double tracking_pressure_threshold(double b, std::uint32_t ell, double delta);

} // namespace dyntrack
