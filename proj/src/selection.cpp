#include "dyntrack/selection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace dyntrack {

SelectionSpec SelectionSpec::tournament(std::uint32_t k) {
    SelectionSpec s;
    s.kind = Kind::k_tournament;
    s.k = k;
    return s;
}

SelectionSpec SelectionSpec::mu_comma(std::uint32_t mu) {
    SelectionSpec s;
    s.kind = Kind::mu_comma_lambda;
    s.mu = mu;
    return s;
}

SelectionSpec SelectionSpec::linear(double eta) {
    SelectionSpec s;
    s.kind = Kind::linear_ranking;
    s.eta = eta;
    return s;
}

SelectionSpec SelectionSpec::exponential(double eta) {
    SelectionSpec s;
    s.kind = Kind::exponential_ranking;
    s.eta = eta;
    return s;
}

void SelectionSpec::validate(std::uint32_t lambda) const {
    switch (kind) {
    case Kind::k_tournament:
        if (k == 0) throw std::invalid_argument("selection: tournament size k must be positive");
        break;
    case Kind::mu_comma_lambda:
        if (mu == 0) throw std::invalid_argument("selection: mu must be positive");
        if (lambda != 0 && mu > lambda)
            throw std::invalid_argument("selection: mu must not exceed lambda");
        break;
    case Kind::linear_ranking:
        if (!(eta > 1.0) || !(eta <= 2.0))
            throw std::invalid_argument("selection: linear ranking requires eta in (1, 2]");
        break;
    case Kind::exponential_ranking:
        if (!(eta > 0.0))
            throw std::invalid_argument("selection: exponential ranking requires eta > 0");
        break;
    }
}

std::string SelectionSpec::to_string() const {
    char buf[64];
    switch (kind) {
    case Kind::k_tournament:
        std::snprintf(buf, sizeof buf, "tournament:k=%u", k);
        break;
    case Kind::mu_comma_lambda:
        std::snprintf(buf, sizeof buf, "mu-comma-lambda:mu=%u", mu);
        break;
    case Kind::linear_ranking:
        std::snprintf(buf, sizeof buf, "linear-ranking:eta=%.17g", eta);
        break;
    case Kind::exponential_ranking:
        std::snprintf(buf, sizeof buf, "exponential-ranking:eta=%.17g", eta);
        break;
    }
    return buf;
}

SelectionSpec SelectionSpec::parse(std::string_view text) {
    const auto colon = text.find(':');
    const std::string_view name = text.substr(0, colon);
    std::string value;
    if (colon != std::string_view::npos) {
        const std::string_view rest = text.substr(colon + 1);
        const auto eq = rest.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("SelectionSpec::parse: expected key=value after ':'");
        value = std::string(rest.substr(eq + 1));
    }
    if (value.empty())
        throw std::invalid_argument("SelectionSpec::parse: missing parameter in '" +
                                    std::string(text) + "'");
    std::size_t used = 0;
    if (name == "tournament") {
        const unsigned long k = std::stoul(value, &used);
        if (used != value.size()) throw std::invalid_argument("SelectionSpec::parse: bad k");
        return tournament(static_cast<std::uint32_t>(k));
    }
    if (name == "mu-comma-lambda") {
        const unsigned long mu = std::stoul(value, &used);
        if (used != value.size()) throw std::invalid_argument("SelectionSpec::parse: bad mu");
        return mu_comma(static_cast<std::uint32_t>(mu));
    }
    if (name == "linear-ranking" || name == "exponential-ranking") {
        const double eta = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("SelectionSpec::parse: bad eta");
        return name == "linear-ranking" ? linear(eta) : exponential(eta);
    }
    throw std::invalid_argument("SelectionSpec::parse: unknown mechanism '" + std::string(text) + "'");
}

RankedPopulation::RankedPopulation(std::span<const double> fitness, RngStream& rng)
    : fitness_(fitness.begin(), fitness.end()) {
    const std::size_t lambda = fitness.size();
    if (lambda == 0)
        throw std::invalid_argument("RankedPopulation: empty population");
    std::vector<std::uint32_t> perm(lambda);
    std::iota(perm.begin(), perm.end(), 0u);
    for (std::size_t i = lambda - 1; i > 0; --i)
        std::swap(perm[i], perm[rng.below(i + 1)]);
    sorted_.resize(lambda);
    std::iota(sorted_.begin(), sorted_.end(), 0u);
    std::sort(sorted_.begin(), sorted_.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (fitness_[a] != fitness_[b]) return fitness_[a] > fitness_[b];
        return perm[a] < perm[b];
    });
    rank_.resize(lambda);
    for (std::size_t r = 0; r < lambda; ++r) rank_[sorted_[r]] = static_cast<std::uint32_t>(r);
}

namespace {

// Inverts the continuous ranking CDF: returns x in (0, 1] with B(x) = u.
double invert_ranking_cdf(const SelectionSpec& spec, double u) {
    if (spec.kind == SelectionSpec::Kind::linear_ranking) {
        const double eta = spec.eta;
        if (eta == 1.0) return u;
        // B(x) = eta*x + (1-eta)*x^2
        const double disc = eta * eta + 4.0 * (1.0 - eta) * u;
        return (-eta + std::sqrt(std::max(disc, 0.0))) / (2.0 * (1.0 - eta));
    }
    const double eta = spec.eta;
    // B(x) = (1 - e^{-eta x}) / (1 - e^{-eta})
    return -std::log1p(-u * (1.0 - std::exp(-eta))) / eta;
}

} // namespace

std::size_t select(const SelectionSpec& spec, const RankedPopulation& ranked, RngStream& rng) {
    const std::size_t lambda = ranked.size();
    spec.validate(static_cast<std::uint32_t>(lambda));
    switch (spec.kind) {
    case SelectionSpec::Kind::k_tournament: {
        std::size_t best = static_cast<std::size_t>(rng.below(lambda));
        for (std::uint32_t i = 1; i < spec.k; ++i) {
            const std::size_t cand = static_cast<std::size_t>(rng.below(lambda));
            if (ranked.rank_of(cand) < ranked.rank_of(best)) best = cand;
        }
        return best;
    }
    case SelectionSpec::Kind::mu_comma_lambda:
        return ranked.index_at_rank(static_cast<std::size_t>(rng.below(spec.mu)));
    case SelectionSpec::Kind::linear_ranking:
    case SelectionSpec::Kind::exponential_ranking: {
        const double x = invert_ranking_cdf(spec, rng.next_double());
        auto rank = static_cast<std::size_t>(std::ceil(x * static_cast<double>(lambda)));
        rank = std::clamp<std::size_t>(rank, 1, lambda);
        return ranked.index_at_rank(rank - 1);
    }
    }
    throw std::logic_error("select: unreachable");
}

std::size_t select_once(const SelectionSpec& spec, std::span<const double> fitness, RngStream& rng) {
    RankedPopulation ranked(fitness, rng);
    return select(spec, ranked, rng);
}

double beta_closed_form(const SelectionSpec& spec, double gamma, std::uint32_t lambda) {
    if (!(gamma > 0.0) || !(gamma <= 1.0))
        throw std::invalid_argument("beta_closed_form: gamma must be in (0, 1]");
    spec.validate(lambda);
    const double top = std::ceil(gamma * static_cast<double>(lambda));
    switch (spec.kind) {
    case SelectionSpec::Kind::k_tournament:
        return 1.0 - std::pow(1.0 - top / static_cast<double>(lambda), spec.k);
    case SelectionSpec::Kind::mu_comma_lambda:
        return std::min(1.0, top / static_cast<double>(spec.mu));
    case SelectionSpec::Kind::linear_ranking:
        return gamma * (spec.eta + gamma * (1.0 - spec.eta));
    case SelectionSpec::Kind::exponential_ranking: {
        const double e = spec.eta;
        return (std::exp(e) / (std::exp(e) - 1.0)) * (1.0 - std::exp(-e * gamma));
    }
    }
    throw std::logic_error("beta_closed_form: unreachable");
}

BetaEstimate beta_empirical(const SelectionSpec& spec, std::uint32_t lambda, double gamma,
                            std::uint64_t samples, RngStream& rng) {
    if (samples == 0)
        throw std::invalid_argument("beta_empirical: samples must be positive");
    if (!(gamma > 0.0) || !(gamma <= 1.0))
        throw std::invalid_argument("beta_empirical: gamma must be in (0, 1]");
    // distinct fitnesses in shuffled index order so ranking is exercised
    std::vector<double> fitness(lambda);
    for (std::uint32_t i = 0; i < lambda; ++i) fitness[i] = static_cast<double>(i);
    for (std::size_t i = lambda - 1; i > 0; --i)
        std::swap(fitness[i], fitness[rng.below(i + 1)]);
    RankedPopulation ranked(fitness, rng);
    const auto top = static_cast<std::size_t>(std::ceil(gamma * static_cast<double>(lambda)));
    std::uint64_t hits = 0;
    for (std::uint64_t s = 0; s < samples; ++s)
        if (ranked.rank_of(select(spec, ranked, rng)) < top) ++hits;
    const double est = static_cast<double>(hits) / static_cast<double>(samples);
    const double se = std::sqrt(std::max(est * (1.0 - est), 1e-12) / static_cast<double>(samples));
    return {est, se, samples};
}

bool pressure_satisfied(const SelectionSpec& spec, double rho, double delta,
                        std::uint32_t lambda) {
    if (!(rho > 0.0) || !(rho < 1.0) || !(delta > 0.0))
        throw std::invalid_argument("pressure_satisfied: requires rho in (0,1) and delta > 0");
    const double threshold = (1.0 + delta) / rho;
    switch (spec.kind) {
    case SelectionSpec::Kind::k_tournament:
        return static_cast<double>(spec.k) >= threshold;
    case SelectionSpec::Kind::mu_comma_lambda:
        if (lambda == 0)
            throw std::invalid_argument("pressure_satisfied: mu-comma-lambda needs lambda");
        return static_cast<double>(lambda) / static_cast<double>(spec.mu) >= threshold;
    case SelectionSpec::Kind::linear_ranking:
        return spec.eta <= 2.0 && spec.eta >= threshold;
    case SelectionSpec::Kind::exponential_ranking:
        return spec.eta >= threshold;
    }
    throw std::logic_error("pressure_satisfied: unreachable");
}

double tracking_pressure_threshold(double b, std::uint32_t ell, double delta) {
    if (!(b > 0.0) || !(b < 1.0) || ell == 0 || !(delta > 0.0))
        throw std::invalid_argument("tracking_pressure_threshold: requires b in (0,1), ell >= 1, delta > 0");
    return (1.0 + delta) * 3.0 *
           std::pow(static_cast<double>(ell) / b, static_cast<double>(ell));
}

} // namespace dyntrack
