#include "dyntrack/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>

#include "dyntrack/algorithms.hpp"
#include "dyntrack/analysis.hpp"
#include "dyntrack/experiment.hpp"
#include "dyntrack/stats.hpp"

namespace dyntrack {

namespace {

namespace fs = std::filesystem;

struct Ctx {
    std::uint64_t seed;
    std::uint32_t threads;
    std::string scratch_dir;
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---- criterion 1: selection beta oracle equivalence ------------------------

CriterionResult criterion1(const Ctx& ctx) {
    const std::uint32_t lambda = 100;
    const std::uint64_t samples = 1000000;
    const double gammas[] = {0.1, 0.3, 0.5, 1.0};
    std::vector<SelectionSpec> specs;
    for (std::uint32_t k : {2u, 5u, 33u}) specs.push_back(SelectionSpec::tournament(k));
    for (std::uint32_t mu : {10u, 25u}) specs.push_back(SelectionSpec::mu_comma(mu));
    for (double eta : {1.5, 2.0}) specs.push_back(SelectionSpec::linear(eta));
    for (double eta : {1.5, 2.0, 5.0, 33.0}) specs.push_back(SelectionSpec::exponential(eta));

    std::vector<std::string> failures;
    std::mutex mutex;
    double worst_pull = 0.0;
    parallel_for(specs.size(), ctx.threads, [&](std::uint64_t i) {
        RngStream rng(ctx.seed, 100 + i);
        for (double gamma : gammas) {
            const double expected = beta_closed_form(specs[i], gamma, lambda);
            const auto est = beta_empirical(specs[i], lambda, gamma, samples, rng);
            const double sigma =
                std::sqrt(expected * (1.0 - expected) / static_cast<double>(samples));
            const double diff = std::abs(est.estimate - expected);
            std::lock_guard<std::mutex> lock(mutex);
            if (sigma > 0.0) worst_pull = std::max(worst_pull, diff / sigma);
            if (diff > 3.0 * sigma + 1e-9)
                failures.push_back(specs[i].to_string() + " gamma=" + num(gamma) + ": |" +
                                   num(est.estimate) + " - " + num(expected) + "| > 3 sigma");
        }
    });
    CriterionResult res{1, "selection beta oracle equivalence", failures.empty(), ""};
    if (failures.empty())
        res.details = "11 mechanisms x 4 gammas at lambda=100, 1e6 samples; worst |deviation| = " +
                      num(worst_pull) + " sigma";
    else
        for (const auto& f : failures) res.details += f + "; ";
    return res;
}

// ---- criterion 2: mutation transition completeness and flip law ------------

CriterionResult criterion2(const Ctx& ctx) {
    // exhaustive transition mass over {0,1}^12
    const std::size_t n = 12;
    Bitstring x(n);
    for (std::size_t i = 0; i < n; ++i) x.set(i, (i * 5 + 1) % 3 == 0);
    const MutationOp op = MutationOp::bitwise(1.0);
    double total = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        Bitstring y(n);
        for (std::size_t i = 0; i < n; ++i) y.set(i, (mask >> i) & 1);
        total += mutation_transition_prob(op, x, y);
    }
    const double mass_error = std::abs(total - 1.0);

    // empirical flip counts vs Binomial(64, 1/64)
    RngStream rng(ctx.seed, 200);
    const std::size_t n64 = 64;
    const Bitstring base = Bitstring::all_ones(n64);
    const std::uint64_t samples = 1000000;
    std::vector<std::uint64_t> counts(n64 + 1, 0);
    for (std::uint64_t s = 0; s < samples; ++s)
        ++counts[hamming(mutate(MutationOp::bitwise(1.0), base, rng), base)];
    std::vector<double> expected(n64 + 1);
    for (std::size_t k = 0; k <= n64; ++k)
        expected[k] =
            binomial_pmf(n64, 1.0 / static_cast<double>(n64), k) * static_cast<double>(samples);
    const auto chi = chi_square_test(counts, expected);

    const bool pass = mass_error < 1e-10 && chi.p_value > 1e-6;
    return {2, "mutation transition mass and flip-count law", pass,
            "sum_y P(x->y) off by " + num(mass_error) + " (exhaustive n=12); flip-count " +
                "chi-square p = " + num(chi.p_value) + " at 1e6 samples"};
}

// ---- criterion 3: gambler's ruin ------------------------------------------

CriterionResult criterion3(const Ctx& ctx) {
    std::ostringstream detail;
    bool pass = true;

    double worst_residual = 0.0;
    for (std::uint64_t n : {16ull, 32ull, 64ull, 128ull, 256ull}) {
        for (std::uint64_t r : {std::uint64_t{1}, n / 20}) {
            for (std::uint64_t d : {std::uint64_t{2}, n / 4}) {
                worst_residual = std::max(worst_residual, ruin_exact_residual(r, d, n));
                if (2 * (d + r) < n) {
                    for (std::uint64_t x = r + 1; x < r + d; ++x) {
                        if (ruin_probability_exact(r, d, n, x) >
                            ruin_probability_closed(r, d, n, x) + 1e-12) {
                            pass = false;
                            detail << "exact > closed at (r=" << r << ",d=" << d << ",n=" << n
                                   << ",x=" << x << "); ";
                        }
                    }
                }
            }
        }
    }
    if (worst_residual >= 1e-12) {
        pass = false;
        detail << "residual " << num(worst_residual) << " >= 1e-12; ";
    }

    // single-bit walk Monte Carlo vs the exact solution
    struct Point {
        std::uint64_t r, d, n, x;
    };
    const Point points[] = {{1, 2, 16, 2}, {3, 16, 64, 4}, {1, 64, 256, 2}};
    for (std::size_t i = 0; i < 3; ++i) {
        RngStream rng(ctx.seed, 300 + i);
        const auto est =
            ruin_simulate(points[i].r, points[i].d, points[i].n, points[i].x, 100000, rng);
        const double exact =
            ruin_probability_exact(points[i].r, points[i].d, points[i].n, points[i].x);
        const double sigma = std::max(
            est.std_error, std::sqrt(exact * (1.0 - exact) / static_cast<double>(est.walks)));
        if (std::abs(est.estimate - exact) > 3.0 * sigma) {
            pass = false;
            detail << "walk estimate " << num(est.estimate) << " vs exact " << num(exact)
                   << " beyond 3 sigma at (r=" << points[i].r << ",d=" << points[i].d
                   << ",n=" << points[i].n << ",x=" << points[i].x << "); ";
        }
    }

    // scaling: enter-probability from r+1 with d = n/4 stays within a
    // constant of max(r, log2 n)/n
    double worst_ratio = 0.0;
    for (std::uint64_t n : {64ull, 128ull, 256ull}) {
        for (std::uint64_t r : {std::uint64_t{1}, n / 20}) {
            const double exact = ruin_probability_exact(r, n / 4, n, r + 1);
            const double scale =
                std::max(static_cast<double>(r), std::log2(static_cast<double>(n))) /
                static_cast<double>(n);
            worst_ratio = std::max(worst_ratio, exact / scale);
        }
    }
    if (worst_ratio > 10.0) {
        pass = false;
        detail << "scaling ratio " << num(worst_ratio) << " > 10; ";
    }
    if (pass)
        detail << "worst residual " << num(worst_residual) << ", exact <= closed on grid, "
               << "3 walk points within 3 sigma, scaling ratio <= " << num(worst_ratio);
    return {3, "gambler's-ruin exact solver, bound and simulation", pass, detail.str()};
}

// ---- criterion 4: Poisson lower-tail bound ---------------------------------

CriterionResult criterion4(const Ctx&) {
    double worst_margin = 1.0;
    bool pass = true;
    for (double theta : {5.0, 10.0, 20.0, 50.0}) {
        for (std::uint64_t x = 1; x < static_cast<std::uint64_t>(theta); ++x) {
            const double cdf = poisson_cdf(theta, x);
            const double bound = poisson_tail_bound(theta, static_cast<double>(x));
            if (cdf > bound) pass = false;
            worst_margin = std::min(worst_margin, bound - cdf);
        }
    }
    return {4, "Poisson lower-tail bound dominates the exact CDF", pass,
            "grid theta in {5,10,20,50}, all integer x < theta; smallest margin " +
                num(worst_margin)};
}

// ---- criterion 5: stability bound vs Monte Carlo ---------------------------

CriterionResult criterion5(const Ctx& ctx) {
    const MhbParams params{100, 30, 1, 500.0};
    const double chi = 1.0;
    const double eps = default_stability_epsilon(params, chi);
    const double d = 1.0;
    const auto bound = stability_bound(params, chi, eps, d);
    const std::uint64_t kappa = static_cast<std::uint64_t>(bound.kappa); // 250
    RngStream rng(ctx.seed, 400);
    const auto est = stability_estimate(params, MutationOp::bitwise(chi), kappa, 100000, rng);

    const double multi_bound = std::exp(-static_cast<double>(kappa) * d * d / (2.0 * (d + 1.0)));
    const double multi_sigma =
        std::sqrt(std::max(est.multi_change_freq * (1.0 - est.multi_change_freq), 1e-12) /
                  static_cast<double>(est.trials));
    const bool rho_ok = est.rho_hat >= bound.rho - 3.0 * est.std_error;
    const bool multi_ok = est.multi_change_freq <= multi_bound + 3.0 * multi_sigma;
    return {5, "moving-ball stability bound", rho_ok && multi_ok,
            "rho_hat = " + num(est.rho_hat) + " vs bound rho = " + num(bound.rho) +
                " (kappa = " + num(bound.kappa) + "); multi-change freq " +
                num(est.multi_change_freq) + " <= " + num(multi_bound) + " + 3 sigma"};
}

// ---- criterion 6: drift constants ------------------------------------------

CriterionResult criterion6(const Ctx& ctx) {
    const MhbParams params{200, 10, 1, 1000.0};
    const MutationOp op = MutationOp::bitwise(1.0);
    const std::uint64_t samples = 100000;
    std::ostringstream detail;
    bool pass = true;
    std::vector<DriftEstimate> results(6);
    parallel_for(6, ctx.threads, [&](std::uint64_t i) {
        RngStream rng(ctx.seed, 500 + i);
        results[i] = drift_estimate(params, op, i, samples, rng);
    });
    for (std::uint64_t state = 1; state <= 5; ++state) {
        const auto& est = results[state];
        if (est.mean < est.delta_bound - 3.0 * est.std_error) {
            pass = false;
            detail << "state " << state << ": drift " << num(est.mean) << " < delta "
                   << num(est.delta_bound) << "; ";
        }
    }
    const auto& border = results[0];
    if (border.mean < -border.eta_bound - 3.0 * border.std_error) {
        pass = false;
        detail << "border drift " << num(border.mean) << " < -eta " << num(-border.eta_bound)
               << "; ";
    }
    if (pass)
        detail << "interior drift in [" << num(results[1].mean) << ", " << num(results[5].mean)
               << "] >= delta = " << num(results[1].delta_bound) << "; border drift "
               << num(border.mean) << " >= -eta = " << num(-border.eta_bound);
    return {6, "one-step drift constants of the single-individual process", pass, detail.str()};
}

// ---- criterion 7: border occupancy under a frozen ball ---------------------

CriterionResult criterion7(const Ctx& ctx) {
    const std::size_t n = 200, r = 10;
    const double delta = 0.95 / (2.0 * std::exp(1.0));
    const double eta = 0.05;
    const double floor_value = occupancy_point_bound(delta, eta) - 0.05;
    const std::uint64_t burn_in = 10000, steps = 1000000;
    std::vector<double> fractions(10);
    parallel_for(10, ctx.threads, [&](std::uint64_t s) {
        HbInstance f(Bitstring::all_ones(n), r);
        RngStream rng(ctx.seed, 600 + s);
        const Trace trace = run_single(f, MutationOp::bitwise(1.0), Bitstring::all_ones(n),
                                       2 * (burn_in + steps), rng);
        std::uint64_t at_border = 0;
        for (std::uint64_t i = burn_in; i < burn_in + steps; ++i)
            at_border += trace.generations()[i].best_distance == r;
        fractions[s] = static_cast<double>(at_border) / static_cast<double>(steps);
    });
    const double worst = *std::min_element(fractions.begin(), fractions.end());
    const bool pass = worst >= floor_value;
    return {7, "border occupancy of the frozen-ball process", pass,
            "10 seeds, 1e6 steps after 1e4 burn-in: min border fraction " + num(worst) +
                " vs floor " + num(floor_value)};
}

// ---- criterion 8: headline contrast ----------------------------------------

ExperimentConfig contrast_config(std::uint64_t seed) {
    ExperimentConfig config;
    config.function.n = 100;
    config.function.b = 0.1;
    config.function.ell = 1;
    config.function.theta = 500.0; // c = 5
    config.budget = 1000000;
    config.replicates = 30;
    config.seed = seed;
    config.report.c_prime = 0.25;
    config.report.gamma0 = 0.5;
    return config;
}

CriterionResult criterion8(const Ctx& ctx) {
    const std::uint32_t seeds = 30;
    std::ostringstream detail;
    bool pass = true;

    // (a) the (1+1) EA loses the moving ball for good
    {
        ExperimentConfig config = contrast_config(ctx.seed);
        config.algorithm.kind = AlgorithmSpecConfig::Kind::single;
        config.algorithm.mutation = "bitwise:chi=1";
        std::vector<ReplicateSummary> runs(seeds);
        parallel_for(seeds, ctx.threads, [&](std::uint64_t k) {
            runs[k] = run_replicate(config, static_cast<std::uint32_t>(k), false).summary;
        });
        std::uint32_t good = 0;
        double worst_fraction = 0.0;
        for (const auto& s : runs) {
            const bool ok = s.final_half_opt_fraction <= 0.01 && s.unrecovered_losses >= 1;
            good += ok ? 1 : 0;
            worst_fraction = std::max(worst_fraction, s.final_half_opt_fraction);
        }
        const bool ok_a = good >= static_cast<std::uint32_t>(std::ceil(0.9 * seeds));
        pass = pass && ok_a;
        detail << "(a) (1+1) EA: " << good << "/" << seeds
               << " seeds with final-half optimal fraction <= 0.01 and an unrecovered loss"
               << " (max fraction " << num(worst_fraction) << ") -> "
               << (ok_a ? "ok" : "FAIL") << "; ";
    }

    // (b) the non-elitist population at the tracking pressure threshold
    const std::map<std::string, std::string> mechanisms = {
        {"tournament", "tournament:k=33"},       // k = tracking_pressure_threshold(0.1, 1, 0.1)
        {"comma", "mu-comma-lambda:mu=3"},       // lambda/mu = 125/3 >= 33
        {"exponential", "exponential-ranking:eta=33"}};
    for (const auto& [label, selection] : mechanisms) {
        ExperimentConfig config = contrast_config(ctx.seed);
        config.algorithm.kind = AlgorithmSpecConfig::Kind::population;
        config.algorithm.preset_c = 5.0; // lambda = floor(c*n / (2*(1+d))) = 125
        config.algorithm.preset_d = 1.0;
        config.algorithm.selection = selection;
        config.algorithm.mutation = "bitwise:chi=1";
        config.report.window = 125; // lambda
        config.report.t0 = 125;
        std::vector<ReplicateSummary> runs(seeds);
        parallel_for(seeds, ctx.threads, [&](std::uint64_t k) {
            runs[k] = run_replicate(config, static_cast<std::uint32_t>(k), false).summary;
        });
        std::uint32_t good = 0;
        double min_fraction = 1.0, mean_fraction = 0.0;
        std::uint32_t seeds_never_empty = 0;
        for (const auto& s : runs) {
            const bool every_gen = s.min_gen_fraction_after_first >= 0.5;
            good += (every_gen && s.tracking_pass) ? 1 : 0;
            min_fraction = std::min(min_fraction, s.min_gen_fraction_after_first);
            mean_fraction += s.mean_in_opt_fraction / seeds;
            seeds_never_empty += s.loss_episodes == 0 ? 1 : 0;
        }
        const bool ok_b = good >= 29; // ceil(0.95 * 30)
        pass = pass && ok_b;
        detail << "(b/" << label << "): " << good << "/" << seeds
               << " seeds with every generation >= 0.5 and tracking c'=0.25"
               << " (min gen fraction " << num(min_fraction) << ", mean " << num(mean_fraction)
               << ", whole-population never lost in " << seeds_never_empty << "/" << seeds
               << ") -> " << (ok_b ? "ok" : "FAIL") << "; ";
    }
    return {8, "headline contrast: single individual vs population", pass, detail.str()};
}

// ---- criterion 9: determinism and manifest replay ---------------------------

CriterionResult criterion9(const Ctx& ctx) {
    fs::path scratch = ctx.scratch_dir.empty()
                           ? fs::temp_directory_path() / "dyntrack_replay"
                           : fs::path(ctx.scratch_dir);
    std::error_code ec;
    fs::remove_all(scratch, ec);

    ExperimentConfig config;
    config.function.n = 32;
    config.function.b = 0.125;
    config.function.ell = 1;
    config.function.theta = 100.0;
    config.algorithm.kind = AlgorithmSpecConfig::Kind::population;
    config.algorithm.lambda = 8;
    config.algorithm.selection = "tournament:k=5";
    config.algorithm.mutation = "bitwise:chi=1";
    config.budget = 4000;
    config.replicates = 3;
    config.seed = ctx.seed;
    config.keep_trace = true;
    config.report.window = 8;
    config.report.t0 = 8;

    auto read_file = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    config.out_dir = (scratch / "a").string();
    const auto run_a = run_experiment(config);
    config.out_dir = (scratch / "b").string();
    (void)run_experiment(config);
    // replay straight from the manifest
    ExperimentConfig replay = ExperimentConfig::from_json_file(run_a.manifest_path.string());
    replay.out_dir = (scratch / "c").string();
    (void)run_experiment(replay);

    bool pass = true;
    std::ostringstream detail;
    const char* files[] = {"summary_r0.csv", "summary_r1.csv", "summary_r2.csv",
                           "trace_r0.csv",   "series.csv",     "aggregate.json"};
    for (const char* name : files) {
        const std::string a = read_file(scratch / "a" / name);
        const std::string b = read_file(scratch / "b" / name);
        const std::string c = read_file(scratch / "c" / name);
        if (a.empty() || a != b || a != c) {
            pass = false;
            detail << name << " differs between runs; ";
        }
    }
    if (pass) detail << "rerun and manifest replay byte-identical across 6 output files";
    fs::remove_all(scratch, ec);
    return {9, "determinism and manifest replay", pass, detail.str()};
}

} // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, std::ostream& log) {
    const Ctx ctx{options.seed, options.threads, options.scratch_dir};
    using Fn = CriterionResult (*)(const Ctx&);
    const Fn criteria[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                           criterion6, criterion7, criterion8, criterion9};
    std::vector<CriterionResult> results;
    for (int i = 0; i < 9; ++i) {
        const int number = i + 1;
        if (!options.only.empty() &&
            std::find(options.only.begin(), options.only.end(), number) == options.only.end())
            continue;
        CriterionResult res = criteria[i](ctx);
        log << "criterion " << res.number << " [" << res.name << "]: "
            << (res.passed ? "PASS" : "FAIL") << " - " << res.details << "\n";
        log.flush();
        results.push_back(std::move(res));
    }
    return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CriterionResult& r) { return r.passed; });
}

} // namespace dyntrack
