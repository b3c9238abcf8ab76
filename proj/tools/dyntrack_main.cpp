#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dyntrack/acceptance.hpp"
#include "dyntrack/algorithms.hpp"
#include "dyntrack/analysis.hpp"
#include "dyntrack/experiment.hpp"
#include "dyntrack/svg_plot.hpp"

using namespace dyntrack;

namespace {

nlohmann::ordered_json bound_json(const StabilityBound& b) {
    return {{"kappa", b.kappa}, {"rho", b.rho}};
}

int cmd_run(const std::string& config_path, std::uint64_t* seed, std::string* out,
            std::uint32_t* replicates, std::uint64_t* budget, std::uint32_t* threads,
            bool keep_trace) {
    ExperimentConfig config = config_path.empty()
                                  ? ExperimentConfig{}
                                  : ExperimentConfig::from_json_file(config_path);
    // command-line values override config-file fields
    if (seed) config.seed = *seed;
    if (out) config.out_dir = *out;
    if (replicates) config.replicates = *replicates;
    if (budget) config.budget = *budget;
    if (threads) config.threads = *threads;
    if (keep_trace) config.keep_trace = true;
    const ExperimentResult result = run_experiment(config);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "wrote " << result.manifest_path.string() << "\n";
    std::uint64_t tracking_passes = 0;
    for (const auto& r : result.replicates) tracking_passes += r.tracking_pass ? 1 : 0;
    std::cout << "replicates: " << result.replicates.size()
              << ", tracking passes: " << tracking_passes << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dyntrack: moving-optimum tracking experiments on dynamic bitstring functions"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "run a replicated experiment from a JSON config");
    std::string run_config;
    std::uint64_t run_seed = 0, run_budget = 0;
    std::uint32_t run_replicates = 0, run_threads = 0;
    std::string run_out;
    bool run_keep_trace = false;
    run->add_option("--config", run_config, "JSON config or manifest to replay");
    auto* run_seed_opt = run->add_option("--seed", run_seed, "master seed override");
    auto* run_out_opt = run->add_option("--out", run_out, "output directory override");
    auto* run_rep_opt = run->add_option("--replicates", run_replicates, "replicate count override");
    auto* run_budget_opt = run->add_option("--budget", run_budget, "evaluation budget override");
    auto* run_threads_opt = run->add_option("--threads", run_threads, "worker thread override");
    run->add_flag("--keep-trace", run_keep_trace, "write per-query trace CSVs");

    // stability
    auto* stab = app.add_subcommand("stability", "closed-form stability pair and Monte Carlo check");
    std::size_t stab_n = 100;
    double stab_b = 0.3, stab_theta = 500.0, stab_chi = 1.0, stab_d = 1.0, stab_eps = 0.0;
    std::size_t stab_ell = 1;
    std::uint64_t stab_kappa = 0, stab_trials = 100000, stab_seed = 1;
    stab->add_option("--n", stab_n, "bitstring length");
    stab->add_option("--b", stab_b, "radius fraction r/n");
    stab->add_option("--ell", stab_ell, "move distance");
    stab->add_option("--theta", stab_theta, "Poisson mean of inter-change times");
    stab->add_option("--chi", stab_chi, "bitwise mutation parameter");
    stab->add_option("--eps", stab_eps, "epsilon in the bound (default: tight value)");
    stab->add_option("--d", stab_d, "window slack, kappa = theta/(1+d)");
    stab->add_option("--kappa", stab_kappa, "window length override");
    stab->add_option("--trials", stab_trials, "Monte Carlo trials");
    stab->add_option("--seed", stab_seed, "rng seed");

    // beta
    auto* beta = app.add_subcommand("beta", "cumulative selection probability, closed form and empirical");
    std::string beta_selection = "tournament:k=2";
    std::uint32_t beta_lambda = 100;
    std::vector<double> beta_gammas{0.1, 0.3, 0.5, 1.0};
    std::uint64_t beta_samples = 100000, beta_seed = 1;
    beta->add_option("--selection", beta_selection, "mechanism, e.g. tournament:k=33");
    beta->add_option("--lambda", beta_lambda, "population size");
    beta->add_option("--gamma", beta_gammas, "gamma grid");
    beta->add_option("--samples", beta_samples, "empirical sample count");
    beta->add_option("--seed", beta_seed, "rng seed");

    // ruin
    auto* ruin = app.add_subcommand("ruin", "ball re-entry probability: closed form, exact, simulated");
    std::uint64_t ruin_r = 1, ruin_d = 2, ruin_n = 10, ruin_x = 2, ruin_walks = 100000,
                  ruin_seed = 1;
    std::string ruin_op = "single-bit";
    ruin->add_option("--r", ruin_r, "ball radius");
    ruin->add_option("--d", ruin_d, "escape distance beyond the radius");
    ruin->add_option("--n", ruin_n, "bitstring length");
    ruin->add_option("--x", ruin_x, "start distance");
    ruin->add_option("--walks", ruin_walks, "simulated walks");
    ruin->add_option("--op", ruin_op, "walk operator: single-bit or bitwise:chi=...");
    ruin->add_option("--seed", ruin_seed, "rng seed");

    // drift
    auto* drift = app.add_subcommand("drift", "one-step drift of the accepted process by state");
    std::size_t drift_n = 200;
    double drift_b = 0.05, drift_chi = 1.0;
    std::vector<std::uint64_t> drift_states{0, 1, 2, 3, 4, 5};
    std::uint64_t drift_samples = 100000, drift_seed = 1;
    drift->add_option("--n", drift_n, "bitstring length");
    drift->add_option("--b", drift_b, "radius fraction r/n");
    drift->add_option("--chi", drift_chi, "bitwise mutation parameter");
    drift->add_option("--state", drift_states, "distance-to-border states");
    drift->add_option("--samples", drift_samples, "samples per state");
    drift->add_option("--seed", drift_seed, "rng seed");

    // occupancy
    auto* occ = app.add_subcommand("occupancy", "border occupancy of the frozen-ball process");
    std::size_t occ_n = 200;
    double occ_b = 0.05, occ_chi = 1.0;
    std::uint64_t occ_steps = 1000000, occ_burnin = 10000, occ_seeds = 10, occ_seed = 1;
    std::uint32_t occ_threads = 0;
    occ->add_option("--n", occ_n, "bitstring length");
    occ->add_option("--b", occ_b, "radius fraction r/n");
    occ->add_option("--chi", occ_chi, "bitwise mutation parameter");
    occ->add_option("--steps", occ_steps, "measured steps per seed");
    occ->add_option("--burnin", occ_burnin, "discarded initial steps");
    occ->add_option("--seeds", occ_seeds, "independent seeds");
    occ->add_option("--seed", occ_seed, "master seed");
    occ->add_option("--threads", occ_threads, "worker threads");

    // plot
    auto* plot = app.add_subcommand("plot", "render a series CSV as a self-contained SVG chart");
    std::string plot_series, plot_out, plot_x = "generation", plot_title, plot_xlabel,
                             plot_ylabel, plot_band_low, plot_band_high;
    std::vector<std::string> plot_y{"mean_in_opt_fraction"};
    int plot_width = 840, plot_height = 520;
    bool plot_unit_y = false;
    plot->add_option("--series", plot_series, "input CSV")->required();
    plot->add_option("--out", plot_out, "output SVG path")->required();
    plot->add_option("--x", plot_x, "x column");
    plot->add_option("--y", plot_y, "y columns");
    plot->add_option("--band-low", plot_band_low, "lower band column");
    plot->add_option("--band-high", plot_band_high, "upper band column");
    plot->add_option("--title", plot_title, "chart title");
    plot->add_option("--x-label", plot_xlabel, "x axis label");
    plot->add_option("--y-label", plot_ylabel, "y axis label");
    plot->add_option("--width", plot_width, "chart width in px");
    plot->add_option("--height", plot_height, "chart height in px");
    plot->add_flag("--unit-y", plot_unit_y, "clamp the y axis to [0,1] (fraction plots)");

    // verify
    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    std::vector<int> verify_only;
    std::uint64_t verify_seed = 0;
    std::uint32_t verify_threads = 0;
    verify->add_option("--criterion", verify_only, "criterion numbers to run (default: all)");
    auto* verify_seed_opt = verify->add_option("--seed", verify_seed, "suite seed override");
    verify->add_option("--threads", verify_threads, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (app.got_subcommand(run)) {
            return cmd_run(run_config, run_seed_opt->count() ? &run_seed : nullptr,
                           run_out_opt->count() ? &run_out : nullptr,
                           run_rep_opt->count() ? &run_replicates : nullptr,
                           run_budget_opt->count() ? &run_budget : nullptr,
                           run_threads_opt->count() ? &run_threads : nullptr, run_keep_trace);
        }
        if (app.got_subcommand(stab)) {
            MhbParams params;
            params.n = stab_n;
            params.r = static_cast<std::size_t>(stab_b * static_cast<double>(stab_n) + 1e-9);
            params.ell = stab_ell;
            params.theta = stab_theta;
            const double eps =
                stab_eps > 0.0 ? stab_eps : default_stability_epsilon(params, stab_chi);
            const auto bound = stability_bound(params, stab_chi, eps, stab_d);
            const std::uint64_t kappa =
                stab_kappa != 0 ? stab_kappa : static_cast<std::uint64_t>(bound.kappa);
            RngStream rng(stab_seed);
            const auto est =
                stability_estimate(params, MutationOp::bitwise(stab_chi), kappa, stab_trials, rng);
            nlohmann::ordered_json out;
            out["params"] = {{"n", params.n}, {"r", params.r},       {"ell", params.ell},
                             {"theta", params.theta}, {"chi", stab_chi}, {"eps", eps},
                             {"d", stab_d}};
            out["bound"] = bound_json(bound);
            out["estimate"] = {{"kappa", kappa},
                               {"rho_hat", est.rho_hat},
                               {"std_error", est.std_error},
                               {"multi_change_freq", est.multi_change_freq},
                               {"conditioned_trials", est.conditioned_trials}};
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (app.got_subcommand(beta)) {
            const SelectionSpec spec = SelectionSpec::parse(beta_selection);
            spec.validate(beta_lambda);
            nlohmann::ordered_json rows = nlohmann::ordered_json::array();
            RngStream rng(beta_seed);
            for (double gamma : beta_gammas) {
                const double closed = beta_closed_form(spec, gamma, beta_lambda);
                const auto est = beta_empirical(spec, beta_lambda, gamma, beta_samples, rng);
                rows.push_back({{"gamma", gamma},
                                {"closed_form", closed},
                                {"empirical", est.estimate},
                                {"std_error", est.std_error}});
            }
            nlohmann::ordered_json out;
            out["selection"] = spec.to_string();
            out["lambda"] = beta_lambda;
            out["samples"] = beta_samples;
            out["beta"] = rows;
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (app.got_subcommand(ruin)) {
            RngStream rng(ruin_seed);
            const MutationOp op = MutationOp::parse(ruin_op);
            nlohmann::ordered_json out;
            out["params"] = {{"r", ruin_r}, {"d", ruin_d}, {"n", ruin_n}, {"x", ruin_x}};
            if (2 * (ruin_d + ruin_r) < ruin_n)
                out["closed_form"] = ruin_probability_closed(ruin_r, ruin_d, ruin_n, ruin_x);
            else
                out["closed_form"] = nullptr; // pessimistic form needs d + r < n/2
            out["exact"] = ruin_probability_exact(ruin_r, ruin_d, ruin_n, ruin_x);
            out["residual"] = ruin_exact_residual(ruin_r, ruin_d, ruin_n);
            const auto est = ruin_simulate(ruin_r, ruin_d, ruin_n, ruin_x, ruin_walks, rng, op);
            out["simulated"] = {{"operator", op.to_string()},
                                {"estimate", est.estimate},
                                {"std_error", est.std_error},
                                {"walks", est.walks}};
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (app.got_subcommand(drift)) {
            MhbParams params;
            params.n = drift_n;
            params.r = static_cast<std::size_t>(drift_b * static_cast<double>(drift_n) + 1e-9);
            params.ell = 1;
            params.theta = 1.0; // drift is measured between changes; theta is unused
            nlohmann::ordered_json rows = nlohmann::ordered_json::array();
            for (std::uint64_t state : drift_states) {
                RngStream rng(drift_seed, state);
                const auto est = drift_estimate(params, MutationOp::bitwise(drift_chi), state,
                                                drift_samples, rng);
                rows.push_back({{"state", state},
                                {"drift", est.mean},
                                {"std_error", est.std_error},
                                {"delta_bound", est.delta_bound},
                                {"eta_bound", est.eta_bound}});
            }
            nlohmann::ordered_json out;
            out["params"] = {{"n", params.n}, {"r", params.r}, {"chi", drift_chi}};
            out["dynamic_drift_at_border"] = hypergeometric_drift(params.n, params.r, 1);
            out["states"] = rows;
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (app.got_subcommand(occ)) {
            const std::size_t r =
                static_cast<std::size_t>(occ_b * static_cast<double>(occ_n) + 1e-9);
            const double delta =
                occ_chi * (1.0 - occ_b) * std::exp(-occ_chi) / 2.0;
            const double eta = occ_b * occ_chi;
            std::vector<double> fractions(occ_seeds);
            parallel_for(occ_seeds, occ_threads, [&](std::uint64_t s) {
                HbInstance f(Bitstring::all_ones(occ_n), r);
                RngStream rng(occ_seed, s);
                const Trace trace = run_single(f, MutationOp::bitwise(occ_chi),
                                               Bitstring::all_ones(occ_n),
                                               2 * (occ_burnin + occ_steps), rng);
                std::uint64_t at_border = 0;
                for (std::uint64_t i = occ_burnin; i < occ_burnin + occ_steps; ++i)
                    at_border += trace.generations()[i].best_distance == r;
                fractions[s] = static_cast<double>(at_border) / static_cast<double>(occ_steps);
            });
            nlohmann::ordered_json out;
            out["params"] = {{"n", occ_n}, {"r", r},         {"chi", occ_chi},
                             {"steps", occ_steps}, {"burnin", occ_burnin}};
            out["point_bound"] = occupancy_point_bound(delta, eta);
            out["border_fractions"] = fractions;
            out["min_fraction"] = *std::min_element(fractions.begin(), fractions.end());
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (app.got_subcommand(plot)) {
            PlotSpec spec;
            spec.x_column = plot_x;
            spec.y_columns = plot_y;
            spec.band_low = plot_band_low;
            spec.band_high = plot_band_high;
            spec.title = plot_title;
            spec.x_label = plot_xlabel;
            spec.y_label = plot_ylabel;
            spec.width = plot_width;
            spec.height = plot_height;
            spec.clamp_unit_y = plot_unit_y;
            emit_plot(plot_series, spec, plot_out);
            std::cout << "wrote " << plot_out << "\n";
            return 0;
        }
        if (app.got_subcommand(verify)) {
            AcceptanceOptions options;
            options.only = verify_only;
            options.threads = verify_threads;
            if (verify_seed_opt->count()) options.seed = verify_seed;
            const auto results = run_acceptance(options, std::cout);
            return all_passed(results) ? 0 : 3;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
