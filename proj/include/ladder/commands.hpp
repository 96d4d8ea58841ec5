#pragma once

// Subcommand implementations shared by the CLI binary and the test suites.
// Every command writes its result tables plus one manifest.json into a fresh
// output directory; reruns with the same config and seed are byte-identical.

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ladder/analysis.hpp"
#include "ladder/io.hpp"
#include "ladder/nonmarkov.hpp"
#include "ladder/trajectory.hpp"

namespace ladder {

struct CommandOptions {
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed_override;
    int workers = 0;  // 0 -> hardware concurrency
    std::string figure;
    double scale = 1.0;
    bool also_json = true;
};

inline int resolve_workers(int requested) {
    if (const char* env = std::getenv("LADDER_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace detail {

inline Config apply_overrides(Config cfg, const CommandOptions& opt) {
    if (opt.seed_override) {
        cfg.run.base_seed = *opt.seed_override;
        cfg.snapshot["seed"] = *opt.seed_override;
    }
    return cfg;
}

inline void finish(RunManifest& manifest, const CommandOptions& opt) {
    write_manifest(manifest, opt.out_dir);
}

inline void emit_table(const Table& table, const std::string& stem, const CommandOptions& opt,
                       RunManifest& manifest) {
    write_csv(table, opt.out_dir + "/" + stem + ".csv");
    manifest.outputs.push_back(stem + ".csv");
    if (opt.also_json) {
        write_json_table(table, opt.out_dir + "/" + stem + ".json");
        manifest.outputs.push_back(stem + ".json");
    }
}

inline void emit_json(const json& payload, const std::string& stem, const CommandOptions& opt,
                      RunManifest& manifest) {
    std::ofstream out(opt.out_dir + "/" + stem + ".json", std::ios::binary);
    out << payload.dump(2) << "\n";
    manifest.outputs.push_back(stem + ".json");
}

inline int scaled_count(int reference, double scale) {
    const int n = static_cast<int>(std::ceil(reference * scale));
    return std::max(2, n);
}

}  // namespace detail

// --- trajectory ---------------------------------------------------------------

// Steady-state ensemble averages of the configured observables, one table per
// observable kind. Columns: segment geometry, mean, 95% CI, ensemble size.
inline void cmd_trajectory(const Config& config, const CommandOptions& opt) {
    Config cfg = detail::apply_overrides(config, opt);
    prepare_output_dir(opt.out_dir);
    std::vector<ObservableSpec> specs = cfg.observables;
    if (specs.empty())
        for (int l = 1; l <= cfg.params.L / 2; ++l) specs.push_back(ObservableSpec::entropy(l));

    const int n_traj = resolved_n_traj(cfg.run, cfg.params.L, cfg.params.t2);
    const int workers = resolve_workers(opt.workers);
    const EnsembleResult ens = run_ensemble(cfg.params, cfg.run, specs, n_traj, workers);

    std::map<ObservableSpec::Kind, Table> tables;
    for (std::size_t k = 0; k < specs.size(); ++k) {
        auto& table = tables[specs[k].kind];
        if (table.columns.empty())
            table.columns = {"a_start", "a_len", "b_start", "b_len",
                             "mean",    "ci_low", "ci_high", "n"};
        const TrajectoryStats stats =
            ensemble_average(observable_column(ens, k),
                             derive_seed(cfg.run.base_seed, {0xabcdULL, k}));
        table.add_row({static_cast<double>(specs[k].a_start),
                       static_cast<double>(specs[k].a_len),
                       static_cast<double>(specs[k].b_start),
                       static_cast<double>(specs[k].b_len), stats.mean, stats.ci95_low,
                       stats.ci95_high, static_cast<double>(stats.n)});
    }

    RunManifest manifest{"trajectory", cfg.snapshot, cfg.run.base_seed, {}, {}};
    for (auto& [kind, table] : tables) {
        const char* stem = kind == ObservableSpec::Kind::entropy_arc ? "trajectory_S"
                           : kind == ObservableSpec::Kind::mutual_info ? "trajectory_I"
                                                                        : "trajectory_E";
        detail::emit_table(table, stem, opt, manifest);
    }
    detail::finish(manifest, opt);
}

// --- scan -----------------------------------------------------------------------

inline Table scan_table(const std::vector<ScanRow>& rows) {
    Table table;
    table.columns = {"t12",     "t2",         "delta",    "ci_low", "ci_high",
                     "defined", "q_quarter",  "q_half",   "n"};
    for (const auto& r : rows)
        table.add_row({r.t12, r.t2, r.defined ? r.delta : std::nan(""), r.delta_ci_low,
                       r.delta_ci_high, r.defined ? 1.0 : 0.0, r.q_quarter, r.q_half,
                       static_cast<double>(r.n)});
    return table;
}

inline std::vector<ScanRow> cmd_scan(const Config& config, const CommandOptions& opt) {
    Config cfg = detail::apply_overrides(config, opt);
    if (!cfg.scan) throw config_error("scan command needs a 'scan' config block");
    prepare_output_dir(opt.out_dir);
    ScanGrid grid{cfg.scan->t12_values, cfg.scan->t2_values};
    const int workers = resolve_workers(opt.workers);
    const auto rows = scan_phase_diagram(grid, cfg.params, cfg.run, cfg.scan->quantity, workers,
                                         opt.out_dir + "/checkpoints");
    RunManifest manifest{"scan", cfg.snapshot, cfg.run.base_seed, {}, {}};
    detail::emit_table(scan_table(rows), "scan", opt, manifest);
    detail::finish(manifest, opt);
    return rows;
}

// --- negativity profile ------------------------------------------------------------

inline void cmd_negativity(const Config& config, const CommandOptions& opt) {
    Config cfg = detail::apply_overrides(config, opt);
    prepare_output_dir(opt.out_dir);
    std::vector<ObservableSpec> specs = cfg.observables;
    if (specs.empty())
        for (int l = 1; l <= cfg.params.L / 2; ++l)
            specs.push_back(ObservableSpec::negativity(l));
    for (const auto& s : specs)
        if (s.kind != ObservableSpec::Kind::negativity_arc)
            throw config_error("negativity command accepts only E observables");

    const int n_traj = resolved_n_traj(cfg.run, cfg.params.L, cfg.params.t2);
    const int workers = resolve_workers(opt.workers);
    const EnsembleResult ens = run_ensemble(cfg.params, cfg.run, specs, n_traj, workers);
    Table table;
    table.columns = {"l_A", "mean", "ci_low", "ci_high", "n"};
    for (std::size_t k = 0; k < specs.size(); ++k) {
        const TrajectoryStats stats =
            ensemble_average(observable_column(ens, k),
                             derive_seed(cfg.run.base_seed, {0xefULL, k}));
        table.add_row({static_cast<double>(specs[k].a_len), stats.mean, stats.ci95_low,
                       stats.ci95_high, static_cast<double>(stats.n)});
    }
    RunManifest manifest{"negativity", cfg.snapshot, cfg.run.base_seed, {}, {}};
    detail::emit_table(table, "negativity", opt, manifest);
    detail::finish(manifest, opt);
}

// --- BLP (exact diagonalization) -----------------------------------------------------

inline ed::BlpResult cmd_blp(const Config& config, const CommandOptions& opt) {
    Config cfg = detail::apply_overrides(config, opt);
    if (!cfg.blp) throw config_error("blp command needs a 'blp' config block");
    prepare_output_dir(opt.out_dir);
    Rng rng(derive_seed(cfg.run.base_seed, {0xb17ULL}));
    const ed::BlpResult result =
        ed::blp_measure(cfg.params, cfg.blp->n_pairs, cfg.blp->t_max, rng, cfg.blp->mode,
                        false, resolve_workers(opt.workers));

    Table table;
    table.columns = {"pair_id", "t", "d"};
    for (std::size_t pair = 0; pair < result.distance_series.size(); ++pair)
        for (std::size_t t = 0; t < result.distance_series[pair].size(); ++t)
            table.add_row({static_cast<double>(pair), static_cast<double>(t),
                           result.distance_series[pair][t]});

    RunManifest manifest{"blp", cfg.snapshot, cfg.run.base_seed, {}, {}};
    detail::emit_table(table, "blp_distance", opt, manifest);
    json summary;
    summary["n_phi"] = result.n_phi;
    summary["n_norm"] = result.n_norm;
    summary["best_pair"] = result.best_pair;
    summary["best_pair_norm"] = result.best_pair_norm;
    summary["max_increment"] = result.max_increment;
    detail::emit_json(summary, "blp_summary", opt, manifest);
    detail::finish(manifest, opt);
    return result;
}

// --- quadratic distance (Gaussian double average) --------------------------------------

struct D2PairResult {
    ed::DistanceSeries series;
    double n_measure = 0.0;
};

inline std::vector<D2PairResult> run_d2_pairs(const LadderParams& params, const D2Spec& spec,
                                              std::uint64_t base_seed, int workers) {
    ed::gaussian_product_trace_selftest();
    std::vector<D2PairResult> results(static_cast<std::size_t>(spec.n_pairs));
    detail::parallel_for(spec.n_pairs, workers, [&](int pair) {
        Rng pair_rng(derive_seed(base_seed, {0xd2ULL, static_cast<std::uint64_t>(pair)}));
        auto [c1, c2] = ed::sample_gaussian_pair(pair_rng, params.L);
        const ed::GaussianEnsemble ens_a = ed::evolve_gaussian_ensemble(
            params, c1, spec.n_traj, spec.t_max,
            derive_seed(base_seed, {0xd2aULL, static_cast<std::uint64_t>(pair)}));
        const ed::GaussianEnsemble ens_b = ed::evolve_gaussian_ensemble(
            params, c2, spec.n_traj, spec.t_max,
            derive_seed(base_seed, {0xd2bULL, static_cast<std::uint64_t>(pair)}));
        auto& slot = results[static_cast<std::size_t>(pair)];
        slot.series = ed::quadratic_distance_series(ens_a, ens_b);
        slot.n_measure = ed::positive_increment_sum(slot.series.values);
    });
    return results;
}

inline double cmd_d2(const Config& config, const CommandOptions& opt) {
    Config cfg = detail::apply_overrides(config, opt);
    if (!cfg.d2) throw config_error("d2 command needs a 'd2' config block");
    prepare_output_dir(opt.out_dir);
    const int workers = resolve_workers(opt.workers);
    const auto results = run_d2_pairs(cfg.params, *cfg.d2, cfg.run.base_seed, workers);

    Table table;
    table.columns = {"pair_id", "t", "d"};
    double n_measure = 0.0;
    int best_pair = 0;
    for (std::size_t pair = 0; pair < results.size(); ++pair) {
        const auto& s = results[pair].series;
        for (std::size_t t = 0; t < s.values.size(); ++t)
            table.add_row({static_cast<double>(pair), static_cast<double>(s.times[t]),
                           s.values[t]});
        if (results[pair].n_measure > n_measure) {
            n_measure = results[pair].n_measure;
            best_pair = static_cast<int>(pair);
        }
    }
    RunManifest manifest{"d2", cfg.snapshot, cfg.run.base_seed, {}, {}};
    detail::emit_table(table, "d2_distance", opt, manifest);
    json summary;
    summary["n_measure"] = n_measure;
    summary["best_pair"] = best_pair;
    summary["n_pairs"] = cfg.d2->n_pairs;
    summary["n_traj"] = cfg.d2->n_traj;
    detail::emit_json(summary, "d2_summary", opt, manifest);
    detail::finish(manifest, opt);
    return n_measure;
}

// --- fits ------------------------------------------------------------------------------

inline json fit_result_json(const FitResult& fit) {
    json j;
    j["model"] = fit_model_name(fit.model);
    j["gamma"] = fit.gamma;
    j["c"] = fit.c;
    j["beta"] = fit.beta;
    j["l_min"] = fit.l_min;
    j["l_max"] = fit.l_max;
    j["rss"] = fit.rss;
    const auto [lin, log] = compare_contributions(fit);
    j["gamma_lmax"] = lin;
    j["log_term_lmax"] = log;
    return j;
}

inline json cmd_fit(const Config& config, const CommandOptions& opt) {
    Config cfg = detail::apply_overrides(config, opt);
    if (!cfg.fit) throw config_error("fit command needs a 'fit' config block");
    prepare_output_dir(opt.out_dir);
    const FitSpec& spec = *cfg.fit;
    const Table input = read_csv(spec.input);
    json report;
    report["input"] = spec.input;
    report["input_digest"] = hex64(fnv1a64_file(spec.input));
    report["weighting"] = "1/ci_width^2 when CI columns are present";

    if (spec.model == "eta_powerlaw") {
        const int ce = table_column(input, "eta");
        const int cm = table_column(input, "mean");
        std::vector<EtaPoint> pts;
        for (const auto& row : input.rows)
            pts.push_back({row[static_cast<std::size_t>(ce)], row[static_cast<std::size_t>(cm)]});
        const EtaFitResult fit = fit_eta_powerlaw(pts);
        report["model"] = "eta_powerlaw";
        report["a"] = fit.a;
        report["b"] = fit.b;
        report["c"] = fit.c;
        report["d"] = fit.d;
        report["delta"] = fit.delta;
        report["prefactor"] = fit.prefactor;
        report["rss"] = fit.rss;
    } else {
        const int cl = table_column(input, "L");
        const int cm = table_column(input, "mean");
        std::vector<double> sizes, values, widths;
        bool have_ci = true;
        int clo = -1, chi = -1;
        try {
            clo = table_column(input, "ci_low");
            chi = table_column(input, "ci_high");
        } catch (const parameter_error&) {
            have_ci = false;
        }
        for (const auto& row : input.rows) {
            sizes.push_back(row[static_cast<std::size_t>(cl)]);
            values.push_back(row[static_cast<std::size_t>(cm)]);
            if (have_ci)
                widths.push_back(row[static_cast<std::size_t>(chi)] -
                                 row[static_cast<std::size_t>(clo)]);
        }
        const auto points = make_points(sizes, values, widths);
        int l_min = spec.l_min, l_max = spec.l_max;
        if (l_min == 0) l_min = static_cast<int>(*std::min_element(sizes.begin(), sizes.end()));
        if (l_max == 0) l_max = static_cast<int>(*std::max_element(sizes.begin(), sizes.end()));
        if (spec.model == "entropy_ansatz") {
            report["fit"] = fit_result_json(fit_entropy_scaling(points, l_min, l_max));
        } else if (spec.model == "negativity_ansatz") {
            report["fit"] = fit_result_json(fit_negativity_scaling(points, l_min, l_max));
        } else if (spec.model == "residuals") {
            const ResidualComparison cmp = residual_comparison(points, l_min, l_max);
            report["linear"] = fit_result_json(cmp.linear);
            report["logarithmic"] = fit_result_json(cmp.logarithmic);
            report["signed_total_linear"] = cmp.signed_total_linear;
            report["signed_total_log"] = cmp.signed_total_log;
            report["preferred"] = fit_model_name(cmp.preferred);
        } else {
            throw config_error("fit.model: unknown model '" + spec.model + "'");
        }
    }
    RunManifest manifest{"fit", cfg.snapshot, cfg.run.base_seed, {}, {}};
    detail::emit_json(report, "fit", opt, manifest);
    detail::finish(manifest, opt);
    return report;
}

}  // namespace ladder
