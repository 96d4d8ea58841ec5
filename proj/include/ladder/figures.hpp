#pragma once

// reproduce-figure targets. Each target emits the CSV table behind one named
// reference figure at a configurable desk scale; the manifest records the
// target id, the reference scale and the scale actually run. A config file
// may override L, n_traj and the seed; --scale multiplies trajectory/pair
// counts.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ladder/commands.hpp"

namespace ladder {

struct FigureContext {
    CommandOptions opt;
    std::optional<Config> config;
    std::uint64_t seed = 1;
    int workers = 1;

    int n_traj(int reference_desk) const {
        int n = reference_desk;
        if (config && config->run.n_traj > 0) n = config->run.n_traj;
        return detail::scaled_count(n, opt.scale);
    }
    int n_pairs(int reference_desk) const { return detail::scaled_count(reference_desk, opt.scale); }
    int L_or(int fallback) const { return config ? config->params.L : fallback; }
};

namespace figdetail {

inline RunConfig base_run(const FigureContext& ctx) {
    RunConfig run;
    if (ctx.config) run = ctx.config->run;
    run.base_seed = ctx.seed;
    return run;
}

inline json scale_note(const std::string& figure, const json& reference, const json& actual) {
    json note;
    note["figure"] = figure;
    note["reference_scale"] = reference;
    note["run_scale"] = actual;
    return note;
}

// Ensemble stats for one observable list at fixed params.
inline std::vector<TrajectoryStats> ensemble_stats(const LadderParams& params,
                                                   const RunConfig& run,
                                                   const std::vector<ObservableSpec>& specs,
                                                   int n_traj, int workers,
                                                   std::uint64_t stream_tag) {
    const EnsembleResult ens = run_ensemble(params, run, specs, n_traj, workers, stream_tag);
    std::vector<TrajectoryStats> stats;
    stats.reserve(specs.size());
    for (std::size_t k = 0; k < specs.size(); ++k)
        stats.push_back(ensemble_average(observable_column(ens, k),
                                         derive_seed(run.base_seed, {stream_tag, 0xc1dULL, k})));
    return stats;
}

}  // namespace figdetail

// S(l_A) profiles at t2 = 1, p = 1, for t12 = pi/2 (flat) and pi (dome).
inline void figure_fig2a(const FigureContext& ctx, RunManifest& manifest) {
    const int L = ctx.L_or(32);
    const int n_traj = ctx.n_traj(200);
    Table table;
    table.columns = {"t12", "l_A", "mean", "ci_low", "ci_high", "n"};
    std::vector<ObservableSpec> specs;
    for (int l = 1; l <= L / 2; ++l) specs.push_back(ObservableSpec::entropy(l));
    int tag = 0;
    for (double t12 : {kPi / 2.0, kPi}) {
        LadderParams params{L, 1.0, 1.0, t12, 1.0, 1.0};
        const auto stats = figdetail::ensemble_stats(params, figdetail::base_run(ctx), specs,
                                                     n_traj, ctx.workers,
                                                     static_cast<std::uint64_t>(tag++));
        for (std::size_t k = 0; k < specs.size(); ++k)
            table.add_row({t12, static_cast<double>(specs[k].a_len), stats[k].mean,
                           stats[k].ci95_low, stats[k].ci95_high,
                           static_cast<double>(stats[k].n)});
    }
    detail::emit_table(table, "fig2a", ctx.opt, manifest);
    manifest.extra = figdetail::scale_note(
        "fig2a", {{"L", 128}, {"n_traj", 1000}},
        {{"L", L}, {"n_traj", n_traj}, {"t2", 1.0}, {"p", 1.0}});
}

// delta-S colour map over (t12, t2) at p = 1.
inline void figure_fig2b(const FigureContext& ctx, RunManifest& manifest) {
    const int L = ctx.L_or(16);
    const int n_traj = ctx.n_traj(150);
    ScanGrid grid;
    for (int i = 0; i < 9; ++i) grid.t12_values.push_back(2.0 * kPi * i / 8.0);
    for (int i = 0; i < 9; ++i) grid.t2_values.push_back(5.0 * i / 8.0);
    LadderParams params{L, 1.0, 1.0, 0.0, 1.0, 1.0};
    RunConfig run = figdetail::base_run(ctx);
    run.n_traj = n_traj;
    const auto rows = scan_phase_diagram(grid, params, run, ScanQuantity::delta_S, ctx.workers,
                                         ctx.opt.out_dir + "/checkpoints");
    detail::emit_table(scan_table(rows), "fig2b", ctx.opt, manifest);
    manifest.extra = figdetail::scale_note("fig2b", {{"L", 16}, {"n_traj", 1000}},
                                           {{"L", L}, {"n_traj", n_traj}});
}

// Mutual information between opposite segments vs system size.
inline void figure_fig3(const FigureContext& ctx, RunManifest& manifest, int divisor,
                        const std::string& stem) {
    const int n_traj = ctx.n_traj(150);
    Table table;
    table.columns = {"t2", "L", "mean", "ci_low", "ci_high", "n"};
    int tag = 0;
    for (double t2 : {1.5, 3.0, 5.0}) {
        for (int L : {8, 16, 32, 48, 64}) {
            LadderParams params{L, 1.0, t2, kPi / 2.0, 1.0, 1.0};
            const std::vector<ObservableSpec> specs = {
                ObservableSpec::mutual_opposite(L / divisor, L)};
            const auto stats = figdetail::ensemble_stats(params, figdetail::base_run(ctx), specs,
                                                         n_traj, ctx.workers,
                                                         static_cast<std::uint64_t>(tag++));
            table.add_row({t2, static_cast<double>(L), stats[0].mean, stats[0].ci95_low,
                           stats[0].ci95_high, static_cast<double>(stats[0].n)});
        }
    }
    detail::emit_table(table, stem, ctx.opt, manifest);
    manifest.extra = figdetail::scale_note(
        stem, {{"L_max", 128}, {"n_traj", 1000}},
        {{"L_max", 64}, {"n_traj", n_traj}, {"segment", std::string("L/") + std::to_string(divisor)}});
}

// Mutual information against the cross ratio, with the power-law fit.
inline void figure_fig4(const FigureContext& ctx, RunManifest& manifest) {
    const int L = ctx.L_or(64);
    const int n_traj = ctx.n_traj(150);
    Table table;
    table.columns = {"t2", "l", "eta", "mean", "ci_low", "ci_high", "n"};
    json fits = json::object();
    int tag = 0;
    for (double t2 : {1.5, 3.0, 5.0}) {
        LadderParams params{L, 1.0, t2, kPi / 2.0, 1.0, 1.0};
        std::vector<ObservableSpec> specs;
        std::vector<double> etas;
        for (int l = 1; l <= L / 4; ++l) {
            specs.push_back(ObservableSpec::mutual_opposite(l, L));
            etas.push_back(cross_ratio(L, 0, l, L / 2.0, L / 2.0 + l));
        }
        const auto stats = figdetail::ensemble_stats(params, figdetail::base_run(ctx), specs,
                                                     n_traj, ctx.workers,
                                                     static_cast<std::uint64_t>(tag++));
        std::vector<EtaPoint> pts;
        for (std::size_t k = 0; k < specs.size(); ++k) {
            table.add_row({t2, static_cast<double>(specs[k].a_len), etas[k], stats[k].mean,
                           stats[k].ci95_low, stats[k].ci95_high,
                           static_cast<double>(stats[k].n)});
            if (stats[k].mean > 0.0) pts.push_back({etas[k], stats[k].mean});
        }
        char key[32];
        std::snprintf(key, sizeof key, "t2=%g", t2);
        try {
            const EtaFitResult fit = fit_eta_powerlaw(pts);
            fits[key] = {{"delta", fit.delta}, {"a", fit.a}, {"b", fit.b},
                         {"c", fit.c},         {"d", fit.d}, {"rss", fit.rss}};
        } catch (const std::exception& e) {
            fits[key] = {{"error", e.what()}};
        }
    }
    detail::emit_table(table, "fig4", ctx.opt, manifest);
    detail::emit_json(fits, "fig4_fits", ctx.opt, manifest);
    manifest.extra = figdetail::scale_note("fig4", {{"L", 128}, {"n_traj", 1000}},
                                           {{"L", L}, {"n_traj", n_traj}});
}

// Negativity profiles E(l_A) for several measurement probabilities.
inline void figure_fig5(const FigureContext& ctx, RunManifest& manifest, double t2,
                        const std::string& stem) {
    const int L = ctx.L_or(32);
    const int n_traj = ctx.n_traj(150);
    Table table;
    table.columns = {"p", "l_A", "mean", "ci_low", "ci_high", "n"};
    std::vector<ObservableSpec> specs;
    for (int l = 1; l < L; ++l) specs.push_back(ObservableSpec::negativity(l));
    int tag = 0;
    for (double p : {0.25, 0.5, 0.75}) {
        LadderParams params{L, 1.0, t2, kPi / 2.0, 1.0, p};
        const auto stats = figdetail::ensemble_stats(params, figdetail::base_run(ctx), specs,
                                                     n_traj, ctx.workers,
                                                     static_cast<std::uint64_t>(tag++));
        for (std::size_t k = 0; k < specs.size(); ++k)
            table.add_row({p, static_cast<double>(specs[k].a_len), stats[k].mean,
                           stats[k].ci95_low, stats[k].ci95_high,
                           static_cast<double>(stats[k].n)});
    }
    detail::emit_table(table, stem, ctx.opt, manifest);
    manifest.extra = figdetail::scale_note(stem, {{"L", 64}, {"n_traj", 400}},
                                           {{"L", L}, {"n_traj", n_traj}, {"t2", t2}});
}

// delta-E colour maps for p < 1.
inline void figure_fig6(const FigureContext& ctx, RunManifest& manifest) {
    const int L = ctx.L_or(16);
    const int n_traj = ctx.n_traj(100);
    Table table;
    table.columns = {"p",       "t12", "t2",        "delta",  "ci_low",
                     "ci_high", "defined", "q_quarter", "q_half", "n"};
    ScanGrid grid;
    for (int i = 0; i < 9; ++i) grid.t12_values.push_back(2.0 * kPi * i / 8.0);
    for (int i = 0; i < 9; ++i) grid.t2_values.push_back(5.0 * i / 8.0);
    for (double p : {0.25, 0.5, 0.75}) {
        LadderParams params{L, 1.0, 1.0, 0.0, 1.0, p};
        RunConfig run = figdetail::base_run(ctx);
        run.n_traj = n_traj;
        run.base_seed = derive_seed(ctx.seed, {static_cast<std::uint64_t>(p * 100)});
        const auto rows =
            scan_phase_diagram(grid, params, run, ScanQuantity::delta_E, ctx.workers);
        for (const auto& r : rows)
            table.add_row({p, r.t12, r.t2, r.defined ? r.delta : std::nan(""), r.delta_ci_low,
                           r.delta_ci_high, r.defined ? 1.0 : 0.0, r.q_quarter, r.q_half,
                           static_cast<double>(r.n)});
    }
    detail::emit_table(table, "fig6", ctx.opt, manifest);
    manifest.extra = figdetail::scale_note("fig6", {{"L", 16}, {"n_traj", 1000}},
                                           {{"L", L}, {"n_traj", n_traj}});
}

// BLP non-Markovianity maps from the exactly evolved averaged channel.
inline void figure_fig78(const FigureContext& ctx, RunManifest& manifest,
                         const std::vector<double>& p_values, const std::string& stem) {
    const int L = 4;
    const int n_pairs = ctx.n_pairs(8);
    const int t_max = 50;
    Table table;
    table.columns = {"p", "t12", "t2", "n_phi", "n_norm", "max_increment"};
    std::vector<double> t12s, t2s;
    for (int i = 0; i < 5; ++i) t12s.push_back(2.0 * kPi * i / 4.0);
    for (int i = 0; i < 5; ++i) t2s.push_back(1.0 + i);
    struct Cell {
        double p, t12, t2;
    };
    std::vector<Cell> cells;
    for (double p : p_values)
        for (double t2 : t2s)
            for (double t12 : t12s) cells.push_back({p, t12, t2});
    std::vector<ed::BlpResult> results(cells.size());
    detail::parallel_for(static_cast<int>(cells.size()), ctx.workers, [&](int i) {
        const Cell& cell = cells[static_cast<std::size_t>(i)];
        LadderParams params{L, 1.0, cell.t2, cell.t12, 1.0, cell.p};
        Rng rng(derive_seed(ctx.seed, {0xf78ULL, static_cast<std::uint64_t>(i)}));
        results[static_cast<std::size_t>(i)] = ed::blp_measure(params, n_pairs, t_max, rng);
    });
    for (std::size_t i = 0; i < cells.size(); ++i)
        table.add_row({cells[i].p, cells[i].t12, cells[i].t2, results[i].n_phi,
                       results[i].n_norm, results[i].max_increment});
    detail::emit_table(table, stem, ctx.opt, manifest);
    manifest.extra = figdetail::scale_note(
        stem, {{"L", 4}, {"n_pairs", 100}, {"grid", "fine"}},
        {{"L", L}, {"n_pairs", n_pairs}, {"t_max", t_max}, {"grid", "5x5"}});
}

// Quadratic-distance series of the best pair per (t2, p) combination.
inline void figure_fig9(const FigureContext& ctx, RunManifest& manifest) {
    const int L = ctx.L_or(8);
    const int n_pairs = ctx.n_pairs(20);
    D2Spec spec{n_pairs, 50, 100};
    Table table;
    table.columns = {"t2", "p", "t", "d2"};
    json summary = json::object();
    for (double t2 : {1.0, 5.0}) {
        for (double p : {0.25, 0.5, 0.75}) {
            LadderParams params{L, 1.0, t2, kPi / 2.0, 1.0, p};
            const auto results =
                run_d2_pairs(params, spec,
                             derive_seed(ctx.seed, {static_cast<std::uint64_t>(t2 * 10),
                                                    static_cast<std::uint64_t>(p * 100)}),
                             ctx.workers);
            double best = -1.0;
            std::size_t best_idx = 0;
            for (std::size_t i = 0; i < results.size(); ++i)
                if (results[i].n_measure > best) {
                    best = results[i].n_measure;
                    best_idx = i;
                }
            const auto& series = results[best_idx].series;
            for (std::size_t t = 0; t < series.values.size(); ++t)
                table.add_row({t2, p, static_cast<double>(series.times[t]), series.values[t]});
            char key[48];
            std::snprintf(key, sizeof key, "t2=%g,p=%g", t2, p);
            summary[key] = {{"n_measure", best}, {"best_pair", best_idx}};
        }
    }
    detail::emit_table(table, "fig9", ctx.opt, manifest);
    detail::emit_json(summary, "fig9_summary", ctx.opt, manifest);
    manifest.extra = figdetail::scale_note(
        "fig9", {{"L", 8}, {"n_pairs", 300}, {"n_traj", 50}, {"t_max", 100}},
        {{"L", L}, {"n_pairs", n_pairs}, {"n_traj", spec.n_traj}, {"t_max", spec.t_max}});
}

// Negativity size scaling with linear/log contribution split.
inline void figure_fig10(const FigureContext& ctx, RunManifest& manifest) {
    const int n_traj = ctx.n_traj(150);
    Table table;
    table.columns = {"p", "t2", "L", "mean", "ci_low", "ci_high", "n"};
    json fits = json::object();
    const std::vector<int> sizes = {8, 16, 32, 48, 64};
    int tag = 0;
    for (double p : {0.25, 0.5, 0.75}) {
        for (double t2 : {1.5, 5.0}) {
            std::vector<double> ls, means, widths;
            for (int L : sizes) {
                LadderParams params{L, 1.0, t2, kPi / 2.0, 1.0, p};
                const std::vector<ObservableSpec> specs = {ObservableSpec::negativity(L / 2)};
                const auto stats = figdetail::ensemble_stats(
                    params, figdetail::base_run(ctx), specs, n_traj, ctx.workers,
                    static_cast<std::uint64_t>(tag++));
                table.add_row({p, t2, static_cast<double>(L), stats[0].mean, stats[0].ci95_low,
                               stats[0].ci95_high, static_cast<double>(stats[0].n)});
                ls.push_back(L);
                means.push_back(stats[0].mean);
                widths.push_back(stats[0].ci95_high - stats[0].ci95_low);
            }
            char key[48];
            std::snprintf(key, sizeof key, "p=%g,t2=%g", p, t2);
            try {
                const FitResult fit =
                    fit_negativity_scaling(make_points(ls, means, widths), 8, 64);
                fits[key] = fit_result_json(fit);
            } catch (const std::exception& e) {
                fits[key] = {{"error", e.what()}};
            }
        }
    }
    detail::emit_table(table, "fig10", ctx.opt, manifest);
    detail::emit_json(fits, "fig10_fits", ctx.opt, manifest);
    manifest.extra = figdetail::scale_note("fig10", {{"L_max", 256}, {"n_traj", 1000}},
                                           {{"L_max", 64}, {"n_traj", n_traj}});
}

// Single-trajectory relaxation for random vs alternating initial conditions.
inline void figure_appA(const FigureContext& ctx, RunManifest& manifest) {
    Table table;
    table.columns = {"init_random", "L", "t2", "t", "S_half"};
    for (int L : {16, 32}) {
        for (double t2 : {1.5, 5.0}) {
            LadderParams params{L, 1.0, t2, kPi / 2.0, 1.0, 1.0};
            const Propagator prop = propagator(params);
            const MatrixXcd r = prop.u.conjugate();
            for (int random_init : {1, 0}) {
                Rng rng(derive_seed(ctx.seed, {0xaaULL, static_cast<std::uint64_t>(L),
                                               static_cast<std::uint64_t>(t2 * 10),
                                               static_cast<std::uint64_t>(random_init)}));
                CorrelationMatrix state =
                    random_init ? init_random_halffilling(L, rng) : init_neel(L);
                MatrixXcd scratch(state.d.rows(), state.d.cols());
                std::vector<int> arc;
                for (int i = 0; i < L / 2; ++i) arc.push_back(i);
                for (int t = 0; t <= 150; ++t) {
                    if (t > 0) {
                        evolve_inplace(state, r, scratch);
                        measure_outer_chain(state, params.p, rng, t);
                    }
                    const MatrixXcd d_sys = inner_chain_matrix(state);
                    table.add_row({static_cast<double>(random_init), static_cast<double>(L), t2,
                                   static_cast<double>(t),
                                   von_neumann_entropy(submatrix(d_sys, arc, arc))});
                }
            }
        }
    }
    detail::emit_table(table, "appA", ctx.opt, manifest);
    manifest.extra = figdetail::scale_note("appA", {{"L", "up to 128"}},
                                           {{"L", "16,32"}, {"t_max", 150}});
}

// Running ensemble averages against trajectory count.
inline void figure_appB(const FigureContext& ctx, RunManifest& manifest) {
    const int n_total = std::max(4, ctx.n_traj(200));
    Table table;
    table.columns = {"L", "t2", "n", "mean", "ci_low", "ci_high"};
    std::vector<int> checkpoints;
    const int step = std::max(2, n_total / 20);
    for (int n = step; n <= n_total; n += step) checkpoints.push_back(n);
    if (checkpoints.back() != n_total) checkpoints.push_back(n_total);
    int tag = 0;
    for (int L : {16, 32}) {
        for (double t2 : {1.5, 5.0}) {
            LadderParams params{L, 1.0, t2, kPi / 2.0, 1.0, 1.0};
            RunConfig run = figdetail::base_run(ctx);
            const EnsembleResult ens =
                run_ensemble(params, run, {ObservableSpec::entropy(L / 2)}, n_total,
                             ctx.workers, static_cast<std::uint64_t>(0xb0 + tag++));
            const auto profile = convergence_profile(observable_column(ens, 0), checkpoints,
                                                     derive_seed(run.base_seed, {0xcfULL}));
            for (std::size_t i = 0; i < profile.size(); ++i)
                table.add_row({static_cast<double>(L), t2,
                               static_cast<double>(checkpoints[i]), profile[i].mean,
                               profile[i].ci95_low, profile[i].ci95_high});
        }
    }
    detail::emit_table(table, "appB", ctx.opt, manifest);
    manifest.extra = figdetail::scale_note("appB", {{"n_traj", 1000}}, {{"n_traj", n_total}});
}

// Entropy size scaling and the linear/log contribution crossover for three
// fit ranges.
inline void figure_appC(const FigureContext& ctx, RunManifest& manifest) {
    const int n_traj = ctx.n_traj(100);
    const std::vector<int> sizes = {8, 16, 24, 32, 40, 48, 56, 64};
    const std::vector<double> t2s = {1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0};
    const std::vector<std::pair<int, int>> ranges = {{8, 32}, {24, 56}, {40, 64}};

    Table data;
    data.columns = {"t2", "L", "mean", "ci_low", "ci_high", "n"};
    Table contrib;
    contrib.columns = {"range_id", "l_min", "l_max", "t2", "gamma_lmax", "log_term_lmax"};
    struct Key {
        double t2;
        int L;
    };
    std::vector<Key> keys;
    for (double t2 : t2s)
        for (int L : sizes) keys.push_back({t2, L});
    std::vector<TrajectoryStats> stats(keys.size());
    int tag = 0;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        LadderParams params{keys[i].L, 1.0, keys[i].t2, kPi / 2.0, 1.0, 1.0};
        stats[i] = figdetail::ensemble_stats(params, figdetail::base_run(ctx),
                                             {ObservableSpec::entropy(keys[i].L / 2)}, n_traj,
                                             ctx.workers, static_cast<std::uint64_t>(tag++))[0];
        data.add_row({keys[i].t2, static_cast<double>(keys[i].L), stats[i].mean,
                      stats[i].ci95_low, stats[i].ci95_high, static_cast<double>(stats[i].n)});
    }
    for (std::size_t r = 0; r < ranges.size(); ++r) {
        for (double t2 : t2s) {
            std::vector<double> ls, means, widths;
            for (std::size_t i = 0; i < keys.size(); ++i) {
                if (keys[i].t2 != t2) continue;
                ls.push_back(keys[i].L);
                means.push_back(stats[i].mean);
                widths.push_back(stats[i].ci95_high - stats[i].ci95_low);
            }
            const FitResult fit = fit_entropy_scaling(make_points(ls, means, widths),
                                                      ranges[r].first, ranges[r].second);
            const auto [lin, logterm] = compare_contributions(fit);
            contrib.add_row({static_cast<double>(r), static_cast<double>(ranges[r].first),
                             static_cast<double>(ranges[r].second), t2, lin, logterm});
        }
    }
    detail::emit_table(data, "appC_data", ctx.opt, manifest);
    detail::emit_table(contrib, "appC_contributions", ctx.opt, manifest);
    manifest.extra = figdetail::scale_note(
        "appC", {{"ranges", "[8,64],[32,80],[72,128]"}, {"n_traj", 1000}},
        {{"ranges", "[8,32],[24,56],[40,64]"}, {"n_traj", n_traj}});
}

// Linear vs logarithmic residual comparison for negativity scaling data.
inline void figure_appD(const FigureContext& ctx, RunManifest& manifest) {
    const int n_traj = ctx.n_traj(100);
    const std::vector<int> sizes = {8, 16, 24, 32, 48, 64};
    Table table;
    table.columns = {"p",          "t2",        "l_min",           "l_max",
                     "rss_linear", "rss_log",   "signed_linear",   "signed_log",
                     "prefer_log"};
    int tag = 0x0d;
    for (double p : {0.25, 0.75}) {
        for (double t2 : {1.5, 5.0}) {
            std::vector<double> ls, means, widths;
            for (int L : sizes) {
                LadderParams params{L, 1.0, t2, kPi / 2.0, 1.0, p};
                const auto stats = figdetail::ensemble_stats(
                    params, figdetail::base_run(ctx), {ObservableSpec::negativity(L / 2)},
                    n_traj, ctx.workers, static_cast<std::uint64_t>(tag++));
                ls.push_back(L);
                means.push_back(stats[0].mean);
                widths.push_back(stats[0].ci95_high - stats[0].ci95_low);
            }
            for (auto [lo, hi] : std::vector<std::pair<int, int>>{{8, 32}, {24, 64}}) {
                const ResidualComparison cmp =
                    residual_comparison(make_points(ls, means, widths), lo, hi);
                table.add_row({p, t2, static_cast<double>(lo), static_cast<double>(hi),
                               cmp.linear.rss, cmp.logarithmic.rss, cmp.signed_total_linear,
                               cmp.signed_total_log,
                               cmp.preferred == FitModel::log_only ? 1.0 : 0.0});
            }
        }
    }
    detail::emit_table(table, "appD", ctx.opt, manifest);
    manifest.extra = figdetail::scale_note("appD", {{"L_max", 256}, {"n_traj", 1000}},
                                           {{"L_max", 64}, {"n_traj", n_traj}});
}

inline std::vector<std::string> figure_target_ids() {
    return {"fig2a", "fig2b", "fig3a", "fig3b", "fig4",  "fig5a", "fig5b", "fig6",
            "fig7",  "fig8",  "fig9",  "fig10", "appA", "appB",  "appC",  "appD"};
}

inline void cmd_reproduce_figure(const std::optional<Config>& config, const CommandOptions& opt) {
    FigureContext ctx;
    ctx.opt = opt;
    ctx.config = config;
    ctx.seed = opt.seed_override ? *opt.seed_override
                                 : (config ? config->run.base_seed : 1);
    ctx.workers = resolve_workers(opt.workers);
    prepare_output_dir(opt.out_dir);

    RunManifest manifest{"reproduce-figure " + opt.figure,
                         config ? config->snapshot : json::object(), ctx.seed, {}, {}};
    const std::string& id = opt.figure;
    if (id == "fig2a") figure_fig2a(ctx, manifest);
    else if (id == "fig2b") figure_fig2b(ctx, manifest);
    else if (id == "fig3a") figure_fig3(ctx, manifest, 4, "fig3a");
    else if (id == "fig3b") figure_fig3(ctx, manifest, 8, "fig3b");
    else if (id == "fig4") figure_fig4(ctx, manifest);
    else if (id == "fig5a") figure_fig5(ctx, manifest, 1.0, "fig5a");
    else if (id == "fig5b") figure_fig5(ctx, manifest, 5.0, "fig5b");
    else if (id == "fig6") figure_fig6(ctx, manifest);
    else if (id == "fig7") figure_fig78(ctx, manifest, {1.0}, "fig7");
    else if (id == "fig8") figure_fig78(ctx, manifest, {0.25, 0.5, 0.75}, "fig8");
    else if (id == "fig9") figure_fig9(ctx, manifest);
    else if (id == "fig10") figure_fig10(ctx, manifest);
    else if (id == "appA") figure_appA(ctx, manifest);
    else if (id == "appB") figure_appB(ctx, manifest);
    else if (id == "appC") figure_appC(ctx, manifest);
    else if (id == "appD") figure_appD(ctx, manifest);
    else throw config_error("unknown figure target '" + id + "'");
    detail::finish(manifest, ctx.opt);
}

}  // namespace ladder
