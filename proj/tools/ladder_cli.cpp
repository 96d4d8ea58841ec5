// Command-line front end for the monitored-ladder simulation engine.
//
//   ladder trajectory       steady-state ensemble averages of S / I / E
//   ladder scan             delta-S or delta-E phase-diagram grids
//   ladder negativity       E(l_A) profiles
//   ladder blp              trace-distance non-Markovianity (exact channel)
//   ladder d2               quadratic-distance non-Markovianity (Gaussian)
//   ladder fit              scaling / cross-ratio fits over result CSVs
//   ladder reproduce-figure named figure targets at desk scale
//
// Common flags: --config, --out, --seed, --workers, --figure, --scale.
// LADDER_WORKERS in the environment overrides --workers.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ladder/commands.hpp"
#include "ladder/figures.hpp"

int main(int argc, char** argv) {
    CLI::App app{"monitored free-fermion ladder simulator"};
    app.require_subcommand(1);

    std::string config_path;
    ladder::CommandOptions opt;
    std::uint64_t seed = 0;
    bool seed_given = false;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* copt = sub->add_option("--config", config_path, "JSON config file");
        if (config_required) copt->required();
        sub->add_option("--out", opt.out_dir, "output directory (fresh per run)");
        sub->add_option("--seed", seed, "base seed override")->each([&](const std::string&) {
            seed_given = true;
        });
        sub->add_option("--workers", opt.workers, "worker threads (0 = hardware)");
    };

    CLI::App* trajectory = app.add_subcommand("trajectory", "steady-state observable profile");
    add_common(trajectory, true);
    CLI::App* scan = app.add_subcommand("scan", "phase-diagram scan");
    add_common(scan, true);
    CLI::App* negativity = app.add_subcommand("negativity", "negativity profile");
    add_common(negativity, true);
    CLI::App* blp = app.add_subcommand("blp", "BLP trace-distance measure");
    add_common(blp, true);
    CLI::App* d2 = app.add_subcommand("d2", "quadratic-distance measure");
    add_common(d2, true);
    CLI::App* fit = app.add_subcommand("fit", "scaling fits over result tables");
    add_common(fit, true);
    CLI::App* figure = app.add_subcommand("reproduce-figure", "emit a named figure table");
    add_common(figure, false);
    figure->add_option("--figure", opt.figure, "target id, e.g. fig2a")->required();
    figure->add_option("--scale", opt.scale, "trajectory/pair count multiplier");

    CLI11_PARSE(app, argc, argv);

    try {
        if (seed_given) opt.seed_override = seed;
        std::optional<ladder::Config> config;
        if (!config_path.empty()) config = ladder::parse_config(config_path);

        if (trajectory->parsed()) ladder::cmd_trajectory(*config, opt);
        else if (scan->parsed()) ladder::cmd_scan(*config, opt);
        else if (negativity->parsed()) ladder::cmd_negativity(*config, opt);
        else if (blp->parsed()) ladder::cmd_blp(*config, opt);
        else if (d2->parsed()) ladder::cmd_d2(*config, opt);
        else if (fit->parsed()) ladder::cmd_fit(*config, opt);
        else if (figure->parsed()) ladder::cmd_reproduce_figure(config, opt);
    } catch (const std::exception& e) {
        // Machine-readable error record on stderr.
        std::fprintf(stderr, "{\"error\": \"%s\"}\n", e.what());
        return 1;
    }
    std::fprintf(stdout, "ok: results in %s\n", opt.out_dir.c_str());
    return 0;
}
