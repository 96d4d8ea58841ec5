#pragma once

// Stroboscopic trajectory ensembles: warm-up to the steady state, time
// averaging over m post-steady cycles, ensemble averaging with bootstrap
// confidence intervals, and phase-diagram scans.
//
// Trajectories are independent work units; each owns its state and a random
// stream derived from (base_seed, stream_tag, trajectory_index), so results
// are bit-reproducible for any worker count. Aggregation happens serially in
// trajectory order after the pool has drained.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "ladder/common.hpp"
#include "ladder/entanglement.hpp"
#include "ladder/gaussian_state.hpp"
#include "ladder/lattice.hpp"
#include "ladder/parallel.hpp"
#include "ladder/rng.hpp"

namespace ladder {

struct RunConfig {
    int t_st = 0;    // warm-up cycles; 0 resolves to 100 (L <= 64) or 1000
    int m = 5;       // post-steady averaging cycles
    int n_traj = 0;  // 0 resolves to 400 (L <= 64) / 1000 (L > 64), 1000 for t2 <= 1.5
    std::uint64_t base_seed = 1;
    int purity_check_interval = 8;
    double purity_abort_threshold = 1e-6;

    void validate() const {
        if (m < 1) throw parameter_error("RunConfig: m must be positive");
        if (t_st < 0 || n_traj < 0) throw parameter_error("RunConfig: negative count");
    }
};

inline int resolved_t_st(const RunConfig& cfg, int L) {
    if (cfg.t_st > 0) return cfg.t_st;
    return L <= 64 ? 100 : 1000;
}

inline int resolved_n_traj(const RunConfig& cfg, int L, double t2) {
    if (cfg.n_traj > 0) return cfg.n_traj;
    if (L > 64) return 1000;
    return t2 <= 1.5 ? 1000 : 400;
}

struct TrajectoryStats {
    double mean = 0.0;
    double ci95_low = 0.0;
    double ci95_high = 0.0;
    int n = 0;
};

struct ObservableSpec {
    enum class Kind { entropy_arc, mutual_info, negativity_arc };
    Kind kind = Kind::entropy_arc;
    int a_start = 0, a_len = 0;
    int b_start = 0, b_len = 0;

    static ObservableSpec entropy(int len, int start = 0) {
        return {Kind::entropy_arc, start, len, 0, 0};
    }
    // Diametrically opposite segments of equal length.
    static ObservableSpec mutual_opposite(int len, int L) {
        return {Kind::mutual_info, 0, len, L / 2, len};
    }
    static ObservableSpec mutual(int a_start, int a_len, int b_start, int b_len) {
        return {Kind::mutual_info, a_start, a_len, b_start, b_len};
    }
    static ObservableSpec negativity(int len, int start = 0) {
        return {Kind::negativity_arc, start, len, 0, 0};
    }

    std::string name() const {
        char buf[64];
        switch (kind) {
            case Kind::entropy_arc:
                std::snprintf(buf, sizeof buf, "S_%d", a_len);
                break;
            case Kind::mutual_info:
                std::snprintf(buf, sizeof buf, "I_%d_%d_%d_%d", a_start, a_len, b_start, b_len);
                break;
            case Kind::negativity_arc:
                std::snprintf(buf, sizeof buf, "E_%d", a_len);
                break;
        }
        return buf;
    }
};

// Evaluates one observable on the reduced inner-chain correlation matrix.
inline double evaluate_observable(const MatrixXcd& d_sys, int L, const ObservableSpec& spec) {
    switch (spec.kind) {
        case ObservableSpec::Kind::entropy_arc: {
            std::vector<int> sites;
            sites.reserve(static_cast<std::size_t>(spec.a_len));
            for (int i = 0; i < spec.a_len; ++i) sites.push_back((spec.a_start + i) % L);
            return von_neumann_entropy(submatrix(d_sys, sites, sites));
        }
        case ObservableSpec::Kind::mutual_info: {
            Partition part = Partition::two_arcs(spec.a_start, spec.a_len, spec.b_start,
                                                 spec.b_len, L);
            return mutual_information(d_sys, part);
        }
        case ObservableSpec::Kind::negativity_arc: {
            std::vector<int> sites;
            sites.reserve(static_cast<std::size_t>(spec.a_len));
            for (int i = 0; i < spec.a_len; ++i) sites.push_back((spec.a_start + i) % L);
            return fermionic_negativity(d_sys, sites);
        }
    }
    throw parameter_error("evaluate_observable: unknown kind");
}

// One trajectory: random half-filled start, t_st warm-up cycles, then one row
// of observable values per post-steady cycle (m rows in total).
inline std::vector<std::vector<double>> run_trajectory_samples(
    const LadderParams& params, const RunConfig& cfg,
    const std::vector<ObservableSpec>& observables, int traj_index, const MatrixXcd& r_matrix,
    std::uint64_t stream_tag = 0) {
    params.validate();
    cfg.validate();
    Rng rng(derive_seed(cfg.base_seed, {stream_tag, static_cast<std::uint64_t>(traj_index)}));
    CorrelationMatrix state = init_random_halffilling(params.L, rng);
    MatrixXcd scratch(state.d.rows(), state.d.cols());
    const int t_st = resolved_t_st(cfg, params.L);

    auto check_purity = [&](int step) {
        const double defect = purity_defect(state);
        if (defect > cfg.purity_abort_threshold)
            throw numeric_error("trajectory " + std::to_string(traj_index) +
                                ": purity defect " + std::to_string(defect) + " at step " +
                                std::to_string(step));
    };

    for (int step = 1; step <= t_st; ++step) {
        evolve_inplace(state, r_matrix, scratch);
        measure_outer_chain(state, params.p, rng, step);
        if (cfg.purity_check_interval > 0 && step % cfg.purity_check_interval == 0)
            check_purity(step);
    }
    std::vector<std::vector<double>> samples(static_cast<std::size_t>(cfg.m));
    for (int s = 0; s < cfg.m; ++s) {
        evolve_inplace(state, r_matrix, scratch);
        measure_outer_chain(state, params.p, rng, t_st + s + 1);
        const MatrixXcd d_sys = inner_chain_matrix(state);
        auto& row = samples[static_cast<std::size_t>(s)];
        row.reserve(observables.size());
        for (const auto& spec : observables)
            row.push_back(evaluate_observable(d_sys, params.L, spec));
    }
    check_purity(t_st + cfg.m);
    return samples;
}

// Time-averaged observables of one trajectory.
inline std::vector<double> run_trajectory(const LadderParams& params, const RunConfig& cfg,
                                          const std::vector<ObservableSpec>& observables,
                                          int traj_index, std::uint64_t stream_tag = 0) {
    const Propagator prop = propagator(params);
    const MatrixXcd r = prop.u.conjugate();
    const auto samples = run_trajectory_samples(params, cfg, observables, traj_index, r,
                                                stream_tag);
    std::vector<double> means(observables.size(), 0.0);
    for (const auto& row : samples)
        for (std::size_t k = 0; k < row.size(); ++k) means[k] += row[k];
    for (auto& v : means) v /= static_cast<double>(samples.size());
    return means;
}

// --- checkpoint files ---------------------------------------------------------
//
// One CSV per (grid point, trajectory): rows (s, obs_index, value) holding the
// m post-steady samples. A scan resumes by presence check on these files.

inline std::string checkpoint_path(const std::string& dir, int point_tag, int traj_index) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "pt%04d_tr%05d.csv", point_tag, traj_index);
    return dir + "/" + buf;
}

inline void write_checkpoint(const std::string& path,
                             const std::vector<std::vector<double>>& samples) {
    std::FILE* f = std::fopen((path + ".tmp").c_str(), "w");
    if (!f) throw std::runtime_error("write_checkpoint: cannot open " + path);
    std::fprintf(f, "s,obs,value\n");
    for (std::size_t s = 0; s < samples.size(); ++s)
        for (std::size_t k = 0; k < samples[s].size(); ++k)
            std::fprintf(f, "%zu,%zu,%.17g\n", s, k, samples[s][k]);
    std::fclose(f);
    std::filesystem::rename(path + ".tmp", path);
}

inline bool read_checkpoint(const std::string& path, std::size_t m, std::size_t n_obs,
                            std::vector<std::vector<double>>& samples) {
    std::FILE* f = std::fopen(path.c_str(), "r");
    if (!f) return false;
    samples.assign(m, std::vector<double>(n_obs, 0.0));
    char header[64];
    if (!std::fgets(header, sizeof header, f)) {
        std::fclose(f);
        return false;
    }
    std::size_t count = 0, s = 0, k = 0;
    double v = 0.0;
    while (std::fscanf(f, "%zu,%zu,%lg\n", &s, &k, &v) == 3) {
        if (s >= m || k >= n_obs) {
            std::fclose(f);
            return false;
        }
        samples[s][k] = v;
        ++count;
    }
    std::fclose(f);
    return count == m * n_obs;
}

// --- ensembles -----------------------------------------------------------------

struct EnsembleResult {
    std::vector<std::vector<double>> per_traj;  // [trajectory][observable], time-averaged
};

inline EnsembleResult run_ensemble(const LadderParams& params, const RunConfig& cfg,
                                   const std::vector<ObservableSpec>& observables, int n_traj,
                                   int workers, std::uint64_t stream_tag = 0,
                                   const std::string& checkpoint_dir = "", int point_tag = 0) {
    const Propagator prop = propagator(params);
    const MatrixXcd r = prop.u.conjugate();
    EnsembleResult result;
    result.per_traj.assign(static_cast<std::size_t>(n_traj),
                           std::vector<double>(observables.size(), 0.0));
    if (!checkpoint_dir.empty()) std::filesystem::create_directories(checkpoint_dir);
    detail::parallel_for(n_traj, workers, [&](int alpha) {
        std::vector<std::vector<double>> samples;
        bool restored = false;
        std::string path;
        if (!checkpoint_dir.empty()) {
            path = checkpoint_path(checkpoint_dir, point_tag, alpha);
            restored = read_checkpoint(path, static_cast<std::size_t>(cfg.m),
                                       observables.size(), samples);
        }
        if (!restored) {
            samples = run_trajectory_samples(params, cfg, observables, alpha, r, stream_tag);
            if (!checkpoint_dir.empty()) write_checkpoint(path, samples);
        }
        auto& out = result.per_traj[static_cast<std::size_t>(alpha)];
        for (const auto& row : samples)
            for (std::size_t k = 0; k < row.size(); ++k) out[k] += row[k];
        for (auto& v : out) v /= static_cast<double>(samples.size());
    });
    return result;
}

inline std::vector<double> observable_column(const EnsembleResult& ens, std::size_t k) {
    std::vector<double> col;
    col.reserve(ens.per_traj.size());
    for (const auto& row : ens.per_traj) col.push_back(row[k]);
    return col;
}

// --- ensemble statistics ---------------------------------------------------------

inline constexpr int kBootstrapResamples = 10000;

namespace detail {

inline double percentile(std::vector<double>& sorted_values, double q) {
    const std::size_t n = sorted_values.size();
    const double pos = q * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted_values[lo] * (1.0 - frac) + sorted_values[hi] * frac;
}

}  // namespace detail

// Mean with a 95% percentile-bootstrap confidence interval. Observable
// distributions over trajectories are skewed near area-law points, so no
// Gaussian +-1.96 sigma shortcut is taken.
inline TrajectoryStats ensemble_average(const std::vector<double>& values,
                                        std::uint64_t ci_seed = 0xb00757ULL) {
    if (values.size() < 2) throw parameter_error("ensemble_average: need at least 2 values");
    const int n = static_cast<int>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);

    Rng rng(ci_seed);
    std::vector<double> resampled(kBootstrapResamples);
    for (int b = 0; b < kBootstrapResamples; ++b) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i)
            acc += values[rng.uniform_index(static_cast<std::uint64_t>(n))];
        resampled[static_cast<std::size_t>(b)] = acc / static_cast<double>(n);
    }
    std::sort(resampled.begin(), resampled.end());
    TrajectoryStats stats;
    stats.mean = mean;
    stats.ci95_low = std::min(detail::percentile(resampled, 0.025), mean);
    stats.ci95_high = std::max(detail::percentile(resampled, 0.975), mean);
    stats.n = n;
    return stats;
}

// Prefix statistics of a growing ensemble; nothing is re-simulated.
inline std::vector<TrajectoryStats> convergence_profile(const std::vector<double>& values,
                                                        const std::vector<int>& checkpoints,
                                                        std::uint64_t ci_seed = 0xb00757ULL) {
    std::vector<TrajectoryStats> out;
    int prev = 0;
    for (int n : checkpoints) {
        if (n < prev) throw parameter_error("convergence_profile: checkpoints must ascend");
        if (n > static_cast<int>(values.size()))
            throw parameter_error("convergence_profile: checkpoint beyond ensemble size");
        std::vector<double> prefix(values.begin(), values.begin() + n);
        out.push_back(ensemble_average(prefix, ci_seed));
        prev = n;
    }
    return out;
}

inline std::vector<TrajectoryStats> convergence_profile(const LadderParams& params,
                                                        const RunConfig& cfg,
                                                        const ObservableSpec& observable,
                                                        const std::vector<int>& checkpoints,
                                                        int workers = 1) {
    if (checkpoints.empty()) throw parameter_error("convergence_profile: no checkpoints");
    const int n_total = checkpoints.back();
    const EnsembleResult ens = run_ensemble(params, cfg, {observable}, n_total, workers);
    return convergence_profile(observable_column(ens, 0), checkpoints,
                               derive_seed(cfg.base_seed, {0xc1u}));
}

// --- phase-diagram scans ----------------------------------------------------------

enum class ScanQuantity { delta_S, delta_E };

struct ScanRow {
    double t12 = 0.0;
    double t2 = 0.0;
    bool defined = false;
    double delta = 0.0;
    double delta_ci_low = 0.0;
    double delta_ci_high = 0.0;
    double q_quarter = 0.0;  // mean of Q_{L/4}
    double q_half = 0.0;     // mean of Q_{L/2}
    int n = 0;
};

struct ScanGrid {
    std::vector<double> t12_values;
    std::vector<double> t2_values;
};

// delta = 1 - mean(Q_{L/4}) / mean(Q_{L/2}); the CI comes from a joint
// bootstrap over trajectories. Points with mean(Q_{L/2}) below 1e-9 are
// flagged undefined rather than aborting the scan.
inline ScanRow delta_from_columns(const std::vector<double>& q_quarter,
                                  const std::vector<double>& q_half, std::uint64_t ci_seed) {
    if (q_quarter.size() != q_half.size() || q_quarter.size() < 2)
        throw parameter_error("delta_from_columns: need paired columns, n >= 2");
    const int n = static_cast<int>(q_half.size());
    ScanRow row;
    row.n = n;
    double m4 = 0.0, m2 = 0.0;
    for (int i = 0; i < n; ++i) {
        m4 += q_quarter[static_cast<std::size_t>(i)];
        m2 += q_half[static_cast<std::size_t>(i)];
    }
    m4 /= n;
    m2 /= n;
    row.q_quarter = m4;
    row.q_half = m2;
    if (std::abs(m2) < 1e-9) {
        row.defined = false;
        return row;
    }
    row.defined = true;
    row.delta = 1.0 - m4 / m2;
    Rng rng(ci_seed);
    std::vector<double> deltas(kBootstrapResamples);
    for (int b = 0; b < kBootstrapResamples; ++b) {
        double a4 = 0.0, a2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto j = rng.uniform_index(static_cast<std::uint64_t>(n));
            a4 += q_quarter[j];
            a2 += q_half[j];
        }
        if (std::abs(a2) < 1e-12) a2 = a2 < 0 ? -1e-12 : 1e-12;
        deltas[static_cast<std::size_t>(b)] = 1.0 - a4 / a2;
    }
    std::sort(deltas.begin(), deltas.end());
    row.delta_ci_low = std::min(detail::percentile(deltas, 0.025), row.delta);
    row.delta_ci_high = std::max(detail::percentile(deltas, 0.975), row.delta);
    return row;
}

inline std::vector<ScanRow> scan_phase_diagram(const ScanGrid& grid,
                                               const LadderParams& params_template,
                                               const RunConfig& cfg, ScanQuantity quantity,
                                               int workers = 1,
                                               const std::string& checkpoint_dir = "") {
    if (grid.t12_values.empty() || grid.t2_values.empty())
        throw parameter_error("scan_phase_diagram: empty grid");
    if (quantity == ScanQuantity::delta_S && params_template.p != 1.0)
        throw parameter_error("scan_phase_diagram: delta_S requires p = 1");
    const int L = params_template.L;
    std::vector<ObservableSpec> specs;
    if (quantity == ScanQuantity::delta_S)
        specs = {ObservableSpec::entropy(L / 4), ObservableSpec::entropy(L / 2)};
    else
        specs = {ObservableSpec::negativity(L / 4), ObservableSpec::negativity(L / 2)};

    std::vector<ScanRow> rows;
    int point = 0;
    for (double t2 : grid.t2_values) {
        for (double t12 : grid.t12_values) {
            LadderParams params = params_template;
            params.t12 = t12;
            params.t2 = t2;
            const int n_traj = resolved_n_traj(cfg, L, t2);
            const EnsembleResult ens =
                run_ensemble(params, cfg, specs, n_traj, workers,
                             static_cast<std::uint64_t>(point), checkpoint_dir, point);
            ScanRow row = delta_from_columns(observable_column(ens, 0),
                                             observable_column(ens, 1),
                                             derive_seed(cfg.base_seed,
                                                         {0xd3u, static_cast<std::uint64_t>(point)}));
            row.t12 = t12;
            row.t2 = t2;
            rows.push_back(row);
            ++point;
        }
    }
    return rows;
}

}  // namespace ladder
