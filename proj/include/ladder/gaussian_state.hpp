#pragma once

// Gaussian pure states of the ladder, carried entirely by the two-point
// correlation matrix d[(i,s),(j,s')] = <c^dag_{i,s} c_{j,s'}>.
//
// A unitary single-particle step u acts as d -> conj(u) * d * u^T (the
// convention is pinned by the exact-diagonalization cross-check in the test
// suite). Projective occupation measurements on the outer chain update d via
// the rank-one formulas in project_occupied / project_empty; both preserve
// purity (d^2 = d), Hermiticity and the total particle number.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <utility>
#include <vector>

#include "ladder/common.hpp"
#include "ladder/lattice.hpp"
#include "ladder/rng.hpp"

namespace ladder {

struct CorrelationMatrix {
    MatrixXcd d;  // 2L x 2L
    int L = 0;

    int num_modes() const { return 2 * L; }
};

enum class Outcome : std::uint8_t { empty = 0, occupied = 1 };

struct MeasurementRecord {
    int step = 0;
    int site = 0;  // outer-chain site
    Outcome outcome = Outcome::empty;
};

// Occupation threshold below which a measurement branch is treated as
// deterministic; the update formulas divide by d_ll or 1-d_ll.
inline constexpr double kOccupationEps = 1e-12;

inline CorrelationMatrix init_random_halffilling(int L, Rng& rng) {
    if (L < 2) throw parameter_error("init_random_halffilling: L must be at least 2");
    std::vector<int> modes(2 * L);
    for (int i = 0; i < 2 * L; ++i) modes[i] = i;
    // Partial Fisher-Yates: the first L entries are the occupied modes.
    for (int i = 0; i < L; ++i) {
        const int j = i + static_cast<int>(rng.uniform_index(2 * L - i));
        std::swap(modes[i], modes[j]);
    }
    MatrixXcd d = MatrixXcd::Zero(2 * L, 2 * L);
    for (int i = 0; i < L; ++i) d(modes[i], modes[i]) = 1.0;
    return {std::move(d), L};
}

// Antiferromagnetic-like product state: even rungs occupy the inner chain,
// odd rungs the outer chain.
inline CorrelationMatrix init_neel(int L) {
    if (L < 2 || L % 2 != 0) throw parameter_error("init_neel: L must be even and >= 2");
    MatrixXcd d = MatrixXcd::Zero(2 * L, 2 * L);
    for (int i = 0; i < L; ++i) {
        const int m = (i % 2 == 0) ? inner_mode(i) : outer_mode(i);
        d(m, m) = 1.0;
    }
    return {std::move(d), L};
}

inline CorrelationMatrix evolve(const CorrelationMatrix& state, const Propagator& prop) {
    if (prop.u.rows() != state.d.rows())
        throw parameter_error("evolve: propagator/state dimension mismatch");
    MatrixXcd d = prop.u.conjugate() * state.d * prop.u.transpose();
    d = 0.5 * (d + d.adjoint().eval());
    return {std::move(d), state.L};
}

// In-place variant used in the hot loop; r = conj(u) precomputed by the caller.
inline void evolve_inplace(CorrelationMatrix& state, const MatrixXcd& r, MatrixXcd& scratch) {
    scratch.noalias() = r * state.d;
    state.d.noalias() = scratch * r.adjoint();
    state.d = 0.5 * (state.d + state.d.adjoint().eval());
}

inline double purity_defect(const CorrelationMatrix& state) {
    return (state.d * state.d - state.d).norm();
}

// d -> d + e_a e_a^T - d[:,a] d[a,:] / d_aa, then pin d_aa = 1 and
// re-symmetrize.
inline void project_occupied(CorrelationMatrix& state, int site) {
    const int a = outer_mode(site);
    if (site < 0 || site >= state.L) throw parameter_error("project_occupied: site out of range");
    const double occ = state.d(a, a).real();
    if (occ < kOccupationEps)
        throw numeric_error("project_occupied: occupation is numerically zero");
    const VectorXcd col = state.d.col(a);
    const VectorXcd row = state.d.row(a);
    state.d.noalias() -= col * row.transpose() / occ;
    state.d(a, a) += 1.0;
    state.d = 0.5 * (state.d + state.d.adjoint().eval());
    state.d.row(a).setZero();
    state.d.col(a).setZero();
    state.d(a, a) = 1.0;
}

// d -> d - e_a e_a^T + (e_a - d[:,a])(e_a - d[a,:]) / (1 - d_aa), then pin
// d_aa = 0.
inline void project_empty(CorrelationMatrix& state, int site) {
    const int a = outer_mode(site);
    if (site < 0 || site >= state.L) throw parameter_error("project_empty: site out of range");
    const double occ = state.d(a, a).real();
    if (occ > 1.0 - kOccupationEps)
        throw numeric_error("project_empty: occupation is numerically one");
    VectorXcd col = -state.d.col(a);
    col(a) += 1.0;
    VectorXcd row = -state.d.row(a);
    row(a) += 1.0;
    state.d.noalias() += col * row.transpose() / (1.0 - occ);
    state.d(a, a) -= 1.0;
    state.d = 0.5 * (state.d + state.d.adjoint().eval());
    state.d.row(a).setZero();
    state.d.col(a).setZero();
    state.d(a, a) = 0.0;
}

// One measurement round over the outer chain, sites in ascending order.
// For every site a protocol draw p_l in (0,1] decides whether it is measured;
// measured sites consume a second draw q_l for the Born branch, so the random
// stream advances by one word per unmeasured and two per measured site.
// Occupations within kOccupationEps of 0 or 1 take the deterministic branch.
inline std::vector<MeasurementRecord> measure_outer_chain(CorrelationMatrix& state, double p,
                                                          Rng& rng, int step = 0) {
    if (p < 0.0 || p > 1.0) throw parameter_error("measure_outer_chain: p must lie in [0,1]");
    std::vector<MeasurementRecord> records;
    for (int site = 0; site < state.L; ++site) {
        const double pl = rng.uniform_open_closed();
        if (pl > p) continue;
        const double ql = rng.uniform_open_closed();
        const double occ = state.d(outer_mode(site), outer_mode(site)).real();
        Outcome outcome;
        if (occ < kOccupationEps) {
            outcome = Outcome::empty;
        } else if (occ > 1.0 - kOccupationEps) {
            outcome = Outcome::occupied;
        } else {
            outcome = (ql <= occ) ? Outcome::occupied : Outcome::empty;
        }
        if (outcome == Outcome::occupied)
            project_occupied(state, site);
        else
            project_empty(state, site);
        records.push_back({step, site, outcome});
    }
    return records;
}

inline CorrelationMatrix reduce(const CorrelationMatrix& state, const std::vector<int>& modes) {
    if (modes.empty()) throw parameter_error("reduce: empty mode set");
    const int n = static_cast<int>(modes.size());
    MatrixXcd sub(n, n);
    for (int a = 0; a < n; ++a) {
        if (modes[a] < 0 || modes[a] >= state.num_modes())
            throw parameter_error("reduce: mode index out of range");
        for (int b = 0; b < n; ++b) sub(a, b) = state.d(modes[a], modes[b]);
    }
    return {std::move(sub), state.L};
}

inline std::vector<int> inner_chain_modes(int L) {
    std::vector<int> modes(L);
    for (int i = 0; i < L; ++i) modes[i] = inner_mode(i);
    return modes;
}

// Reduced correlation matrix of the full inner chain (L x L, indexed by site).
inline MatrixXcd inner_chain_matrix(const CorrelationMatrix& state) {
    MatrixXcd sub(state.L, state.L);
    for (int i = 0; i < state.L; ++i)
        for (int j = 0; j < state.L; ++j) sub(i, j) = state.d(inner_mode(i), inner_mode(j));
    return sub;
}

// --- binary snapshots -------------------------------------------------------
//
// Layout: 16-byte header (magic "FLDR" u32, L u32, step u64, little-endian)
// followed by the 2L x 2L matrix as row-major complex128.

inline constexpr std::uint32_t kSnapshotMagic = 0x52444c46u;  // "FLDR"

inline void save_snapshot(const CorrelationMatrix& state, std::uint64_t step,
                          const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("save_snapshot: cannot open " + path);
    const std::uint32_t magic = kSnapshotMagic;
    const std::uint32_t L = static_cast<std::uint32_t>(state.L);
    std::fwrite(&magic, sizeof magic, 1, f);
    std::fwrite(&L, sizeof L, 1, f);
    std::fwrite(&step, sizeof step, 1, f);
    const int n = state.num_modes();
    std::vector<double> buf(2 * static_cast<std::size_t>(n) * n);
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            buf[idx++] = state.d(i, j).real();
            buf[idx++] = state.d(i, j).imag();
        }
    }
    std::fwrite(buf.data(), sizeof(double), buf.size(), f);
    std::fclose(f);
}

inline std::pair<CorrelationMatrix, std::uint64_t> load_snapshot(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("load_snapshot: cannot open " + path);
    std::uint32_t magic = 0, L = 0;
    std::uint64_t step = 0;
    if (std::fread(&magic, sizeof magic, 1, f) != 1 || magic != kSnapshotMagic) {
        std::fclose(f);
        throw std::runtime_error("load_snapshot: bad magic in " + path);
    }
    if (std::fread(&L, sizeof L, 1, f) != 1 || std::fread(&step, sizeof step, 1, f) != 1) {
        std::fclose(f);
        throw std::runtime_error("load_snapshot: truncated header in " + path);
    }
    const int n = 2 * static_cast<int>(L);
    std::vector<double> buf(2 * static_cast<std::size_t>(n) * n);
    if (std::fread(buf.data(), sizeof(double), buf.size(), f) != buf.size()) {
        std::fclose(f);
        throw std::runtime_error("load_snapshot: truncated file " + path);
    }
    std::fclose(f);
    MatrixXcd d(n, n);
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            d(i, j) = complexd(buf[idx], buf[idx + 1]);
            idx += 2;
        }
    return {{std::move(d), static_cast<int>(L)}, step};
}

}  // namespace ladder
