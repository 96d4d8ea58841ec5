#pragma once

// Exact-diagonalization machinery and non-Markovianity measures.
//
// Fock space: n modes give dimension 2^n; basis index bit m stores the
// occupation of mode m (lattice mode order), and a basis state is the ordered
// product c^dag_{m1} ... c^dag_{mN} |0> with m1 < m2 < ... . All fermionic
// signs follow Jordan-Wigner strings in this fixed order.
//
// The reduced dynamics of the inner chain is probed two ways:
//   * trace-distance (BLP) measure on the exactly evolved trajectory-averaged
//     channel, one stroboscopic cycle = unitary conjugation followed by the
//     per-site measurement mixture rho -> (1-p) rho + p (P1 rho P1 + P0 rho P0);
//   * quadratic distance d2 = sqrt(Tr|rho1-rho2|^2) evaluated on double
//     trajectory averages of Gaussian states via
//     Tr(rho_a rho_b) = det[c_a c_b + (1-c_a)(1-c_b)].
//
// Cost scaling per method (dim = 2^(2L)): ED channel evolution ~ a*dim^3 per
// step and pair; the Gaussian route ~ (2L)^3 per step and trajectory plus the
// N_traj^2 determinant overhead of the double average. The hybrid route
// (Gaussian trajectories re-exponentiated into density matrices) costs
// ~ dim^3 per trajectory step and is never worth it; it is not implemented.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <utility>
#include <vector>

#include "ladder/common.hpp"
#include "ladder/entanglement.hpp"
#include "ladder/gaussian_state.hpp"
#include "ladder/lattice.hpp"
#include "ladder/parallel.hpp"
#include "ladder/rng.hpp"

namespace ladder::ed {

inline constexpr int kMaxFockModes = 12;

inline int fock_dim(int n_modes) {
    if (n_modes < 1 || n_modes > kMaxFockModes)
        throw capacity_error("fock_dim: mode count out of supported range");
    return 1 << n_modes;
}

inline bool bit_set(std::uint32_t bits, int m) { return (bits >> m) & 1u; }

// (-1)^{number of occupied modes below m}
inline int jw_sign(std::uint32_t bits, int m) {
    const std::uint32_t below = bits & ((1u << m) - 1u);
    return (std::popcount(below) & 1) ? -1 : 1;
}

// Applies c_m (out += c_m v), Jordan-Wigner signs included.
inline void apply_annihilation(const VectorXcd& v, int m, VectorXcd& out) {
    const int dim = static_cast<int>(v.size());
    out.setZero(dim);
    for (int b = 0; b < dim; ++b) {
        const auto bits = static_cast<std::uint32_t>(b);
        if (!bit_set(bits, m)) continue;
        out(b & ~(1 << m)) += static_cast<double>(jw_sign(bits, m)) * v(b);
    }
}

inline void apply_creation(const VectorXcd& v, int m, VectorXcd& out) {
    const int dim = static_cast<int>(v.size());
    out.setZero(dim);
    for (int b = 0; b < dim; ++b) {
        const auto bits = static_cast<std::uint32_t>(b);
        if (bit_set(bits, m)) continue;
        out(b | (1 << m)) += static_cast<double>(jw_sign(bits, m)) * v(b);
    }
}

// Many-body matrix of sum_{ij} h_ij c^dag_i c_j.
inline MatrixXcd fock_hamiltonian(const MatrixXcd& h_single) {
    const int n_modes = static_cast<int>(h_single.rows());
    const int dim = fock_dim(n_modes);
    MatrixXcd h = MatrixXcd::Zero(dim, dim);
    for (int j = 0; j < n_modes; ++j) {
        for (int i = 0; i < n_modes; ++i) {
            const complexd amp = h_single(i, j);
            if (amp == complexd(0.0, 0.0)) continue;
            for (int b = 0; b < dim; ++b) {
                const auto bits = static_cast<std::uint32_t>(b);
                if (!bit_set(bits, j)) continue;
                const int sj = jw_sign(bits, j);
                const std::uint32_t mid = bits & ~(1u << j);
                if (bit_set(mid, i)) continue;
                const int si = jw_sign(mid, i);
                h(static_cast<int>(mid | (1u << i)), b) += amp * static_cast<double>(si * sj);
            }
        }
    }
    return h;
}

inline MatrixXcd build_fock_hamiltonian(const LadderParams& params) {
    if (params.L > 5) throw capacity_error("build_fock_hamiltonian: L <= 5 required");
    return fock_hamiltonian(single_particle_hamiltonian(params).h);
}

inline MatrixXcd matrix_exponential_hermitian(const MatrixXcd& h, complexd scale) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(h);
    VectorXcd phases(solver.eigenvalues().size());
    for (Eigen::Index j = 0; j < phases.size(); ++j)
        phases(j) = std::exp(scale * solver.eigenvalues()(j));
    return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

// <psi| c^dag_i c_j |psi> for all mode pairs.
inline MatrixXcd correlation_from_state(const VectorXcd& psi, int n_modes) {
    std::vector<VectorXcd> lowered(static_cast<std::size_t>(n_modes));
    for (int m = 0; m < n_modes; ++m) apply_annihilation(psi, m, lowered[m]);
    MatrixXcd d(n_modes, n_modes);
    for (int i = 0; i < n_modes; ++i)
        for (int j = 0; j < n_modes; ++j) d(i, j) = lowered[i].dot(lowered[j]);
    return d;
}

// Tr(rho c^dag_i c_j) without building operator matrices.
inline MatrixXcd correlation_from_density(const MatrixXcd& rho, int n_modes) {
    const int dim = static_cast<int>(rho.rows());
    MatrixXcd d = MatrixXcd::Zero(n_modes, n_modes);
    for (int j = 0; j < n_modes; ++j) {
        for (int i = 0; i < n_modes; ++i) {
            complexd sum = 0.0;
            for (int b = 0; b < dim; ++b) {
                const auto bits = static_cast<std::uint32_t>(b);
                if (!bit_set(bits, j)) continue;
                const int sj = jw_sign(bits, j);
                const std::uint32_t mid = bits & ~(1u << j);
                if (bit_set(mid, i)) continue;
                const int si = jw_sign(mid, i);
                sum += static_cast<double>(si * sj) * rho(b, static_cast<int>(mid | (1u << i)));
            }
            d(i, j) = sum;
        }
    }
    return d;
}

struct DensityMatrix {
    MatrixXcd rho;
    int n_modes = 0;

    void validate(double tol = 1e-10) const {
        if (hermiticity_defect(rho) > tol) throw numeric_error("DensityMatrix: not Hermitian");
        if (std::abs(rho.trace() - complexd(1.0, 0.0)) > tol)
            throw numeric_error("DensityMatrix: trace deviates from one");
        Eigen::SelfAdjointEigenSolver<MatrixXcd> s(rho, Eigen::EigenvaluesOnly);
        if (s.eigenvalues().minCoeff() < -1e-9)
            throw numeric_error("DensityMatrix: negative eigenvalue");
    }
};

// --- fermionic mode reordering and partial trace ----------------------------

// Signed Fock-basis relabeling for a mode permutation perm[old] = new. The
// sign is the parity of the permutation restricted to the occupied modes.
struct FockPermutation {
    std::vector<int> target;  // basis index in the new labeling
    std::vector<double> sign;
};

inline FockPermutation fock_mode_permutation(const std::vector<int>& perm) {
    const int n_modes = static_cast<int>(perm.size());
    const int dim = fock_dim(n_modes);
    FockPermutation fp;
    fp.target.resize(static_cast<std::size_t>(dim));
    fp.sign.resize(static_cast<std::size_t>(dim));
    std::vector<int> relabeled;
    for (int b = 0; b < dim; ++b) {
        relabeled.clear();
        std::uint32_t out = 0;
        for (int m = 0; m < n_modes; ++m) {
            if (!bit_set(static_cast<std::uint32_t>(b), m)) continue;
            relabeled.push_back(perm[m]);
            out |= 1u << perm[m];
        }
        // Parity of the bubble sort bringing the relabeled list ascending.
        int swaps = 0;
        for (std::size_t x = 0; x < relabeled.size(); ++x)
            for (std::size_t y = x + 1; y < relabeled.size(); ++y)
                if (relabeled[x] > relabeled[y]) ++swaps;
        fp.target[static_cast<std::size_t>(b)] = static_cast<int>(out);
        fp.sign[static_cast<std::size_t>(b)] = (swaps & 1) ? -1.0 : 1.0;
    }
    return fp;
}

inline MatrixXcd apply_fock_permutation(const MatrixXcd& rho, const FockPermutation& fp) {
    const int dim = static_cast<int>(rho.rows());
    MatrixXcd out(dim, dim);
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
            out(fp.target[a], fp.target[b]) = fp.sign[a] * fp.sign[b] * rho(a, b);
    return out;
}

// Trace over the high bits, keeping the first n_keep modes.
inline MatrixXcd partial_trace_high(const MatrixXcd& rho, int n_keep) {
    const int dim = static_cast<int>(rho.rows());
    const int keep_dim = 1 << n_keep;
    const int env_dim = dim / keep_dim;
    MatrixXcd out = MatrixXcd::Zero(keep_dim, keep_dim);
    for (int e = 0; e < env_dim; ++e) {
        const int off = e << n_keep;
        for (int a = 0; a < keep_dim; ++a)
            for (int b = 0; b < keep_dim; ++b) out(a, b) += rho(off + a, off + b);
    }
    return out;
}

// Permutation sending mode(site,0) -> site and mode(site,1) -> L + site, so
// the inner chain occupies the low bits.
inline std::vector<int> inner_first_permutation(int L) {
    std::vector<int> perm(static_cast<std::size_t>(2 * L));
    for (int i = 0; i < L; ++i) {
        perm[static_cast<std::size_t>(inner_mode(i))] = i;
        perm[static_cast<std::size_t>(outer_mode(i))] = L + i;
    }
    return perm;
}

// Reduced density matrix of the inner chain (fermionic partial trace: modes
// are reordered inner-first before the bitwise trace).
inline MatrixXcd reduce_to_inner_chain(const MatrixXcd& rho, int L, const FockPermutation& fp) {
    return partial_trace_high(apply_fock_permutation(rho, fp), L);
}

// --- averaged channel --------------------------------------------------------

struct AveragedChannel {
    MatrixXcd u_fock;
    double p = 1.0;
    int L = 0;

    static AveragedChannel make(const LadderParams& params) {
        if (params.L > 5) throw capacity_error("AveragedChannel: L <= 5 required");
        params.validate();
        MatrixXcd hf = build_fock_hamiltonian(params);
        return {matrix_exponential_hermitian(hf, complexd(0.0, -params.tau_u)), params.p,
                params.L};
    }
};

// One stroboscopic cycle of the trajectory-averaged dynamics: unitary
// conjugation, then for every outer site the measurement mixture, which in
// the occupation basis rescales occupation-off-diagonal entries by (1-p).
inline void averaged_channel_step(MatrixXcd& rho, const AveragedChannel& ch) {
    rho = ch.u_fock * rho * ch.u_fock.adjoint();
    const int dim = static_cast<int>(rho.rows());
    for (int site = 0; site < ch.L; ++site) {
        const int m = outer_mode(site);
        const double damp = 1.0 - ch.p;
        for (int a = 0; a < dim; ++a) {
            const bool ba = bit_set(static_cast<std::uint32_t>(a), m);
            for (int b = 0; b < dim; ++b) {
                if (ba != bit_set(static_cast<std::uint32_t>(b), m)) rho(a, b) *= damp;
            }
        }
    }
}

inline double trace_distance(const MatrixXcd& r1, const MatrixXcd& r2) {
    if (r1.rows() != r2.rows() || r1.cols() != r2.cols())
        throw parameter_error("trace_distance: dimension mismatch");
    MatrixXcd diff = r1 - r2;
    diff = 0.5 * (diff + diff.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<MatrixXcd> s(diff, Eigen::EigenvaluesOnly);
    return 0.5 * s.eigenvalues().cwiseAbs().sum();
}

inline double trace_distance(const DensityMatrix& r1, const DensityMatrix& r2) {
    return trace_distance(r1.rho, r2.rho);
}

// --- scripted reference evolution ---------------------------------------------

struct ScriptEntry {
    int site = 0;
    Outcome outcome = Outcome::empty;
};
using MeasurementScript = std::vector<std::vector<ScriptEntry>>;  // [cycle][measurement]

struct EdTrajectory {
    std::vector<VectorXcd> states;        // index 0 = initial, then one per cycle
    std::vector<double> probabilities;    // Born probability of each scripted projection
    int n_modes = 0;

    MatrixXcd correlation(std::size_t step) const {
        return correlation_from_state(states.at(step), n_modes);
    }
    double joint_probability() const {
        double p = 1.0;
        for (double q : probabilities) p *= q;
        return p;
    }
};

inline VectorXcd fock_basis_vector(std::uint32_t bits, int n_modes) {
    VectorXcd v = VectorXcd::Zero(fock_dim(n_modes));
    v(static_cast<int>(bits)) = 1.0;
    return v;
}

// State-vector evolution with prescribed measurement outcomes; the oracle
// counterpart of the Gaussian trajectory update.
inline EdTrajectory ed_reference_evolution(const VectorXcd& psi0, const LadderParams& params,
                                           const MeasurementScript& script) {
    if (params.L > 5) throw capacity_error("ed_reference_evolution: L <= 5 required");
    const int n_modes = 2 * params.L;
    if (psi0.size() != fock_dim(n_modes))
        throw parameter_error("ed_reference_evolution: state dimension mismatch");
    MatrixXcd u = matrix_exponential_hermitian(build_fock_hamiltonian(params),
                                               complexd(0.0, -params.tau_u));
    EdTrajectory traj;
    traj.n_modes = n_modes;
    traj.states.push_back(psi0);
    VectorXcd psi = psi0;
    const int dim = static_cast<int>(psi.size());
    for (const auto& cycle : script) {
        psi = u * psi;
        for (const auto& entry : cycle) {
            const int m = outer_mode(entry.site);
            double prob_occ = 0.0;
            for (int b = 0; b < dim; ++b)
                if (bit_set(static_cast<std::uint32_t>(b), m)) prob_occ += std::norm(psi(b));
            const bool want_occ = entry.outcome == Outcome::occupied;
            const double prob = want_occ ? prob_occ : 1.0 - prob_occ;
            if (prob < 1e-14)
                throw numeric_error("ed_reference_evolution: scripted outcome has zero weight");
            for (int b = 0; b < dim; ++b)
                if (bit_set(static_cast<std::uint32_t>(b), m) != want_occ) psi(b) = 0.0;
            psi /= std::sqrt(prob);
            traj.probabilities.push_back(prob);
        }
        traj.states.push_back(psi);
    }
    return traj;
}

// --- initial-pair sampling ----------------------------------------------------

enum class PairMode { random_pure_product, random_mixed, orthogonal_pure };

inline std::vector<int> half_filling_sector(int n_modes) {
    std::vector<int> sector;
    const int dim = fock_dim(n_modes);
    for (int b = 0; b < dim; ++b)
        if (std::popcount(static_cast<std::uint32_t>(b)) == n_modes / 2) sector.push_back(b);
    return sector;
}

inline DensityMatrix embed_sector_vector(const VectorXcd& v, const std::vector<int>& sector,
                                         int dim) {
    VectorXcd full = VectorXcd::Zero(dim);
    for (std::size_t i = 0; i < sector.size(); ++i) full(sector[i]) = v(static_cast<int>(i));
    MatrixXcd rho = full * full.adjoint();
    return {std::move(rho), 0};
}

// Pairs are drawn at half filling, where the stroboscopic dynamics lives.
inline std::pair<DensityMatrix, DensityMatrix> sample_initial_pair(Rng& rng, PairMode mode,
                                                                   int L) {
    const int n_modes = 2 * L;
    const int dim = fock_dim(n_modes);
    const std::vector<int> sector = half_filling_sector(n_modes);
    const int sdim = static_cast<int>(sector.size());
    auto random_sector_vector = [&]() {
        VectorXcd v(sdim);
        for (int i = 0; i < sdim; ++i) v(i) = rng.complex_normal();
        v.normalize();
        return v;
    };
    DensityMatrix r1, r2;
    switch (mode) {
        case PairMode::random_pure_product: {
            const int b1 = static_cast<int>(rng.uniform_index(sector.size()));
            int b2 = b1;
            while (b2 == b1) b2 = static_cast<int>(rng.uniform_index(sector.size()));
            VectorXcd v1 = VectorXcd::Zero(sdim), v2 = VectorXcd::Zero(sdim);
            v1(b1) = 1.0;
            v2(b2) = 1.0;
            r1 = embed_sector_vector(v1, sector, dim);
            r2 = embed_sector_vector(v2, sector, dim);
            break;
        }
        case PairMode::orthogonal_pure: {
            VectorXcd v1 = random_sector_vector();
            VectorXcd v2 = random_sector_vector();
            v2 -= v1 * v1.dot(v2);
            double n2 = v2.norm();
            while (n2 < 1e-8) {
                v2 = random_sector_vector();
                v2 -= v1 * v1.dot(v2);
                n2 = v2.norm();
            }
            v2 /= n2;
            r1 = embed_sector_vector(v1, sector, dim);
            r2 = embed_sector_vector(v2, sector, dim);
            break;
        }
        case PairMode::random_mixed: {
            const int rank = 3;
            auto make_mixed = [&]() {
                MatrixXcd w(sdim, rank);
                for (int i = 0; i < sdim; ++i)
                    for (int r = 0; r < rank; ++r) w(i, r) = rng.complex_normal();
                MatrixXcd rho_s = w * w.adjoint();
                rho_s /= rho_s.trace().real();
                MatrixXcd rho = MatrixXcd::Zero(dim, dim);
                for (int a = 0; a < sdim; ++a)
                    for (int b = 0; b < sdim; ++b) rho(sector[a], sector[b]) = rho_s(a, b);
                return DensityMatrix{std::move(rho), n_modes};
            };
            r1 = make_mixed();
            r2 = make_mixed();
            break;
        }
    }
    r1.n_modes = n_modes;
    r2.n_modes = n_modes;
    return {std::move(r1), std::move(r2)};
}

// --- BLP trace-distance measure ------------------------------------------------

inline double positive_increment_sum(const std::vector<double>& series) {
    double total = 0.0;
    for (std::size_t t = 1; t < series.size(); ++t) {
        const double inc = series[t] - series[t - 1];
        if (inc > 0.0) total += inc;
    }
    return total;
}

// Positive-part fraction of the total variation; 0/0 counts as Markovian.
inline double normalized_increment_ratio(const std::vector<double>& series) {
    double pos = 0.0, all = 0.0;
    for (std::size_t t = 1; t < series.size(); ++t) {
        const double inc = series[t] - series[t - 1];
        if (inc > 0.0) pos += inc;
        all += std::abs(inc);
    }
    return all > 0.0 ? pos / all : 0.0;
}

struct BlpResult {
    double n_phi = 0.0;        // max over pairs of the positive-increment sum
    double n_norm = 0.0;       // max over pairs of the normalized ratio
    int best_pair = -1;
    int best_pair_norm = -1;
    double max_increment = 0.0;
    std::vector<double> best_sigma;                    // increments of the best pair
    std::vector<std::vector<double>> distance_series;  // reduced-state d(t) per pair
    std::vector<std::vector<double>> full_distance_series;  // optional, see flag
};

// Evolves the difference of each sampled pair through the averaged channel
// (the channel is linear, so rho1 - rho2 carries all distance information)
// and accumulates the BLP statistics of the reduced inner-chain dynamics.
// Pairs are sampled serially from the caller's stream, then evolved on the
// worker pool; results do not depend on the worker count.
inline BlpResult blp_measure(const LadderParams& params, int n_pairs, int t_max, Rng& rng,
                             PairMode mode = PairMode::orthogonal_pure,
                             bool record_full_distance = false, int workers = 1) {
    if (n_pairs < 1) throw parameter_error("blp_measure: n_pairs must be positive");
    const AveragedChannel ch = AveragedChannel::make(params);
    const FockPermutation fp = fock_mode_permutation(inner_first_permutation(params.L));

    std::vector<MatrixXcd> deltas;
    deltas.reserve(static_cast<std::size_t>(n_pairs));
    for (int pair = 0; pair < n_pairs; ++pair) {
        auto [r1, r2] = sample_initial_pair(rng, mode, params.L);
        deltas.push_back(r1.rho - r2.rho);
    }

    BlpResult result;
    result.distance_series.assign(static_cast<std::size_t>(n_pairs), {});
    if (record_full_distance)
        result.full_distance_series.assign(static_cast<std::size_t>(n_pairs), {});
    detail::parallel_for(n_pairs, workers, [&](int pair) {
        MatrixXcd delta = std::move(deltas[static_cast<std::size_t>(pair)]);
        std::vector<double> dist, full_dist;
        dist.reserve(static_cast<std::size_t>(t_max) + 1);
        for (int t = 0; t <= t_max; ++t) {
            if (t > 0) averaged_channel_step(delta, ch);
            MatrixXcd delta_sys = reduce_to_inner_chain(delta, params.L, fp);
            dist.push_back(trace_distance(delta_sys, MatrixXcd::Zero(delta_sys.rows(),
                                                                     delta_sys.cols())));
            if (record_full_distance)
                full_dist.push_back(
                    trace_distance(delta, MatrixXcd::Zero(delta.rows(), delta.cols())));
        }
        result.distance_series[static_cast<std::size_t>(pair)] = std::move(dist);
        if (record_full_distance)
            result.full_distance_series[static_cast<std::size_t>(pair)] = std::move(full_dist);
    });

    for (int pair = 0; pair < n_pairs; ++pair) {
        const auto& dist = result.distance_series[static_cast<std::size_t>(pair)];
        const double n_pair = positive_increment_sum(dist);
        const double r_pair = normalized_increment_ratio(dist);
        for (std::size_t t = 1; t < dist.size(); ++t)
            result.max_increment = std::max(result.max_increment, dist[t] - dist[t - 1]);
        if (n_pair > result.n_phi || result.best_pair < 0) {
            result.n_phi = std::max(n_pair, 0.0);
            result.best_pair = pair;
            result.best_sigma.assign(dist.size() > 1 ? dist.size() - 1 : 0, 0.0);
            for (std::size_t t = 1; t < dist.size(); ++t)
                result.best_sigma[t - 1] = (dist[t] - dist[t - 1]) / params.tau_u;
        }
        if (r_pair > result.n_norm || result.best_pair_norm < 0) {
            result.n_norm = r_pair;
            result.best_pair_norm = pair;
        }
    }
    return result;
}

inline double normalized_blp_measure(const LadderParams& params, int n_pairs, int t_max,
                                     Rng& rng, PairMode mode = PairMode::orthogonal_pure) {
    return blp_measure(params, n_pairs, t_max, rng, mode).n_norm;
}

// --- Gaussian quadratic distance ------------------------------------------------

// Tr(rho1 rho2) = det[c1 c2 + (1-c1)(1-c2)] for particle-conserving Gaussian
// states with correlation matrices c1, c2.
inline double gaussian_product_trace(const MatrixXcd& c1, const MatrixXcd& c2) {
    if (c1.rows() != c2.rows()) throw parameter_error("gaussian_product_trace: size mismatch");
    const int n = static_cast<int>(c1.rows());
    const MatrixXcd id = MatrixXcd::Identity(n, n);
    const complexd det = (c1 * c2 + (id - c1) * (id - c2)).determinant();
    return det.real();
}

// Mandatory pre-use validation of the determinant formula against explicit
// Fock-space products of random thermal Gaussian states. Aborts hard on
// mismatch; runs once per process.
inline void gaussian_product_trace_selftest() {
    static std::once_flag done;
    std::call_once(done, []() {
        Rng rng(0x9d2c5680u);
        const int n_modes = 3;
        const int dim = fock_dim(n_modes);
        auto random_thermal = [&]() {
            MatrixXcd h(n_modes, n_modes);
            for (int i = 0; i < n_modes; ++i) {
                h(i, i) = rng.normal();
                for (int j = i + 1; j < n_modes; ++j) {
                    h(i, j) = 0.7 * rng.complex_normal();
                    h(j, i) = std::conj(h(i, j));
                }
            }
            MatrixXcd rho = matrix_exponential_hermitian(fock_hamiltonian(h), complexd(-1.0, 0.0));
            rho /= rho.trace().real();
            return rho;
        };
        for (int trial = 0; trial < 20; ++trial) {
            const MatrixXcd rho1 = random_thermal();
            const MatrixXcd rho2 = random_thermal();
            const MatrixXcd c1 = correlation_from_density(rho1, n_modes);
            const MatrixXcd c2 = correlation_from_density(rho2, n_modes);
            const double direct = (rho1 * rho2).trace().real();
            const double viadet = gaussian_product_trace(c1, c2);
            if (std::abs(direct - viadet) > 1e-8)
                throw numeric_error("gaussian_product_trace self-test failed: " +
                                    std::to_string(direct) + " vs " + std::to_string(viadet));
        }
        (void)dim;
    });
}

// Reduced inner-chain correlation matrices of one trajectory batch (single
// initial condition), indexed [trajectory][time].
struct GaussianEnsemble {
    std::vector<std::vector<MatrixXcd>> trajectories;

    int n_traj() const { return static_cast<int>(trajectories.size()); }
    int t_len() const { return trajectories.empty() ? 0 : static_cast<int>(trajectories[0].size()); }
};

inline GaussianEnsemble evolve_gaussian_ensemble(const LadderParams& params,
                                                 const CorrelationMatrix& initial, int n_traj,
                                                 int t_max, std::uint64_t seed) {
    GaussianEnsemble ens;
    ens.trajectories.resize(static_cast<std::size_t>(n_traj));
    const Propagator prop = propagator(params);
    const MatrixXcd r = prop.u.conjugate();
    MatrixXcd scratch(initial.d.rows(), initial.d.cols());
    for (int alpha = 0; alpha < n_traj; ++alpha) {
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(alpha)}));
        CorrelationMatrix state = initial;
        auto& series = ens.trajectories[static_cast<std::size_t>(alpha)];
        series.reserve(static_cast<std::size_t>(t_max) + 1);
        series.push_back(inner_chain_matrix(state));
        for (int t = 1; t <= t_max; ++t) {
            evolve_inplace(state, r, scratch);
            measure_outer_chain(state, params.p, rng, t);
            series.push_back(inner_chain_matrix(state));
        }
    }
    return ens;
}

struct DistanceSeries {
    std::vector<int> times;
    std::vector<double> values;
};

// d2(t) = sqrt(T11 + T22 - 2*T12) with T_ab the double trajectory average of
// Tr(rho_a rho_b); small negative radicands from cancellation are clamped.
inline DistanceSeries quadratic_distance_series(const GaussianEnsemble& ens_a,
                                                const GaussianEnsemble& ens_b) {
    gaussian_product_trace_selftest();
    if (ens_a.n_traj() == 0 || ens_b.n_traj() == 0 || ens_a.t_len() != ens_b.t_len())
        throw parameter_error("quadratic_distance_series: mismatched ensembles");
    const int t_len = ens_a.t_len();
    const int na = ens_a.n_traj();
    const int nb = ens_b.n_traj();
    DistanceSeries out;
    out.times.resize(static_cast<std::size_t>(t_len));
    out.values.resize(static_cast<std::size_t>(t_len));
    for (int t = 0; t < t_len; ++t) {
        double t11 = 0.0, t22 = 0.0, t12 = 0.0;
        for (int x = 0; x < na; ++x) {
            t11 += gaussian_product_trace(ens_a.trajectories[x][t], ens_a.trajectories[x][t]);
            for (int y = x + 1; y < na; ++y)
                t11 += 2.0 * gaussian_product_trace(ens_a.trajectories[x][t],
                                                    ens_a.trajectories[y][t]);
        }
        for (int x = 0; x < nb; ++x) {
            t22 += gaussian_product_trace(ens_b.trajectories[x][t], ens_b.trajectories[x][t]);
            for (int y = x + 1; y < nb; ++y)
                t22 += 2.0 * gaussian_product_trace(ens_b.trajectories[x][t],
                                                    ens_b.trajectories[y][t]);
        }
        for (int x = 0; x < na; ++x)
            for (int y = 0; y < nb; ++y)
                t12 += gaussian_product_trace(ens_a.trajectories[x][t], ens_b.trajectories[y][t]);
        t11 /= static_cast<double>(na) * na;
        t22 /= static_cast<double>(nb) * nb;
        t12 /= static_cast<double>(na) * nb;
        double radicand = t11 + t22 - 2.0 * t12;
        if (radicand < -1e-10)
            throw numeric_error("quadratic_distance_series: negative radicand " +
                                std::to_string(radicand));
        if (radicand < 0.0) radicand = 0.0;
        out.times[static_cast<std::size_t>(t)] = t;
        out.values[static_cast<std::size_t>(t)] = std::sqrt(radicand);
    }
    return out;
}

inline double n_measure_quadratic(const std::vector<DistanceSeries>& pair_series) {
    if (pair_series.empty()) throw parameter_error("n_measure_quadratic: no series");
    double best = 0.0;
    for (const auto& s : pair_series) best = std::max(best, positive_increment_sum(s.values));
    return best;
}

// Two distinct random half-filled occupation patterns as Gaussian initial
// conditions for the quadratic-distance pipeline.
inline std::pair<CorrelationMatrix, CorrelationMatrix> sample_gaussian_pair(Rng& rng, int L) {
    CorrelationMatrix c1 = init_random_halffilling(L, rng);
    CorrelationMatrix c2 = init_random_halffilling(L, rng);
    int guard = 0;
    while ((c1.d - c2.d).norm() < 1e-12 && guard++ < 64) c2 = init_random_halffilling(L, rng);
    return {std::move(c1), std::move(c2)};
}

}  // namespace ladder::ed
