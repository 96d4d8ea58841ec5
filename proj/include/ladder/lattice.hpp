#pragma once

// Two-leg fermionic ladder with periodic boundary conditions.
//
// The single-particle Hamiltonian has nearest-neighbour hopping t1 (inner
// chain), t2 (outer chain) and a same-rung coupling t12. One stroboscopic
// period tau_u of unitary evolution is generated by u = exp(-i*tau_u*h).
// In momentum space the problem splits into 2x2 blocks
//
//     H_k = [[2*t1*cos k, t12], [t12, 2*t2*cos k]],   k = 2*pi*m/L,
//
// whose exponential has the closed form implemented in analytic_block_unitary.
// On the line t1 = t2 the block unitary is periodic in t12 with period
// pi/tau_u up to a global sign, and the chains decouple exactly when
// t12*tau_u is a multiple of pi.

#include <cmath>

#include "ladder/common.hpp"

namespace ladder {

struct LadderParams {
    int L = 2;            // rungs
    double t1 = 1.0;      // inner-chain hopping
    double t2 = 1.0;      // outer-chain hopping
    double t12 = 0.0;     // rung hopping
    double tau_u = 1.0;   // stroboscopic period
    double p = 1.0;       // per-site measurement probability on the outer chain

    double hopping_sum() const { return t1 + t2; }
    double hopping_diff() const { return t1 - t2; }

    void validate() const {
        if (L < 2) throw parameter_error("LadderParams: L must be at least 2");
        if (tau_u <= 0.0) throw parameter_error("LadderParams: tau_u must be positive");
        if (p < 0.0 || p > 1.0) throw parameter_error("LadderParams: p must lie in [0,1]");
    }
};

struct SingleParticleHamiltonian {
    MatrixXcd h;  // 2L x 2L, Hermitian

    int num_modes() const { return static_cast<int>(h.rows()); }
};

struct Propagator {
    MatrixXcd u;  // 2L x 2L, unitary

    double unitarity_defect() const {
        return (u * u.adjoint() - MatrixXcd::Identity(u.rows(), u.cols())).norm();
    }
};

inline SingleParticleHamiltonian single_particle_hamiltonian(const LadderParams& params) {
    params.validate();
    const int L = params.L;
    MatrixXcd h = MatrixXcd::Zero(2 * L, 2 * L);
    const double hop[2] = {params.t1, params.t2};
    for (int chain = 0; chain < 2; ++chain) {
        for (int i = 0; i < L; ++i) {
            const int a = mode_index(i, chain);
            const int b = mode_index((i + 1) % L, chain);
            h(a, b) += hop[chain];
            h(b, a) += hop[chain];
        }
    }
    for (int i = 0; i < L; ++i) {
        const int a = mode_index(i, 0);
        const int b = mode_index(i, 1);
        h(a, b) += params.t12;
        h(b, a) += params.t12;
    }
    return {std::move(h)};
}

// u = exp(-i*tau*h) through the Hermitian eigendecomposition; the spectrum is
// needed elsewhere anyway and unitarity holds to roundoff.
inline Propagator propagator(const SingleParticleHamiltonian& ham, double tau) {
    if (hermiticity_defect(ham.h) > 1e-10)
        throw numeric_error("propagator: Hamiltonian is not Hermitian");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(ham.h);
    const VectorXd& eps = solver.eigenvalues();
    VectorXcd phases(eps.size());
    for (Eigen::Index j = 0; j < eps.size(); ++j)
        phases(j) = std::exp(complexd(0.0, -tau * eps(j)));
    MatrixXcd u = solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
    return {std::move(u)};
}

inline Propagator propagator(const LadderParams& params) {
    return propagator(single_particle_hamiltonian(params), params.tau_u);
}

inline Eigen::Matrix2cd momentum_block(const LadderParams& params, double k) {
    Eigen::Matrix2cd hk;
    hk << 2.0 * params.t1 * std::cos(k), params.t12,
          params.t12, 2.0 * params.t2 * std::cos(k);
    return hk;
}

// Closed-form single-period unitary on the momentum-k subspace. The
// omega -> 0 limit replaces sin(omega*tau)/omega by tau.
inline Eigen::Matrix2cd analytic_block_unitary(const LadderParams& params, double k, double tau) {
    const double t = params.hopping_sum();
    const double delta = params.hopping_diff();
    const double ck = std::cos(k);
    const double omega = std::sqrt(params.t12 * params.t12 + delta * delta * ck * ck);

    const complexd phase = std::exp(complexd(0.0, -t * ck * tau));
    Eigen::Matrix2cd gen;  // t12*sigma_x + delta*cos(k)*sigma_z
    gen << delta * ck, params.t12,
           params.t12, -delta * ck;

    double sinc;  // sin(omega*tau)/omega
    if (omega * std::abs(tau) < 1e-8) {
        const double x = omega * tau;
        sinc = tau * (1.0 - x * x / 6.0);
    } else {
        sinc = std::sin(omega * tau) / omega;
    }
    Eigen::Matrix2cd uk = std::cos(omega * tau) * Eigen::Matrix2cd::Identity()
                          - complexd(0.0, 1.0) * sinc * gen;
    return phase * uk;
}

inline double momentum_value(int m, int L) { return 2.0 * kPi * m / L; }

// Unitary change of basis from site space to (momentum, chain) space:
// rows ordered as mode(m, chain) with k_m = 2*pi*m/L, so F * h * F^dagger is
// block diagonal with 2x2 momentum blocks.
inline MatrixXcd fourier_transform_matrix(int L) {
    MatrixXcd f = MatrixXcd::Zero(2 * L, 2 * L);
    const double norm = 1.0 / std::sqrt(static_cast<double>(L));
    for (int m = 0; m < L; ++m) {
        const double k = momentum_value(m, L);
        for (int j = 0; j < L; ++j) {
            const complexd w = norm * std::exp(complexd(0.0, -k * j));
            f(mode_index(m, 0), mode_index(j, 0)) = w;
            f(mode_index(m, 1), mode_index(j, 1)) = w;
        }
    }
    return f;
}

}  // namespace ladder
