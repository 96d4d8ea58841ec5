#pragma once

// Shared conventions for the whole library.
//
// Mode indexing: the ladder has L rungs and two chains. Chain 0 is the
// inner (system) chain, chain 1 is the outer (bath) chain. A single-particle
// mode is addressed as
//
//     mode(site, chain) = 2*site + chain,   site in 0..L-1, chain in {0,1}
//
// i.e. row-major over (site, chain) with the chain index fastest. Every
// matrix in the library (Hamiltonians, propagators, correlation matrices,
// Fock-space operator orderings) uses this layout.
//
// Momentum grid: k_m = 2*pi*m/L, m = 0..L-1 (periodic boundary conditions).
// All entropies and negativities are reported in nats.

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ladder {

using complexd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

// Invalid arguments, dimension mismatches, out-of-range sites.
struct parameter_error : std::invalid_argument {
    explicit parameter_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Numerical-health violations (lost Hermiticity, eigenvalues out of range,
// degenerate measurement branches, conditioning failures).
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested exact-diagonalization size exceeds what fits in memory.
struct capacity_error : std::runtime_error {
    explicit capacity_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed configuration files; carries the offending key path in the message.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

inline int mode_index(int site, int chain) { return 2 * site + chain; }

inline int inner_mode(int site) { return mode_index(site, 0); }
inline int outer_mode(int site) { return mode_index(site, 1); }

inline double frobenius_norm(const MatrixXcd& m) { return m.norm(); }

inline double hermiticity_defect(const MatrixXcd& m) {
    return (m - m.adjoint()).norm();
}

// Clips a correlation-matrix eigenvalue to [0,1]. Deviations inside the
// roundoff window are silently clipped; anything larger signals upstream
// corruption and throws.
inline double clip_occupation(double lambda, double roundoff_window = 1e-9,
                              double hard_window = 1e-6) {
    if (lambda < -hard_window || lambda > 1.0 + hard_window)
        throw numeric_error("occupation eigenvalue out of range: " + std::to_string(lambda));
    (void)roundoff_window;
    if (lambda < 0.0) return 0.0;
    if (lambda > 1.0) return 1.0;
    return lambda;
}

}  // namespace ladder
