#pragma once

// Entanglement diagnostics computed from reduced correlation matrices.
// All values are in nats.
//
// For the fermionic logarithmic negativity of a bipartition A u B of the
// inner chain, let Gamma = 2*D_sys - 1 with blocks ordered A before B, and
//
//     Gamma_pm = [[Gamma_AA, +-i*Gamma_AB], [+-i*Gamma_BA, -Gamma_BB]],
//     Gamma_x  = (1/2) * [1 - (1 + Gamma_+ Gamma_-)^{-1} (Gamma_+ + Gamma_-)],
//
// then E = sum_j ln(sqrt(mu_j) + sqrt(1-mu_j)) + (1/2) sum_j ln(1-2*lam_j+2*lam_j^2)
// with mu_j the eigenvalues of Gamma_x and lam_j those of D_sys. The identity
// holds for particle-number-conserving states, where <c c> pairings vanish.

#include <algorithm>
#include <cmath>
#include <vector>

#include "ladder/common.hpp"
#include "ladder/gaussian_state.hpp"

namespace ladder {

struct Partition {
    std::vector<int> a1;  // inner-chain sites
    std::vector<int> a2;  // may be empty (plain bipartition)
    int L = 0;

    void validate() const {
        for (int s : a1)
            if (s < 0 || s >= L) throw parameter_error("Partition: a1 site out of range");
        for (int s : a2)
            if (s < 0 || s >= L) throw parameter_error("Partition: a2 site out of range");
        for (int s : a1)
            if (std::find(a2.begin(), a2.end(), s) != a2.end())
                throw parameter_error("Partition: a1 and a2 overlap");
    }

    static Partition arc(int start, int len, int L) {
        Partition p;
        p.L = L;
        for (int i = 0; i < len; ++i) p.a1.push_back((start + i) % L);
        return p;
    }

    static Partition two_arcs(int start1, int len1, int start2, int len2, int L) {
        Partition p = arc(start1, len1, L);
        for (int i = 0; i < len2; ++i) p.a2.push_back((start2 + i) % L);
        p.validate();
        return p;
    }
};

inline std::vector<double> occupation_spectrum(const MatrixXcd& dr) {
    if (hermiticity_defect(dr) > 1e-8)
        throw numeric_error("occupation_spectrum: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(dr, Eigen::EigenvaluesOnly);
    std::vector<double> lams(solver.eigenvalues().size());
    for (Eigen::Index j = 0; j < solver.eigenvalues().size(); ++j)
        lams[static_cast<std::size_t>(j)] = clip_occupation(solver.eigenvalues()(j));
    return lams;
}

inline double binary_entropy(double lam) {
    double s = 0.0;
    if (lam > 0.0) s -= lam * std::log(lam);
    if (lam < 1.0) s -= (1.0 - lam) * std::log(1.0 - lam);
    return s;
}

inline double von_neumann_entropy(const MatrixXcd& dr) {
    double s = 0.0;
    for (double lam : occupation_spectrum(dr)) s += binary_entropy(lam);
    return s;
}

// Renyi index 1/2:  S_{1/2} = 2 * sum_j ln(sqrt(lam_j) + sqrt(1-lam_j)).
// Equals the negativity of A for globally pure states; used as a cross-check.
inline double renyi_half_entropy(const MatrixXcd& dr) {
    double s = 0.0;
    for (double lam : occupation_spectrum(dr))
        s += 2.0 * std::log(std::sqrt(lam) + std::sqrt(1.0 - lam));
    return s;
}

inline MatrixXcd submatrix(const MatrixXcd& m, const std::vector<int>& rows,
                           const std::vector<int>& cols) {
    MatrixXcd out(rows.size(), cols.size());
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b) out(a, b) = m(rows[a], cols[b]);
    return out;
}

// I(A1:A2) = S(A1) + S(A2) - S(A1 u A2) on the inner chain, d_sys indexed by
// inner site.
inline double mutual_information(const MatrixXcd& d_sys, const Partition& part) {
    part.validate();
    if (part.a1.empty() || part.a2.empty())
        throw parameter_error("mutual_information: both segments must be nonempty");
    std::vector<int> joint = part.a1;
    joint.insert(joint.end(), part.a2.begin(), part.a2.end());
    const double s1 = von_neumann_entropy(submatrix(d_sys, part.a1, part.a1));
    const double s2 = von_neumann_entropy(submatrix(d_sys, part.a2, part.a2));
    const double s12 = von_neumann_entropy(submatrix(d_sys, joint, joint));
    return s1 + s2 - s12;
}

// Fermionic logarithmic negativity of segment a against the rest of the inner
// chain. d_sys must be the reduced correlation matrix of the whole inner
// chain; partial bipartitions of a sub-segment are rejected.
inline double fermionic_negativity(const MatrixXcd& d_sys, const std::vector<int>& a_sites) {
    const int n = static_cast<int>(d_sys.rows());
    if (a_sites.empty() || static_cast<int>(a_sites.size()) >= n)
        throw parameter_error("fermionic_negativity: A must be a nonempty proper subset");
    std::vector<bool> in_a(n, false);
    for (int s : a_sites) {
        if (s < 0 || s >= n) throw parameter_error("fermionic_negativity: site out of range");
        if (in_a[s]) throw parameter_error("fermionic_negativity: duplicate site");
        in_a[s] = true;
    }
    // Index map: A sites first, then B, no copy of the source state.
    std::vector<int> order;
    order.reserve(n);
    for (int s : a_sites) order.push_back(s);
    for (int s = 0; s < n; ++s)
        if (!in_a[s]) order.push_back(s);
    const int na = static_cast<int>(a_sites.size());

    MatrixXcd gamma = submatrix(d_sys, order, order);
    gamma = 2.0 * gamma - MatrixXcd::Identity(n, n);

    const complexd iu(0.0, 1.0);
    MatrixXcd gp(n, n), gm(n, n);
    gp.topLeftCorner(na, na) = gamma.topLeftCorner(na, na);
    gp.bottomRightCorner(n - na, n - na) = -gamma.bottomRightCorner(n - na, n - na);
    gp.topRightCorner(na, n - na) = iu * gamma.topRightCorner(na, n - na);
    gp.bottomLeftCorner(n - na, na) = iu * gamma.bottomLeftCorner(n - na, na);
    gm = gp;
    gm.topRightCorner(na, n - na) = -gp.topRightCorner(na, n - na);
    gm.bottomLeftCorner(n - na, na) = -gp.bottomLeftCorner(n - na, na);

    MatrixXcd denom = MatrixXcd::Identity(n, n) + gp * gm;
    Eigen::PartialPivLU<MatrixXcd> lu(denom);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-12))
        throw numeric_error("fermionic_negativity: 1+G+G- ill-conditioned, rcond=" +
                            std::to_string(rcond));
    MatrixXcd gx = 0.5 * (MatrixXcd::Identity(n, n) - lu.solve(gp + gm));

    Eigen::ComplexEigenSolver<MatrixXcd> solver(gx, /*computeEigenvectors=*/false);
    double e = 0.0;
    for (Eigen::Index j = 0; j < solver.eigenvalues().size(); ++j) {
        const complexd mu = solver.eigenvalues()(j);
        if (std::abs(mu.imag()) > 1e-8)
            throw numeric_error("fermionic_negativity: complex Gamma_x eigenvalue");
        double m = mu.real();
        if (m < -1e-8 || m > 1.0 + 1e-8)
            throw numeric_error("fermionic_negativity: Gamma_x eigenvalue out of [0,1]");
        m = std::min(1.0, std::max(0.0, m));
        e += std::log(std::sqrt(m) + std::sqrt(1.0 - m));
    }
    for (double lam : occupation_spectrum(d_sys))
        e += 0.5 * std::log(1.0 - 2.0 * lam + 2.0 * lam * lam);
    return e;
}

inline double fermionic_negativity_arc(const MatrixXcd& d_sys, int len) {
    std::vector<int> a(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i) a[static_cast<std::size_t>(i)] = i;
    return fermionic_negativity(d_sys, a);
}

}  // namespace ladder
