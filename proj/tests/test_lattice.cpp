#include <catch2/catch.hpp>

#include "ladder/lattice.hpp"
#include "oracles.hpp"

using namespace ladder;

namespace {

std::vector<double> sorted_eigenvalues(const MatrixXcd& h) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> s(h, Eigen::EigenvaluesOnly);
    std::vector<double> e(s.eigenvalues().data(), s.eigenvalues().data() + s.eigenvalues().size());
    std::sort(e.begin(), e.end());
    return e;
}

}  // namespace

TEST_CASE("single-particle Hamiltonian structure") {
    SECTION("L=2 decoupled chains: off-diagonal 2 = hop plus wrap") {
        LadderParams params{2, 1.0, 1.0, 0.0, 1.0, 1.0};
        const auto ham = single_particle_hamiltonian(params);
        REQUIRE(ham.h.rows() == 4);
        for (int chain = 0; chain < 2; ++chain) {
            const int a = mode_index(0, chain), b = mode_index(1, chain);
            CHECK(ham.h(a, b) == complexd(2.0, 0.0));
            CHECK(ham.h(a, a) == complexd(0.0, 0.0));
        }
        CHECK(ham.h(mode_index(0, 0), mode_index(0, 1)) == complexd(0.0, 0.0));
        CHECK(ham.h(mode_index(0, 0), mode_index(1, 1)) == complexd(0.0, 0.0));
    }

    SECTION("Hermitian, nearest-neighbour sparsity") {
        LadderParams params{6, 1.0, 2.5, 0.7, 1.0, 0.5};
        const auto ham = single_particle_hamiltonian(params);
        CHECK(hermiticity_defect(ham.h) < 1e-12);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) {
                const int ring = std::min((i - j + 6) % 6, (j - i + 6) % 6);
                if (ring > 1) {
                    CHECK(std::abs(ham.h(mode_index(i, 0), mode_index(j, 0))) == 0.0);
                    CHECK(std::abs(ham.h(mode_index(i, 0), mode_index(j, 1))) == 0.0);
                }
            }
    }

    SECTION("t12=0 gives chain-block-diagonal matrix") {
        LadderParams params{5, 1.0, 3.0, 0.0, 1.0, 0.0};
        const auto ham = single_particle_hamiltonian(params);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
                CHECK(std::abs(ham.h(mode_index(i, 0), mode_index(j, 1))) == 0.0);
    }

    SECTION("spectrum equals union of momentum blocks, L=4") {
        LadderParams params{4, 1.0, 1.0, 0.5, 1.0, 1.0};
        const auto dense = sorted_eigenvalues(single_particle_hamiltonian(params).h);
        std::vector<double> blocks;
        for (int m = 0; m < 4; ++m) {
            const auto e = sorted_eigenvalues(momentum_block(params, momentum_value(m, 4)));
            blocks.insert(blocks.end(), e.begin(), e.end());
        }
        std::sort(blocks.begin(), blocks.end());
        for (std::size_t i = 0; i < dense.size(); ++i)
            CHECK(dense[i] == Approx(blocks[i]).margin(1e-10));
    }

    SECTION("L < 2 rejected") {
        LadderParams params{1, 1.0, 1.0, 0.0, 1.0, 0.0};
        CHECK_THROWS_AS(single_particle_hamiltonian(params), parameter_error);
    }
}

TEST_CASE("propagator") {
    LadderParams params{4, 1.0, 1.7, 0.9, 1.0, 0.5};
    const auto ham = single_particle_hamiltonian(params);

    SECTION("tau=0 is the identity") {
        const auto prop = propagator(ham, 0.0);
        CHECK((prop.u - MatrixXcd::Identity(8, 8)).norm() < 1e-14);
    }

    SECTION("unitarity across parameter points") {
        for (double t12 : {0.0, 0.3, kPi / 2, kPi, 2.9}) {
            for (double t2 : {0.0, 1.0, 4.8}) {
                LadderParams q{6, 1.0, t2, t12, 1.0, 0.5};
                CHECK(propagator(q).unitarity_defect() < 1e-10);
            }
        }
    }

    SECTION("matches Taylor-series exponential") {
        const auto prop = propagator(ham, params.tau_u);
        const MatrixXcd ref = oracle::taylor_exponential(ham.h, params.tau_u);
        CHECK((prop.u - ref).norm() < 1e-10);
    }

    SECTION("t1=t2: shifting t12 by pi flips the global sign") {
        LadderParams a{6, 1.0, 1.0, 0.4, 1.0, 1.0};
        LadderParams b = a;
        b.t12 = a.t12 + kPi;
        const MatrixXcd ua = propagator(a).u;
        const MatrixXcd ub = propagator(b).u;
        CHECK((ua + ub).norm() < 1e-9);
    }

    SECTION("chain blocks decouple at t12*tau = n*pi with t1=t2") {
        LadderParams q{6, 1.0, 1.0, kPi, 1.0, 1.0};
        const MatrixXcd u = propagator(q).u;
        double off = 0.0;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                off += std::abs(u(mode_index(i, 0), mode_index(j, 1)));
        CHECK(off < 1e-10);
    }

    SECTION("non-Hermitian input rejected") {
        SingleParticleHamiltonian bad{MatrixXcd::Zero(4, 4)};
        bad.h(0, 1) = 1.0;
        CHECK_THROWS_AS(propagator(bad, 1.0), numeric_error);
    }
}

TEST_CASE("analytic momentum-block unitary") {
    SECTION("decoupling point: delta=0, t12=pi gives -phase * identity") {
        LadderParams params{8, 1.0, 1.0, kPi, 1.0, 1.0};
        for (double k : {0.0, 0.7, kPi / 2, 2.1}) {
            const Eigen::Matrix2cd uk = analytic_block_unitary(params, k, 1.0);
            const complexd expect = -std::exp(complexd(0.0, -2.0 * std::cos(k)));
            CHECK(std::abs(uk(0, 0) - expect) < 1e-12);
            CHECK(std::abs(uk(1, 1) - expect) < 1e-12);
            CHECK(std::abs(uk(0, 1)) < 1e-12);
            CHECK(std::abs(uk(1, 0)) < 1e-12);
        }
    }

    SECTION("t12=0, delta=0: diagonal pure phases") {
        LadderParams params{8, 1.0, 1.0, 0.0, 1.0, 1.0};
        const double k = 1.1;
        const Eigen::Matrix2cd uk = analytic_block_unitary(params, k, 1.0);
        const complexd expect = std::exp(complexd(0.0, -2.0 * std::cos(k)));
        CHECK(std::abs(uk(0, 0) - expect) < 1e-12);
        CHECK(std::abs(uk(1, 1) - expect) < 1e-12);
        CHECK(std::abs(uk(0, 1)) < 1e-14);
    }

    SECTION("generic parameters match the 2x2 matrix exponential") {
        LadderParams params{8, 1.0, 3.0, 1.2, 1.0, 1.0};
        const double k = 0.7;
        const Eigen::Matrix2cd uk = analytic_block_unitary(params, k, 1.0);
        const MatrixXcd ref = oracle::taylor_exponential(momentum_block(params, k), 1.0);
        CHECK((uk - ref).norm() < 1e-12);
    }

    SECTION("omega -> 0 limit is finite and correct") {
        LadderParams params{8, 1.0, 1.0, 0.0, 1.0, 1.0};  // delta = 0, t12 = 0
        const double k = kPi / 2;                          // cos k = 0 kills both terms
        const Eigen::Matrix2cd uk = analytic_block_unitary(params, k, 1.0);
        CHECK((uk - Eigen::Matrix2cd::Identity()).norm() < 1e-12);
    }
}

TEST_CASE("Fourier consistency of the real-space propagator") {
    LadderParams params{6, 1.0, 2.2, 0.8, 1.0, 1.0};
    const MatrixXcd u = propagator(params).u;
    const MatrixXcd f = fourier_transform_matrix(params.L);
    CHECK((f * f.adjoint() - MatrixXcd::Identity(12, 12)).norm() < 1e-12);
    const MatrixXcd uk_full = f * u * f.adjoint();
    for (int m = 0; m < params.L; ++m) {
        const Eigen::Matrix2cd expect =
            analytic_block_unitary(params, momentum_value(m, params.L), params.tau_u);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                CHECK(std::abs(uk_full(mode_index(m, a), mode_index(m, b)) - expect(a, b)) <
                      1e-10);
    }
    // Off-block elements vanish.
    double off = 0.0;
    for (int m1 = 0; m1 < params.L; ++m1)
        for (int m2 = 0; m2 < params.L; ++m2) {
            if (m1 == m2) continue;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    off = std::max(off, std::abs(uk_full(mode_index(m1, a), mode_index(m2, b))));
        }
    CHECK(off < 1e-10);
}
