#include <bit>
#include <random>

#include "doctest.h"

#include "dense_oracle.hpp"
#include "qdvqe/ansatz.hpp"
#include "qdvqe/errors.hpp"
#include "qdvqe/oracle.hpp"

using namespace qdvqe;

namespace {

StateVector random_state(int n, std::mt19937_64& rng, const Sector* sector = nullptr) {
    std::normal_distribution<double> g;
    std::vector<Complex> amps(std::size_t{1} << n);
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (!sector || sector->contains(i)) {
            amps[i] = {g(rng), g(rng)};
        }
    }
    StateVector s(n, amps);
    s.normalize();
    return s;
}

Sector hubbard_sector(const LatticeSpec& lattice, int n_up, int n_down) {
    return Sector{{{spin_sector_mask(lattice, Spin::Up), n_up}, {spin_sector_mask(lattice, Spin::Down), n_down}}};
}

/// Mixes the ground basis with a random unitary.
GroundSpace remix(const GroundSpace& gs, std::mt19937_64& rng) {
    const int m = gs.multiplicity();
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            a(i, j) = {g(rng), g(rng)};
        }
    }
    const Eigen::MatrixXcd u = Eigen::HouseholderQR<Eigen::MatrixXcd>(a).householderQ();
    GroundSpace out{gs.energy, {}};
    for (int k = 0; k < m; ++k) {
        std::vector<Complex> amps(gs.basis[0].dim());
        for (int j = 0; j < m; ++j) {
            for (std::size_t i = 0; i < amps.size(); ++i) {
                amps[i] += u(j, k) * gs.basis[j][i];
            }
        }
        out.basis.emplace_back(gs.basis[0].n_qubits(), amps);
    }
    return out;
}

}  // namespace

TEST_CASE("sectors") {
    const Sector s{{{0b0011, 1}, {0b1100, 2}}};
    CHECK(s.contains(0b1101));
    CHECK_FALSE(s.contains(0b1111));
    CHECK(s.basis(4) == std::vector<std::uint64_t>{0b1101, 0b1110});
}

TEST_CASE("small exact ground states") {
    const auto dimer = LatticeSpec::chain(2);
    OracleOptions opts;
    opts.sector = hubbard_sector(dimer, 1, 1);
    const GroundSpace gs = ground_space(build_hubbard(dimer, HubbardParams{1, 4, 1, 1}), opts);
    CHECK(gs.energy == doctest::Approx(-0.8284271247461903).epsilon(1e-12));
    CHECK(gs.multiplicity() == 1);
    CHECK(fidelity(gs.basis[0], gs) == doctest::Approx(1.0));

    const GroundSpace singlet = ground_space(build_heisenberg(dimer, {}));
    CHECK(singlet.energy == doctest::Approx(-3.0));
    CHECK(singlet.multiplicity() == 1);
    CHECK(fidelity(StateVector::basis(2, 0), singlet) == doctest::Approx(0.0));
    CHECK(fidelity(StateVector::basis(2, 1), singlet) == doctest::Approx(0.5));
}

TEST_CASE("three-site Heisenberg chain has a degenerate ground doublet") {
    const PauliSum h = build_heisenberg(LatticeSpec::chain(3), {});
    const Eigen::VectorXd ev = oracle::spectrum(oracle::Matrix(to_dense(h)));
    CHECK(ev(0) == doctest::Approx(-4.0));
    CHECK(ev(1) == doctest::Approx(-4.0));
    CHECK(ev(2) > -4.0 + 1e-6);
    for (OracleMethod m : {OracleMethod::Dense, OracleMethod::Lanczos}) {
        OracleOptions opts;
        opts.method = m;
        const GroundSpace gs = ground_space(h, opts);
        CHECK(gs.energy == doctest::Approx(-4.0));
        CHECK(gs.multiplicity() == 2);
        for (const auto& a : gs.basis) {
            for (const auto& b : gs.basis) {
                const double expect = &a == &b ? 1.0 : 0.0;
                CHECK(std::abs(inner(a, b) - Complex(expect)) < 1e-10);
            }
        }
    }
}

TEST_CASE("fidelity is invariant under recombination of a degenerate basis") {
    std::mt19937_64 rng(99);
    for (const PauliSum& h : {build_heisenberg(LatticeSpec::chain(3), {}), build_heisenberg(LatticeSpec::kagome(9), {})}) {
        const GroundSpace gs = ground_space(h);
        REQUIRE(gs.multiplicity() >= 2);
        for (int trial = 0; trial < 5; ++trial) {
            const GroundSpace mixed = remix(gs, rng);
            StateVector s = random_state(h.n_qubits(), rng);
            // Give the probe a large ground-space component too.
            for (std::size_t i = 0; i < s.dim(); ++i) {
                s[i] += 3.0 * gs.basis[trial % gs.multiplicity()][i];
            }
            s.normalize();
            CHECK(std::abs(fidelity(s, gs) - fidelity(s, mixed)) < 1e-10);
        }
    }
}

TEST_CASE("ground energy bounds random expectation values") {
    std::mt19937_64 rng(1);
    const auto chain = LatticeSpec::chain(3);
    const PauliSum h = build_hubbard(chain, HubbardParams{1, 4, 1, 2});
    const GroundSpace gs = ground_space(h);
    CHECK(gs.energy == doctest::Approx(oracle::spectrum(oracle::Matrix(to_dense(h)))(0)).epsilon(1e-12));
    for (int i = 0; i < 100; ++i) {
        CHECK(expectation(random_state(6, rng), h) >= gs.energy - 1e-12);
    }
}

TEST_CASE("dense and Lanczos paths agree") {
    std::mt19937_64 rng(4);
    struct Case {
        PauliSum h;
        std::optional<Sector> sector;
    };
    const auto rect = LatticeSpec::rectangle(2, 3);
    const auto seven = LatticeSpec::chain(7);
    std::vector<Case> cases{
        {build_hubbard(rect, HubbardParams{1, 4, 3, 3}), hubbard_sector(rect, 3, 3)},
        {build_hubbard(seven, HubbardParams{1, 4, 3, 3}), hubbard_sector(seven, 3, 3)},
        {build_heisenberg(LatticeSpec::chain(12), {}), Sector{{{0xfff, 6}}}},
        {build_heisenberg(LatticeSpec::chain(13), {}), Sector{{{0x1fff, 6}}}},
    };
    for (const auto& c : cases) {
        OracleOptions dense, lanczos;
        dense.sector = lanczos.sector = c.sector;
        dense.method = OracleMethod::Dense;
        lanczos.method = OracleMethod::Lanczos;
        const GroundSpace a = ground_space(c.h, dense);
        const GroundSpace b = ground_space(c.h, lanczos);
        CHECK(std::abs(a.energy - b.energy) < 1e-8);
        CHECK(a.multiplicity() == b.multiplicity());
        for (int k = 0; k < 3; ++k) {
            const StateVector s = random_state(c.h.n_qubits(), rng, &*c.sector);
            CHECK(std::abs(fidelity(s, a) - fidelity(s, b)) < 1e-6);
        }
        // A ground vector of one path is fully inside the other's ground space.
        CHECK(fidelity(a.basis[0], b) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("oracle errors") {
    CHECK_THROWS_AS(ground_space(PauliSum::from_text("(0,1) XZ\n")), ContractViolation);
    OracleOptions opts;
    opts.sector = Sector{{{0b11, 3}}};
    CHECK_THROWS_AS(ground_space(PauliSum::from_text("1 ZZ\n"), opts), ContractViolation);
    const GroundSpace gs = ground_space(PauliSum::from_text("1 ZZ\n"));
    CHECK(gs.multiplicity() == 2);
    CHECK_THROWS_AS(fidelity(StateVector(3), gs), DimensionError);
}
