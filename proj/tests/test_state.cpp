#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "dense_oracle.hpp"
#include "qdvqe/ansatz.hpp"
#include "qdvqe/errors.hpp"
#include "qdvqe/state.hpp"

using namespace qdvqe;

namespace {

Eigen::VectorXcd vec(const StateVector& s) {
    Eigen::VectorXcd v(s.dim());
    for (std::size_t i = 0; i < s.dim(); ++i) {
        v(i) = s[i];
    }
    return v;
}

StateVector random_state(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::vector<Complex> amps(std::size_t{1} << n);
    for (auto& a : amps) {
        a = {g(rng), g(rng)};
    }
    StateVector s(n, amps);
    s.normalize();
    return s;
}

double max_diff(const StateVector& a, const StateVector& b) {
    return (vec(a) - vec(b)).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("basis states") {
    auto s = computational_basis_state(2, "00");
    CHECK(s[0] == Complex(1));
    s = computational_basis_state(2, "10");
    CHECK(s[2] == Complex(1));
    CHECK(s[0] == Complex(0));
    s = computational_basis_state(4, "0101");
    CHECK(s[5] == Complex(1));
    CHECK_THROWS_AS(computational_basis_state(3, "01"), DimensionError);
    CHECK_THROWS_AS(StateVector(kMaxStateQubits + 1), CapacityError);
    CHECK_THROWS_AS(StateVector(2, std::vector<Complex>(3)), DimensionError);
}

TEST_CASE("single-qubit rotations") {
    StateVector s(1);
    apply_param_gate(s, ParamGate(PauliString::from_letters("Z"), 1.0, GateSign::Minus), 0.3);
    CHECK(std::abs(s[0] - std::exp(Complex(0, -0.3))) < 1e-15);
    CHECK(std::abs(s[1]) == 0.0);

    StateVector t(1);
    apply_param_gate(t, ParamGate(PauliString::from_letters("X"), 1.0, GateSign::Minus), std::numbers::pi / 2);
    CHECK(std::abs(t[0]) < 1e-15);
    CHECK(std::abs(t[1] - Complex(0, -1)) < 1e-15);

    // The Plus sign flips the rotation direction.
    StateVector u(1);
    apply_param_gate(u, ParamGate(PauliString::from_letters("X"), 1.0, GateSign::Plus), std::numbers::pi / 2);
    CHECK(std::abs(u[1] - Complex(0, 1)) < 1e-15);
}

TEST_CASE("gates match dense matrix exponentials") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(-2.0, 2.0);
    const auto chain = LatticeSpec::chain(4);
    const PauliSum h = build_hubbard(chain, HubbardParams::half_filling(chain));
    const TermGroups groups = group_hubbard_terms(h, chain);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const ParamGate gate(groups.groups[g], GateSign::Plus);
        const double theta = angle(rng);
        StateVector s = random_state(8, rng);
        const Eigen::VectorXcd expected = oracle::expm_hermitian(to_dense(groups.groups[g]), -theta) * vec(s);
        apply_param_gate(s, gate, theta);
        CHECK((vec(s) - expected).cwiseAbs().maxCoeff() < 1e-10);
    }

    // Interaction group on a basis state: a pure phase exp(+i theta E(b)).
    const PauliSum& inter = groups.groups.back();
    const oracle::Matrix d = to_dense(inter);
    for (std::uint64_t b : {0ULL, 0b00010001ULL, 0b10100101ULL}) {
        StateVector s = StateVector::basis(8, b);
        apply_param_gate(s, ParamGate(inter, GateSign::Plus), 0.37);
        CHECK(std::abs(s[b] - std::exp(Complex(0, 0.37 * d(b, b).real()))) < 1e-12);
    }

    for (const char* word : {"XYZIX", "IIZZI", "YIIIY", "ZXXZY"}) {
        const auto p = PauliString::from_letters(word);
        StateVector s = random_state(5, rng);
        const double theta = angle(rng);
        const Eigen::VectorXcd expected = oracle::expm_hermitian(0.7 * oracle::pauli_matrix(word), theta) * vec(s);
        apply_param_gate(s, ParamGate(p, 0.7, GateSign::Minus), theta);
        CHECK((vec(s) - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("gate invariants") {
    std::mt19937_64 rng(3);
    const PauliSum gen = PauliSum::from_text("0.5 XXI\n0.5 YYI\n-0.3 ZZZ\n");
    const ParamGate gate(gen, GateSign::Plus);
    const StateVector in = random_state(3, rng);
    StateVector s = in;
    apply_param_gate(s, gate, 0.81);
    CHECK(std::abs(s.norm() - 1.0) < 1e-12);
    apply_param_gate(s, gate, -0.81);
    CHECK(max_diff(s, in) < 1e-12);

    // Term order inside a commuting group does not matter.
    const PauliSum reordered = PauliSum::from_text("-0.3 ZZZ\n0.5 YYI\n0.5 XXI\n");
    StateVector a = in, b = in;
    apply_param_gate(a, gate, 0.4);
    apply_param_gate(b, ParamGate(reordered, GateSign::Plus), 0.4);
    CHECK(max_diff(a, b) < 1e-12);

    CHECK_THROWS_AS(ParamGate(PauliSum::from_text("1 XI\n1 ZI\n"), GateSign::Plus), ContractViolation);
    CHECK_THROWS_AS(ParamGate(PauliSum::from_text("(0,1) XI\n"), GateSign::Plus), ContractViolation);
    CHECK_THROWS_AS(apply_param_gate(s, ParamGate(PauliString::from_letters("XX"), 1.0, GateSign::Minus), 0.1),
                    DimensionError);
}

TEST_CASE("expectation values") {
    CHECK(expectation(StateVector(1), PauliSum::from_text("1 Z\n")) == doctest::Approx(1.0));
    const PauliSum heis = build_heisenberg(LatticeSpec::chain(4), {});
    CHECK(expectation(neel_state(4), heis) == doctest::Approx(-3.0));

    std::mt19937_64 rng(5);
    const PauliSum h = build_hubbard(LatticeSpec::chain(3), HubbardParams{1.0, 2.0, 1, 1});
    const StateVector s = random_state(6, rng);
    const Eigen::VectorXcd v = vec(s);
    const double dense = (v.adjoint() * to_dense(h) * v)(0, 0).real();
    CHECK(std::abs(expectation(s, h) - dense) < 1e-10);
    CHECK((vec(apply_pauli_sum(h, s)) - to_dense(h) * v).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(expectation(s, PauliSum::from_text("(0,1) XIIIII\n")), ContractViolation);
}

TEST_CASE("adjoint gradient of a single gate") {
    const std::vector<ParamGate> gates{ParamGate(PauliString::from_letters("X"), 1.0, GateSign::Minus)};
    const PauliSum z = PauliSum::from_text("1 Z\n");
    for (double theta : {0.0, 0.3, -1.1}) {
        const std::vector<double> p{theta};
        const auto eg = adjoint_gradient(StateVector(1), gates, p, z);
        CHECK(eg.energy == doctest::Approx(std::cos(2 * theta)).epsilon(1e-14));
        CHECK(eg.grad[0] == doctest::Approx(-2 * std::sin(2 * theta)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(adjoint_gradient(StateVector(1), gates, std::vector<double>{}, z), DimensionError);
}

TEST_CASE("adjoint gradient matches central differences") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> angle(-1.0, 1.0);

    const auto chain = LatticeSpec::chain(3);
    const HubbardParams hp{1.0, 4.0, 1, 1};
    const PauliSum hh = build_hubbard(chain, hp);
    const AnsatzCircuit hva = build_hva(group_hubbard_terms(hh, chain), 2);
    const StateVector hinit = noninteracting_ground_state(chain, hp);

    const PauliSum hs = build_heisenberg(LatticeSpec::chain(5), {});
    const AnsatzCircuit heis = build_heisenberg_ansatz(5, 1);
    const StateVector sinit = neel_state(5);

    for (int trial = 0; trial < 10; ++trial) {
        for (auto [h, circuit, init] : {std::tuple{&hh, &hva, &hinit}, std::tuple{&hs, &heis, &sinit}}) {
            std::vector<double> p(circuit->size());
            for (auto& x : p) {
                x = angle(rng);
            }
            const auto eg = adjoint_gradient(*init, circuit->gates(), p, *h);
            StateVector psi = *init;
            apply_circuit(psi, circuit->gates(), p);
            CHECK(std::abs(eg.energy - expectation(psi, *h)) < 1e-10);
            for (std::size_t j = 0; j < p.size(); ++j) {
                auto energy_at = [&](double delta) {
                    std::vector<double> q = p;
                    q[j] += delta;
                    StateVector s = *init;
                    apply_circuit(s, circuit->gates(), q);
                    return expectation(s, *h);
                };
                const double fd = (energy_at(1e-5) - energy_at(-1e-5)) / 2e-5;
                CHECK(std::abs(eg.grad[j] - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
            }
        }
    }
}
