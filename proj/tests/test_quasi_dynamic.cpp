#include "doctest.h"

#include "qdvqe/errors.hpp"
#include "qdvqe/quasi_dynamic.hpp"

using namespace qdvqe;

namespace {

struct Instance {
    PauliSum h;
    AnsatzCircuit circuit;
    StateVector init;
    GroundSpace oracle;
};

Instance heisenberg_chain(int n, int layers) {
    Instance in{build_heisenberg(LatticeSpec::chain(n), {}), build_heisenberg_ansatz(n, layers), neel_state(n), {}};
    in.oracle = ground_space(in.h);
    return in;
}

StepRecord evals(int n) {
    StepRecord s;
    s.cost_evals = s.grad_evals = n;
    return s;
}

}  // namespace

TEST_CASE("evaluation totals") {
    OptimizationTrace t;
    t.final = evals(40);
    CHECK(count_report(t) == EvalTotals{40, 40});
    t.steps = {evals(10), evals(10), evals(10)};
    t.final = evals(20);
    CHECK(count_report(t) == EvalTotals{50, 50});
}

TEST_CASE("an empty circuit reports the initial state") {
    const Instance in = heisenberg_chain(4, 1);
    const VqeResult r = run_standard_vqe(in.h, AnsatzCircuit(), in.init, 1e-5, in.oracle);
    CHECK(r.energy == doctest::Approx(expectation(in.init, in.h)));
    CHECK(r.fidelity == doctest::Approx(fidelity(in.init, in.oracle)));
    CHECK(r.trace.steps.empty());
    CHECK(r.params.empty());
}

TEST_CASE("standard VQE on a short Heisenberg chain") {
    const Instance in = heisenberg_chain(4, 1);
    const VqeResult r = run_standard_vqe(in.h, in.circuit, in.init, 1e-5, in.oracle);
    CHECK(r.trace.steps.empty());
    CHECK(r.trace.final.step == 0);
    CHECK(r.trace.final.initial_energy == doctest::Approx(-3.0));
    CHECK(r.energy >= in.oracle.energy - 1e-9);
    CHECK(r.fidelity > 0.99);
    CHECK(r.params.size() == 12);
    CHECK(count_report(r.trace).cost_evals == r.trace.final.cost_evals);
}

TEST_CASE("quasi-dynamic traces") {
    const Instance in = heisenberg_chain(6, 2);
    const Schedule schedule = make_schedule(in.circuit, 3);
    REQUIRE(schedule.blocks.size() == 6);
    const VqeResult r = run_quasi_dynamic(in.h, in.circuit, schedule, in.init, in.oracle);
    REQUIRE(r.trace.steps.size() == 6);
    double previous = expectation(in.init, in.h);
    for (std::size_t t = 0; t < r.trace.steps.size(); ++t) {
        const StepRecord& s = r.trace.steps[t];
        CHECK(s.step == static_cast<int>(t + 1));
        CHECK(s.param_count == schedule.blocks[t].param_count());
        CHECK(std::abs(s.initial_energy - previous) < 1e-9);
        CHECK(s.final_energy <= s.initial_energy + 1e-9);
        CHECK(s.final_energy >= in.oracle.energy - 1e-9);
        CHECK(s.fidelity >= 0.0);
        CHECK(s.fidelity <= 1.0);
        previous = s.final_energy;
    }
    CHECK(std::abs(r.trace.final.initial_energy - previous) < 1e-9);
    CHECK(r.energy <= previous + 1e-9);
    CHECK(r.energy >= in.oracle.energy - 1e-9);
    const EvalTotals totals = count_report(r.trace);
    long sum = r.trace.final.cost_evals;
    for (const auto& s : r.trace.steps) {
        sum += s.cost_evals;
    }
    CHECK(totals.cost_evals == sum);

    // The final parameters reproduce the reported energy.
    StateVector psi = in.init;
    apply_circuit(psi, in.circuit.gates(), r.params);
    CHECK(std::abs(expectation(psi, in.h) - r.energy) < 1e-10);
}

TEST_CASE("a single block is the standard VQE") {
    const Instance in = heisenberg_chain(5, 1);
    Schedule one;
    one.blocks = {AnsatzBlock{0, in.circuit.size()}};
    const VqeResult q = run_quasi_dynamic(in.h, in.circuit, one, in.init, in.oracle);
    const VqeResult s = run_standard_vqe(in.h, in.circuit, in.init, 1e-5, in.oracle);
    CHECK(std::abs(q.energy - s.energy) < 1e-9);
    CHECK(count_report(q.trace) == count_report(s.trace));
    CHECK(q.params == s.params);
}

TEST_CASE("runs are deterministic") {
    const Instance in = heisenberg_chain(5, 2);
    const Schedule schedule = make_schedule(in.circuit, 2);
    const VqeResult a = run_quasi_dynamic(in.h, in.circuit, schedule, in.init, in.oracle);
    const VqeResult b = run_quasi_dynamic(in.h, in.circuit, schedule, in.init, in.oracle);
    CHECK(a.params == b.params);
    CHECK(a.energy == b.energy);
    CHECK(count_report(a.trace) == count_report(b.trace));
}

TEST_CASE("schedules must tile the circuit") {
    const Instance in = heisenberg_chain(3, 1);
    Schedule gap;
    gap.blocks = {AnsatzBlock{0, 2}, AnsatzBlock{3, 6}};
    CHECK_THROWS_AS(run_quasi_dynamic(in.h, in.circuit, gap, in.init, in.oracle), ContractViolation);
    Schedule short_;
    short_.blocks = {AnsatzBlock{0, 2}, AnsatzBlock{2, 5}};
    CHECK_THROWS_AS(run_quasi_dynamic(in.h, in.circuit, short_, in.init, in.oracle), ContractViolation);
}

TEST_CASE("HVA from a real initial state is stationary at zero parameters") {
    // Real generators, a real Hamiltonian and a real start make E(theta) even,
    // so the gradient at the zero initialization vanishes identically.
    const auto dimer = LatticeSpec::chain(2);
    const HubbardParams p{1.0, 4.0, 1, 1};
    const PauliSum h = build_hubbard(dimer, p);
    const AnsatzCircuit c = build_hva(group_hubbard_terms(h, dimer), 1);
    const StateVector init = noninteracting_ground_state(dimer, p);
    const auto eg = adjoint_gradient(init, c.gates(), std::vector<double>(c.size(), 0.0), h);
    for (double g : eg.grad) {
        CHECK(g == 0.0);
    }
    OracleOptions opts;
    opts.sector = Sector{{{0b0011, 1}, {0b1100, 1}}};
    const VqeResult r = run_standard_vqe(h, c, init, 1e-5, ground_space(h, opts));
    CHECK(r.trace.final.cost_evals == 1);
    CHECK(r.energy == doctest::Approx(0.0));
    CHECK(r.fidelity == doctest::Approx(0.8535533905932737));
}
