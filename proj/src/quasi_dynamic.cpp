#include "qdvqe/quasi_dynamic.hpp"

#include "qdvqe/errors.hpp"

namespace qdvqe {
namespace {

Objective energy_objective(const PauliSum& h, std::span<const ParamGate> gates, const StateVector& init) {
    return [&h, gates, &init](std::span<const double> params) {
        EnergyGradient eg = adjoint_gradient(init, gates, params, h);
        return ValueGrad{eg.energy, std::move(eg.grad)};
    };
}

StepRecord record_from(const BfgsResult& r, int step, double fid) {
    StepRecord rec;
    rec.step = step;
    rec.param_count = r.x.size();
    rec.initial_energy = r.initial_value;
    rec.final_energy = r.value;
    rec.fidelity = fid;
    rec.cost_evals = r.cost_evals;
    rec.grad_evals = r.grad_evals;
    rec.status = r.status;
    rec.warning = r.status != BfgsStatus::Converged;
    return rec;
}

void validate_tiling(const std::vector<AnsatzBlock>& blocks, std::size_t gate_count) {
    std::size_t expected = 0;
    for (const auto& b : blocks) {
        if (b.begin != expected || b.end <= b.begin) {
            throw ContractViolation("schedule blocks must be non-empty, contiguous and ordered");
        }
        expected = b.end;
    }
    if (expected != gate_count) {
        throw ContractViolation("schedule blocks cover " + std::to_string(expected) + " of " +
                                std::to_string(gate_count) + " gates");
    }
}

}  // namespace

EvalTotals count_report(const OptimizationTrace& trace) {
    EvalTotals totals;
    for (const auto& s : trace.steps) {
        totals.cost_evals += s.cost_evals;
        totals.grad_evals += s.grad_evals;
    }
    totals.cost_evals += trace.final.cost_evals;
    totals.grad_evals += trace.final.grad_evals;
    return totals;
}

VqeResult run_standard_vqe(const PauliSum& h, const AnsatzCircuit& circuit, const StateVector& init, double gtol,
                           const GroundSpace& oracle, int max_iterations) {
    const auto& gates = circuit.gates();
    BfgsOptions opts;
    opts.gtol = gtol;
    opts.max_iterations = max_iterations;
    BfgsResult r = bfgs_minimize(energy_objective(h, gates, init), std::vector<double>(gates.size(), 0.0), opts);

    StateVector psi = init;
    apply_circuit(psi, gates, r.x);
    VqeResult out;
    out.fidelity = fidelity(psi, oracle);
    out.energy = r.value;
    out.trace.final = record_from(r, 0, out.fidelity);
    out.params = std::move(r.x);
    return out;
}

VqeResult run_quasi_dynamic(const PauliSum& h, const AnsatzCircuit& circuit, const Schedule& schedule,
                            const StateVector& init, const GroundSpace& oracle) {
    const auto& gates = circuit.gates();
    validate_tiling(schedule.blocks, gates.size());
    if (schedule.blocks.size() <= 1) {
        return run_standard_vqe(h, circuit, init, schedule.gtol, oracle, schedule.max_iterations);
    }
    BfgsOptions opts;
    opts.gtol = schedule.gtol;
    opts.max_iterations = schedule.max_iterations;

    VqeResult out;
    out.params.assign(gates.size(), 0.0);
    // State prepared by the frozen blocks so far.
    StateVector prefix = init;
    int step = 0;
    for (const auto& block : schedule.blocks) {
        ++step;
        const std::span<const ParamGate> block_gates(gates.data() + block.begin, block.param_count());
        BfgsResult r = bfgs_minimize(energy_objective(h, block_gates, prefix),
                                     std::vector<double>(block.param_count(), 0.0), opts);
        std::copy(r.x.begin(), r.x.end(), out.params.begin() + static_cast<std::ptrdiff_t>(block.begin));
        apply_circuit(prefix, block_gates, r.x);
        out.trace.steps.push_back(record_from(r, step, fidelity(prefix, oracle)));
    }
    out.energy = out.trace.steps.back().final_energy;
    out.fidelity = out.trace.steps.back().fidelity;

    if (schedule.final_full_opt) {
        BfgsResult r = bfgs_minimize(energy_objective(h, gates, init), out.params, opts);
        StateVector psi = init;
        apply_circuit(psi, gates, r.x);
        out.fidelity = fidelity(psi, oracle);
        out.energy = r.value;
        out.trace.final = record_from(r, 0, out.fidelity);
        out.params = std::move(r.x);
    }
    return out;
}

Schedule make_schedule(const AnsatzCircuit& circuit, int slices_per_layer, double gtol) {
    Schedule s;
    s.blocks = slice_circuit(circuit, slices_per_layer);
    s.gtol = gtol;
    return s;
}

}  // namespace qdvqe
