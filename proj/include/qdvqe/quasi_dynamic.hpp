#pragma once

#include <string>
#include <vector>

#include "qdvqe/ansatz.hpp"
#include "qdvqe/bfgs.hpp"
#include "qdvqe/oracle.hpp"

namespace qdvqe {

/// Block-wise optimization plan. Blocks must tile the circuit in order.
struct Schedule {
    std::vector<AnsatzBlock> blocks;
    bool final_full_opt = true;
    double gtol = 1e-5;
    int max_iterations = 200;
};

/// Metrics of one optimization (a slicing step or the final full run).
struct StepRecord {
    int step = 0;  // 1-based slicing step; 0 for the final full optimization
    std::size_t param_count = 0;
    double initial_energy = 0.0;
    double final_energy = 0.0;
    double fidelity = 0.0;
    int cost_evals = 0;
    int grad_evals = 0;
    BfgsStatus status = BfgsStatus::Converged;
    /// Set when the optimizer stopped without meeting gtol.
    bool warning = false;
};

struct EvalTotals {
    long cost_evals = 0;
    long grad_evals = 0;
    friend bool operator==(const EvalTotals&, const EvalTotals&) = default;
};

struct OptimizationTrace {
    std::vector<StepRecord> steps;
    StepRecord final;
};

struct VqeResult {
    std::vector<double> params;
    double energy = 0.0;
    double fidelity = 0.0;
    OptimizationTrace trace;
};

/// Sums evaluations over every slicing step and the final optimization.
EvalTotals count_report(const OptimizationTrace& trace);

/// Fixed-layer VQE: all parameters start at zero and are optimized together.
VqeResult run_standard_vqe(const PauliSum& h, const AnsatzCircuit& circuit, const StateVector& init, double gtol,
                           const GroundSpace& oracle, int max_iterations = 200);

/// Quasi-dynamical VQE. Step t appends block t (parameters zero, so the state
/// is unchanged) and optimizes only that block with earlier blocks frozen at
/// their optima; afterwards every parameter is optimized from the
/// concatenated optima. A schedule whose only block is the whole circuit is
/// exactly the standard VQE.
VqeResult run_quasi_dynamic(const PauliSum& h, const AnsatzCircuit& circuit, const Schedule& schedule,
                            const StateVector& init, const GroundSpace& oracle);

/// Schedule with `slices_per_layer` blocks per layer.
Schedule make_schedule(const AnsatzCircuit& circuit, int slices_per_layer, double gtol = 1e-5);

}  // namespace qdvqe
