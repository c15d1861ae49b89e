#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "qdvqe/models.hpp"
#include "qdvqe/state.hpp"

namespace qdvqe {

/// Layered parameterized circuit; every layer repeats the same generators
/// with fresh parameters, one parameter per gate.
class AnsatzCircuit {
  public:
    AnsatzCircuit() = default;
    AnsatzCircuit(std::vector<ParamGate> layer, std::vector<std::string> layer_labels, int n_layers);

    const std::vector<ParamGate>& gates() const noexcept { return gates_; }
    std::size_t size() const noexcept { return gates_.size(); }
    std::size_t param_count() const noexcept { return gates_.size(); }
    int n_layers() const noexcept { return n_layers_; }
    std::size_t gates_per_layer() const noexcept { return per_layer_; }
    /// Index of the first gate of each layer.
    std::vector<std::size_t> layer_boundaries() const;
    int layer_of(std::size_t gate) const;
    /// Human-readable tag of a gate (group label or qubit pair).
    const std::string& label(std::size_t gate) const { return labels_[gate % per_layer_]; }

  private:
    std::vector<ParamGate> gates_;
    std::vector<std::string> labels_;
    std::size_t per_layer_ = 0;
    int n_layers_ = 0;
};

/// Contiguous gate range [begin, end) of a circuit.
struct AnsatzBlock {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t param_count() const noexcept { return end - begin; }
    friend bool operator==(const AnsatzBlock&, const AnsatzBlock&) = default;
};

/// Hamiltonian variational ansatz: per layer one exp(+i theta H_alpha) per group, in group order.
AnsatzCircuit build_hva(const TermGroups& groups, int n_layers);

/// All-to-one Heisenberg ansatz with n_sites*(n_sites-1) gates exp(-i theta Y_k X_l [Z_last]) per layer.
AnsatzCircuit build_heisenberg_ansatz(int n_sites, int n_layers);

/// Alternating |0101...> product state: odd sites carry bit 1.
StateVector neel_state(int n_sites);

/// One nearest-neighbour Givens rotation of the Slater-determinant preparation:
/// exp(-i theta (X_q Y_{q+1} - Y_q X_{q+1}) / 2).
struct GivensRotation {
    int qubit;
    double theta;
};

/// Givens network turning |1..10..0> (first `occupied` modes filled) into the
/// Slater determinant of the given orthonormal orbitals (columns).
std::vector<GivensRotation> givens_network(const Eigen::MatrixXd& orbitals);

ParamGate givens_gate(int n_qubits, int qubit);

/// Ground state of the U = 0 Hubbard model at the requested filling,
/// prepared by Givens rotations within each spin sector.
StateVector noninteracting_ground_state(const LatticeSpec& lattice, const HubbardParams& p);

/// Cuts every layer into `slices_per_layer` contiguous blocks of near-equal
/// size; earlier blocks take the remainder.
std::vector<AnsatzBlock> slice_circuit(const AnsatzCircuit& circuit, int slices_per_layer);

/// Per-gate summary for fixtures: generator text, layer index and block index.
nlohmann::json circuit_summary(const AnsatzCircuit& circuit, const std::vector<AnsatzBlock>& blocks = {});

}  // namespace qdvqe
