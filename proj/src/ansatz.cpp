#include "qdvqe/ansatz.hpp"

#include <cmath>

#include "qdvqe/errors.hpp"

namespace qdvqe {
namespace {

constexpr double kFermiGapTolerance = 1e-9;

}  // namespace

AnsatzCircuit::AnsatzCircuit(std::vector<ParamGate> layer, std::vector<std::string> layer_labels, int n_layers)
    : labels_(std::move(layer_labels)), per_layer_(layer.size()), n_layers_(n_layers) {
    if (n_layers < 0) {
        throw ContractViolation("layer count must be non-negative");
    }
    if (labels_.size() != layer.size()) {
        throw DimensionError("one label per gate of a layer is required");
    }
    gates_.reserve(layer.size() * static_cast<std::size_t>(n_layers));
    for (int k = 0; k < n_layers; ++k) {
        gates_.insert(gates_.end(), layer.begin(), layer.end());
    }
}

std::vector<std::size_t> AnsatzCircuit::layer_boundaries() const {
    std::vector<std::size_t> out;
    for (int k = 0; k < n_layers_; ++k) {
        out.push_back(static_cast<std::size_t>(k) * per_layer_);
    }
    return out;
}

int AnsatzCircuit::layer_of(std::size_t gate) const {
    if (gate >= gates_.size()) {
        throw RangeError("gate index out of range");
    }
    return static_cast<int>(gate / per_layer_);
}

AnsatzCircuit build_hva(const TermGroups& groups, int n_layers) {
    if (groups.groups.empty()) {
        throw ContractViolation("HVA needs at least one term group");
    }
    if (n_layers < 1) {
        throw ContractViolation("HVA needs at least one layer");
    }
    std::vector<ParamGate> layer;
    std::vector<std::string> labels;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups.groups[g].empty()) {
            throw ContractViolation("HVA term group " + std::to_string(g) + " is empty");
        }
        layer.emplace_back(groups.groups[g], GateSign::Plus);
        labels.push_back(g < groups.labels.size() ? to_string(groups.labels[g]) : "group" + std::to_string(g));
    }
    return AnsatzCircuit(std::move(layer), std::move(labels), n_layers);
}

AnsatzCircuit build_heisenberg_ansatz(int n_sites, int n_layers) {
    if (n_sites < 2) {
        throw ContractViolation("the Heisenberg ansatz needs at least two sites");
    }
    if (n_layers < 1) {
        throw ContractViolation("the Heisenberg ansatz needs at least one layer");
    }
    const int last = n_sites;  // 1-based index of the pivot qubit
    auto gate = [&](int y_site, int x_site) {
        // 1-based sites map to qubits 0..n-1.
        PauliString word = multiply(PauliString::single(n_sites, y_site - 1, 'Y'),
                                    PauliString::single(n_sites, x_site - 1, 'X'));
        if (y_site != last && x_site != last) {
            word = multiply(word, PauliString::single(n_sites, last - 1, 'Z'));
        }
        return ParamGate(word, 1.0, GateSign::Minus);
    };
    std::vector<ParamGate> layer;
    std::vector<std::string> labels;
    for (int l = n_sites - 1; l >= 1; --l) {
        for (int k = n_sites; k >= l + 1; --k) {
            layer.push_back(gate(l, k));
            labels.push_back("Y" + std::to_string(l - 1) + "X" + std::to_string(k - 1));
            layer.push_back(gate(k, l));
            labels.push_back("Y" + std::to_string(k - 1) + "X" + std::to_string(l - 1));
        }
    }
    return AnsatzCircuit(std::move(layer), std::move(labels), n_layers);
}

StateVector neel_state(int n_sites) {
    std::uint64_t index = 0;
    for (int q = 1; q < n_sites; q += 2) {
        index |= std::uint64_t{1} << q;
    }
    return StateVector::basis(n_sites, index);
}

ParamGate givens_gate(int n_qubits, int qubit) {
    const PauliString xy = multiply(PauliString::single(n_qubits, qubit, 'X'), PauliString::single(n_qubits, qubit + 1, 'Y'));
    const PauliString yx = multiply(PauliString::single(n_qubits, qubit, 'Y'), PauliString::single(n_qubits, qubit + 1, 'X'));
    return ParamGate(PauliSum(n_qubits, {{0.5, xy}, {-0.5, yx}}), GateSign::Minus);
}

std::vector<GivensRotation> givens_network(const Eigen::MatrixXd& orbitals) {
    // The gate on (q, q+1) rotates mode amplitudes by [[c, -s], [s, c]].
    // Eliminate the orbital matrix from below with such rotations; the
    // preparation network is their inverses in reverse order.
    Eigen::MatrixXd m = orbitals;
    const int modes = static_cast<int>(m.rows());
    const int occupied = static_cast<int>(m.cols());
    std::vector<GivensRotation> elimination;
    for (int j = 0; j < occupied; ++j) {
        for (int p = modes - 1; p > j; --p) {
            const double a = m(p - 1, j);
            const double b = m(p, j);
            const double r = std::hypot(a, b);
            if (std::abs(b) < 1e-15 || r == 0.0) {
                continue;
            }
            const double c = a / r;
            const double s = b / r;
            for (int col = 0; col < occupied; ++col) {
                const double top = m(p - 1, col);
                const double bottom = m(p, col);
                m(p - 1, col) = c * top + s * bottom;
                m(p, col) = -s * top + c * bottom;
            }
            elimination.push_back({p - 1, std::atan2(s, c)});
        }
    }
    return {elimination.rbegin(), elimination.rend()};
}

StateVector noninteracting_ground_state(const LatticeSpec& lattice, const HubbardParams& p) {
    const int s = lattice.site_count();
    if (p.n_up < 0 || p.n_down < 0 || p.n_up > s || p.n_down > s) {
        throw ContractViolation("particle numbers must lie in [0, site count] per spin");
    }
    const Eigen::MatrixXd hop = hopping_matrix(lattice, p.t);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hop);
    const Eigen::VectorXd& energies = solver.eigenvalues();

    const int n_qubits = 2 * s;
    std::uint64_t filled = 0;
    std::vector<std::pair<int, GivensRotation>> rotations;  // (sector offset, rotation)
    for (auto [offset, count] : {std::pair{0, p.n_up}, std::pair{s, p.n_down}}) {
        if (count > 0 && count < s && std::abs(energies(count) - energies(count - 1)) < kFermiGapTolerance) {
            throw DegeneracyError("the Fermi level is degenerate at " + std::to_string(count) +
                                  " particles per spin on the " + lattice.label() +
                                  " lattice; perturb t or change the filling");
        }
        for (int k = 0; k < count; ++k) {
            filled |= std::uint64_t{1} << (offset + k);
        }
        if (count == 0) {
            continue;
        }
        for (const auto& rot : givens_network(solver.eigenvectors().leftCols(count))) {
            rotations.emplace_back(offset, rot);
        }
    }

    StateVector state = StateVector::basis(n_qubits, filled);
    for (const auto& [offset, rot] : rotations) {
        apply_param_gate(state, givens_gate(n_qubits, offset + rot.qubit), rot.theta);
    }
    return state;
}

std::vector<AnsatzBlock> slice_circuit(const AnsatzCircuit& circuit, int slices_per_layer) {
    const std::size_t per_layer = circuit.gates_per_layer();
    if (slices_per_layer < 1 || static_cast<std::size_t>(slices_per_layer) > per_layer) {
        throw RangeError("slices per layer must lie in [1, " + std::to_string(per_layer) + "], got " +
                         std::to_string(slices_per_layer));
    }
    const std::size_t slices = static_cast<std::size_t>(slices_per_layer);
    const std::size_t base = per_layer / slices;
    const std::size_t remainder = per_layer % slices;
    std::vector<AnsatzBlock> blocks;
    for (std::size_t start : circuit.layer_boundaries()) {
        std::size_t begin = start;
        for (std::size_t b = 0; b < slices; ++b) {
            const std::size_t len = base + (b < remainder ? 1 : 0);
            blocks.push_back({begin, begin + len});
            begin += len;
        }
    }
    return blocks;
}

nlohmann::json circuit_summary(const AnsatzCircuit& circuit, const std::vector<AnsatzBlock>& blocks) {
    nlohmann::json gates = nlohmann::json::array();
    std::size_t block = 0;
    for (std::size_t i = 0; i < circuit.size(); ++i) {
        while (block < blocks.size() && i >= blocks[block].end) {
            ++block;
        }
        const auto& gate = circuit.gates()[i];
        nlohmann::json g = {
            {"index", i},
            {"label", circuit.label(i)},
            {"generator", gate.generator().to_text()},
            {"sign", gate.sign() == GateSign::Minus ? "-i" : "+i"},
            {"layer", circuit.layer_of(i)},
        };
        if (!blocks.empty()) {
            g["block"] = block;
        }
        gates.push_back(std::move(g));
    }
    return {
        {"n_layers", circuit.n_layers()},
        {"gates_per_layer", circuit.gates_per_layer()},
        {"param_count", circuit.param_count()},
        {"gates", std::move(gates)},
    };
}

}  // namespace qdvqe
