#include "qdvqe/state.hpp"

#include <bit>
#include <cmath>

#include "qdvqe/errors.hpp"

namespace qdvqe {
namespace {

constexpr Complex kIPowers[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};

void check_state_qubits(int n) {
    if (n < 1) {
        throw RangeError("a state needs at least one qubit");
    }
    if (n > kMaxStateQubits) {
        throw CapacityError("statevectors are capped at " + std::to_string(kMaxStateQubits) + " qubits");
    }
}

void require_match(int a, int b) {
    if (a != b) {
        throw DimensionError("qubit count mismatch: state has " + std::to_string(a) + ", operator has " +
                             std::to_string(b));
    }
}

inline double parity_sign(std::uint64_t bits) { return (std::popcount(bits) & 1) ? -1.0 : 1.0; }

// out += coeff * P psi
void accumulate_pauli(std::span<Complex> out, std::span<const Complex> psi, const PauliString& word, Complex coeff) {
    const std::uint64_t x = word.x_mask();
    const std::uint64_t z = word.z_mask();
    const Complex scale = coeff * kIPowers[word.y_count() % 4];
    const std::size_t dim = psi.size();
    for (std::size_t j = 0; j < dim; ++j) {
        const std::size_t src = j ^ x;
        out[j] += scale * parity_sign(z & src) * psi[src];
    }
}

}  // namespace

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
    check_state_qubits(n_qubits);
    amps_.assign(std::size_t{1} << n_qubits, Complex{0.0});
    amps_[0] = 1.0;
}

StateVector::StateVector(int n_qubits, std::vector<Complex> amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
    check_state_qubits(n_qubits);
    if (amps_.size() != (std::size_t{1} << n_qubits)) {
        throw DimensionError("amplitude count does not match 2^" + std::to_string(n_qubits));
    }
}

StateVector StateVector::basis(int n_qubits, std::uint64_t index) {
    StateVector s(n_qubits);
    if (index >= s.dim()) {
        throw RangeError("basis index out of range");
    }
    s.amps_[0] = 0.0;
    s.amps_[index] = 1.0;
    return s;
}

double StateVector::norm() const {
    double sum = 0.0;
    for (const auto& a : amps_) {
        sum += std::norm(a);
    }
    return std::sqrt(sum);
}

void StateVector::normalize() {
    const double n = norm();
    if (n == 0.0) {
        throw ContractViolation("cannot normalize the zero vector");
    }
    for (auto& a : amps_) {
        a /= n;
    }
}

Complex inner(const StateVector& bra, const StateVector& ket) {
    require_match(bra.n_qubits(), ket.n_qubits());
    Complex sum = 0.0;
    for (std::size_t i = 0; i < bra.dim(); ++i) {
        sum += std::conj(bra[i]) * ket[i];
    }
    return sum;
}

StateVector computational_basis_state(int n_qubits, std::string_view bits) {
    if (static_cast<int>(bits.size()) != n_qubits) {
        throw DimensionError("bitstring length " + std::to_string(bits.size()) + " does not match " +
                             std::to_string(n_qubits) + " qubits");
    }
    std::uint64_t index = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw ContractViolation("bitstring may only contain 0 and 1");
        }
        index = (index << 1) | static_cast<std::uint64_t>(c == '1');
    }
    return StateVector::basis(n_qubits, index);
}

ParamGate::ParamGate(const PauliString& word, double coeff, GateSign sign)
    : generator_(PauliSum::from_string(word, coeff)), sign_(sign) {
    if (generator_.empty() || !generator_.is_hermitian()) {
        throw ContractViolation("gate generator must be a nonzero hermitian Pauli word");
    }
}

ParamGate::ParamGate(const PauliSum& generator, GateSign sign) : generator_(generator), sign_(sign) {
    if (generator_.empty()) {
        throw ContractViolation("gate generator is empty");
    }
    if (!generator_.is_hermitian()) {
        throw ContractViolation("gate generator must be hermitian");
    }
    if (!generator_.is_commuting()) {
        throw ContractViolation("gate generator terms must mutually commute");
    }
}

void apply_pauli_rotation(StateVector& state, const PauliString& word, double angle) {
    require_match(state.n_qubits(), word.n_qubits());
    auto psi = state.amplitudes();
    const double c = std::cos(angle);
    const Complex minus_i_s{0.0, -std::sin(angle)};
    const std::uint64_t x = word.x_mask();
    const std::uint64_t z = word.z_mask();
    const std::size_t dim = psi.size();
    if (x == 0) {
        const Complex even = c + minus_i_s;
        const Complex odd = c - minus_i_s;
        for (std::size_t j = 0; j < dim; ++j) {
            psi[j] *= (std::popcount(z & j) & 1) ? odd : even;
        }
        return;
    }
    const Complex phase = minus_i_s * kIPowers[word.y_count() % 4];
    const std::uint64_t pivot = std::uint64_t{1} << (63 - std::countl_zero(x));
    for (std::size_t j = 0; j < dim; ++j) {
        if (j & pivot) {
            continue;
        }
        const std::size_t k = j ^ x;
        const Complex a = psi[j];
        const Complex b = psi[k];
        psi[j] = c * a + phase * parity_sign(z & k) * b;
        psi[k] = c * b + phase * parity_sign(z & j) * a;
    }
}

void apply_param_gate(StateVector& state, const ParamGate& gate, double theta) {
    require_match(state.n_qubits(), gate.n_qubits());
    const double scale = gate.sign_factor() * theta;
    for (const auto& term : gate.generator().terms()) {
        apply_pauli_rotation(state, term.word, scale * term.coeff.real());
    }
}

void apply_circuit(StateVector& state, std::span<const ParamGate> gates, std::span<const double> params) {
    if (gates.size() != params.size()) {
        throw DimensionError("circuit has " + std::to_string(gates.size()) + " gates but " +
                             std::to_string(params.size()) + " parameters were given");
    }
    for (std::size_t i = 0; i < gates.size(); ++i) {
        apply_param_gate(state, gates[i], params[i]);
    }
}

StateVector apply_pauli_sum(const PauliSum& h, const StateVector& state) {
    require_match(state.n_qubits(), h.n_qubits());
    StateVector out(state.n_qubits(), std::vector<Complex>(state.dim(), Complex{0.0}));
    for (const auto& term : h.terms()) {
        accumulate_pauli(out.amplitudes(), state.amplitudes(), term.word, term.coeff);
    }
    return out;
}

double expectation(const StateVector& state, const PauliSum& h) {
    if (!h.is_hermitian()) {
        throw ContractViolation("expectation requires a hermitian operator");
    }
    require_match(state.n_qubits(), h.n_qubits());
    auto psi = state.amplitudes();
    Complex total = 0.0;
    double weight = 0.0;
    for (const auto& term : h.terms()) {
        const std::uint64_t x = term.word.x_mask();
        const std::uint64_t z = term.word.z_mask();
        Complex sum = 0.0;
        for (std::size_t j = 0; j < psi.size(); ++j) {
            const std::size_t src = j ^ x;
            sum += std::conj(psi[j]) * parity_sign(z & src) * psi[src];
        }
        total += term.coeff * kIPowers[term.word.y_count() % 4] * sum;
        weight += std::abs(term.coeff);
    }
    if (std::abs(total.imag()) > 1e-10 * std::max(1.0, weight)) {
        throw ContractViolation("expectation value has a non-negligible imaginary part");
    }
    return total.real();
}

EnergyGradient adjoint_gradient(const StateVector& init, std::span<const ParamGate> gates,
                                std::span<const double> params, const PauliSum& h) {
    if (gates.size() != params.size()) {
        throw DimensionError("circuit has " + std::to_string(gates.size()) + " gates but " +
                             std::to_string(params.size()) + " parameters were given");
    }
    if (!h.is_hermitian()) {
        throw ContractViolation("adjoint_gradient requires a hermitian operator");
    }
    StateVector psi = init;
    apply_circuit(psi, gates, params);
    StateVector lambda = apply_pauli_sum(h, psi);

    EnergyGradient out;
    out.energy = inner(psi, lambda).real();
    out.grad.assign(gates.size(), 0.0);

    // With G_j = exp(-i s theta A), dE/dtheta_j = 2 s Im<lambda_j| A |psi_j>, where
    // psi_j is the state after gate j and lambda_j = G_{j+1}^dag ... G_L^dag H psi.
    for (std::size_t idx = gates.size(); idx-- > 0;) {
        const ParamGate& gate = gates[idx];
        const StateVector a_psi = apply_pauli_sum(gate.generator(), psi);
        out.grad[idx] = 2.0 * gate.sign_factor() * inner(lambda, a_psi).imag();
        apply_param_gate(psi, gate, -params[idx]);
        apply_param_gate(lambda, gate, -params[idx]);
    }
    return out;
}

}  // namespace qdvqe
