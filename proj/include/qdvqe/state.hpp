#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "qdvqe/pauli.hpp"

namespace qdvqe {

inline constexpr int kMaxStateQubits = 24;

/// Dense 2^n amplitude vector. Amplitude index bit k is qubit k.
class StateVector {
  public:
    StateVector() = default;
    /// |0...0> on n qubits.
    explicit StateVector(int n_qubits);
    StateVector(int n_qubits, std::vector<Complex> amplitudes);

    static StateVector basis(int n_qubits, std::uint64_t index);

    int n_qubits() const noexcept { return n_qubits_; }
    std::size_t dim() const noexcept { return amps_.size(); }

    std::span<Complex> amplitudes() noexcept { return amps_; }
    std::span<const Complex> amplitudes() const noexcept { return amps_; }
    Complex operator[](std::size_t i) const { return amps_[i]; }
    Complex& operator[](std::size_t i) { return amps_[i]; }

    double norm() const;
    void normalize();

  private:
    int n_qubits_ = 0;
    std::vector<Complex> amps_;
};

Complex inner(const StateVector& bra, const StateVector& ket);

/// Basis state from a binary string written most significant qubit first,
/// so the last character is qubit 0 ("10" on two qubits is index 2).
StateVector computational_basis_state(int n_qubits, std::string_view bits);

/// Sign convention of a parameterized gate: Minus is exp(-i theta G),
/// Plus is exp(+i theta G).
enum class GateSign { Minus, Plus };

/// exp(-+ i theta G) for a real-weighted single Pauli word or a sum of
/// mutually commuting words.
class ParamGate {
  public:
    ParamGate(const PauliString& word, double coeff, GateSign sign);
    /// Throws ContractViolation unless `generator` is hermitian and commuting.
    ParamGate(const PauliSum& generator, GateSign sign);

    const PauliSum& generator() const noexcept { return generator_; }
    GateSign sign() const noexcept { return sign_; }
    /// +1 for Minus, -1 for Plus: the gate is exp(-i * sign_factor * theta * G).
    double sign_factor() const noexcept { return sign_ == GateSign::Minus ? 1.0 : -1.0; }
    int n_qubits() const noexcept { return generator_.n_qubits(); }

  private:
    PauliSum generator_;
    GateSign sign_;
};

/// psi <- cos(angle) psi - i sin(angle) P psi, i.e. exp(-i angle P).
void apply_pauli_rotation(StateVector& state, const PauliString& word, double angle);

void apply_param_gate(StateVector& state, const ParamGate& gate, double theta);

void apply_circuit(StateVector& state, std::span<const ParamGate> gates, std::span<const double> params);

/// Matrix-free H|psi>.
StateVector apply_pauli_sum(const PauliSum& h, const StateVector& state);

/// <psi|H|psi> for a hermitian H.
double expectation(const StateVector& state, const PauliSum& h);

struct EnergyGradient {
    double energy = 0.0;
    std::vector<double> grad;
};

/// Energy of U(params)|init> and its exact gradient by one forward and one
/// reverse sweep over the gates.
EnergyGradient adjoint_gradient(const StateVector& init, std::span<const ParamGate> gates,
                                std::span<const double> params, const PauliSum& h);

}  // namespace qdvqe
