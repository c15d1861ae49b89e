#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace qdvqe {

using Complex = std::complex<double>;

inline constexpr int kMaxPauliQubits = 64;
inline constexpr int kMaxDenseQubits = 14;
inline constexpr double kCoefficientCutoff = 1e-12;

/// An n-qubit Pauli word with a unit phase, stored as x/z bitmasks.
///
/// Qubit k is bit k of both masks. A position with x=1, z=1 is the letter Y
/// (not XZ), so the operator represented is i^phase * P_0 (x) P_1 (x) ... .
class PauliString {
  public:
    PauliString() = default;
    explicit PauliString(int n_qubits);
    PauliString(int n_qubits, std::uint64_t x_mask, std::uint64_t z_mask, int phase = 0);

    /// Parses letters where character k is the symbol on qubit k, e.g. "XXIZ".
    /// An optional leading sign "+", "-", "+i", "-i" sets the phase.
    static PauliString from_letters(std::string_view text);

    /// Single-qubit letter (I, X, Y or Z) on one qubit of an n-qubit register.
    static PauliString single(int n_qubits, int qubit, char letter);

    int n_qubits() const noexcept { return n_qubits_; }
    std::uint64_t x_mask() const noexcept { return x_; }
    std::uint64_t z_mask() const noexcept { return z_; }
    /// Power of i, in {0,1,2,3}.
    int phase() const noexcept { return phase_; }
    Complex phase_factor() const noexcept;

    char letter(int qubit) const;
    std::string letters() const;
    /// Letters with the phase prefix, e.g. "-iXZ".
    std::string str() const;

    bool is_identity() const noexcept { return x_ == 0 && z_ == 0; }
    std::uint64_t support() const noexcept { return x_ | z_; }
    /// Number of Y letters.
    int y_count() const noexcept;

    PauliString with_phase(int phase) const;

    friend bool operator==(const PauliString& a, const PauliString& b) = default;

  private:
    int n_qubits_ = 0;
    std::uint64_t x_ = 0;
    std::uint64_t z_ = 0;
    int phase_ = 0;
};

PauliString multiply(const PauliString& a, const PauliString& b);
bool commutes(const PauliString& a, const PauliString& b);

/// One weighted word of a PauliSum. The word always has phase 0.
struct PauliTerm {
    Complex coeff;
    PauliString word;
};

/// A linear combination of Pauli words in canonical form: no repeated words,
/// no coefficient below kCoefficientCutoff, first-appearance ordering.
class PauliSum {
  public:
    PauliSum() = default;
    explicit PauliSum(int n_qubits);
    PauliSum(int n_qubits, std::vector<PauliTerm> terms);

    static PauliSum from_string(const PauliString& p, Complex coeff = 1.0);
    static PauliSum identity(int n_qubits, Complex coeff = 1.0);

    int n_qubits() const noexcept { return n_qubits_; }
    const std::vector<PauliTerm>& terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    bool empty() const noexcept { return terms_.empty(); }

    /// True when every coefficient is real (|imag| <= kCoefficientCutoff).
    bool is_hermitian() const;
    /// True when every pair of words commutes.
    bool is_commuting() const;

    PauliSum operator+(const PauliSum& other) const;
    PauliSum operator-(const PauliSum& other) const;
    PauliSum operator*(Complex scalar) const;
    PauliSum& operator+=(const PauliSum& other);

    /// Lines of "<coeff> <letters>"; real coefficients print as a plain number,
    /// complex ones as "(re,im)".
    std::string to_text() const;
    static PauliSum from_text(std::string_view text);

    friend bool operator==(const PauliSum& a, const PauliSum& b);

  private:
    void canonicalize();

    int n_qubits_ = 0;
    std::vector<PauliTerm> terms_;
};

PauliSum multiply(const PauliSum& a, const PauliSum& b);
PauliSum adjoint(const PauliSum& a);

Eigen::MatrixXcd to_dense(const PauliString& p);
Eigen::MatrixXcd to_dense(const PauliSum& p);
/// Sparse materialization, capped at 24 qubits.
Eigen::SparseMatrix<Complex> to_sparse(const PauliSum& p);

std::ostream& operator<<(std::ostream& os, const PauliString& p);

}  // namespace qdvqe
