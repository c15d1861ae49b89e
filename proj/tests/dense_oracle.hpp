#pragma once

// Independent reference constructions used by the tests: Kronecker-product
// Pauli matrices, a Fock-space fermionic Hubbard Hamiltonian built from
// occupation bit strings, and matrix exponentials via eigendecomposition.

#include <algorithm>
#include <bit>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline Matrix letter_matrix(char c) {
    Matrix m(2, 2);
    switch (c) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m << 1, 0, 0, 1; break;
    }
    return m;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// letters[k] acts on qubit k; qubit 0 is the least significant index bit,
/// so it is the rightmost Kronecker factor.
inline Matrix pauli_matrix(const std::string& letters) {
    Matrix m = Matrix::Identity(1, 1);
    for (char c : letters) {
        m = kron(letter_matrix(c), m);
    }
    return m;
}

/// Annihilation operator of mode j on 2^n Fock states, with the sign
/// (-1)^(occupied modes below j).
inline Matrix annihilator(int j, int n_modes) {
    const std::size_t dim = std::size_t{1} << n_modes;
    Matrix c = Matrix::Zero(dim, dim);
    for (std::uint64_t s = 0; s < dim; ++s) {
        if ((s >> j) & 1) {
            const int below = std::popcount(s & ((std::uint64_t{1} << j) - 1));
            c(s ^ (std::uint64_t{1} << j), s) = (below % 2) ? -1.0 : 1.0;
        }
    }
    return c;
}

/// Fermionic Hubbard Hamiltonian -t sum_<ij>,s (c+_is c_js + h.c.) + U sum_i n_iu n_id
/// on the Fock states with n_up / n_down particles, built from occupation bit
/// strings with mode 2*i + s (site-interleaved, unlike the library's ordering).
inline Eigen::MatrixXd fermionic_hubbard_sector(int sites, const std::vector<std::pair<int, int>>& bonds, double t,
                                                double U, int n_up, int n_down) {
    const int n = 2 * sites;
    std::uint64_t up_mask = 0;
    for (int i = 0; i < sites; ++i) {
        up_mask |= std::uint64_t{1} << (2 * i);
    }
    std::vector<std::uint64_t> basis;
    std::vector<int> pos(std::size_t{1} << n, -1);
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
        if (std::popcount(s & up_mask) == n_up && std::popcount(s & ~up_mask) == n_down) {
            pos[s] = static_cast<int>(basis.size());
            basis.push_back(s);
        }
    }
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(basis.size(), basis.size());
    for (std::size_t col = 0; col < basis.size(); ++col) {
        const std::uint64_t s = basis[col];
        for (int i = 0; i < sites; ++i) {
            if (((s >> (2 * i)) & 1) && ((s >> (2 * i + 1)) & 1)) {
                h(col, col) += U;
            }
        }
        for (auto [a, b] : bonds) {
            for (int spin = 0; spin < 2; ++spin) {
                const int p = 2 * a + spin, q = 2 * b + spin;
                for (auto [to, from] : {std::pair{p, q}, std::pair{q, p}}) {
                    // c+_to c_from |s>
                    if (!((s >> from) & 1) || ((s >> to) & 1)) {
                        continue;
                    }
                    const int lo = std::min(to, from), hi = std::max(to, from);
                    const std::uint64_t between = ((std::uint64_t{1} << hi) - 1) & ~((std::uint64_t{2} << lo) - 1);
                    const double sign = std::popcount(s & between) % 2 ? -1.0 : 1.0;
                    const std::uint64_t target = s ^ (std::uint64_t{1} << to) ^ (std::uint64_t{1} << from);
                    h(pos[target], col) += -t * sign;
                }
            }
        }
    }
    return h;
}

/// Whole spectrum, sector by sector, sorted ascending.
inline std::vector<double> fermionic_hubbard_spectrum(int sites, const std::vector<std::pair<int, int>>& bonds,
                                                      double t, double U) {
    std::vector<double> out;
    for (int nu = 0; nu <= sites; ++nu) {
        for (int nd = 0; nd <= sites; ++nd) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fermionic_hubbard_sector(sites, bonds, t, U, nu, nd),
                                                              Eigen::EigenvaluesOnly);
            out.insert(out.end(), es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Letter-wise commutation rule: two words commute iff an even number of
/// positions hold different non-identity letters.
inline bool letters_commute(const std::string& a, const std::string& b) {
    int clashes = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        clashes += (a[k] != 'I' && b[k] != 'I' && a[k] != b[k]);
    }
    return clashes % 2 == 0;
}

inline Eigen::VectorXd spectrum(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

/// exp(-i angle G) for hermitian G.
inline Matrix expm_hermitian(const Matrix& g, double angle) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(g);
    Eigen::VectorXcd phases(es.eigenvalues().size());
    for (Eigen::Index k = 0; k < phases.size(); ++k) {
        phases(k) = std::exp(Complex(0, -angle * es.eigenvalues()(k)));
    }
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace oracle
