#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qdvqe/pauli.hpp"
#include "qdvqe/state.hpp"

namespace qdvqe {

/// Subspace of basis states with a fixed popcount inside each mask, e.g. the
/// (n_up, n_down) particle-number sector of a Hubbard register.
struct Sector {
    std::vector<std::pair<std::uint64_t, int>> constraints;

    bool contains(std::uint64_t index) const;
    std::vector<std::uint64_t> basis(int n_qubits) const;
};

/// Lowest eigenvalue and an orthonormal basis of its eigenspace.
struct GroundSpace {
    double energy = 0.0;
    std::vector<StateVector> basis;

    int multiplicity() const noexcept { return static_cast<int>(basis.size()); }
};

enum class OracleMethod { Auto, Dense, Lanczos };

struct OracleOptions {
    std::optional<Sector> sector;
    OracleMethod method = OracleMethod::Auto;
    /// Auto switches to Lanczos above this (sector) dimension.
    std::size_t dense_max_dim = 4096;
    /// Eigenvalues within this window of the minimum belong to the ground space.
    double degeneracy_window = 1e-8;
    /// Matrix-vector product budget per Lanczos eigenvector.
    int max_matvecs = 5000;
};

/// Exact ground space of a hermitian H, optionally restricted to a sector.
/// Basis vectors are returned in the full 2^n space.
GroundSpace ground_space(const PauliSum& h, const OracleOptions& options = {});

/// Squared norm of the projection of `state` onto the ground space.
double fidelity(const StateVector& state, const GroundSpace& gs);

}  // namespace qdvqe
