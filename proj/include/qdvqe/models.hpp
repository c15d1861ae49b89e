#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qdvqe/pauli.hpp"

namespace qdvqe {

enum class Geometry { Chain, Rectangle, Kagome };
enum class Spin { Up, Down };

std::string to_string(Geometry g);
Geometry geometry_from_string(const std::string& name);

struct Edge {
    int a;
    int b;
    friend bool operator==(const Edge&, const Edge&) = default;
};

struct SiteCoord {
    double x;
    double y;
};

/// Lattice geometry with open boundaries.
///
/// Chain: rows == 1, cols sites. Rectangle: rows x cols sites, row-major site
/// id r*cols + c. Kagome: rows == 1 and cols is the site count (9, 10 or 11).
class LatticeSpec {
  public:
    LatticeSpec(Geometry geometry, int rows, int cols);

    static LatticeSpec chain(int sites) { return {Geometry::Chain, 1, sites}; }
    static LatticeSpec rectangle(int rows, int cols) { return {Geometry::Rectangle, rows, cols}; }
    static LatticeSpec kagome(int sites) { return {Geometry::Kagome, 1, sites}; }

    Geometry geometry() const noexcept { return geometry_; }
    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    int site_count() const noexcept { return rows_ * cols_; }

    /// Row-major site id for grid geometries.
    int site(int row, int col) const;
    std::pair<int, int> coords(int site) const;

    /// Nearest-neighbour bonds with a < b, in a fixed deterministic order.
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    /// Short label such as "1x8", "2x3" or "kagome9".
    std::string label() const;

    friend bool operator==(const LatticeSpec& a, const LatticeSpec& b) {
        return a.geometry_ == b.geometry_ && a.rows_ == b.rows_ && a.cols_ == b.cols_;
    }

  private:
    Geometry geometry_;
    int rows_;
    int cols_;
    std::vector<Edge> edges_;
};

/// Site positions of the kagome clusters, already sorted top to bottom and
/// left to right so the vector index is the qubit index.
std::vector<SiteCoord> kagome_coordinates(int sites);
/// Bond length of the kagome coordinates above.
double kagome_bond_length();

struct HubbardParams {
    double t = 1.0;
    double U = 4.0;
    int n_up = 0;
    int n_down = 0;

    /// Half filling: floor(S/2) particles per spin sector.
    static HubbardParams half_filling(const LatticeSpec& lattice, double t = 1.0, double U = 4.0);
    friend bool operator==(const HubbardParams&, const HubbardParams&) = default;
};

struct HeisenbergParams {
    double J = 1.0;
    friend bool operator==(const HeisenbergParams&, const HeisenbergParams&) = default;
};

/// Qubit index of a fermionic mode. Spin-up modes occupy 0..S-1 along a
/// boustrophedon path (even rows left to right, odd rows right to left);
/// spin-down modes occupy S..2S-1 along the same path.
int snake_index(int row, int col, Spin spin, const LatticeSpec& lattice);

/// Snake position (0..S-1) of a site id, i.e. snake_index for spin up.
int snake_position(int site, const LatticeSpec& lattice);

PauliSum build_hubbard(const LatticeSpec& lattice, const HubbardParams& p);
PauliSum build_heisenberg(const LatticeSpec& lattice, const HeisenbergParams& p);

/// -t * hopping matrix over snake positions (the single-particle Hamiltonian of one spin sector).
Eigen::MatrixXd hopping_matrix(const LatticeSpec& lattice, double t);

enum class GroupLabel { HorizontalEven, HorizontalOdd, VerticalEven, VerticalOdd, Interaction };
std::string to_string(GroupLabel label);

struct TermGroups {
    std::vector<PauliSum> groups;
    std::vector<GroupLabel> labels;

    std::size_t size() const noexcept { return groups.size(); }
};

/// Splits a Hubbard Hamiltonian into internally commuting groups: hopping terms
/// by bond class, then every on-site term in one final group. Empty classes are
/// dropped.
TermGroups group_hubbard_terms(const PauliSum& h, const LatticeSpec& lattice);

/// Jordan-Wigner annihilation operator of mode `mode` on `n_modes` qubits:
/// (X + iY)/2 on the mode times Z on every lower mode.
PauliSum jw_annihilator(int mode, int n_modes);

/// Checks {c_i, c_j^dag} = delta_ij and {c_i, c_j} = 0 on dense matrices.
bool anticommutation_holds(std::span<const PauliSum> annihilators, double tol = 1e-12);

/// anticommutation_holds for the 2S modes of a lattice; capped at 12 modes.
bool jw_anticommutation_check(const LatticeSpec& lattice);

/// Masks selecting the qubits of each spin sector of a Hubbard register.
std::uint64_t spin_sector_mask(const LatticeSpec& lattice, Spin spin);

}  // namespace qdvqe
