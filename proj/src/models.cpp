#include "qdvqe/models.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "qdvqe/errors.hpp"

namespace qdvqe {
namespace {

constexpr int kMaxJwModes = 12;

// Hexagon vertices H0..H5 at angles 60*i and outer apexes O_i reflected
// through the midpoint of hexagon edge (H_i, H_{i+1}). Which apexes exist
// depends on the cluster size.
struct KagomeCluster {
    std::vector<SiteCoord> coords;
    std::vector<Edge> edges;
};

std::vector<int> kagome_apexes(int sites) {
    switch (sites) {
    case 9:
        return {0, 3, 5};
    case 10:
        return {0, 2, 3, 5};
    case 11:
        return {0, 2, 3, 4, 5};
    default:
        throw RangeError("kagome site count must be 9, 10 or 11, got " + std::to_string(sites));
    }
}

KagomeCluster make_kagome(int sites) {
    const auto apexes = kagome_apexes(sites);
    std::vector<SiteCoord> raw;
    for (int i = 0; i < 6; ++i) {
        const double angle = std::numbers::pi / 3.0 * i;
        raw.push_back({std::cos(angle), std::sin(angle)});
    }
    std::vector<std::pair<int, int>> raw_edges;
    for (int i = 0; i < 6; ++i) {
        raw_edges.emplace_back(i, (i + 1) % 6);
    }
    for (int i : apexes) {
        const int next = (i + 1) % 6;
        const SiteCoord mid{0.5 * (raw[i].x + raw[next].x), 0.5 * (raw[i].y + raw[next].y)};
        const int id = static_cast<int>(raw.size());
        raw.push_back({2.0 * mid.x, 2.0 * mid.y});
        raw_edges.emplace_back(i, id);
        raw_edges.emplace_back(id, next);
    }

    // Qubits are numbered top to bottom, then left to right.
    std::vector<int> order(raw.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = static_cast<int>(i);
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (std::abs(raw[a].y - raw[b].y) > 1e-9) {
            return raw[a].y > raw[b].y;
        }
        return raw[a].x < raw[b].x;
    });
    std::vector<int> qubit_of(raw.size());
    KagomeCluster out;
    for (std::size_t q = 0; q < order.size(); ++q) {
        qubit_of[order[q]] = static_cast<int>(q);
        out.coords.push_back(raw[order[q]]);
    }
    for (auto [a, b] : raw_edges) {
        int qa = qubit_of[a];
        int qb = qubit_of[b];
        out.edges.push_back({std::min(qa, qb), std::max(qa, qb)});
    }
    std::sort(out.edges.begin(), out.edges.end(),
              [](const Edge& l, const Edge& r) { return std::pair(l.a, l.b) < std::pair(r.a, r.b); });
    return out;
}

PauliString hop_word(int n, int lo, int hi, char letter) {
    const std::uint64_t ends = (std::uint64_t{1} << lo) | (std::uint64_t{1} << hi);
    std::uint64_t between = 0;
    for (int k = lo + 1; k < hi; ++k) {
        between |= std::uint64_t{1} << k;
    }
    if (letter == 'X') {
        return PauliString(n, ends, between);
    }
    return PauliString(n, ends, ends | between);
}

void require_grid(const LatticeSpec& lattice, const char* what) {
    if (lattice.geometry() == Geometry::Kagome) {
        throw UnsupportedModelError(std::string(what) + " is not defined on kagome lattices");
    }
}

// Hopping bond class. Horizontal bonds alternate by column, vertical bonds
// form a checkerboard in (row + col) so no two bonds of a class share a site.
GroupLabel bond_class(const LatticeSpec& lattice, const Edge& e) {
    auto [ra, ca] = lattice.coords(e.a);
    auto [rb, cb] = lattice.coords(e.b);
    if (ra == rb) {
        return std::min(ca, cb) % 2 == 0 ? GroupLabel::HorizontalEven : GroupLabel::HorizontalOdd;
    }
    return (std::min(ra, rb) + ca) % 2 == 0 ? GroupLabel::VerticalEven : GroupLabel::VerticalOdd;
}

}  // namespace

std::string to_string(Geometry g) {
    switch (g) {
    case Geometry::Chain:
        return "chain";
    case Geometry::Rectangle:
        return "rectangle";
    case Geometry::Kagome:
        return "kagome";
    }
    return "?";
}

Geometry geometry_from_string(const std::string& name) {
    if (name == "chain") {
        return Geometry::Chain;
    }
    if (name == "rectangle") {
        return Geometry::Rectangle;
    }
    if (name == "kagome") {
        return Geometry::Kagome;
    }
    throw RangeError("unknown geometry '" + name + "'");
}

std::string to_string(GroupLabel label) {
    switch (label) {
    case GroupLabel::HorizontalEven:
        return "horizontal-even";
    case GroupLabel::HorizontalOdd:
        return "horizontal-odd";
    case GroupLabel::VerticalEven:
        return "vertical-even";
    case GroupLabel::VerticalOdd:
        return "vertical-odd";
    case GroupLabel::Interaction:
        return "interaction";
    }
    return "?";
}

LatticeSpec::LatticeSpec(Geometry geometry, int rows, int cols) : geometry_(geometry), rows_(rows), cols_(cols) {
    if (rows < 1 || cols < 1) {
        throw RangeError("lattice dimensions must be positive");
    }
    switch (geometry) {
    case Geometry::Chain:
        if (rows != 1) {
            throw RangeError("a chain has exactly one row");
        }
        break;
    case Geometry::Kagome:
        if (rows != 1) {
            throw RangeError("kagome lattices are given as rows=1, cols=<site count>");
        }
        edges_ = make_kagome(cols).edges;
        return;
    case Geometry::Rectangle:
        break;
    }
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c + 1 < cols; ++c) {
            edges_.push_back({site(r, c), site(r, c + 1)});
        }
    }
    for (int r = 0; r + 1 < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            edges_.push_back({site(r, c), site(r + 1, c)});
        }
    }
}

int LatticeSpec::site(int row, int col) const {
    if (row < 0 || row >= rows_ || col < 0 || col >= cols_) {
        throw RangeError("site (" + std::to_string(row) + "," + std::to_string(col) + ") is off the " + label() +
                         " lattice");
    }
    return row * cols_ + col;
}

std::pair<int, int> LatticeSpec::coords(int site) const {
    if (site < 0 || site >= site_count()) {
        throw RangeError("site id " + std::to_string(site) + " out of range");
    }
    return {site / cols_, site % cols_};
}

std::string LatticeSpec::label() const {
    if (geometry_ == Geometry::Kagome) {
        return "kagome" + std::to_string(cols_);
    }
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

std::vector<SiteCoord> kagome_coordinates(int sites) { return make_kagome(sites).coords; }

double kagome_bond_length() { return 1.0; }

HubbardParams HubbardParams::half_filling(const LatticeSpec& lattice, double t, double U) {
    const int n = lattice.site_count() / 2;
    return {t, U, n, n};
}

int snake_position(int site, const LatticeSpec& lattice) {
    auto [row, col] = lattice.coords(site);
    return row * lattice.cols() + (row % 2 == 0 ? col : lattice.cols() - 1 - col);
}

int snake_index(int row, int col, Spin spin, const LatticeSpec& lattice) {
    require_grid(lattice, "snake ordering");
    const int pos = snake_position(lattice.site(row, col), lattice);
    return spin == Spin::Up ? pos : pos + lattice.site_count();
}

std::uint64_t spin_sector_mask(const LatticeSpec& lattice, Spin spin) {
    const int s = lattice.site_count();
    const std::uint64_t block = (std::uint64_t{1} << s) - 1;
    return spin == Spin::Up ? block : block << s;
}

PauliSum build_hubbard(const LatticeSpec& lattice, const HubbardParams& p) {
    require_grid(lattice, "the Hubbard model");
    if (!std::isfinite(p.t) || !std::isfinite(p.U)) {
        throw ContractViolation("Hubbard couplings must be finite");
    }
    const int s = lattice.site_count();
    if (p.n_up < 0 || p.n_down < 0 || p.n_up > s || p.n_down > s) {
        throw ContractViolation("particle numbers must lie in [0, site count] per spin");
    }
    const int n = 2 * s;
    std::vector<PauliTerm> terms;
    for (const auto& e : lattice.edges()) {
        for (int offset : {0, s}) {
            const int qa = snake_position(e.a, lattice) + offset;
            const int qb = snake_position(e.b, lattice) + offset;
            const int lo = std::min(qa, qb);
            const int hi = std::max(qa, qb);
            terms.push_back({-0.5 * p.t, hop_word(n, lo, hi, 'X')});
            terms.push_back({-0.5 * p.t, hop_word(n, lo, hi, 'Y')});
        }
    }
    for (int site = 0; site < s; ++site) {
        const int up = snake_position(site, lattice);
        const int down = up + s;
        const double q = 0.25 * p.U;
        terms.push_back({q, PauliString(n)});
        terms.push_back({-q, PauliString::single(n, up, 'Z')});
        terms.push_back({-q, PauliString::single(n, down, 'Z')});
        terms.push_back({q, multiply(PauliString::single(n, up, 'Z'), PauliString::single(n, down, 'Z'))});
    }
    return PauliSum(n, std::move(terms));
}

PauliSum build_heisenberg(const LatticeSpec& lattice, const HeisenbergParams& p) {
    if (lattice.geometry() == Geometry::Rectangle) {
        throw UnsupportedModelError("the Heisenberg model is built on chains and kagome clusters only");
    }
    const int n = lattice.site_count();
    std::vector<PauliTerm> terms;
    for (const auto& e : lattice.edges()) {
        for (char letter : {'X', 'Y', 'Z'}) {
            terms.push_back({p.J, multiply(PauliString::single(n, e.a, letter), PauliString::single(n, e.b, letter))});
        }
    }
    return PauliSum(n, std::move(terms));
}

Eigen::MatrixXd hopping_matrix(const LatticeSpec& lattice, double t) {
    require_grid(lattice, "the hopping matrix");
    const int s = lattice.site_count();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(s, s);
    for (const auto& e : lattice.edges()) {
        const int a = snake_position(e.a, lattice);
        const int b = snake_position(e.b, lattice);
        h(a, b) = -t;
        h(b, a) = -t;
    }
    return h;
}

TermGroups group_hubbard_terms(const PauliSum& h, const LatticeSpec& lattice) {
    require_grid(lattice, "term grouping");
    const int s = lattice.site_count();
    if (h.n_qubits() != 2 * s) {
        throw DimensionError("Hamiltonian has " + std::to_string(h.n_qubits()) + " qubits, lattice needs " +
                             std::to_string(2 * s));
    }
    std::map<std::uint64_t, GroupLabel> class_of_pair;
    for (const auto& e : lattice.edges()) {
        const GroupLabel label = bond_class(lattice, e);
        for (int offset : {0, s}) {
            const int qa = snake_position(e.a, lattice) + offset;
            const int qb = snake_position(e.b, lattice) + offset;
            class_of_pair[(std::uint64_t{1} << qa) | (std::uint64_t{1} << qb)] = label;
        }
    }

    constexpr std::array kOrder = {GroupLabel::HorizontalEven, GroupLabel::HorizontalOdd, GroupLabel::VerticalEven,
                                   GroupLabel::VerticalOdd, GroupLabel::Interaction};
    std::map<GroupLabel, std::vector<PauliTerm>> buckets;
    for (const auto& term : h.terms()) {
        if (term.word.x_mask() == 0) {
            buckets[GroupLabel::Interaction].push_back(term);
            continue;
        }
        auto it = class_of_pair.find(term.word.x_mask());
        if (it == class_of_pair.end()) {
            throw ConsistencyError("term " + term.word.letters() + " matches no lattice bond");
        }
        buckets[it->second].push_back(term);
    }

    TermGroups out;
    for (GroupLabel label : kOrder) {
        auto it = buckets.find(label);
        if (it == buckets.end() || it->second.empty()) {
            continue;
        }
        PauliSum group(h.n_qubits(), it->second);
        if (!group.is_commuting()) {
            throw ConsistencyError("group " + to_string(label) + " is not internally commuting");
        }
        out.groups.push_back(std::move(group));
        out.labels.push_back(label);
    }
    return out;
}

PauliSum jw_annihilator(int mode, int n_modes) {
    if (mode < 0 || mode >= n_modes) {
        throw RangeError("mode index out of range");
    }
    std::uint64_t z_string = 0;
    for (int k = 0; k < mode; ++k) {
        z_string |= std::uint64_t{1} << k;
    }
    const std::uint64_t bit = std::uint64_t{1} << mode;
    const PauliString x(n_modes, bit, z_string);
    const PauliString y(n_modes, bit, z_string | bit);
    return PauliSum(n_modes, {{0.5, x}, {Complex{0.0, 0.5}, y}});
}

bool anticommutation_holds(std::span<const PauliSum> annihilators, double tol) {
    using Sparse = Eigen::SparseMatrix<Complex>;
    std::vector<Sparse> c;
    c.reserve(annihilators.size());
    for (const auto& op : annihilators) {
        c.push_back(to_sparse(op));
    }
    if (c.empty()) {
        return true;
    }
    const auto dim = c.front().rows();
    Sparse id(dim, dim);
    id.setIdentity();
    auto max_abs = [](const Sparse& m) {
        double out = 0.0;
        for (int k = 0; k < m.outerSize(); ++k) {
            for (Sparse::InnerIterator it(m, k); it; ++it) {
                out = std::max(out, std::abs(it.value()));
            }
        }
        return out;
    };
    for (std::size_t i = 0; i < c.size(); ++i) {
        for (std::size_t j = 0; j < c.size(); ++j) {
            const Sparse cj_dag = c[j].adjoint();
            Sparse mixed = c[i] * cj_dag + cj_dag * c[i];
            if (i == j) {
                mixed -= id;
            }
            const Sparse same = c[i] * c[j] + c[j] * c[i];
            if (max_abs(mixed) > tol || max_abs(same) > tol) {
                return false;
            }
        }
    }
    return true;
}

bool jw_anticommutation_check(const LatticeSpec& lattice) {
    require_grid(lattice, "the Jordan-Wigner check");
    const int modes = 2 * lattice.site_count();
    if (modes > kMaxJwModes) {
        throw CapacityError("Jordan-Wigner check is limited to " + std::to_string(kMaxJwModes) + " modes");
    }
    std::vector<PauliSum> ops;
    for (int m = 0; m < modes; ++m) {
        ops.push_back(jw_annihilator(m, modes));
    }
    return anticommutation_holds(ops);
}

}  // namespace qdvqe
