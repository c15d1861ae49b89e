#include "qdvqe/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "qdvqe/errors.hpp"

namespace qdvqe {
namespace {

constexpr Complex kIPowers[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
constexpr double kResidualTolerance = 1e-8;
constexpr std::uint64_t kLanczosSeed = 0x5eed5eedULL;

struct Eigenpairs {
    std::vector<double> values;
    Eigen::MatrixXcd vectors;  // columns
};

// Lowest `count` eigenpairs of a dense hermitian matrix.
Eigenpairs lowest_dense(const Eigen::MatrixXcd& m, int count) {
    const lapack_int n = static_cast<lapack_int>(m.rows());
    count = std::min<int>(count, n);
    lapack_int found = 0;
    std::vector<double> w(n);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(std::max(1, count)));
    Eigenpairs out;
    const bool real = m.imag().cwiseAbs().maxCoeff() == 0.0;
    if (real) {
        Eigen::MatrixXd a = m.real();
        Eigen::MatrixXd z(n, count);
        const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, a.data(), n, 0.0, 0.0, 1, count,
                                               LAPACKE_dlamch('S'), &found, w.data(), z.data(), n, support.data());
        if (info != 0) {
            throw ConvergenceError("dsyevr failed with info " + std::to_string(info));
        }
        out.vectors = z.leftCols(found).cast<Complex>();
    } else {
        Eigen::MatrixXcd a = m;
        Eigen::MatrixXcd z(n, count);
        const lapack_int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, a.data(), n, 0.0, 0.0, 1, count,
                                               LAPACKE_dlamch('S'), &found, w.data(), z.data(), n, support.data());
        if (info != 0) {
            throw ConvergenceError("zheevr failed with info " + std::to_string(info));
        }
        out.vectors = z.leftCols(found);
    }
    out.values.assign(w.begin(), w.begin() + found);
    return out;
}

Eigen::MatrixXcd restricted_matrix(const PauliSum& h, const std::vector<std::uint64_t>& basis) {
    const std::size_t full_dim = std::size_t{1} << h.n_qubits();
    std::vector<std::int64_t> position(full_dim, -1);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        position[basis[i]] = static_cast<std::int64_t>(i);
    }
    const auto dim = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& term : h.terms()) {
        const Complex scale = term.coeff * kIPowers[term.word.y_count() % 4];
        const std::uint64_t x = term.word.x_mask();
        const std::uint64_t z = term.word.z_mask();
        for (Eigen::Index col = 0; col < dim; ++col) {
            const std::uint64_t c = basis[col];
            const std::int64_t row = position[c ^ x];
            if (row < 0) {
                continue;
            }
            m(row, col) += ((std::popcount(z & c) & 1) ? -1.0 : 1.0) * scale;
        }
    }
    return m;
}

GroundSpace dense_ground_space(const PauliSum& h, const std::vector<std::uint64_t>& basis, double window) {
    const Eigen::MatrixXcd m = restricted_matrix(h, basis);
    const int dim = static_cast<int>(m.rows());
    int count = std::min(dim, 8);
    Eigenpairs pairs;
    while (true) {
        pairs = lowest_dense(m, count);
        const bool all_degenerate = pairs.values.back() - pairs.values.front() <= window;
        if (!all_degenerate || count >= dim) {
            break;
        }
        count = std::min(dim, count * 2);
    }
    GroundSpace gs;
    gs.energy = pairs.values.front();
    for (std::size_t k = 0; k < pairs.values.size(); ++k) {
        if (pairs.values[k] - gs.energy > window) {
            break;
        }
        StateVector v(h.n_qubits(), std::vector<Complex>(std::size_t{1} << h.n_qubits(), Complex{0.0}));
        for (int i = 0; i < dim; ++i) {
            v[basis[i]] = pairs.vectors(i, static_cast<Eigen::Index>(k));
        }
        gs.basis.push_back(std::move(v));
    }
    return gs;
}

// Lanczos on (P H P) restricted to the orthogonal complement of `locked`.
class Lanczos {
  public:
    Lanczos(const PauliSum& h, const std::optional<Sector>& sector, int max_matvecs)
        : h_(h), sector_(sector), max_matvecs_(max_matvecs) {
        const std::size_t bytes = (std::size_t{1} << h.n_qubits()) * sizeof(Complex);
        const std::size_t budget = std::size_t{2} << 30;
        krylov_size_ = static_cast<int>(std::clamp<std::size_t>(budget / bytes, 20, 120));
    }

    std::pair<double, StateVector> lowest(const std::vector<StateVector>& locked, std::uint64_t seed) {
        StateVector v = random_start(seed);
        orthogonalize(v, locked);
        v.normalize();
        int matvecs = 0;
        double residual = std::numeric_limits<double>::infinity();
        while (true) {
            std::vector<StateVector> basis{v};
            std::vector<double> alphas;
            std::vector<double> betas;
            Eigen::VectorXd y;
            for (int j = 0; j < krylov_size_; ++j) {
                StateVector w = apply(basis[j]);
                ++matvecs;
                const double alpha = inner(basis[j], w).real();
                alphas.push_back(alpha);
                orthogonalize(w, basis);
                orthogonalize(w, locked);
                orthogonalize(w, basis);
                const double beta = w.norm();
                y = lowest_ritz(alphas, betas);
                if (beta * std::abs(y(y.size() - 1)) < 0.1 * kResidualTolerance || beta < 1e-13 ||
                    matvecs >= max_matvecs_) {
                    break;
                }
                betas.push_back(beta);
                for (auto& a : w.amplitudes()) {
                    a /= beta;
                }
                basis.push_back(std::move(w));
            }
            StateVector x(h_.n_qubits(), std::vector<Complex>(basis.front().dim(), Complex{0.0}));
            for (Eigen::Index i = 0; i < y.size(); ++i) {
                const auto src = basis[i].amplitudes();
                auto dst = x.amplitudes();
                for (std::size_t k = 0; k < dst.size(); ++k) {
                    dst[k] += y(i) * src[k];
                }
            }
            orthogonalize(x, locked);
            x.normalize();
            StateVector hx = apply(x);
            ++matvecs;
            const double energy = inner(x, hx).real();
            double r2 = 0.0;
            for (std::size_t k = 0; k < x.dim(); ++k) {
                r2 += std::norm(hx[k] - energy * x[k]);
            }
            residual = std::sqrt(r2);
            if (residual <= kResidualTolerance) {
                return {energy, std::move(x)};
            }
            if (matvecs >= max_matvecs_) {
                std::ostringstream msg;
                msg << "Lanczos did not converge within " << max_matvecs_ << " matrix-vector products (residual "
                    << residual << ", energy " << energy << ")";
                throw ConvergenceError(msg.str());
            }
            v = std::move(x);
        }
    }

  private:
    StateVector apply(const StateVector& v) const {
        StateVector w = apply_pauli_sum(h_, v);
        project(w);
        return w;
    }

    void project(StateVector& v) const {
        if (!sector_) {
            return;
        }
        auto a = v.amplitudes();
        for (std::size_t k = 0; k < a.size(); ++k) {
            if (!sector_->contains(k)) {
                a[k] = 0.0;
            }
        }
    }

    static void orthogonalize(StateVector& w, const std::vector<StateVector>& against) {
        for (const auto& b : against) {
            const Complex overlap = inner(b, w);
            auto dst = w.amplitudes();
            const auto src = b.amplitudes();
            for (std::size_t k = 0; k < dst.size(); ++k) {
                dst[k] -= overlap * src[k];
            }
        }
    }

    StateVector random_start(std::uint64_t seed) const {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal;
        std::vector<Complex> amps(std::size_t{1} << h_.n_qubits());
        for (auto& a : amps) {
            a = {normal(rng), normal(rng)};
        }
        StateVector v(h_.n_qubits(), std::move(amps));
        project(v);
        return v;
    }

    // Eigenvector of the lowest Ritz value of the tridiagonal projection.
    static Eigen::VectorXd lowest_ritz(const std::vector<double>& alphas, const std::vector<double>& betas) {
        const auto m = static_cast<Eigen::Index>(alphas.size());
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            t(i, i) = alphas[i];
            if (i + 1 < m) {
                t(i, i + 1) = betas[i];
                t(i + 1, i) = betas[i];
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(t);
        return solver.eigenvectors().col(0);
    }

    const PauliSum& h_;
    const std::optional<Sector>& sector_;
    int max_matvecs_;
    int krylov_size_ = 120;
};

GroundSpace lanczos_ground_space(const PauliSum& h, const OracleOptions& options) {
    Lanczos solver(h, options.sector, options.max_matvecs);
    GroundSpace gs;
    auto [energy, vec] = solver.lowest({}, kLanczosSeed);
    gs.energy = energy;
    gs.basis.push_back(std::move(vec));
    const std::size_t dim =
        options.sector ? options.sector->basis(h.n_qubits()).size() : (std::size_t{1} << h.n_qubits());
    // Deflate: keep searching the orthogonal complement until the next level is above the window.
    while (gs.basis.size() < dim) {
        auto [next, next_vec] = solver.lowest(gs.basis, kLanczosSeed + gs.basis.size());
        if (next - gs.energy > options.degeneracy_window) {
            break;
        }
        gs.energy = std::min(gs.energy, next);
        gs.basis.push_back(std::move(next_vec));
    }
    return gs;
}

}  // namespace

bool Sector::contains(std::uint64_t index) const {
    for (const auto& [mask, count] : constraints) {
        if (std::popcount(index & mask) != count) {
            return false;
        }
    }
    return true;
}

std::vector<std::uint64_t> Sector::basis(int n_qubits) const {
    std::vector<std::uint64_t> out;
    const std::uint64_t dim = std::uint64_t{1} << n_qubits;
    for (std::uint64_t i = 0; i < dim; ++i) {
        if (contains(i)) {
            out.push_back(i);
        }
    }
    return out;
}

GroundSpace ground_space(const PauliSum& h, const OracleOptions& options) {
    if (!h.is_hermitian()) {
        throw ContractViolation("ground_space requires a hermitian operator");
    }
    const int n = h.n_qubits();
    if (n > kMaxStateQubits) {
        throw CapacityError("exact oracle is capped at " + std::to_string(kMaxStateQubits) + " qubits");
    }
    std::vector<std::uint64_t> basis;
    if (options.sector) {
        basis = options.sector->basis(n);
    } else {
        basis.resize(std::size_t{1} << n);
        for (std::size_t i = 0; i < basis.size(); ++i) {
            basis[i] = i;
        }
    }
    if (basis.empty()) {
        throw ContractViolation("the requested sector is empty");
    }
    const bool dense = options.method == OracleMethod::Dense ||
                       (options.method == OracleMethod::Auto && basis.size() <= options.dense_max_dim);
    if (dense) {
        return dense_ground_space(h, basis, options.degeneracy_window);
    }
    return lanczos_ground_space(h, options);
}

double fidelity(const StateVector& state, const GroundSpace& gs) {
    double total = 0.0;
    for (const auto& b : gs.basis) {
        if (b.n_qubits() != state.n_qubits()) {
            throw DimensionError("state and ground space differ in qubit count");
        }
        total += std::norm(inner(b, state));
    }
    return std::clamp(total, 0.0, 1.0);
}

}  // namespace qdvqe
