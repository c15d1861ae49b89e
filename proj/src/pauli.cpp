#include "qdvqe/pauli.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "qdvqe/errors.hpp"

namespace qdvqe {
namespace {

constexpr Complex kIPowers[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};

void check_qubits(int n) {
    if (n < 1 || n > kMaxPauliQubits) {
        throw RangeError("qubit count " + std::to_string(n) + " outside [1, 64]");
    }
}

std::uint64_t low_mask(int n) {
    return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

void require_same_size(int a, int b) {
    if (a != b) {
        throw DimensionError("qubit count mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
    }
}

std::string format_coeff(Complex c) {
    std::ostringstream os;
    os << std::setprecision(17);
    if (std::abs(c.imag()) <= kCoefficientCutoff) {
        os << c.real();
    } else {
        os << '(' << c.real() << ',' << c.imag() << ')';
    }
    return os.str();
}

double parse_double(std::string_view s) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ContractViolation("bad coefficient '" + std::string(s) + "'");
    }
    return value;
}

Complex parse_coeff(std::string_view s) {
    if (!s.empty() && s.front() == '(') {
        auto comma = s.find(',');
        if (s.back() != ')' || comma == std::string_view::npos) {
            throw ContractViolation("bad complex coefficient '" + std::string(s) + "'");
        }
        return {parse_double(s.substr(1, comma - 1)), parse_double(s.substr(comma + 1, s.size() - comma - 2))};
    }
    return {parse_double(s), 0.0};
}

}  // namespace

PauliString::PauliString(int n_qubits) : n_qubits_(n_qubits) { check_qubits(n_qubits); }

PauliString::PauliString(int n_qubits, std::uint64_t x_mask, std::uint64_t z_mask, int phase)
    : n_qubits_(n_qubits), x_(x_mask), z_(z_mask), phase_(((phase % 4) + 4) % 4) {
    check_qubits(n_qubits);
    if (((x_mask | z_mask) & ~low_mask(n_qubits)) != 0) {
        throw RangeError("Pauli mask has bits beyond qubit " + std::to_string(n_qubits - 1));
    }
}

PauliString PauliString::from_letters(std::string_view text) {
    int phase = 0;
    if (text.starts_with("+i")) {
        phase = 1;
        text.remove_prefix(2);
    } else if (text.starts_with("-i")) {
        phase = 3;
        text.remove_prefix(2);
    } else if (text.starts_with('+')) {
        text.remove_prefix(1);
    } else if (text.starts_with('-')) {
        phase = 2;
        text.remove_prefix(1);
    }
    const int n = static_cast<int>(text.size());
    check_qubits(n);
    std::uint64_t x = 0;
    std::uint64_t z = 0;
    for (int q = 0; q < n; ++q) {
        const std::uint64_t bit = std::uint64_t{1} << q;
        switch (text[q]) {
        case 'I':
        case '_':
            break;
        case 'X':
            x |= bit;
            break;
        case 'Y':
            x |= bit;
            z |= bit;
            break;
        case 'Z':
            z |= bit;
            break;
        default:
            throw ContractViolation(std::string("invalid Pauli letter '") + text[q] + "'");
        }
    }
    return PauliString(n, x, z, phase);
}

PauliString PauliString::single(int n_qubits, int qubit, char letter) {
    if (qubit < 0 || qubit >= n_qubits) {
        throw RangeError("qubit " + std::to_string(qubit) + " outside register of " + std::to_string(n_qubits));
    }
    const std::uint64_t bit = std::uint64_t{1} << qubit;
    switch (letter) {
    case 'I':
        return PauliString(n_qubits);
    case 'X':
        return PauliString(n_qubits, bit, 0);
    case 'Y':
        return PauliString(n_qubits, bit, bit);
    case 'Z':
        return PauliString(n_qubits, 0, bit);
    default:
        throw ContractViolation(std::string("invalid Pauli letter '") + letter + "'");
    }
}

Complex PauliString::phase_factor() const noexcept { return kIPowers[phase_]; }

char PauliString::letter(int qubit) const {
    if (qubit < 0 || qubit >= n_qubits_) {
        throw RangeError("qubit index out of range");
    }
    const bool x = (x_ >> qubit) & 1;
    const bool z = (z_ >> qubit) & 1;
    return x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
}

std::string PauliString::letters() const {
    std::string s(n_qubits_, 'I');
    for (int q = 0; q < n_qubits_; ++q) {
        s[q] = letter(q);
    }
    return s;
}

std::string PauliString::str() const {
    static constexpr const char* kPrefix[4] = {"", "+i", "-", "-i"};
    return kPrefix[phase_] + letters();
}

int PauliString::y_count() const noexcept { return std::popcount(x_ & z_); }

PauliString PauliString::with_phase(int phase) const { return PauliString(n_qubits_, x_, z_, phase); }

PauliString multiply(const PauliString& a, const PauliString& b) {
    require_same_size(a.n_qubits(), b.n_qubits());
    // Each letter is i^{xz} X^x Z^z; moving Z^{z_a} past X^{x_b} costs (-1)^{z_a . x_b}.
    const std::uint64_t x = a.x_mask() ^ b.x_mask();
    const std::uint64_t z = a.z_mask() ^ b.z_mask();
    const int exponent = a.phase() + b.phase() + a.y_count() + b.y_count() +
                         2 * std::popcount(a.z_mask() & b.x_mask()) - std::popcount(x & z);
    return PauliString(a.n_qubits(), x, z, exponent);
}

bool commutes(const PauliString& a, const PauliString& b) {
    require_same_size(a.n_qubits(), b.n_qubits());
    const std::uint64_t anti = (a.x_mask() & b.z_mask()) ^ (a.z_mask() & b.x_mask());
    return std::popcount(anti) % 2 == 0;
}

std::ostream& operator<<(std::ostream& os, const PauliString& p) { return os << p.str(); }

// ---------------------------------------------------------------------------

PauliSum::PauliSum(int n_qubits) : n_qubits_(n_qubits) { check_qubits(n_qubits); }

PauliSum::PauliSum(int n_qubits, std::vector<PauliTerm> terms) : n_qubits_(n_qubits), terms_(std::move(terms)) {
    check_qubits(n_qubits);
    for (const auto& t : terms_) {
        require_same_size(n_qubits_, t.word.n_qubits());
    }
    canonicalize();
}

PauliSum PauliSum::from_string(const PauliString& p, Complex coeff) {
    return PauliSum(p.n_qubits(), {PauliTerm{coeff, p}});
}

PauliSum PauliSum::identity(int n_qubits, Complex coeff) {
    return PauliSum(n_qubits, {PauliTerm{coeff, PauliString(n_qubits)}});
}

void PauliSum::canonicalize() {
    std::vector<PauliTerm> merged;
    merged.reserve(terms_.size());
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::size_t> index;
    for (const auto& t : terms_) {
        const Complex c = t.coeff * t.word.phase_factor();
        const PauliString w = t.word.with_phase(0);
        auto key = std::make_pair(w.x_mask(), w.z_mask());
        auto it = index.find(key);
        if (it == index.end()) {
            index.emplace(key, merged.size());
            merged.push_back({c, w});
        } else {
            merged[it->second].coeff += c;
        }
    }
    std::erase_if(merged, [](const PauliTerm& t) { return std::abs(t.coeff) < kCoefficientCutoff; });
    for (auto& t : merged) {
        if (std::abs(t.coeff.imag()) < kCoefficientCutoff) {
            t.coeff.imag(0.0);
        }
        if (std::abs(t.coeff.real()) < kCoefficientCutoff) {
            t.coeff.real(0.0);
        }
    }
    terms_ = std::move(merged);
}

bool PauliSum::is_hermitian() const {
    for (const auto& t : terms_) {
        if (std::abs(t.coeff.imag()) > kCoefficientCutoff) {
            return false;
        }
    }
    return true;
}

bool PauliSum::is_commuting() const {
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        for (std::size_t j = i + 1; j < terms_.size(); ++j) {
            if (!commutes(terms_[i].word, terms_[j].word)) {
                return false;
            }
        }
    }
    return true;
}

PauliSum PauliSum::operator+(const PauliSum& other) const {
    PauliSum out = *this;
    out += other;
    return out;
}

PauliSum& PauliSum::operator+=(const PauliSum& other) {
    if (n_qubits_ == 0) {
        *this = other;
        return *this;
    }
    if (other.n_qubits_ == 0) {
        return *this;
    }
    require_same_size(n_qubits_, other.n_qubits_);
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    canonicalize();
    return *this;
}

PauliSum PauliSum::operator-(const PauliSum& other) const { return *this + other * Complex{-1.0}; }

PauliSum PauliSum::operator*(Complex scalar) const {
    PauliSum out = *this;
    for (auto& t : out.terms_) {
        t.coeff *= scalar;
    }
    out.canonicalize();
    return out;
}

bool operator==(const PauliSum& a, const PauliSum& b) {
    if (a.n_qubits_ != b.n_qubits_ || a.terms_.size() != b.terms_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.terms_.size(); ++i) {
        if (a.terms_[i].word != b.terms_[i].word || a.terms_[i].coeff != b.terms_[i].coeff) {
            return false;
        }
    }
    return true;
}

std::string PauliSum::to_text() const {
    std::string out;
    for (const auto& t : terms_) {
        out += format_coeff(t.coeff);
        out += ' ';
        out += t.word.letters();
        out += '\n';
    }
    return out;
}

PauliSum PauliSum::from_text(std::string_view text) {
    std::vector<PauliTerm> terms;
    int n = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::string coeff;
        std::string letters;
        if (!(fields >> coeff) || coeff.starts_with('#')) {
            continue;
        }
        if (!(fields >> letters)) {
            throw ContractViolation("line " + std::to_string(line_no) + ": missing Pauli letters");
        }
        auto word = PauliString::from_letters(letters);
        if (n == 0) {
            n = word.n_qubits();
        }
        require_same_size(n, word.n_qubits());
        terms.push_back({parse_coeff(coeff), word});
    }
    if (n == 0) {
        return PauliSum();
    }
    return PauliSum(n, std::move(terms));
}

PauliSum multiply(const PauliSum& a, const PauliSum& b) {
    require_same_size(a.n_qubits(), b.n_qubits());
    std::vector<PauliTerm> terms;
    terms.reserve(a.size() * b.size());
    for (const auto& ta : a.terms()) {
        for (const auto& tb : b.terms()) {
            terms.push_back({ta.coeff * tb.coeff, multiply(ta.word, tb.word)});
        }
    }
    return PauliSum(a.n_qubits(), std::move(terms));
}

PauliSum adjoint(const PauliSum& a) {
    std::vector<PauliTerm> terms = a.terms();
    for (auto& t : terms) {
        t.coeff = std::conj(t.coeff);
    }
    return a.n_qubits() == 0 ? a : PauliSum(a.n_qubits(), std::move(terms));
}

Eigen::MatrixXcd to_dense(const PauliString& p) {
    return to_dense(PauliSum(p.n_qubits(), {PauliTerm{1.0, p}}));
}

Eigen::MatrixXcd to_dense(const PauliSum& p) {
    const int n = p.n_qubits();
    if (n > kMaxDenseQubits) {
        throw CapacityError("dense materialization is capped at " + std::to_string(kMaxDenseQubits) + " qubits");
    }
    const std::size_t dim = std::size_t{1} << n;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& t : p.terms()) {
        const Complex scale = t.coeff * kIPowers[t.word.y_count() % 4];
        const std::uint64_t x = t.word.x_mask();
        const std::uint64_t z = t.word.z_mask();
        for (std::size_t col = 0; col < dim; ++col) {
            const double sign = (std::popcount(z & col) & 1) ? -1.0 : 1.0;
            m(col ^ x, col) += sign * scale;
        }
    }
    return m;
}

Eigen::SparseMatrix<Complex> to_sparse(const PauliSum& p) {
    const int n = p.n_qubits();
    if (n > 24) {
        throw CapacityError("sparse materialization is capped at 24 qubits");
    }
    const std::size_t dim = std::size_t{1} << n;
    std::vector<Eigen::Triplet<Complex>> entries;
    entries.reserve(dim * p.size());
    for (const auto& t : p.terms()) {
        const Complex scale = t.coeff * kIPowers[t.word.y_count() % 4];
        const std::uint64_t x = t.word.x_mask();
        const std::uint64_t z = t.word.z_mask();
        for (std::size_t col = 0; col < dim; ++col) {
            const double sign = (std::popcount(z & col) & 1) ? -1.0 : 1.0;
            entries.emplace_back(static_cast<int>(col ^ x), static_cast<int>(col), sign * scale);
        }
    }
    Eigen::SparseMatrix<Complex> m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    m.setFromTriplets(entries.begin(), entries.end());
    m.prune(Complex{0.0}, 0.0);
    return m;
}

}  // namespace qdvqe
