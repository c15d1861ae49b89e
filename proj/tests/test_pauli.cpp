#include <random>

#include "doctest.h"

#include "dense_oracle.hpp"
#include "qdvqe/errors.hpp"
#include "qdvqe/models.hpp"
#include "qdvqe/pauli.hpp"

using namespace qdvqe;

namespace {

oracle::Matrix dense_of(const PauliString& p) {
    return p.phase_factor() * oracle::pauli_matrix(p.letters());
}

PauliString random_string(std::mt19937_64& rng, int n) {
    std::uniform_int_distribution<int> letter(0, 3), phase(0, 3);
    std::string s;
    for (int q = 0; q < n; ++q) {
        s += "IXYZ"[letter(rng)];
    }
    return PauliString::from_letters(s).with_phase(phase(rng));
}

}  // namespace

TEST_CASE("letters round-trip with phase prefixes") {
    for (const char* text : {"XXIZ", "-Y", "+iZX", "-iIIY"}) {
        CHECK(PauliString::from_letters(text).str() == std::string(text));
    }
    const auto p = PauliString::from_letters("XYZI");
    CHECK(p.x_mask() == 0b0011);
    CHECK(p.z_mask() == 0b0110);
    CHECK(p.letter(1) == 'Y');
    CHECK(p.y_count() == 1);
    CHECK_THROWS_AS(PauliString::from_letters("XQ"), Error);
}

TEST_CASE("single-qubit products") {
    const auto x = PauliString::from_letters("XI");
    const auto y = PauliString::from_letters("YI");
    const auto xy = multiply(x, y);
    CHECK(xy.letters() == "ZI");
    CHECK(xy.phase() == 1);

    const auto p = PauliString::from_letters("XYZ");
    const auto pp = multiply(p, p);
    CHECK(pp.is_identity());
    CHECK(pp.phase() == 0);

    // (X (x) Z)(Z (x) Z) against 4x4 matrices: letters are written qubit 0 first.
    const auto a = PauliString::from_letters("XZ");
    const auto b = PauliString::from_letters("ZZ");
    const auto ab = multiply(a, b);
    CHECK(ab.letters() == "YI");
    CHECK(ab.phase() == 3);
    CHECK((dense_of(ab) - dense_of(a) * dense_of(b)).norm() < 1e-12);
}

TEST_CASE("mismatched sizes are rejected") {
    CHECK_THROWS_AS(multiply(PauliString(2), PauliString(3)), DimensionError);
    CHECK_THROWS_AS(commutes(PauliString(2), PauliString(3)), DimensionError);
    CHECK_THROWS_AS(PauliString(2, 0b100, 0), Error);
}

TEST_CASE("commutation examples") {
    CHECK(commutes(PauliString::from_letters("XX"), PauliString::from_letters("ZZ")));
    CHECK_FALSE(commutes(PauliString::from_letters("XI"), PauliString::from_letters("ZI")));
}

TEST_CASE("products and commutation match dense matrices on random pairs") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 1 + trial % 4;
        const auto a = random_string(rng, n);
        const auto b = random_string(rng, n);
        const auto ab = multiply(a, b);
        const oracle::Matrix da = dense_of(a), db = dense_of(b);
        CHECK((dense_of(ab) - da * db).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(commutes(a, b) == ((da * db - db * da).cwiseAbs().maxCoeff() < 1e-12));
        // a*b*b restores a exactly, phase included.
        CHECK(multiply(ab, b) == multiply(a, multiply(b, b)));
    }
}

TEST_CASE("to_dense examples") {
    const auto z = to_dense(PauliSum::from_string(PauliString::from_letters("Z")));
    CHECK(z(0, 0) == Complex(1));
    CHECK(z(1, 1) == Complex(-1));

    PauliSum hop = PauliSum::from_string(PauliString::from_letters("XX"), 0.5) +
                   PauliSum::from_string(PauliString::from_letters("YY"), 0.5);
    oracle::Matrix expected = oracle::Matrix::Zero(4, 4);
    expected(1, 2) = expected(2, 1) = 1.0;
    CHECK((to_dense(hop) - expected).norm() < 1e-14);

    PauliSum bond = PauliSum::from_text("1 XX\n1 YY\n1 ZZ\n");
    const Eigen::VectorXd ev = oracle::spectrum(to_dense(bond));
    CHECK(ev(0) == doctest::Approx(-3.0));
    for (int k = 1; k < 4; ++k) {
        CHECK(ev(k) == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS(to_dense(PauliSum::identity(15)), CapacityError);
}

TEST_CASE("to_dense agrees with Kronecker products") {
    const PauliSum h = PauliSum::from_text("0.5 XYZ\n-1.25 IZZ\n(0,0.3) YII\n2 III\n");
    oracle::Matrix expected = 0.5 * oracle::pauli_matrix("XYZ") - 1.25 * oracle::pauli_matrix("IZZ") +
                              Complex(0, 0.3) * oracle::pauli_matrix("YII") + 2.0 * oracle::pauli_matrix("III");
    CHECK((to_dense(h) - expected).norm() < 1e-13);
    CHECK((oracle::Matrix(to_sparse(h)) - expected).norm() < 1e-13);
}

TEST_CASE("canonical form merges, prunes and keeps first-appearance order") {
    PauliSum s(2, {{1.0, PauliString::from_letters("XI")},
                   {2.0, PauliString::from_letters("ZZ")},
                   {0.5, PauliString::from_letters("XI")},
                   {1e-13, PauliString::from_letters("YY")},
                   {-2.0, PauliString::from_letters("ZZ")}});
    REQUIRE(s.size() == 1);
    CHECK(s.terms()[0].word.letters() == "XI");
    CHECK(s.terms()[0].coeff == Complex(1.5));

    // Phases fold into the coefficient.
    PauliSum t(1, {{2.0, PauliString::from_letters("-iX")}});
    CHECK(t.terms()[0].coeff == Complex(0, -2));
    CHECK(t.terms()[0].word.phase() == 0);

    PauliSum again(2, s.terms());
    CHECK(again == s);
}

TEST_CASE("hermiticity and commuting flags") {
    CHECK(PauliSum::from_text("1 XX\n1 YY\n").is_hermitian());
    CHECK(PauliSum::from_text("1 XX\n1 YY\n").is_commuting());
    CHECK_FALSE(PauliSum::from_text("(0,1) XX\n").is_hermitian());
    CHECK_FALSE(PauliSum::from_text("1 XI\n1 ZI\n").is_commuting());
}

TEST_CASE("sum algebra matches dense arithmetic") {
    const PauliSum a = PauliSum::from_text("0.5 XZ\n-1 YY\n0.25 IZ\n");
    const PauliSum b = PauliSum::from_text("2 ZX\n(0,1) XI\n");
    const oracle::Matrix da = to_dense(a), db = to_dense(b);
    CHECK((to_dense(multiply(a, b)) - da * db).norm() < 1e-12);
    CHECK((to_dense(a + b) - (da + db)).norm() < 1e-12);
    CHECK((to_dense(a - b) - (da - db)).norm() < 1e-12);
    CHECK((to_dense(a * Complex(0, 2)) - Complex(0, 2) * da).norm() < 1e-12);
    CHECK((to_dense(adjoint(b)) - db.adjoint()).norm() < 1e-12);
}

TEST_CASE("text format round-trips") {
    const PauliSum h = build_hubbard(LatticeSpec::rectangle(2, 2), HubbardParams{0.7, 3.3, 2, 2});
    const std::string text = h.to_text();
    CHECK(PauliSum::from_text(text) == h);
    CHECK(PauliSum::from_text(text).to_text() == text);

    const PauliSum c = PauliSum::from_text("# comment\n(0.5,-0.25) XYII\n0.5 XXIZ\n");
    CHECK(c.n_qubits() == 4);
    CHECK_THROWS_AS(PauliSum::from_text("0.5 XX\n1 XYZ\n"), Error);
}
