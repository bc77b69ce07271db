#include "doctest.h"

#include <cmath>

#include "rydvqe/ed.hpp"
#include "rydvqe/geometry.hpp"
#include "rydvqe/hamiltonian.hpp"
#include "rydvqe/rng.hpp"
#include "rydvqe/sector.hpp"

using namespace rydvqe;
using Eigen::MatrixXcd;

namespace {

// Single-site operators in the (|g>, |r>) basis.
MatrixXcd pauli(char a) {
    MatrixXcd m = MatrixXcd::Zero(2, 2);
    const cplx i(0, 1);
    switch (a) {
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, i, -i, 0; break;
        case 'Z': m << -1, 0, 0, 1; break;
        case 'n': m << 0, 0, 0, 1; break;
        default: m = MatrixXcd::Identity(2, 2);
    }
    return m;
}

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
        }
    }
    return out;
}

// Site j is bit j, so site N-1 is the leftmost Kronecker factor.
MatrixXcd embed(int n, const std::vector<std::pair<int, char>>& ops) {
    MatrixXcd m = MatrixXcd::Identity(1, 1);
    for (int site = n - 1; site >= 0; --site) {
        char a = 'I';
        for (const auto& [s, c] : ops) {
            if (s == site) {
                a = c;
            }
        }
        m = kron(m, pauli(a));
    }
    return m;
}

MatrixXcd kron_target(const TargetHamiltonian& h) {
    const int n = h.n_sites;
    MatrixXcd m = MatrixXcd::Zero(Eigen::Index(1) << n, Eigen::Index(1) << n);
    for (const auto& [a, b] : h.bonds()) {
        if (h.kind == TargetKind::Xxx) {
            for (char c : {'X', 'Y', 'Z'}) {
                m += h.j / 4.0 * embed(n, {{a, c}, {b, c}});
            }
        } else {
            m += h.j * embed(n, {{a, 'Z'}, {b, 'Z'}});
        }
    }
    if (h.kind == TargetKind::Mfi) {
        for (int s = 0; s < n; ++s) {
            m += h.h_x * embed(n, {{s, 'X'}}) + h.h_z * embed(n, {{s, 'Z'}});
        }
    }
    return m;
}

MatrixXcd kron_drive(double omega, double delta, const Eigen::MatrixXd& j) {
    const int n = static_cast<int>(j.rows());
    MatrixXcd m = MatrixXcd::Zero(Eigen::Index(1) << n, Eigen::Index(1) << n);
    for (int a = 0; a < n; ++a) {
        m += omega / 2.0 * embed(n, {{a, 'X'}}) - delta * embed(n, {{a, 'n'}});
        for (int b = a + 1; b < n; ++b) {
            m += j(a, b) * embed(n, {{a, 'n'}, {b, 'n'}});
        }
    }
    return m;
}

StateVector random_state(int n, Rng& rng) {
    StateVector s(n);
    for (auto& a : s.amplitudes()) {
        a = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    }
    s.normalize();
    return s;
}

Eigen::VectorXcd as_vector(const StateVector& s) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(s.dim()));
    for (std::size_t i = 0; i < s.dim(); ++i) {
        v[static_cast<Eigen::Index>(i)] = s[i];
    }
    return v;
}

double max_diff(const StateVector& s, const Eigen::VectorXcd& v) {
    return (as_vector(s) - v).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("state vector basics") {
    StateVector g(3);
    CHECK(g.dim() == 8);
    CHECK(g[0] == cplx(1, 0));
    CHECK(g.norm() == 1.0);
    const auto b = StateVector::basis(3, 5);
    CHECK(b[5] == cplx(1, 0));
    CHECK(std::abs(g.dot(b)) == 0.0);
    CHECK_THROWS_AS(StateVector(2, std::vector<cplx>(3)), ValidationError);
    Rng rng(1);
    const auto s = random_state(4, rng);
    StateVector t = s;
    for (auto& a : t.amplitudes()) {
        a *= std::polar(1.0, 0.7);
    }
    CHECK(overlap_modulus(s, t) == doctest::Approx(1.0));
}

TEST_CASE("target action matches the Kronecker oracle") {
    Rng rng(5);
    std::vector<TargetHamiltonian> targets = {TargetHamiltonian::xxx(2, 1.0, Boundary::Open),
                                              TargetHamiltonian::xxx(4),
                                              TargetHamiltonian::xxx(5, 0.7),
                                              TargetHamiltonian::xxx(6, 1.0, Boundary::Open),
                                              TargetHamiltonian::mfi(4, 1.0, 1.2, -0.9),
                                              TargetHamiltonian::mfi(5, 0.4, 0.3, 0.2)};
    for (const auto& h : targets) {
        CAPTURE(h.n_sites);
        const MatrixXcd m = kron_target(h);
        CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
        for (int k = 0; k < 3; ++k) {
            const auto psi = random_state(h.n_sites, rng);
            CHECK(max_diff(apply_target(psi, h), m * as_vector(psi)) < 1e-13);
            const cplx e = as_vector(psi).dot(m * as_vector(psi));
            CHECK(expectation(psi, h) == doctest::Approx(e.real()).epsilon(1e-12));
        }
        CHECK((dense_matrix(h).cast<cplx>() - m).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("drive action matches the Kronecker oracle") {
    Rng rng(6);
    const PhysicalConstants c;
    for (int n : {2, 3, 5}) {
        const auto j = interaction_matrix(RingGeometry(n, 6.5), c);
        const MatrixXcd m = kron_drive(7.3, -41.0, j);
        CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
        const auto psi = random_state(n, rng);
        CHECK(max_diff(apply_drive(psi, 7.3, -41.0, j), m * as_vector(psi)) < 1e-10);
    }
}

TEST_CASE("pauli conventions") {
    const auto g = StateVector::basis(1, 0);
    const auto r = StateVector::basis(1, 1);
    const auto yg = apply_pauli_string(g, PauliString({{0, PauliAxis::Y}}));
    CHECK(yg[1] == cplx(0, -1));
    const auto yr = apply_pauli_string(r, PauliString({{0, PauliAxis::Y}}));
    CHECK(yr[0] == cplx(0, 1));
    CHECK(expectation(r, PauliString({{0, PauliAxis::Z}})) == 1.0);
    CHECK(expectation(g, PauliString({{0, PauliAxis::Z}})) == -1.0);
    CHECK_THROWS_AS(PauliString({{0, PauliAxis::X}, {0, PauliAxis::Z}}), ValidationError);

    Rng rng(3);
    const auto psi = random_state(4, rng);
    const PauliString p({{0, PauliAxis::Y}, {2, PauliAxis::X}, {3, PauliAxis::Z}});
    const MatrixXcd m = embed(4, {{0, 'Y'}, {2, 'X'}, {3, 'Z'}});
    CHECK(max_diff(apply_pauli_string(psi, p), m * as_vector(psi)) < 1e-14);
    CHECK(expectation(psi, p) == doctest::Approx(as_vector(psi).dot(m * as_vector(psi)).real()));
}

TEST_CASE("expectation rejects unnormalized states") {
    StateVector s(3);
    s[0] = 2.0;
    CHECK_THROWS_AS(expectation(s, TargetHamiltonian::xxx(3)), ValidationError);
    CHECK_THROWS_AS(expectation(StateVector(3), TargetHamiltonian::xxx(4)), ValidationError);
}

TEST_CASE("target validation and bonds") {
    CHECK(TargetHamiltonian::xxx(4).bonds().size() == 4);
    CHECK(TargetHamiltonian::xxx(4, 1.0, Boundary::Open).bonds().size() == 3);
    CHECK(TargetHamiltonian::xxx(2, 1.0, Boundary::Open).bonds().size() == 1);
    CHECK_THROWS_AS(TargetHamiltonian::xxx(1).validate(), ValidationError);
    // a periodic two-site ring would count its only bond twice
    CHECK_THROWS_AS(TargetHamiltonian::xxx(2).validate(), ValidationError);
}

TEST_CASE("translation and reflection maps") {
    CHECK(translate_bits(0b0001, 4) == 0b0010);
    CHECK(translate_bits(0b1000, 4) == 0b0001);
    CHECK(reflect_bits(0b0010, 4) == 0b1000);
    CHECK(reflect_bits(0b0001, 4) == 0b0001);
    for (int n : {3, 6, 7}) {
        for (std::uint64_t b = 0; b < (1ULL << n); ++b) {
            std::uint64_t t = b;
            for (int k = 0; k < n; ++k) {
                t = translate_bits(t, n);
            }
            CHECK(t == b);
            CHECK(reflect_bits(reflect_bits(b, n), n) == b);
            CHECK(std::popcount(translate_bits(b, n)) == std::popcount(b));
        }
    }
}

TEST_CASE("ring targets commute with translation") {
    Rng rng(8);
    for (const auto& h : {TargetHamiltonian::xxx(6), TargetHamiltonian::mfi(5, 1.0, 1.2, -0.9)}) {
        const auto psi = random_state(h.n_sites, rng);
        const auto a = apply_target(translation_apply(psi), h);
        const auto b = translation_apply(apply_target(psi, h));
        CHECK(distance(a, b) < 1e-13);
    }
}

TEST_CASE("symmetry sectors are orthonormal and tile the space") {
    for (int n : {4, 5, 6}) {
        std::size_t total = 0;
        for (int t : {1, -1}) {
            if (t == -1 && n % 2 != 0) {
                CHECK_THROWS_AS(SymmetrySector(n, {t, 1}), ValidationError);
                continue;
            }
            for (int r : {1, -1}) {
                const SymmetrySector s(n, {t, r});
                total += s.dim();
                // embed basis vectors and check orthonormality and eigenvalues
                std::vector<StateVector> cols;
                for (std::size_t k = 0; k < s.dim(); ++k) {
                    std::vector<cplx> e(s.dim(), 0.0);
                    e[k] = 1.0;
                    cols.push_back(s.embed(e));
                    const auto label = SymmetrySector::detect(cols.back());
                    REQUIRE(label.has_value());
                    CHECK(*label == SectorLabel{t, r});
                }
                for (std::size_t a = 0; a < cols.size(); ++a) {
                    for (std::size_t b = 0; b < cols.size(); ++b) {
                        CHECK(std::abs(cols[a].dot(cols[b]) - (a == b ? 1.0 : 0.0)) < 1e-13);
                    }
                }
            }
        }
        // the four one-dimensional irreps need not span everything, but never
        // exceed it
        CHECK(total <= (std::size_t(1) << n));
    }
}

TEST_CASE("sector restriction agrees with full-space action") {
    const PhysicalConstants c;
    const auto j = interaction_matrix(RingGeometry(6, 7.0), c);
    const SymmetrySector s(6, {1, 1});
    auto op = [&](const StateVector& v) { return apply_drive(v, 3.0, 20.0, j); };
    const auto dense = s.restrict_dense(op);
    Rng rng(12);
    std::vector<cplx> coeffs(s.dim());
    for (auto& x : coeffs) {
        x = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    }
    const auto full = op(s.embed(coeffs));
    const auto projected = s.project(full);
    Eigen::VectorXcd cv(static_cast<Eigen::Index>(coeffs.size()));
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        cv[static_cast<Eigen::Index>(k)] = coeffs[k];
    }
    const Eigen::VectorXcd want = dense.cast<cplx>() * cv;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        CHECK(std::abs(projected[k] - want[static_cast<Eigen::Index>(k)]) < 1e-10);
    }
    // the component left outside the sector vanishes
    CHECK(distance(s.embed(projected), full) < 1e-10);

    const auto flips = restricted_flip_sum(s);
    CHECK(flips.rows == s.dim());
}
