#include "doctest.h"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "rydvqe/ed.hpp"
#include "rydvqe/evolve.hpp"
#include "rydvqe/geometry.hpp"
#include "rydvqe/rng.hpp"
#include "rydvqe/sector.hpp"

using namespace rydvqe;
using Eigen::MatrixXcd;

namespace {

const PhysicalConstants kC{};

MatrixXcd drive_matrix(double omega, double delta, const Eigen::MatrixXd& j) {
    const int n = static_cast<int>(j.rows());
    const std::size_t dim = std::size_t(1) << n;
    MatrixXcd m(dim, dim);
    for (std::size_t b = 0; b < dim; ++b) {
        const auto col = apply_drive(StateVector::basis(n, b), omega, delta, j);
        for (std::size_t a = 0; a < dim; ++a) {
            m(a, b) = col[a];
        }
    }
    return m;
}

// Fourth-order Magnus with two Gauss points per slice and an exact matrix
// exponential.
StateVector magnus_oracle(const PulseSequence& seq, const StateVector& psi, const Eigen::MatrixXd& j,
                          int slices_per_ns) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(psi.dim()));
    for (std::size_t i = 0; i < psi.dim(); ++i) {
        v[static_cast<Eigen::Index>(i)] = psi[i];
    }
    const auto& bp = seq.breakpoints();
    const double c = std::sqrt(3.0) / 6.0;
    for (std::size_t s = 0; s + 1 < bp.size(); ++s) {
        const auto slices = (bp[s + 1].t_ns - bp[s].t_ns) * slices_per_ns;
        const double h_ns = double(bp[s + 1].t_ns - bp[s].t_ns) / double(slices);
        const double h = h_ns * 1e-3;
        for (std::int64_t k = 0; k < slices; ++k) {
            const double t0 = double(bp[s].t_ns) + k * h_ns;
            const auto d1 = seq.sample(t0 + (0.5 - c) * h_ns);
            const auto d2 = seq.sample(t0 + (0.5 + c) * h_ns);
            const MatrixXcd a1 = cplx(0, -1) * drive_matrix(d1.omega, d1.delta, j);
            const MatrixXcd a2 = cplx(0, -1) * drive_matrix(d2.omega, d2.delta, j);
            const MatrixXcd omega = 0.5 * h * (a1 + a2) + std::sqrt(3.0) / 12.0 * h * h * (a2 * a1 - a1 * a2);
            v = omega.exp() * v;
        }
    }
    std::vector<cplx> out(v.data(), v.data() + v.size());
    return StateVector(psi.n_qubits(), std::move(out));
}

PulseSequence random_schedule(Rng& rng, const std::vector<std::int64_t>& times, double omega_max = 15.0,
                              double delta_max = 125.0) {
    std::vector<Breakpoint> bp;
    for (auto t : times) {
        bp.push_back({t, rng.uniform(0.0, omega_max), rng.uniform(-delta_max, delta_max)});
    }
    return PulseSequence(bp, kC);
}

StateVector random_state(int n, Rng& rng) {
    StateVector s(n);
    for (auto& a : s.amplitudes()) {
        a = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    }
    s.normalize();
    return s;
}

EvolveOptions with_step(double step, Frame f = Frame::Interaction, double drift_tolerance = 1e-6) {
    EvolveOptions o;
    o.step_ns = step;
    o.frame = f;
    o.drift_tolerance = drift_tolerance;
    return o;
}

}  // namespace

TEST_CASE("resonant pi pulse transfers the ground state") {
    const double omega = std::numbers::pi / 0.24;  // 240 ns pulse area pi
    const PulseSequence seq({{0, omega, 0.0}, {240, omega, 0.0}}, kC);
    const Eigen::MatrixXd j = Eigen::MatrixXd::Zero(1, 1);
    for (auto f : {Frame::Interaction, Frame::Lab}) {
        const auto out = evolve(seq, StateVector(1), j, with_step(1.0, f));
        CHECK(std::norm(out[1]) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(std::abs(out[1] - cplx(0, -1)) < 1e-9);
    }
}

TEST_CASE("detuned Rabi oscillation") {
    const double omega = 9.0, delta = 14.0;
    const PulseSequence seq({{0, omega, delta}, {400, omega, delta}}, kC);
    const Eigen::MatrixXd j = Eigen::MatrixXd::Zero(1, 1);
    const auto out = evolve(seq, StateVector(1), j);
    const double w = std::hypot(omega, delta);
    const double want = omega * omega / (w * w) * std::pow(std::sin(w * 0.4 / 2.0), 2);
    CHECK(std::norm(out[1]) == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("zero drive only adds phases") {
    Rng rng(3);
    const auto j = interaction_matrix(RingGeometry(4, 6.0), kC);
    const PulseSequence seq({{0, 0.0, 30.0}, {100, 0.0, -50.0}, {240, 0.0, 0.0}}, kC);
    const auto psi = random_state(4, rng);
    const auto out = evolve(seq, psi, j);
    for (std::size_t b = 0; b < psi.dim(); ++b) {
        CHECK(std::abs(std::abs(out[b]) - std::abs(psi[b])) < 1e-12);
    }
    const PulseSequence dark({{0, 0.0, 0.0}, {2400, 0.0, 0.0}}, kC);
    CHECK(overlap_modulus(evolve(dark, StateVector(4), j), StateVector(4)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("evolution matches an exact-exponential oracle") {
    Rng rng(21);
    const auto j = interaction_matrix(RingGeometry(3, 6.5), kC);
    const auto seq = random_schedule(rng, {0, 60, 140, 200});
    const auto psi = random_state(3, rng);
    const auto ref = magnus_oracle(seq, psi, j, 16);
    const auto fine = evolve(seq, psi, j, with_step(0.25));
    CHECK(distance(fine, ref) < 1e-9);
    CHECK(distance(evolve(seq, psi, j), ref) < 1e-6);
    CHECK(distance(evolve(seq, psi, j, with_step(0.25, Frame::Lab)), ref) < 1e-6);
}

TEST_CASE("fourth-order convergence on one qubit") {
    const PulseSequence seq({{0, 2.0, -12.0}, {400, 14.0, 20.0}, {800, 6.0, -4.0}}, kC);
    const Eigen::MatrixXd j = Eigen::MatrixXd::Zero(1, 1);
    const auto ref = evolve(seq, StateVector(1), j, with_step(0.5));
    for (auto f : {Frame::Interaction, Frame::Lab}) {
        const double e1 = distance(evolve(seq, StateVector(1), j, with_step(20.0, f, 1.0)), ref);
        const double e2 = distance(evolve(seq, StateVector(1), j, with_step(10.0, f, 1.0)), ref);
        const double slope = std::log2(e1 / e2);
        CAPTURE(e1);
        CAPTURE(e2);
        CHECK(std::abs(slope - 4.0) < 0.3);
    }
}

TEST_CASE("splitting a segment does not change the evolution") {
    Rng rng(4);
    const auto j = interaction_matrix(RingGeometry(5, 6.8), kC);
    for (int trial = 0; trial < 5; ++trial) {
        const auto seq = random_schedule(rng, {0, 800, 1600, 2400});
        const auto s = random_split(seq, rng, kC);
        REQUIRE(s.has_value());
        const auto psi = random_state(5, rng);
        CHECK(distance(evolve(seq, psi, j), evolve(s->sequence, psi, j)) < 1e-9);
    }
}

TEST_CASE("norm is conserved over the full duration") {
    Rng rng(5);
    const auto j = interaction_matrix(RingGeometry(4, 5.952), kC);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<std::int64_t> times{0};
        for (int k = 1; k <= 10; ++k) {
            times.push_back(240 * k);
        }
        const auto out = evolve(random_schedule(rng, times), StateVector(4), j);
        CHECK(std::abs(out.norm() - 1.0) < 1e-8);
    }
}

TEST_CASE("oversized steps are reported") {
    const auto j = interaction_matrix(RingGeometry(4, 4.0 / (2.0 * std::sin(std::numbers::pi / 4))), kC);
    const PulseSequence seq({{0, 15.0, 125.0}, {2400, 15.0, -125.0}}, kC);
    CHECK_THROWS_AS(evolve(seq, StateVector(4), j, with_step(40.0, Frame::Lab)), IntegrationError);
    StateVector bad(4);
    bad[0] = 2.0;
    CHECK_THROWS_AS(evolve(seq, bad, j), ValidationError);
    EvolveOptions o;
    o.step_ns = 0.0;
    CHECK_THROWS_AS(evolve(seq, StateVector(4), j, o), ValidationError);
}

TEST_CASE("sector propagation agrees with the full space") {
    Rng rng(6);
    const int n = 6;
    const auto j = interaction_matrix(RingGeometry(n, 8.0), kC);
    const auto seq = random_schedule(rng, {0, 600, 1500, 2400});
    for (int t : {1, -1}) {
        auto sector = std::make_shared<const SymmetrySector>(n, SectorLabel{t, 1});
        auto flips = std::make_shared<const CsrMatrix>(restricted_flip_sum(*sector));
        std::vector<cplx> c(sector->dim());
        for (auto& x : c) {
            x = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        }
        double nrm = 0.0;
        for (auto& x : c) {
            nrm += std::norm(x);
        }
        for (auto& x : c) {
            x /= std::sqrt(nrm);
        }
        const auto full_in = sector->embed(c);
        Propagator p(DriveOperator::in_sector(sector, flips, j), {});
        p.evolve(c, seq);
        const auto full_out = evolve(seq, full_in, j);
        CHECK(distance(sector->embed(c), full_out) < 1e-12);
        // translation eigenvalue is preserved
        CHECK(distance(translation_apply(full_out), [&] {
                  auto s = full_out;
                  for (auto& a : s.amplitudes()) {
                      a *= double(t);
                  }
                  return s;
              }()) < 1e-10);
    }
}
