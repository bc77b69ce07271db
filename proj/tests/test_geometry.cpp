#include "doctest.h"

#include <cmath>
#include <numbers>

#include "rydvqe/geometry.hpp"
#include "rydvqe/rng.hpp"

using namespace rydvqe;

namespace {

double dist(const Point2& a, const Point2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace

TEST_CASE("ring positions") {
    const auto p = atom_positions(RingGeometry(4, 1.0));
    REQUIRE(p.size() == 4);
    const double want[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (int j = 0; j < 4; ++j) {
        CHECK(p[j].x == doctest::Approx(want[j][0]).epsilon(1e-15));
        CHECK(std::abs(p[j].y - want[j][1]) < 1e-15);
    }
    const auto two = atom_positions(RingGeometry(2, 5.0));
    CHECK(dist(two[0], two[1]) == doctest::Approx(10.0));
}

TEST_CASE("nearest-neighbor distance matches brute force") {
    const RingGeometry g(8, 11.27);
    const auto p = atom_positions(g);
    double best = 1e300;
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = i + 1; j < p.size(); ++j) {
            best = std::min(best, dist(p[i], p[j]));
        }
    }
    CHECK(g.nn_distance() == doctest::Approx(best).epsilon(1e-12));
    CHECK(g.nn_distance() == doctest::Approx(8.626).epsilon(1e-3));
}

TEST_CASE("ring positions are invariant under rotation by 2 pi / N") {
    const RingGeometry g(7, 9.0);
    const auto p = atom_positions(g);
    const double a = 2.0 * std::numbers::pi / 7.0;
    for (int j = 0; j < 7; ++j) {
        const Point2 r{p[j].x * std::cos(a) - p[j].y * std::sin(a), p[j].x * std::sin(a) + p[j].y * std::cos(a)};
        CHECK(dist(r, p[(j + 1) % 7]) < 1e-12);
    }
}

TEST_CASE("interaction matrix properties on random rings") {
    const PhysicalConstants c;
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_index(9));
        const double r = rng.uniform(min_ring_radius(n, c), 40.0);
        const RingGeometry g(n, r);
        const auto j = interaction_matrix(g, c);
        const auto p = atom_positions(g);
        for (int a = 0; a < n; ++a) {
            CHECK(j(a, a) == 0.0);
            for (int b = 0; b < n; ++b) {
                CHECK(j(a, b) == j(b, a));
                CHECK(j(a, b) >= 0.0);
                if (a != b) {
                    // against the direct pairwise form
                    CHECK(j(a, b) == doctest::Approx(c.c6_over_hbar / std::pow(dist(p[a], p[b]), 6)).epsilon(1e-10));
                }
            }
        }
        CHECK(nn_ising_mhz(g, c) == doctest::Approx(j(0, 1) / (2.0 * std::numbers::pi)).epsilon(1e-12));
    }
}

TEST_CASE("couplings fall with distance and scale as R^-6") {
    const PhysicalConstants c;
    const auto j1 = interaction_matrix(RingGeometry(6, 8.0), c);
    const auto j2 = interaction_matrix(RingGeometry(6, 16.0), c);
    CHECK(j1(0, 1) > j1(0, 2));
    CHECK(j1(0, 2) > j1(0, 3));
    for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) {
            CHECK(j2(a, b) == doctest::Approx(j1(a, b) / 64.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("quoted radius and coupling pairs") {
    const PhysicalConstants c;
    struct Quote {
        int n;
        double r;
        double mhz;
    };
    for (const Quote q : {Quote{4, 5.952, 2.42}, Quote{4, 5.973, 2.38}, Quote{8, 11.27, 2.1}, Quote{6, 10.39, 0.68},
                          Quote{10, 15.81, 0.99}}) {
        CAPTURE(q.n);
        CAPTURE(q.r);
        CHECK(std::abs(nn_ising_mhz(RingGeometry(q.n, q.r), c) / q.mhz - 1.0) < 0.01);
        CHECK(radius_for_nn_ising_mhz(q.n, nn_ising_mhz(RingGeometry(q.n, q.r), c), c) ==
              doctest::Approx(q.r).epsilon(1e-12));
    }
}

TEST_CASE("geometry validation") {
    PhysicalConstants c;
    CHECK_THROWS_AS(RingGeometry(1, 5.0), ValidationError);
    CHECK_THROWS_AS(RingGeometry(4, 0.0), ValidationError);
    CHECK_THROWS_AS(RingGeometry(4, 2.0).check_spacing(c), ValidationError);
    CHECK_NOTHROW(RingGeometry(4, min_ring_radius(4, c) * 1.000001).check_spacing(c));
    CHECK_THROWS_AS(interaction_matrix(std::vector<Point2>{{0, 0}, {0, 0}}, c), ValidationError);

    c.c6_over_hbar = -1.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = PhysicalConstants{};
    c.min_segment_ns = 18;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = PhysicalConstants{};
    c.omega_bounds = {-1.0, 15.0};
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = PhysicalConstants{};
    c.delta_bounds = {3.0, 3.0};
    CHECK_THROWS_AS(c.validate(), ValidationError);
    CHECK_NOTHROW(PhysicalConstants{}.validate());
}
