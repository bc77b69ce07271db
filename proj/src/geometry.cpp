#include "rydvqe/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rydvqe {

void PhysicalConstants::validate() const {
    if (!(c6_over_hbar > 0.0)) {
        throw ValidationError("constants.c6_over_hbar must be positive");
    }
    if (clock_period_ns <= 0) {
        throw ValidationError("constants.clock_period_ns must be positive");
    }
    if (min_segment_ns < 0 || min_segment_ns % clock_period_ns != 0) {
        throw ValidationError("constants.min_segment_ns must be a non-negative multiple of the clock period");
    }
    if (omega_bounds.lo < 0.0 || omega_bounds.hi < omega_bounds.lo) {
        throw ValidationError("constants.omega_bounds must satisfy 0 <= lo <= hi");
    }
    if (!(delta_bounds.lo < delta_bounds.hi)) {
        throw ValidationError("constants.delta_bounds must satisfy lo < hi");
    }
    if (!(min_nn_distance_um > 0.0)) {
        throw ValidationError("constants.min_nn_distance_um must be positive");
    }
}

RingGeometry::RingGeometry(int n_atoms, double radius_um) : n_atoms_(n_atoms), radius_(radius_um) {
    if (n_atoms < 2) {
        throw ValidationError("geometry.n_atoms must be at least 2");
    }
    if (!(radius_um > 0.0) || !std::isfinite(radius_um)) {
        throw ValidationError("geometry.radius_um must be positive and finite");
    }
}

double RingGeometry::nn_distance() const {
    return 2.0 * radius_ * std::sin(std::numbers::pi / n_atoms_);
}

void RingGeometry::check_spacing(const PhysicalConstants& c) const {
    if (nn_distance() < c.min_nn_distance_um) {
        throw ValidationError("geometry.radius_um gives nearest-neighbor distance " +
                              std::to_string(nn_distance()) + " um below the floor of " +
                              std::to_string(c.min_nn_distance_um) + " um");
    }
}

double min_ring_radius(int n_atoms, const PhysicalConstants& c) {
    return c.min_nn_distance_um / (2.0 * std::sin(std::numbers::pi / n_atoms));
}

std::vector<Point2> atom_positions(const RingGeometry& g) {
    const int n = g.n_atoms();
    std::vector<Point2> out;
    out.reserve(n);
    for (int j = 0; j < n; ++j) {
        const double phi = 2.0 * std::numbers::pi * j / n;
        out.push_back({g.radius() * std::cos(phi), g.radius() * std::sin(phi)});
    }
    return out;
}

Eigen::MatrixXd interaction_matrix(const std::vector<Point2>& positions, const PhysicalConstants& c) {
    const auto n = static_cast<Eigen::Index>(positions.size());
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = a + 1; b < n; ++b) {
            const double dx = positions[a].x - positions[b].x;
            const double dy = positions[a].y - positions[b].y;
            const double r2 = dx * dx + dy * dy;
            if (!(r2 > 0.0)) {
                throw ValidationError("atoms " + std::to_string(a) + " and " + std::to_string(b) +
                                      " coincide");
            }
            const double v = c.c6_over_hbar / (r2 * r2 * r2);
            j(a, b) = v;
            j(b, a) = v;
        }
    }
    return j;
}

Eigen::MatrixXd interaction_matrix(const RingGeometry& g, const PhysicalConstants& c) {
    // Chord lengths depend only on the index separation, which keeps the
    // matrix exactly circulant (bit-for-bit translation invariant).
    const int n = g.n_atoms();
    std::vector<double> by_sep(n, 0.0);
    for (int s = 1; s < n; ++s) {
        const double r = 2.0 * g.radius() * std::sin(std::numbers::pi * s / n);
        const double r2 = r * r;
        by_sep[s] = c.c6_over_hbar / (r2 * r2 * r2);
    }
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            if (a != b) {
                const int s = std::min((b - a + n) % n, (a - b + n) % n);
                j(a, b) = by_sep[s];
            }
        }
    }
    return j;
}

double nn_ising_mhz(const RingGeometry& g, const PhysicalConstants& c) {
    const double d = g.nn_distance();
    const double d2 = d * d;
    return c.c6_over_hbar / (d2 * d2 * d2) / (2.0 * std::numbers::pi);
}

double radius_for_nn_ising_mhz(int n_atoms, double j_nn_mhz, const PhysicalConstants& c) {
    const double d = std::pow(c.c6_over_hbar / (2.0 * std::numbers::pi * j_nn_mhz), 1.0 / 6.0);
    return d / (2.0 * std::sin(std::numbers::pi / n_atoms));
}

}  // namespace rydvqe
