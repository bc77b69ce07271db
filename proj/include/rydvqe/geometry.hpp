#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rydvqe {

// Units used throughout: energies and frequencies in rad/us (hbar = 1),
// lengths in um, schedule times in integer ns.

/// Raised for any input that violates a documented constraint. The message
/// names the offending field.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double v) const { return v >= lo && v <= hi; }
    double width() const { return hi - lo; }
};

/// Hardware constants of the Rydberg platform. Defaults are the Rb-87, n = 70
/// values with the Pulser-style device limits.
struct PhysicalConstants {
    double c6_over_hbar = 5420158.53;      // rad um^6 / us
    std::int64_t clock_period_ns = 4;
    std::int64_t min_segment_ns = 16;
    Interval omega_bounds{0.0, 15.0};      // rad/us
    Interval delta_bounds{-125.0, 125.0};  // rad/us
    double min_nn_distance_um = 4.0;

    /// Throws ValidationError if any invariant fails.
    void validate() const;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// N atoms evenly spaced on a circle of radius R (um).
class RingGeometry {
public:
    RingGeometry(int n_atoms, double radius_um);

    int n_atoms() const { return n_atoms_; }
    double radius() const { return radius_; }

    /// 2 R sin(pi / N).
    double nn_distance() const;

    /// Rejects rings whose nearest-neighbor spacing is below the floor.
    void check_spacing(const PhysicalConstants& c) const;

private:
    int n_atoms_;
    double radius_;
};

/// Smallest radius whose nearest-neighbor spacing meets `min_nn_distance_um`.
double min_ring_radius(int n_atoms, const PhysicalConstants& c);

/// Site j sits at angle 2 pi j / N.
std::vector<Point2> atom_positions(const RingGeometry& g);

/// Symmetric N x N matrix of J_ij / hbar = (C6 / hbar) / r_ij^6 (rad/us),
/// zero on the diagonal.
Eigen::MatrixXd interaction_matrix(const RingGeometry& g, const PhysicalConstants& c);

/// Same, for an arbitrary list of positions. Coincident atoms are rejected.
Eigen::MatrixXd interaction_matrix(const std::vector<Point2>& positions, const PhysicalConstants& c);

/// Nearest-neighbor Ising coupling J_nn / h in MHz.
double nn_ising_mhz(const RingGeometry& g, const PhysicalConstants& c);

/// Inverse of nn_ising_mhz: the ring radius that yields a given J_nn / h.
double radius_for_nn_ising_mhz(int n_atoms, double j_nn_mhz, const PhysicalConstants& c);

}  // namespace rydvqe
