#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rydvqe/geometry.hpp"
#include "rydvqe/rng.hpp"

namespace rydvqe {

struct Breakpoint {
    std::int64_t t_ns = 0;
    double omega = 0.0;  // rad/us
    double delta = 0.0;  // rad/us

    friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
};

struct DriveSample {
    double omega = 0.0;
    double delta = 0.0;
};

/// Piecewise-linear global drive: Omega(t) and Delta(t) interpolate linearly
/// between breakpoints. Construction enforces the hardware rules: t_0 = 0,
/// times on the clock grid and strictly increasing, every segment longer than
/// the minimum duration, and all amplitudes inside their bounds.
class PulseSequence {
public:
    PulseSequence(std::vector<Breakpoint> breakpoints, const PhysicalConstants& c);

    const std::vector<Breakpoint>& breakpoints() const { return breakpoints_; }
    std::size_t segment_count() const { return breakpoints_.size() - 1; }
    std::int64_t duration_ns() const { return breakpoints_.back().t_ns; }
    std::vector<std::int64_t> times() const;

    /// Linear interpolation inside the containing segment; exact at breakpoints.
    /// t may be off the clock grid (integrator stage times).
    DriveSample sample(double t_ns) const;

    friend bool operator==(const PulseSequence&, const PulseSequence&) = default;

private:
    std::vector<Breakpoint> breakpoints_;
};

/// Two-breakpoint ramp (0, omega0, delta0) -> (T, omega1, delta1).
PulseSequence linear_schedule(double omega0, double omega1, double delta0, double delta1,
                              std::int64_t total_ns, const PhysicalConstants& c);

/// Inserts a breakpoint at t_s inside segment `segment` (0-based; the segment
/// spans breakpoints[segment] .. breakpoints[segment + 1]). The new amplitudes
/// are interpolated, so the sampled profile is unchanged.
PulseSequence split_segment(const PulseSequence& seq, std::size_t segment, std::int64_t t_s,
                            const PhysicalConstants& c);

/// Split points on the clock grid that leave both halves longer than the
/// minimum segment duration.
std::vector<std::int64_t> legal_split_points(std::int64_t t_begin, std::int64_t t_end,
                                             const PhysicalConstants& c);

struct SplitInfo {
    std::size_t segment = 0;
    std::int64_t t_s = 0;
    std::size_t eligible_segments = 0;
    std::size_t segment_draw = 0;  // index into the eligible segment list
    std::size_t legal_points = 0;
    std::size_t point_draw = 0;    // index into the legal split points

    friend bool operator==(const SplitInfo&, const SplitInfo&) = default;
};

struct SplitResult {
    PulseSequence sequence;
    SplitInfo info;
};

/// Picks a segment uniformly among those that admit a legal split point, then
/// a split point uniformly among its legal grid points. Returns nullopt when no
/// segment can be split (the schedule is saturated).
std::optional<SplitResult> random_split(const PulseSequence& seq, Rng& rng, const PhysicalConstants& c);

/// Flat parameter layout (Omega_0..Omega_M, Delta_0..Delta_M[, R]).
struct ParamVector {
    std::vector<double> values;
    bool has_radius = true;

    std::size_t breakpoint_count() const { return (values.size() - (has_radius ? 1 : 0)) / 2; }
    double omega(std::size_t i) const { return values[i]; }
    double delta(std::size_t i) const { return values[breakpoint_count() + i]; }
    double radius() const { return values.back(); }
};

ParamVector pack(const PulseSequence& seq, std::optional<double> radius_um);

struct Unpacked {
    PulseSequence sequence;
    std::optional<double> radius_um;
};

/// Inverse of pack. Nothing is clamped: an out-of-bounds coordinate raises a
/// ValidationError naming it.
Unpacked unpack(std::span<const double> theta, std::span<const std::int64_t> times, bool has_radius,
                const PhysicalConstants& c);

}  // namespace rydvqe
