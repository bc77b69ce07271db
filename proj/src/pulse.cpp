#include "rydvqe/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rydvqe {

namespace {

// ((t1 - t) v0 + (t - t0) v1) / (t1 - t0)
double interpolate(double t0, double t1, double v0, double v1, double t) {
    return ((t1 - t) * v0 + (t - t0) * v1) / (t1 - t0);
}

std::string fmt(double v) {
    return std::to_string(v);
}

}  // namespace

PulseSequence::PulseSequence(std::vector<Breakpoint> breakpoints, const PhysicalConstants& c)
    : breakpoints_(std::move(breakpoints)) {
    if (breakpoints_.size() < 2) {
        throw ValidationError("pulse sequence needs at least two breakpoints");
    }
    if (breakpoints_.front().t_ns != 0) {
        throw ValidationError("pulse sequence must start at t = 0");
    }
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
        const auto& b = breakpoints_[i];
        const std::string where = "breakpoints[" + std::to_string(i) + "]";
        if (b.t_ns % c.clock_period_ns != 0) {
            throw ValidationError(where + ".t_ns = " + std::to_string(b.t_ns) +
                                  " is not a multiple of the clock period");
        }
        if (i > 0) {
            const std::int64_t d = b.t_ns - breakpoints_[i - 1].t_ns;
            if (d <= c.min_segment_ns) {
                throw ValidationError(where + ": segment duration " + std::to_string(d) +
                                      " ns does not exceed the minimum of " +
                                      std::to_string(c.min_segment_ns) + " ns");
            }
        }
        if (!std::isfinite(b.omega) || !c.omega_bounds.contains(b.omega)) {
            throw ValidationError(where + ": omega out of bounds (" + fmt(b.omega) + ")");
        }
        if (!std::isfinite(b.delta) || !c.delta_bounds.contains(b.delta)) {
            throw ValidationError(where + ": delta out of bounds (" + fmt(b.delta) + ")");
        }
    }
}

std::vector<std::int64_t> PulseSequence::times() const {
    std::vector<std::int64_t> t;
    t.reserve(breakpoints_.size());
    for (const auto& b : breakpoints_) {
        t.push_back(b.t_ns);
    }
    return t;
}

DriveSample PulseSequence::sample(double t_ns) const {
    if (!(t_ns >= 0.0) || t_ns > static_cast<double>(duration_ns())) {
        throw std::out_of_range("sample time " + fmt(t_ns) + " ns outside [0, " +
                                std::to_string(duration_ns()) + "]");
    }
    // First breakpoint with t > t_ns; the containing segment ends there.
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t_ns,
                               [](double t, const Breakpoint& b) { return t < static_cast<double>(b.t_ns); });
    if (it == breakpoints_.end()) {
        return {breakpoints_.back().omega, breakpoints_.back().delta};
    }
    const auto& b1 = *it;
    const auto& b0 = *(it - 1);
    if (t_ns == static_cast<double>(b0.t_ns)) {
        return {b0.omega, b0.delta};
    }
    const auto t0 = static_cast<double>(b0.t_ns);
    const auto t1 = static_cast<double>(b1.t_ns);
    return {interpolate(t0, t1, b0.omega, b1.omega, t_ns), interpolate(t0, t1, b0.delta, b1.delta, t_ns)};
}

PulseSequence linear_schedule(double omega0, double omega1, double delta0, double delta1,
                              std::int64_t total_ns, const PhysicalConstants& c) {
    return PulseSequence({{0, omega0, delta0}, {total_ns, omega1, delta1}}, c);
}

PulseSequence split_segment(const PulseSequence& seq, std::size_t segment, std::int64_t t_s,
                            const PhysicalConstants& c) {
    const auto& bp = seq.breakpoints();
    if (segment >= seq.segment_count()) {
        throw ValidationError("segment index " + std::to_string(segment) + " out of range");
    }
    const auto& b0 = bp[segment];
    const auto& b1 = bp[segment + 1];
    if (t_s - b0.t_ns <= c.min_segment_ns || b1.t_ns - t_s <= c.min_segment_ns) {
        throw ValidationError("split point " + std::to_string(t_s) + " ns leaves a sub-segment of at most " +
                              std::to_string(c.min_segment_ns) + " ns");
    }
    const auto t0 = static_cast<double>(b0.t_ns);
    const auto t1 = static_cast<double>(b1.t_ns);
    const auto ts = static_cast<double>(t_s);
    Breakpoint mid{t_s, interpolate(t0, t1, b0.omega, b1.omega, ts), interpolate(t0, t1, b0.delta, b1.delta, ts)};

    std::vector<Breakpoint> out;
    out.reserve(bp.size() + 1);
    out.insert(out.end(), bp.begin(), bp.begin() + static_cast<std::ptrdiff_t>(segment) + 1);
    out.push_back(mid);
    out.insert(out.end(), bp.begin() + static_cast<std::ptrdiff_t>(segment) + 1, bp.end());
    return PulseSequence(std::move(out), c);
}

std::vector<std::int64_t> legal_split_points(std::int64_t t_begin, std::int64_t t_end, const PhysicalConstants& c) {
    std::vector<std::int64_t> pts;
    const std::int64_t clk = c.clock_period_ns;
    // t_begin is on the grid, so the first candidate is the next grid point
    // strictly past t_begin + min_segment.
    for (std::int64_t t = t_begin + (c.min_segment_ns / clk + 1) * clk; t_end - t > c.min_segment_ns; t += clk) {
        pts.push_back(t);
    }
    return pts;
}

std::optional<SplitResult> random_split(const PulseSequence& seq, Rng& rng, const PhysicalConstants& c) {
    const auto& bp = seq.breakpoints();
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        if (!legal_split_points(bp[i].t_ns, bp[i + 1].t_ns, c).empty()) {
            eligible.push_back(i);
        }
    }
    if (eligible.empty()) {
        return std::nullopt;
    }
    SplitInfo info;
    info.eligible_segments = eligible.size();
    info.segment_draw = static_cast<std::size_t>(rng.uniform_index(eligible.size()));
    info.segment = eligible[info.segment_draw];
    const auto pts = legal_split_points(bp[info.segment].t_ns, bp[info.segment + 1].t_ns, c);
    info.legal_points = pts.size();
    info.point_draw = static_cast<std::size_t>(rng.uniform_index(pts.size()));
    info.t_s = pts[info.point_draw];
    return SplitResult{split_segment(seq, info.segment, info.t_s, c), info};
}

ParamVector pack(const PulseSequence& seq, std::optional<double> radius_um) {
    const auto& bp = seq.breakpoints();
    ParamVector p;
    p.has_radius = radius_um.has_value();
    p.values.reserve(2 * bp.size() + 1);
    for (const auto& b : bp) {
        p.values.push_back(b.omega);
    }
    for (const auto& b : bp) {
        p.values.push_back(b.delta);
    }
    if (radius_um) {
        p.values.push_back(*radius_um);
    }
    return p;
}

Unpacked unpack(std::span<const double> theta, std::span<const std::int64_t> times, bool has_radius,
                const PhysicalConstants& c) {
    const std::size_t m = times.size();
    const std::size_t expected = 2 * m + (has_radius ? 1 : 0);
    if (theta.size() != expected) {
        throw ValidationError("parameter vector has length " + std::to_string(theta.size()) + ", expected " +
                              std::to_string(expected) + " for " + std::to_string(m) + " breakpoints");
    }
    std::vector<Breakpoint> bp(m);
    for (std::size_t i = 0; i < m; ++i) {
        bp[i] = {times[i], theta[i], theta[m + i]};
        if (!c.omega_bounds.contains(theta[i])) {
            throw ValidationError("theta[" + std::to_string(i) + "] (omega_" + std::to_string(i) +
                                  ") = " + fmt(theta[i]) + " is out of bounds");
        }
        if (!c.delta_bounds.contains(theta[m + i])) {
            throw ValidationError("theta[" + std::to_string(m + i) + "] (delta_" + std::to_string(i) +
                                  ") = " + fmt(theta[m + i]) + " is out of bounds");
        }
    }
    std::optional<double> r;
    if (has_radius) {
        r = theta.back();
    }
    return {PulseSequence(std::move(bp), c), r};
}

}  // namespace rydvqe
