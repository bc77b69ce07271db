#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace rydvqe {

using Objective = std::function<double(std::span<const double>)>;

/// Axis-aligned box lo <= x <= hi.
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t size() const { return lo.size(); }
    void clip(std::span<double> x) const;
    void validate(std::size_t n) const;
};

struct OptimizeResult {
    std::vector<double> x;  // best point evaluated
    double f = 0.0;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    bool converged = false;  // tolerance met before the iteration cap
};

struct NelderMeadOptions {
    std::size_t max_iter = 5000;
    double x_tol = 1e-8;   // max |x_k - x_best| over vertices
    double f_tol = 1e-10;  // max |f_k - f_best| over vertices
    double initial_rel_step = 0.05;
    double initial_zero_step = 0.00025;
};

/// Downhill simplex with reflection 1, expansion 2, contraction 0.5 and
/// shrink 0.5. Every proposed vertex is clipped to the box before it is
/// evaluated. Stops when both spreads fall under their tolerances or after
/// max_iter iterations.
OptimizeResult nelder_mead(const Objective& f, std::vector<double> x0, const Box& box,
                           const NelderMeadOptions& opts = {});

struct LbfgsbOptions {
    std::size_t max_iter = 5000;
    double fd_step = 1e-4;
    std::size_t history = 10;
    double pg_tol = 1e-6;     // on the infinity norm of the projected gradient
    double f_rel_tol = 2.2e-9;
};

/// Projected limited-memory BFGS on a box, with central finite-difference
/// gradients (one-sided where a bound is within one step).
OptimizeResult lbfgsb_fd(const Objective& f, std::vector<double> x0, const Box& box, const LbfgsbOptions& opts = {});

/// The finite-difference gradient used by lbfgsb_fd.
std::vector<double> fd_gradient(const Objective& f, std::span<const double> x, double fx, const Box& box,
                                double step);

}  // namespace rydvqe
