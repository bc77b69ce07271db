#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "rydvqe/hamiltonian.hpp"
#include "rydvqe/pulse.hpp"
#include "rydvqe/sector.hpp"

namespace rydvqe {

/// Lab: classic RK4 on d psi/dt = -i H(t) psi.
/// Interaction: the same RK4 tableau applied in the frame co-rotating with the
/// diagonal part V - Delta(t) n, whose propagator is exact for linear ramps.
/// Only the (Omega/2) sum X coupling is left to the integrator, so diagonal
/// evolution is exact and the step no longer has to resolve phases of order
/// N |Delta|.
enum class Frame { Lab, Interaction };

struct EvolveOptions {
    double step_ns = 1.0;
    Frame frame = Frame::Interaction;
    double drift_tolerance = 1e-6;
};

class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The drive Hamiltonian written in an orthonormal basis in which it reads
///   H(t) = diag(V) - Delta(t) diag(n) + (Omega(t) / 2) S,
/// with V the van der Waals energy, n the excitation number and S = sum_j X_j.
/// Either the full 2^N computational basis or one ring symmetry sector.
class DriveOperator {
public:
    static DriveOperator full_space(const Eigen::MatrixXd& jmat);
    static DriveOperator in_sector(std::shared_ptr<const SymmetrySector> sector,
                                   std::shared_ptr<const CsrMatrix> flip_sum, const Eigen::MatrixXd& jmat);

    std::size_t dim() const { return interaction_.size(); }
    int n_qubits() const { return n_qubits_; }
    const std::vector<double>& interaction() const { return interaction_; }
    const std::vector<int>& excitations() const { return excitations_; }
    const SymmetrySector* sector() const { return sector_.get(); }

    /// out = S in, on split real / imaginary parts.
    void apply_flip_sum(const double* in_re, const double* in_im, double* out_re, double* out_im) const;

private:
    int n_qubits_ = 0;
    std::vector<double> interaction_;
    std::vector<int> excitations_;
    std::shared_ptr<const SymmetrySector> sector_;
    std::shared_ptr<const CsrMatrix> flip_sum_;
};

/// Fixed-step propagator over piecewise-linear schedules. Owns its work
/// buffers; one instance per thread.
class Propagator {
public:
    Propagator(DriveOperator op, EvolveOptions opts);

    const DriveOperator& op() const { return op_; }
    const EvolveOptions& options() const { return opts_; }

    /// Advances coefficients (in the operator's basis) across one linear
    /// ramp. The step is shrunk so that it divides the segment evenly.
    void propagate_segment(std::vector<cplx>& coeffs, const Breakpoint& from, const Breakpoint& to);

    /// Time-ordered product of all segments, followed by the norm-drift check.
    void evolve(std::vector<cplx>& coeffs, const PulseSequence& seq);

private:
    void load(const std::vector<cplx>& coeffs);
    void store(std::vector<cplx>& coeffs) const;
    void step_interaction(double t0, double h, const Breakpoint& from, const Breakpoint& to);
    void step_lab(double t0, double h, const Breakpoint& from, const Breakpoint& to);
    void prepare_step_phases(double h_us);

    DriveOperator op_;
    EvolveOptions opts_;
    std::size_t steps_taken_ = 0;

    double cached_h_ = -1.0;
    std::vector<double> vphase_re_, vphase_im_;  // exp(-i V h / 2)
    std::vector<double> re_, im_;
    std::vector<double> ure_, uim_, are_, aim_, bre_, bim_, kre_, kim_, sre_, sim_;
    std::vector<double> p1re_, p1im_, p2re_, p2im_;
};

/// U(t_i, t_{i-1}) |psi> for a single linear ramp, in the full space.
StateVector propagate_segment(const StateVector& psi, const Breakpoint& from, const Breakpoint& to,
                              const Eigen::MatrixXd& jmat, const EvolveOptions& opts = {});

/// Time-ordered evolution through the whole schedule, in the full space.
StateVector evolve(const PulseSequence& seq, const StateVector& initial, const Eigen::MatrixXd& jmat,
                   const EvolveOptions& opts = {});

}  // namespace rydvqe
