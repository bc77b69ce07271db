#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rydvqe/evolve.hpp"
#include "rydvqe/geometry.hpp"
#include "rydvqe/hamiltonian.hpp"
#include "rydvqe/optimize.hpp"
#include "rydvqe/pulse.hpp"
#include "rydvqe/rng.hpp"
#include "rydvqe/sector.hpp"

namespace rydvqe {

enum class InitialState { ProductG, QPi, Custom };
enum class OptimizerKind { NelderMead, LbfgsbFd };

struct VqeConfig {
    TargetHamiltonian target = TargetHamiltonian::xxx(4);
    PhysicalConstants constants;
    std::int64_t total_duration_ns = 2400;

    InitialState initial_state = InitialState::ProductG;
    std::optional<StateVector> custom_state;  // used with InitialState::Custom

    // Variable radius: R is optimized inside radius_bounds (lo <= 0 means the
    // ring's spacing floor). Fixed radius: fixed_radius_um is used as is.
    bool variable_radius = true;
    Interval radius_bounds{0.0, 35.0};
    double fixed_radius_um = 0.0;
    // Range of the first-stage random radius; defaults to radius_bounds.
    std::optional<Interval> init_radius;
    double radius_scale = 10.0;  // optimizer coordinate is R / radius_scale

    OptimizerKind optimizer = OptimizerKind::NelderMead;
    std::size_t max_iter = 5000;  // per stage
    double fd_step = 1e-4;
    double x_tol = 1e-8;
    double f_tol = 1e-10;

    std::size_t max_segments = 30;
    double error_threshold_percent = 0.01;
    std::uint64_t seed = 0;

    double step_ns = 1.0;
    Frame frame = Frame::Interaction;
    bool use_symmetry = true;  // propagate inside the initial state's ring sector
    double penalty = 1e6;

    int n_atoms() const { return target.n_sites; }
    Interval effective_radius_bounds() const;
    void validate() const;
};

StateVector initial_state(const VqeConfig& cfg);

/// 100 |E - E_GS| / |E_GS|.
double relative_error(double energy, double ground_energy);

/// Energy of the target in the state prepared by one parameter vector. The
/// symmetry sector, its restricted operators and the initial coefficients are
/// built once; evaluate() is const and may be called from one thread at a
/// time per instance.
class CostFunction {
public:
    explicit CostFunction(const VqeConfig& cfg);

    const VqeConfig& config() const { return cfg_; }
    const SymmetrySector* sector() const { return sector_.get(); }

    /// theta in physical units (Omega..., Delta..., [R um]). Invalid inputs and
    /// integration failures return the configured penalty.
    double evaluate(std::span<const double> theta, std::span<const std::int64_t> times) const;

    /// Same cost in optimizer coordinates (R divided by radius_scale).
    double evaluate_scaled(std::span<const double> z, std::span<const std::int64_t> times) const;

    /// Full-space final state; throws on invalid input.
    StateVector final_state(std::span<const double> theta, std::span<const std::int64_t> times) const;

    double radius_for(std::span<const double> theta) const;

private:
    VqeConfig cfg_;
    StateVector initial_;
    std::shared_ptr<const SymmetrySector> sector_;
    std::shared_ptr<const CsrMatrix> flip_sum_;
    std::vector<cplx> initial_coeffs_;
};

/// One parameter set in physical units.
double cost(std::span<const double> theta, std::span<const std::int64_t> times, const VqeConfig& cfg);

struct StageRecord {
    std::size_t stage = 0;  // 1-based
    std::size_t segments = 0;
    std::vector<std::int64_t> times;
    std::vector<double> theta;  // physical units
    double energy = 0.0;
    std::optional<double> eta_err_percent;
    std::size_t iterations = 0;
    std::size_t cumulative_iterations = 0;
    std::size_t evaluations = 0;
    std::size_t cumulative_evaluations = 0;
    bool converged = false;
    double radius_um = 0.0;
    std::optional<SplitInfo> split;  // absent for the first stage
};

struct RunRecord {
    VqeConfig config;
    std::size_t run_index = 0;
    std::uint64_t seed = 0;
    std::string generator;
    std::optional<double> ground_energy;
    std::vector<double> initial_theta;
    std::vector<StageRecord> stages;
    std::optional<PulseSequence> final_sequence;
    double final_radius_um = 0.0;
    std::string stop_reason;  // threshold | max_segments | saturated
    double wall_time_s = 0.0;

    const StageRecord& last() const { return stages.back(); }
};

/// The adaptive time-splitting loop. ground_energy supplies E_GS; without it
/// the run is energy only and stops on max_segments or saturation.
RunRecord adaptive_run(const VqeConfig& cfg, Rng& rng, std::optional<double> ground_energy);

/// As above, computing E_GS with the dense oracle when the target is small
/// enough.
RunRecord adaptive_run(const VqeConfig& cfg, Rng& rng);

std::optional<double> oracle_ground_energy(const TargetHamiltonian& h);

struct EnsembleStats {
    std::vector<double> final_errors;    // percent; empty in energy-only mode
    std::vector<double> final_energies;
    std::vector<double> final_radii;
    double mean_error = 0.0;
    double stderr_error = 0.0;
    double mean_energy = 0.0;
    double stderr_energy = 0.0;
    std::size_t best_run = 0;
    double mean_radius = 0.0;
    double stderr_radius = 0.0;
    double nn_ising_mhz_at_mean_radius = 0.0;
    std::size_t completed = 0;
};

struct EnsembleResult {
    EnsembleStats stats;
    std::vector<RunRecord> runs;  // member k uses derive_seed(base_seed, k)
    std::vector<std::string> failures;
};

EnsembleStats summarize(const std::vector<RunRecord>& runs);

/// Runs n_runs members on `parallel` worker threads. The result does not
/// depend on `parallel`.
EnsembleResult ensemble(const VqeConfig& cfg, std::size_t n_runs, std::uint64_t base_seed, std::size_t parallel = 1);

}  // namespace rydvqe
