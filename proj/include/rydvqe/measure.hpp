#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rydvqe/hamiltonian.hpp"
#include "rydvqe/rng.hpp"

namespace rydvqe {

/// (|rgrg...> - |grgr...>) / sqrt(2), site 1 first. Translation eigenvalue -1.
StateVector prepare_q_pi(int n_sites);

// Gates in the |g>, |r> basis. Sites are 0-based here.
//   H = (|r><r| - |g><g| + |r><g| + |g><r|) / sqrt(2)
//   CNOT_{c,t} = |r><r|_c (x) 1_t + |g><g|_c (x) X_t   (acts when the control is |g>)
void apply_hadamard(StateVector& psi, int site);
void apply_cnot(StateVector& psi, int control, int target);

enum class GhzLayout { Chain, LogDepth };

struct CnotGate {
    int control = 0;
    int target = 0;
    int layer = 0;  // 1-based; layer 0 holds the Hadamard
};

/// CNOT pattern that follows H on site 0. Chain: 0->1->2->... LogDepth: each
/// layer pairs every prepared site with the lowest free site of opposite
/// parity, giving ceil(log2 N) layers for even N.
std::vector<CnotGate> ghz_cnots(int n_sites, GhzLayout layout);

StateVector ghz_circuit_state(int n_sites, GhzLayout layout);

/// exp(-i theta/2 Y_1 X_2 ... X_N) |psi>.
StateVector apply_u_flip(const StateVector& psi, double theta);

/// X on sites 2, 4, ... of |g...g>, then U_flip(pi/2). Equals -prepare_q_pi.
StateVector u_flip_state(int n_sites);

enum class RotationAxis { X, Y };

/// Product over sites of exp(-i theta sigma_axis / 2).
StateVector global_rotation(const StateVector& psi, RotationAxis axis, double theta);

/// Z-basis readout histogram. Key bit j is site j (1 = |r>).
struct ShotTable {
    int n_qubits = 0;
    std::uint64_t shots = 0;
    std::map<std::uint64_t, std::uint64_t> histogram;
};

/// Site 1 first, '1' for |r>.
std::string to_bitstring(std::uint64_t b, int n);

ShotTable sample_bitstrings(const StateVector& psi, std::uint64_t shots, Rng& rng);

enum class MeasurementBasis { Z, X, Y };

struct BasisEstimate {
    MeasurementBasis basis = MeasurementBasis::Z;
    std::vector<double> bond_correlators;  // <sigma_i sigma_j> per bond
    double bond_sum = 0.0;
    double bond_sum_variance = 0.0;  // of the mean; zero in exact mode
};

struct EnergyEstimate {
    double energy = 0.0;
    double stderr = 0.0;
    std::uint64_t shots_per_basis = 0;  // 0 = exact probabilities
    std::vector<BasisEstimate> settings;
};

/// The state rotated so that a Z-basis readout measures `basis`:
/// R_Y(pi/2) for X, R_X(pi/2) for Y.
StateVector rotate_for_basis(const StateVector& psi, MeasurementBasis basis, double angle = 1.5707963267948966);

/// Three settings (Z, X, Y), each read out shots_per_basis times. Every bond
/// parity comes from the same shots, so the error bar uses the per-shot
/// variance of the bond sum, which keeps the covariance between bonds.
EnergyEstimate estimate_heisenberg_energy(const StateVector& psi, const TargetHamiltonian& h,
                                          std::uint64_t shots_per_basis, Rng& rng);

/// The same estimator evaluated on exact outcome probabilities.
EnergyEstimate estimate_heisenberg_energy_exact(const StateVector& psi, const TargetHamiltonian& h);

/// T* = T + T_rot checked against a coherence budget.
struct DurationBudget {
    double evolution_us = 2.4;
    double rotation_us = 0.9;
    double coherence_us = 6.0;

    double total_us() const { return evolution_us + rotation_us; }
    bool within_coherence() const { return total_us() <= coherence_us; }
};

}  // namespace rydvqe
