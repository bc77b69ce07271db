#pragma once

#include <string>

#include <Eigen/Dense>

#include "rydvqe/hamiltonian.hpp"
#include "rydvqe/sector.hpp"

namespace rydvqe {

struct GroundStateResult {
    double energy = 0.0;
    StateVector vector;
    double degeneracy_gap = 0.0;  // E_1 - E_0
};

constexpr int kMaxDenseSites = 12;

/// Real symmetric matrix of the target in the computational basis.
Eigen::MatrixXd dense_matrix(const TargetHamiltonian& h);

/// Lowest eigenpair by dense diagonalization. The vector is real, with its
/// largest-magnitude component made positive.
GroundStateResult dense_ground_state(const TargetHamiltonian& h);

/// Lowest energy within one symmetry sector of a periodic target.
double sector_ground_energy(const TargetHamiltonian& h, const SectorLabel& label);

/// Cyclic shift: the state of site j is carried to site j + 1.
StateVector translation_apply(const StateVector& psi);

enum class Momentum { Zero, Pi, Mixed };

/// From <psi|T|psi>: +1 -> Zero, -1 -> Pi, otherwise Mixed.
Momentum momentum_of(const StateVector& psi, double tol = 1e-6);

std::string to_string(Momentum q);

/// Momentum of the Heisenberg ring ground state: Pi when N/2 is odd.
Momentum marshall_momentum(int n_sites);

enum class SpinNormalization { Pauli, Spin };

/// <sigma^a_i sigma^b_j>, or <S^a_i S^b_j> = that / 4 with Spin.
double correlation(const StateVector& psi, PauliAxis a, int i, PauliAxis b, int j,
                   SpinNormalization norm = SpinNormalization::Pauli);

}  // namespace rydvqe
