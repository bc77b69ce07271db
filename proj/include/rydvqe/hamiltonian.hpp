#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rydvqe/geometry.hpp"

namespace rydvqe {

using cplx = std::complex<double>;

/// Amplitudes over the 2^N computational basis. Bit j of the basis index is
/// the state of site j: 1 = |r> (spin up), 0 = |g> (spin down).
class StateVector {
public:
    StateVector() = default;
    explicit StateVector(int n_qubits);  // |g...g>
    StateVector(int n_qubits, std::vector<cplx> amplitudes);

    static StateVector basis(int n_qubits, std::uint64_t index);

    int n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return amps_.size(); }

    std::span<cplx> amplitudes() { return amps_; }
    std::span<const cplx> amplitudes() const { return amps_; }
    cplx& operator[](std::size_t i) { return amps_[i]; }
    const cplx& operator[](std::size_t i) const { return amps_[i]; }

    double norm() const;
    cplx dot(const StateVector& other) const;  // <this|other>
    void normalize();

private:
    int n_qubits_ = 0;
    std::vector<cplx> amps_;
};

/// |<a|b>|, the global-phase-insensitive overlap.
double overlap_modulus(const StateVector& a, const StateVector& b);
double distance(const StateVector& a, const StateVector& b);

enum class TargetKind { Xxx, Mfi };
enum class Boundary { Periodic, Open };

/// Nearest-neighbor spin chain on N sites.
///   Xxx: J sum_i S_i . S_{i+1}, S = sigma / 2
///   Mfi: J_I sum_i Z_i Z_{i+1} + sum_i (h_x X_i + h_z Z_i)
/// Periodic boundaries wrap site N back to site 1.
struct TargetHamiltonian {
    TargetKind kind = TargetKind::Xxx;
    int n_sites = 2;
    double j = 1.0;  // J for Xxx, J_I for Mfi
    double h_x = 0.0;
    double h_z = 0.0;
    Boundary boundary = Boundary::Periodic;

    static TargetHamiltonian xxx(int n_sites, double j = 1.0, Boundary b = Boundary::Periodic);
    static TargetHamiltonian mfi(int n_sites, double j_ising, double h_x, double h_z);

    void validate() const;
    std::vector<std::pair<int, int>> bonds() const;
};

/// [sum_{i<j} J_ij n_i n_j - delta sum_j n_j + (omega / 2) sum_j X_j] |psi>.
StateVector apply_drive(const StateVector& psi, double omega, double delta, const Eigen::MatrixXd& jmat);

StateVector apply_target(const StateVector& psi, const TargetHamiltonian& h);

enum class PauliAxis { X, Y, Z };

struct PauliTerm {
    int site = 0;
    PauliAxis axis = PauliAxis::Z;
};

/// Product of single-site Paulis on distinct sites, in the convention
/// X = |g><r| + |r><g|, Y = i|g><r| - i|r><g|, Z = |r><r| - |g><g|.
class PauliString {
public:
    PauliString() = default;
    explicit PauliString(std::vector<PauliTerm> terms);

    const std::vector<PauliTerm>& terms() const { return terms_; }

private:
    std::vector<PauliTerm> terms_;
};

StateVector apply_pauli_string(const StateVector& psi, const PauliString& p, cplx coefficient = 1.0);

/// <psi|H|psi> for a normalized state. Rejects |norm - 1| > 1e-6; the
/// imaginary residue must stay below 1e-10 of the operator scale.
double expectation(const StateVector& psi, const TargetHamiltonian& h);
double expectation(const StateVector& psi, const PauliString& p);

char to_char(PauliAxis a);

}  // namespace rydvqe
