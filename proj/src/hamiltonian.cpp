#include "rydvqe/hamiltonian.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rydvqe {

namespace {

constexpr double kNormTolerance = 1e-6;
constexpr double kImagTolerance = 1e-10;

void require_normalized(const StateVector& psi) {
    const double n = psi.norm();
    if (std::abs(n - 1.0) > kNormTolerance) {
        throw ValidationError("expectation requires a normalized state (norm = " + std::to_string(n) + ")");
    }
}

double real_part_checked(cplx v, double scale) {
    if (std::abs(v.imag()) > kImagTolerance * std::max(1.0, scale)) {
        throw std::logic_error("expectation value has imaginary residue " + std::to_string(v.imag()));
    }
    return v.real();
}

inline bool bit(std::uint64_t b, int j) {
    return (b >> j) & 1U;
}

}  // namespace

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits), amps_(std::size_t{1} << n_qubits) {
    if (n_qubits < 1 || n_qubits > 30) {
        throw ValidationError("n_qubits must be in [1, 30]");
    }
    amps_[0] = 1.0;
}

StateVector::StateVector(int n_qubits, std::vector<cplx> amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
    if (n_qubits < 1 || n_qubits > 30 || amps_.size() != (std::size_t{1} << n_qubits)) {
        throw ValidationError("amplitude count does not match 2^n_qubits");
    }
}

StateVector StateVector::basis(int n_qubits, std::uint64_t index) {
    StateVector s(n_qubits);
    if (index >= s.dim()) {
        throw ValidationError("basis index out of range");
    }
    s.amps_[0] = 0.0;
    s.amps_[index] = 1.0;
    return s;
}

double StateVector::norm() const {
    double s = 0.0;
    for (const auto& a : amps_) {
        s += std::norm(a);
    }
    return std::sqrt(s);
}

cplx StateVector::dot(const StateVector& other) const {
    if (other.dim() != dim()) {
        throw ValidationError("state dimension mismatch");
    }
    cplx s = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        s += std::conj(amps_[i]) * other.amps_[i];
    }
    return s;
}

void StateVector::normalize() {
    const double n = norm();
    if (!(n > 0.0)) {
        throw ValidationError("cannot normalize the zero vector");
    }
    for (auto& a : amps_) {
        a /= n;
    }
}

double overlap_modulus(const StateVector& a, const StateVector& b) {
    return std::abs(a.dot(b));
}

double distance(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) {
        throw ValidationError("state dimension mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        s += std::norm(a[i] - b[i]);
    }
    return std::sqrt(s);
}

TargetHamiltonian TargetHamiltonian::xxx(int n_sites, double j, Boundary b) {
    TargetHamiltonian h;
    h.kind = TargetKind::Xxx;
    h.n_sites = n_sites;
    h.j = j;
    h.boundary = b;
    h.validate();
    return h;
}

TargetHamiltonian TargetHamiltonian::mfi(int n_sites, double j_ising, double h_x, double h_z) {
    TargetHamiltonian h;
    h.kind = TargetKind::Mfi;
    h.n_sites = n_sites;
    h.j = j_ising;
    h.h_x = h_x;
    h.h_z = h_z;
    h.validate();
    return h;
}

void TargetHamiltonian::validate() const {
    if (n_sites < 2 || n_sites > 30) {
        throw ValidationError("target.n_sites must be in [2, 30]");
    }
    if (n_sites == 2 && boundary == Boundary::Periodic) {
        throw ValidationError("a periodic two-site ring repeats its only bond; use boundary \"open\"");
    }
    if (!(j > 0.0)) {
        throw ValidationError(kind == TargetKind::Xxx ? "target.J must be positive" : "target.J_I must be positive");
    }
}

std::vector<std::pair<int, int>> TargetHamiltonian::bonds() const {
    std::vector<std::pair<int, int>> out;
    const int last = boundary == Boundary::Periodic ? n_sites : n_sites - 1;
    for (int i = 0; i < last; ++i) {
        out.emplace_back(i, (i + 1) % n_sites);
    }
    return out;
}

StateVector apply_drive(const StateVector& psi, double omega, double delta, const Eigen::MatrixXd& jmat) {
    const int n = psi.n_qubits();
    if (jmat.rows() != n || jmat.cols() != n) {
        throw ValidationError("interaction matrix is " + std::to_string(jmat.rows()) + "x" +
                              std::to_string(jmat.cols()) + " for " + std::to_string(n) + " qubits");
    }
    StateVector out(n, std::vector<cplx>(psi.dim()));
    const double half_omega = 0.5 * omega;
    for (std::uint64_t b = 0; b < psi.dim(); ++b) {
        double diag = -delta * std::popcount(b);
        for (int i = 0; i < n; ++i) {
            if (!bit(b, i)) {
                continue;
            }
            for (int j = i + 1; j < n; ++j) {
                if (bit(b, j)) {
                    diag += jmat(i, j);
                }
            }
        }
        cplx acc = diag * psi[b];
        for (int j = 0; j < n; ++j) {
            acc += half_omega * psi[b ^ (std::uint64_t{1} << j)];
        }
        out[b] = acc;
    }
    return out;
}

StateVector apply_target(const StateVector& psi, const TargetHamiltonian& h) {
    if (psi.n_qubits() != h.n_sites) {
        throw ValidationError("state has " + std::to_string(psi.n_qubits()) + " qubits but target has " +
                              std::to_string(h.n_sites) + " sites");
    }
    const auto bonds = h.bonds();
    StateVector out(psi.n_qubits(), std::vector<cplx>(psi.dim()));
    if (h.kind == TargetKind::Xxx) {
        // S_i . S_j = (Z_i Z_j + 2 (s+_i s-_j + s-_i s+_j)) / 4
        const double q = 0.25 * h.j;
        for (std::uint64_t b = 0; b < psi.dim(); ++b) {
            const cplx a = psi[b];
            if (a == cplx{}) {
                continue;
            }
            double diag = 0.0;
            for (const auto& [i, j] : bonds) {
                if (bit(b, i) == bit(b, j)) {
                    diag += q;
                } else {
                    diag -= q;
                    out[b ^ ((std::uint64_t{1} << i) | (std::uint64_t{1} << j))] += 2.0 * q * a;
                }
            }
            out[b] += diag * a;
        }
    } else {
        for (std::uint64_t b = 0; b < psi.dim(); ++b) {
            const cplx a = psi[b];
            if (a == cplx{}) {
                continue;
            }
            double diag = 0.0;
            for (const auto& [i, j] : bonds) {
                diag += bit(b, i) == bit(b, j) ? h.j : -h.j;
            }
            for (int i = 0; i < h.n_sites; ++i) {
                diag += bit(b, i) ? h.h_z : -h.h_z;
                out[b ^ (std::uint64_t{1} << i)] += h.h_x * a;
            }
            out[b] += diag * a;
        }
    }
    return out;
}

PauliString::PauliString(std::vector<PauliTerm> terms) : terms_(std::move(terms)) {
    for (std::size_t a = 0; a < terms_.size(); ++a) {
        if (terms_[a].site < 0) {
            throw ValidationError("Pauli string site out of range");
        }
        for (std::size_t b = a + 1; b < terms_.size(); ++b) {
            if (terms_[a].site == terms_[b].site) {
                throw ValidationError("Pauli string repeats site " + std::to_string(terms_[a].site));
            }
        }
    }
}

StateVector apply_pauli_string(const StateVector& psi, const PauliString& p, cplx coefficient) {
    std::uint64_t flip = 0;
    for (const auto& t : p.terms()) {
        if (t.site >= psi.n_qubits()) {
            throw ValidationError("Pauli string site " + std::to_string(t.site) + " out of range");
        }
        if (t.axis != PauliAxis::Z) {
            flip |= std::uint64_t{1} << t.site;
        }
    }
    StateVector out(psi.n_qubits(), std::vector<cplx>(psi.dim()));
    const cplx i_unit{0.0, 1.0};
    for (std::uint64_t b = 0; b < psi.dim(); ++b) {
        cplx f = coefficient;
        for (const auto& t : p.terms()) {
            const bool up = bit(b, t.site);
            switch (t.axis) {
                case PauliAxis::X:
                    break;
                case PauliAxis::Y:
                    f *= up ? i_unit : -i_unit;  // Y|r> = i|g>, Y|g> = -i|r>
                    break;
                case PauliAxis::Z:
                    if (!up) {
                        f = -f;
                    }
                    break;
            }
        }
        out[b ^ flip] = f * psi[b];
    }
    return out;
}

double expectation(const StateVector& psi, const TargetHamiltonian& h) {
    require_normalized(psi);
    const double scale = h.n_sites * (std::abs(h.j) + std::abs(h.h_x) + std::abs(h.h_z));
    return real_part_checked(psi.dot(apply_target(psi, h)), scale);
}

double expectation(const StateVector& psi, const PauliString& p) {
    require_normalized(psi);
    return real_part_checked(psi.dot(apply_pauli_string(psi, p)), 1.0);
}

char to_char(PauliAxis a) {
    switch (a) {
        case PauliAxis::X:
            return 'X';
        case PauliAxis::Y:
            return 'Y';
        case PauliAxis::Z:
            return 'Z';
    }
    return '?';
}

}  // namespace rydvqe
