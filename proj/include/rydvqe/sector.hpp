#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rydvqe/hamiltonian.hpp"

namespace rydvqe {

/// Cyclic shift T: the state of site j moves to site j + 1 (mod N).
std::uint64_t translate_bits(std::uint64_t b, int n);

/// Ring reflection j -> -j (mod N).
std::uint64_t reflect_bits(std::uint64_t b, int n);

/// Real sparse matrix in compressed-row form.
struct CsrMatrix {
    std::size_t rows = 0;
    std::vector<std::size_t> row_start;  // rows + 1 entries
    std::vector<std::uint32_t> col;
    std::vector<double> val;

    std::size_t nnz() const { return val.size(); }
};

/// Eigenvalues of T (and optionally of the reflection) labelling a
/// one-dimensional representation of the ring symmetry group.
struct SectorLabel {
    int translation = 1;           // +1 (q = 0) or -1 (q = pi)
    std::optional<int> reflection;  // +1 or -1; nullopt = translation only

    friend bool operator==(const SectorLabel&, const SectorLabel&) = default;
};

/// Orthonormal basis of symmetrized states for one sector of the ring's
/// translation (and optionally reflection) symmetry. Each basis vector is a
/// signed, normalized sum over one orbit of computational basis states, so all
/// operators commuting with the group are block diagonal here and any
/// orbit-invariant diagonal quantity is read off the orbit representative.
class SymmetrySector {
public:
    SymmetrySector(int n_sites, SectorLabel label);

    int n_sites() const { return n_sites_; }
    SectorLabel label() const { return label_; }
    std::size_t dim() const { return reps_.size(); }

    /// Smallest basis index of each orbit.
    const std::vector<std::uint64_t>& representatives() const { return reps_; }

    StateVector embed(std::span<const cplx> coeffs) const;
    std::vector<cplx> project(const StateVector& psi) const;

    /// Matrix of a real operator that commutes with the group, given by its
    /// action on full states.
    CsrMatrix restrict_operator(const std::function<StateVector(const StateVector&)>& op) const;

    /// Dense restriction, for the sector-resolved oracle.
    Eigen::MatrixXd restrict_dense(const std::function<StateVector(const StateVector&)>& op) const;

    /// Label of psi if it is (to `tol`) a simultaneous +-1 eigenstate of T and
    /// the reflection.
    static std::optional<SectorLabel> detect(const StateVector& psi, double tol = 1e-12);

private:
    struct Entry {
        std::uint64_t state;
        double coeff;
    };

    int n_sites_;
    SectorLabel label_;
    std::vector<std::uint64_t> reps_;
    std::vector<std::vector<Entry>> support_;
    std::vector<std::int32_t> orbit_of_;   // basis state -> sector index or -1
    std::vector<double> rep_coeff_;
};

/// Sum_j X_j restricted to a sector (the drive's only off-diagonal part).
CsrMatrix restricted_flip_sum(const SymmetrySector& s);

}  // namespace rydvqe
