#include "rydvqe/ed.hpp"

#include <cmath>

namespace rydvqe {

namespace {

void require_dense_size(const TargetHamiltonian& h) {
    h.validate();
    if (h.n_sites > kMaxDenseSites) {
        throw ValidationError("dense diagonalization supports at most " + std::to_string(kMaxDenseSites) +
                              " sites, got " + std::to_string(h.n_sites));
    }
}

}  // namespace

Eigen::MatrixXd dense_matrix(const TargetHamiltonian& h) {
    require_dense_size(h);
    const std::size_t d = std::size_t{1} << h.n_sites;
    Eigen::MatrixXd m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::uint64_t b = 0; b < d; ++b) {
        const StateVector col = apply_target(StateVector::basis(h.n_sites, b), h);
        for (std::uint64_t a = 0; a < d; ++a) {
            m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = col[a].real();
        }
    }
    return m;
}

GroundStateResult dense_ground_state(const TargetHamiltonian& h) {
    const Eigen::MatrixXd m = dense_matrix(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("dense eigensolver failed to converge");
    }
    const Eigen::VectorXd& w = es.eigenvalues();
    Eigen::VectorXd v = es.eigenvectors().col(0);
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0.0) {
        v = -v;
    }
    std::vector<cplx> amps(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        amps[static_cast<std::size_t>(i)] = v(i);
    }
    GroundStateResult r;
    r.energy = w(0);
    r.vector = StateVector(h.n_sites, std::move(amps));
    r.degeneracy_gap = w.size() > 1 ? w(1) - w(0) : 0.0;
    return r;
}

double sector_ground_energy(const TargetHamiltonian& h, const SectorLabel& label) {
    require_dense_size(h);
    if (h.boundary != Boundary::Periodic) {
        throw ValidationError("symmetry sectors need a periodic target");
    }
    const SymmetrySector s(h.n_sites, label);
    if (s.dim() == 0) {
        throw ValidationError("requested symmetry sector is empty");
    }
    const Eigen::MatrixXd m = s.restrict_dense([&h](const StateVector& psi) { return apply_target(psi, h); });
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("sector eigensolver failed to converge");
    }
    return es.eigenvalues()(0);
}

StateVector translation_apply(const StateVector& psi) {
    const int n = psi.n_qubits();
    StateVector out(n, std::vector<cplx>(psi.dim()));
    for (std::uint64_t b = 0; b < psi.dim(); ++b) {
        out[translate_bits(b, n)] = psi[b];
    }
    return out;
}

Momentum momentum_of(const StateVector& psi, double tol) {
    const cplx t = psi.dot(translation_apply(psi));
    if (std::abs(t - 1.0) <= tol) {
        return Momentum::Zero;
    }
    if (std::abs(t + 1.0) <= tol) {
        return Momentum::Pi;
    }
    return Momentum::Mixed;
}

std::string to_string(Momentum q) {
    switch (q) {
        case Momentum::Zero:
            return "0";
        case Momentum::Pi:
            return "pi";
        case Momentum::Mixed:
            return "mixed";
    }
    return "?";
}

Momentum marshall_momentum(int n_sites) {
    if (n_sites < 2 || n_sites % 2 != 0) {
        throw ValidationError("Marshall momentum is defined for even rings only");
    }
    return (n_sites / 2) % 2 == 1 ? Momentum::Pi : Momentum::Zero;
}

double correlation(const StateVector& psi, PauliAxis a, int i, PauliAxis b, int j, SpinNormalization norm) {
    const int n = psi.n_qubits();
    if (i < 0 || j < 0 || i >= n || j >= n) {
        throw ValidationError("correlation site out of range");
    }
    const double scale = norm == SpinNormalization::Spin ? 0.25 : 1.0;
    if (i == j) {
        if (a != b) {
            throw ValidationError("same-site correlator of different axes is not Hermitian");
        }
        return scale;
    }
    return scale * expectation(psi, PauliString({{i, a}, {j, b}}));
}

}  // namespace rydvqe
