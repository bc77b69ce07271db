#include "rydvqe/sector.hpp"

#include <cmath>
#include <map>

namespace rydvqe {

std::uint64_t translate_bits(std::uint64_t b, int n) {
    const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
    return ((b << 1) | (b >> (n - 1))) & mask;
}

std::uint64_t reflect_bits(std::uint64_t b, int n) {
    std::uint64_t out = 0;
    for (int j = 0; j < n; ++j) {
        if ((b >> j) & 1U) {
            out |= std::uint64_t{1} << ((n - j) % n);
        }
    }
    return out;
}

SymmetrySector::SymmetrySector(int n_sites, SectorLabel label) : n_sites_(n_sites), label_(label) {
    if (n_sites < 2 || n_sites > 24) {
        throw ValidationError("symmetry sector needs 2 <= n_sites <= 24");
    }
    if (std::abs(label.translation) != 1 || (label.reflection && std::abs(*label.reflection) != 1)) {
        throw ValidationError("sector eigenvalues must be +1 or -1");
    }
    // T^N = 1, so a translation eigenvalue of -1 needs even N.
    if (label.translation == -1 && n_sites % 2 != 0) {
        throw ValidationError("translation eigenvalue -1 requires an even number of sites");
    }
    const std::uint64_t dim_full = std::uint64_t{1} << n_sites;
    orbit_of_.assign(dim_full, -1);
    std::vector<bool> seen(dim_full, false);

    for (std::uint64_t a = 0; a < dim_full; ++a) {
        if (seen[a]) {
            continue;
        }
        // Sum chi(g) g|a> over g = T^m R^e.
        std::map<std::uint64_t, double> acc;
        const int reflections = label.reflection ? 2 : 1;
        for (int e = 0; e < reflections; ++e) {
            std::uint64_t s = e == 0 ? a : reflect_bits(a, n_sites);
            double chi = e == 0 ? 1.0 : static_cast<double>(*label.reflection);
            for (int m = 0; m < n_sites; ++m) {
                acc[s] += chi;
                seen[s] = true;
                s = translate_bits(s, n_sites);
                chi *= label.translation;
            }
        }
        double norm2 = 0.0;
        for (const auto& [s, c] : acc) {
            norm2 += c * c;
        }
        if (norm2 < 0.5) {
            continue;  // orbit carries no state in this sector
        }
        const double inv = 1.0 / std::sqrt(norm2);
        std::vector<Entry> support;
        for (const auto& [s, c] : acc) {
            if (c != 0.0) {
                support.push_back({s, c * inv});
                orbit_of_[s] = static_cast<std::int32_t>(reps_.size());
            }
        }
        reps_.push_back(a);
        rep_coeff_.push_back(acc.at(a) * inv);
        support_.push_back(std::move(support));
    }
}

StateVector SymmetrySector::embed(std::span<const cplx> coeffs) const {
    if (coeffs.size() != dim()) {
        throw ValidationError("sector coefficient count mismatch");
    }
    StateVector out(n_sites_, std::vector<cplx>(std::size_t{1} << n_sites_));
    for (std::size_t a = 0; a < dim(); ++a) {
        for (const auto& e : support_[a]) {
            out[e.state] += e.coeff * coeffs[a];
        }
    }
    return out;
}

std::vector<cplx> SymmetrySector::project(const StateVector& psi) const {
    if (psi.n_qubits() != n_sites_) {
        throw ValidationError("sector projection size mismatch");
    }
    std::vector<cplx> out(dim());
    for (std::size_t a = 0; a < dim(); ++a) {
        cplx s = 0.0;
        for (const auto& e : support_[a]) {
            s += e.coeff * psi[e.state];
        }
        out[a] = s;
    }
    return out;
}

CsrMatrix SymmetrySector::restrict_operator(const std::function<StateVector(const StateVector&)>& op) const {
    CsrMatrix m;
    m.rows = dim();
    m.row_start.assign(dim() + 1, 0);
    // Build column by column, then transpose into rows; operators used here
    // are symmetric but the transpose keeps this correct in general.
    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(dim());
    std::vector<cplx> unit(dim());
    for (std::size_t b = 0; b < dim(); ++b) {
        unit.assign(dim(), 0.0);
        unit[b] = 1.0;
        const StateVector image = op(embed(unit));
        std::map<std::uint32_t, double> column;
        for (std::uint64_t s = 0; s < image.dim(); ++s) {
            if (image[s] == cplx{}) {
                continue;
            }
            const auto a = orbit_of_[s];
            if (a < 0) {
                throw std::logic_error("operator leaves the symmetry sector");
            }
            if (reps_[static_cast<std::size_t>(a)] == s) {
                column[static_cast<std::uint32_t>(a)] = image[s].real() / rep_coeff_[static_cast<std::size_t>(a)];
            }
        }
        for (const auto& [a, v] : column) {
            rows[a].emplace_back(static_cast<std::uint32_t>(b), v);
        }
    }
    for (std::size_t a = 0; a < dim(); ++a) {
        m.row_start[a + 1] = m.row_start[a] + rows[a].size();
        for (const auto& [c, v] : rows[a]) {
            m.col.push_back(c);
            m.val.push_back(v);
        }
    }
    return m;
}

Eigen::MatrixXd SymmetrySector::restrict_dense(const std::function<StateVector(const StateVector&)>& op) const {
    const CsrMatrix m = restrict_operator(op);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(dim()));
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t k = m.row_start[r]; k < m.row_start[r + 1]; ++k) {
            d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(m.col[k])) = m.val[k];
        }
    }
    return d;
}

std::optional<SectorLabel> SymmetrySector::detect(const StateVector& psi, double tol) {
    const int n = psi.n_qubits();
    if (n < 2) {
        return std::nullopt;
    }
    auto eigen_sign = [&](auto map) -> std::optional<int> {
        for (int sign : {1, -1}) {
            double err = 0.0;
            for (std::uint64_t b = 0; b < psi.dim(); ++b) {
                err += std::norm(psi[map(b)] - static_cast<double>(sign) * psi[b]);
            }
            if (std::sqrt(err) <= tol) {
                return sign;
            }
        }
        return std::nullopt;
    };
    // (T psi)[T b] = psi[b]; compare psi[T b] against sign * psi[b].
    const auto t = eigen_sign([n](std::uint64_t b) { return translate_bits(b, n); });
    if (!t) {
        return std::nullopt;
    }
    const auto r = eigen_sign([n](std::uint64_t b) { return reflect_bits(b, n); });
    return SectorLabel{*t, r};
}

CsrMatrix restricted_flip_sum(const SymmetrySector& s) {
    const int n = s.n_sites();
    return s.restrict_operator([n](const StateVector& psi) {
        StateVector out(n, std::vector<cplx>(psi.dim()));
        for (std::uint64_t b = 0; b < psi.dim(); ++b) {
            cplx acc = 0.0;
            for (int j = 0; j < n; ++j) {
                acc += psi[b ^ (std::uint64_t{1} << j)];
            }
            out[b] = acc;
        }
        return out;
    });
}

}  // namespace rydvqe
