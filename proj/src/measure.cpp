#include "rydvqe/measure.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace rydvqe {

namespace {

void require_even(int n, const char* what) {
    if (n < 2 || n % 2 != 0) {
        throw ValidationError(std::string(what) + " needs an even number of sites >= 2");
    }
}

void require_site(const StateVector& psi, int site) {
    if (site < 0 || site >= psi.n_qubits()) {
        throw ValidationError("site " + std::to_string(site) + " out of range");
    }
}

std::uint64_t even_site_mask(int n) {
    std::uint64_t m = 0;
    for (int j = 0; j < n; j += 2) {
        m |= std::uint64_t{1} << j;
    }
    return m;
}

// u = [[a, b], [c, d]] acting on (|g>, |r>) amplitudes of one site.
void apply_one_site(StateVector& psi, int site, cplx a, cplx b, cplx c, cplx d) {
    const std::uint64_t bit = std::uint64_t{1} << site;
    for (std::uint64_t s = 0; s < psi.dim(); ++s) {
        if (s & bit) {
            continue;
        }
        const cplx g = psi[s];
        const cplx r = psi[s | bit];
        psi[s] = a * g + b * r;
        psi[s | bit] = c * g + d * r;
    }
}

double bond_parity_sum(std::uint64_t b, const std::vector<std::pair<int, int>>& bonds) {
    double v = 0.0;
    for (const auto& [i, j] : bonds) {
        v += ((b >> i) & 1U) == ((b >> j) & 1U) ? 1.0 : -1.0;
    }
    return v;
}

void require_xxx(const StateVector& psi, const TargetHamiltonian& h) {
    if (h.kind != TargetKind::Xxx) {
        throw ValidationError("the three-setting estimator applies to the Heisenberg target");
    }
    if (psi.n_qubits() != h.n_sites) {
        throw ValidationError("state size does not match the target");
    }
    const double n = psi.norm();
    if (std::abs(n - 1.0) > 1e-6) {
        throw ValidationError("estimator requires a normalized state");
    }
}

constexpr MeasurementBasis kSettings[] = {MeasurementBasis::Z, MeasurementBasis::X, MeasurementBasis::Y};

}  // namespace

StateVector prepare_q_pi(int n_sites) {
    require_even(n_sites, "the q = pi state");
    StateVector psi(n_sites, std::vector<cplx>(std::size_t{1} << n_sites));
    const std::uint64_t a = even_site_mask(n_sites);
    const std::uint64_t b = ~a & ((std::uint64_t{1} << n_sites) - 1);
    psi[a] = std::numbers::sqrt2 / 2.0;
    psi[b] = -std::numbers::sqrt2 / 2.0;
    return psi;
}

void apply_hadamard(StateVector& psi, int site) {
    require_site(psi, site);
    const double s = std::numbers::sqrt2 / 2.0;
    apply_one_site(psi, site, -s, s, s, s);
}

void apply_cnot(StateVector& psi, int control, int target) {
    require_site(psi, control);
    require_site(psi, target);
    if (control == target) {
        throw ValidationError("CNOT control and target must differ");
    }
    const std::uint64_t cb = std::uint64_t{1} << control;
    const std::uint64_t tb = std::uint64_t{1} << target;
    for (std::uint64_t s = 0; s < psi.dim(); ++s) {
        if (!(s & cb) && !(s & tb)) {
            std::swap(psi[s], psi[s | tb]);
        }
    }
}

std::vector<CnotGate> ghz_cnots(int n_sites, GhzLayout layout) {
    if (n_sites < 1) {
        throw ValidationError("GHZ circuit needs at least one site");
    }
    std::vector<CnotGate> out;
    if (layout == GhzLayout::Chain) {
        for (int j = 0; j + 1 < n_sites; ++j) {
            out.push_back({j, j + 1, j + 1});
        }
        return out;
    }
    // Every site already in the GHZ block drives one fresh site of the other
    // parity, so the block doubles each layer.
    std::vector<bool> used(n_sites, false);
    std::vector<int> active{0};
    used[0] = true;
    for (int layer = 1; static_cast<int>(active.size()) < n_sites; ++layer) {
        std::vector<int> fresh;
        for (int c : active) {
            for (int t = 0; t < n_sites; ++t) {
                if (!used[t] && (t - c) % 2 != 0) {
                    used[t] = true;
                    out.push_back({c, t, layer});
                    fresh.push_back(t);
                    break;
                }
            }
        }
        if (fresh.empty()) {
            break;
        }
        active.insert(active.end(), fresh.begin(), fresh.end());
        std::sort(active.begin(), active.end());
    }
    return out;
}

StateVector ghz_circuit_state(int n_sites, GhzLayout layout) {
    if (n_sites < 2) {
        throw ValidationError("GHZ circuit needs at least two sites");
    }
    StateVector psi(n_sites);
    apply_hadamard(psi, 0);
    for (const auto& g : ghz_cnots(n_sites, layout)) {
        apply_cnot(psi, g.control, g.target);
    }
    return psi;
}

StateVector apply_u_flip(const StateVector& psi, double theta) {
    std::vector<PauliTerm> terms{{0, PauliAxis::Y}};
    for (int j = 1; j < psi.n_qubits(); ++j) {
        terms.push_back({j, PauliAxis::X});
    }
    // The string squares to one, so exp(-i a P) = cos a - i sin a P.
    const StateVector p = apply_pauli_string(psi, PauliString(terms), cplx{0.0, -std::sin(0.5 * theta)});
    StateVector out = psi;
    const double c = std::cos(0.5 * theta);
    for (std::size_t i = 0; i < out.dim(); ++i) {
        out[i] = c * psi[i] + p[i];
    }
    return out;
}

StateVector u_flip_state(int n_sites) {
    require_even(n_sites, "the U_flip preparation");
    std::uint64_t odd = 0;
    for (int j = 1; j < n_sites; j += 2) {
        odd |= std::uint64_t{1} << j;
    }
    return apply_u_flip(StateVector::basis(n_sites, odd), std::numbers::pi / 2.0);
}

StateVector global_rotation(const StateVector& psi, RotationAxis axis, double theta) {
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    StateVector out = psi;
    for (int j = 0; j < psi.n_qubits(); ++j) {
        if (axis == RotationAxis::X) {
            apply_one_site(out, j, c, cplx{0.0, -s}, cplx{0.0, -s}, c);
        } else {
            // Y|g> = -i|r>, Y|r> = i|g>
            apply_one_site(out, j, c, s, -s, c);
        }
    }
    return out;
}

std::string to_bitstring(std::uint64_t b, int n) {
    std::string s(static_cast<std::size_t>(n), '0');
    for (int j = 0; j < n; ++j) {
        if ((b >> j) & 1U) {
            s[static_cast<std::size_t>(j)] = '1';
        }
    }
    return s;
}

ShotTable sample_bitstrings(const StateVector& psi, std::uint64_t shots, Rng& rng) {
    if (shots == 0) {
        throw ValidationError("shots must be at least 1");
    }
    if (std::abs(psi.norm() - 1.0) > 1e-6) {
        throw ValidationError("sampling requires a normalized state");
    }
    std::vector<double> cdf(psi.dim());
    double acc = 0.0;
    for (std::size_t i = 0; i < psi.dim(); ++i) {
        acc += std::norm(psi[i]);
        cdf[i] = acc;
    }
    ShotTable t;
    t.n_qubits = psi.n_qubits();
    t.shots = shots;
    for (std::uint64_t k = 0; k < shots; ++k) {
        const double u = rng.uniform() * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) {
            --it;
        }
        // Skip zero-probability entries that share the same cumulative value.
        std::size_t idx = static_cast<std::size_t>(it - cdf.begin());
        while (idx > 0 && std::norm(psi[idx]) == 0.0) {
            --idx;
        }
        ++t.histogram[idx];
    }
    return t;
}

StateVector rotate_for_basis(const StateVector& psi, MeasurementBasis basis, double angle) {
    switch (basis) {
        case MeasurementBasis::Z:
            return psi;
        case MeasurementBasis::X:
            return global_rotation(psi, RotationAxis::Y, angle);
        case MeasurementBasis::Y:
            return global_rotation(psi, RotationAxis::X, angle);
    }
    return psi;
}

EnergyEstimate estimate_heisenberg_energy(const StateVector& psi, const TargetHamiltonian& h,
                                          std::uint64_t shots_per_basis, Rng& rng) {
    require_xxx(psi, h);
    if (shots_per_basis == 0) {
        throw ValidationError("shots_per_basis must be at least 1");
    }
    const auto bonds = h.bonds();
    EnergyEstimate est;
    est.shots_per_basis = shots_per_basis;
    double var_total = 0.0;
    for (const auto basis : kSettings) {
        const ShotTable t = sample_bitstrings(rotate_for_basis(psi, basis), shots_per_basis, rng);
        BasisEstimate be;
        be.basis = basis;
        be.bond_correlators.assign(bonds.size(), 0.0);
        double sum = 0.0;
        double sum2 = 0.0;
        for (const auto& [b, count] : t.histogram) {
            const auto w = static_cast<double>(count);
            const double v = bond_parity_sum(b, bonds);
            sum += w * v;
            sum2 += w * v * v;
            for (std::size_t k = 0; k < bonds.size(); ++k) {
                const auto [i, j] = bonds[k];
                be.bond_correlators[k] += w * (((b >> i) & 1U) == ((b >> j) & 1U) ? 1.0 : -1.0);
            }
        }
        const auto n = static_cast<double>(shots_per_basis);
        for (auto& c : be.bond_correlators) {
            c /= n;
        }
        be.bond_sum = sum / n;
        const double sample_var = n > 1 ? std::max(0.0, (sum2 - n * be.bond_sum * be.bond_sum) / (n - 1.0)) : 0.0;
        be.bond_sum_variance = sample_var / n;
        var_total += be.bond_sum_variance;
        est.energy += 0.25 * h.j * be.bond_sum;
        est.settings.push_back(std::move(be));
    }
    est.stderr = 0.25 * h.j * std::sqrt(var_total);
    return est;
}

EnergyEstimate estimate_heisenberg_energy_exact(const StateVector& psi, const TargetHamiltonian& h) {
    require_xxx(psi, h);
    const auto bonds = h.bonds();
    EnergyEstimate est;
    for (const auto basis : kSettings) {
        const StateVector r = rotate_for_basis(psi, basis);
        BasisEstimate be;
        be.basis = basis;
        be.bond_correlators.assign(bonds.size(), 0.0);
        for (std::uint64_t b = 0; b < r.dim(); ++b) {
            const double p = std::norm(r[b]);
            if (p == 0.0) {
                continue;
            }
            for (std::size_t k = 0; k < bonds.size(); ++k) {
                const auto [i, j] = bonds[k];
                be.bond_correlators[k] += p * (((b >> i) & 1U) == ((b >> j) & 1U) ? 1.0 : -1.0);
            }
        }
        for (const double c : be.bond_correlators) {
            be.bond_sum += c;
        }
        est.energy += 0.25 * h.j * be.bond_sum;
        est.settings.push_back(std::move(be));
    }
    return est;
}

}  // namespace rydvqe
